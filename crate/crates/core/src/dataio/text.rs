//! Dense CSV and sparse LIBSVM readers and writers.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::dataset::LabeledDataset;
use crate::error::{NssError, Result};
use crate::linalg::Matrix;

/// Which CSV column holds the label.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum LabelColumn {
    /// The header column named `label`; the last column when there is no header.
    #[default]
    Auto,
    /// Zero-based column index.
    Index(usize),
    /// No label column: every column is a feature.
    None,
}

/// Parsed CSV contents before labels are mapped to classes.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub features: Matrix,
    pub labels: Option<Vec<i64>>,
    pub header: Option<Vec<String>>,
}

fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| NssError::io(path, e))
}

fn write_string(path: &Path, contents: &str) -> Result<()> {
    let mut f = fs::File::create(path).map_err(|e| NssError::io(path, e))?;
    f.write_all(contents.as_bytes())
        .map_err(|e| NssError::io(path, e))
}

fn parse_error(line: usize, column: usize, message: impl Into<String>) -> NssError {
    NssError::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Parses an integer label, accepting integral floats such as `2.0`.
pub fn parse_label(token: &str, line: usize, column: usize) -> Result<i64> {
    if let Ok(v) = token.parse::<i64>() {
        return Ok(v);
    }
    match token.parse::<f64>() {
        Ok(v) if v.is_finite() && v.fract() == 0.0 && v.abs() < 9.0e15 => Ok(v as i64),
        _ => Err(parse_error(
            line,
            column,
            format!("invalid label {token:?}"),
        )),
    }
}

fn parse_value(token: &str, line: usize, column: usize) -> Result<f64> {
    match token.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(parse_error(
            line,
            column,
            format!("invalid number {token:?}"),
        )),
    }
}

/// Parses comma-separated numeric text. Line and column numbers in errors
/// are 1-based.
pub fn parse_csv(text: &str, label: &LabelColumn) -> Result<CsvTable> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty())
        .peekable();

    let mut header = None;
    if let Some(&(_, first)) = lines.peek() {
        let fields: Vec<&str> = first.split(',').map(str::trim).collect();
        if fields.iter().any(|f| f.parse::<f64>().is_err()) {
            header = Some(fields.iter().map(|s| s.to_string()).collect::<Vec<_>>());
            lines.next();
        }
    }

    let mut width = header.as_ref().map(Vec::len);
    let mut rows: Vec<(usize, Vec<&str>)> = Vec::new();
    for (line_no, line) in lines {
        let fields: Vec<&str> = line.split(',').collect();
        match width {
            Some(w) if w != fields.len() => {
                return Err(NssError::RaggedRows {
                    line: line_no,
                    expected: w,
                    found: fields.len(),
                })
            }
            None => width = Some(fields.len()),
            _ => {}
        }
        rows.push((line_no, fields));
    }
    let width = width.unwrap_or(0);

    let label_idx =
        match label {
            LabelColumn::None => None,
            LabelColumn::Index(i) => {
                if *i >= width {
                    return Err(NssError::InvalidConfig(format!(
                        "label column {i} out of range for {width} columns"
                    )));
                }
                Some(*i)
            }
            LabelColumn::Auto => match &header {
                Some(h) => Some(h.iter().position(|c| c == "label").ok_or_else(|| {
                    NssError::InvalidConfig("header has no `label` column".into())
                })?),
                None => width.checked_sub(1),
            },
        };
    let n_features = width - usize::from(label_idx.is_some());
    if rows.is_empty() || n_features == 0 {
        return Err(NssError::Parse {
            line: 1,
            column: 1,
            message: "no numeric data".into(),
        });
    }

    let mut data = Vec::with_capacity(rows.len() * n_features);
    let mut labels = label_idx.map(|_| Vec::with_capacity(rows.len()));
    for (line_no, fields) in &rows {
        for (c, tok) in fields.iter().enumerate() {
            if Some(c) == label_idx {
                let l = parse_label(tok.trim(), *line_no, c + 1)?;
                labels.as_mut().expect("label column").push(l);
            } else {
                data.push(parse_value(tok, *line_no, c + 1)?);
            }
        }
    }
    let header = header.map(|h| {
        h.into_iter()
            .enumerate()
            .filter(|(i, _)| Some(*i) != label_idx)
            .map(|(_, s)| s)
            .collect()
    });
    Ok(CsvTable {
        features: Matrix::new(rows.len(), n_features, data)?,
        labels,
        header,
    })
}

pub fn parse_labeled_csv(text: &str, label: &LabelColumn) -> Result<LabeledDataset> {
    if *label == LabelColumn::None {
        return Err(NssError::InvalidConfig(
            "a labeled dataset needs a label column".into(),
        ));
    }
    let table = parse_csv(text, label)?;
    let labels = table.labels.expect("label column requested");
    LabeledDataset::from_raw_labels(table.features, &labels)
}

pub fn read_csv(path: impl AsRef<Path>, label: &LabelColumn) -> Result<LabeledDataset> {
    parse_labeled_csv(&read_to_string(path.as_ref())?, label)
}

pub fn read_csv_table(path: impl AsRef<Path>, label: &LabelColumn) -> Result<CsvTable> {
    parse_csv(&read_to_string(path.as_ref())?, label)
}

/// Header `x1,…,xD,label`, then one row per sample with the original label
/// values. Numbers use the shortest representation that parses back to the
/// identical `f64`.
pub fn format_csv(data: &LabeledDataset) -> String {
    let dim = data.dim();
    let mut out = String::with_capacity(data.len() * dim * 12);
    for j in 1..=dim {
        out.push_str(&format!("x{j},"));
    }
    out.push_str("label\n");
    for i in 0..data.len() {
        for v in data.row(i) {
            out.push_str(&format!("{v},"));
        }
        out.push_str(&format!("{}\n", data.label_name(data.labels()[i])));
    }
    out
}

pub fn write_csv(data: &LabeledDataset, path: impl AsRef<Path>) -> Result<()> {
    write_string(path.as_ref(), &format_csv(data))
}

/// Parses `label idx:val idx:val …` lines with 1-based, strictly ascending
/// indices. `dim` fixes the feature count; by default it is the largest
/// index seen.
pub fn parse_libsvm(text: &str, dim: Option<usize>) -> Result<LabeledDataset> {
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut labels = Vec::new();
    let mut max_index = 0;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let label_tok = tokens.next().expect("non-empty line");
        labels.push(parse_label(label_tok, line_no, 1)?);
        let mut entries = Vec::new();
        let mut last = 0;
        for (t, tok) in tokens.enumerate() {
            let column = t + 2;
            let (idx, val) = tok.split_once(':').ok_or_else(|| {
                parse_error(line_no, column, format!("expected idx:val, got {tok:?}"))
            })?;
            let idx: usize = idx
                .parse()
                .map_err(|_| parse_error(line_no, column, format!("invalid index {idx:?}")))?;
            if idx == 0 {
                return Err(parse_error(line_no, column, "feature indices are 1-based"));
            }
            if idx <= last {
                return Err(NssError::NonAscendingIndex { line: line_no });
            }
            if let Some(d) = dim {
                if idx > d {
                    return Err(parse_error(
                        line_no,
                        column,
                        format!("index {idx} exceeds declared dimension {d}"),
                    ));
                }
            }
            last = idx;
            entries.push((idx, parse_value(val, line_no, column)?));
        }
        max_index = max_index.max(last);
        rows.push(entries);
    }
    let dim = dim.unwrap_or(max_index).max(1);
    let mut data = vec![0.0; rows.len() * dim];
    for (r, entries) in rows.iter().enumerate() {
        for &(idx, v) in entries {
            data[r * dim + idx - 1] = v;
        }
    }
    if rows.is_empty() {
        return Err(parse_error(1, 1, "no samples"));
    }
    LabeledDataset::from_raw_labels(Matrix::new(rows.len(), dim, data)?, &labels)
}

pub fn read_libsvm(path: impl AsRef<Path>, dim: Option<usize>) -> Result<LabeledDataset> {
    parse_libsvm(&read_to_string(path.as_ref())?, dim)
}

/// Sparse text with zero entries omitted (`-0` is kept, so a dense round
/// trip is bit-exact).
pub fn format_libsvm(data: &LabeledDataset) -> String {
    let mut out = String::new();
    for i in 0..data.len() {
        out.push_str(&data.label_name(data.labels()[i]).to_string());
        for (j, v) in data.row(i).iter().enumerate() {
            if *v != 0.0 || v.is_sign_negative() {
                out.push_str(&format!(" {}:{v}", j + 1));
            }
        }
        out.push('\n');
    }
    out
}

pub fn write_libsvm(data: &LabeledDataset, path: impl AsRef<Path>) -> Result<()> {
    write_string(path.as_ref(), &format_libsvm(data))
}

/// `key=value` lines; blank lines and `#` comments are skipped.
pub fn parse_metadata(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| parse_error(i + 1, 1, "expected key=value"))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

pub fn format_metadata(entries: &[(String, String)]) -> String {
    let mut out = String::from("# generator parameters\n");
    for (k, v) in entries {
        out.push_str(&format!("{k}={v}\n"));
    }
    out
}

pub fn read_metadata(path: impl AsRef<Path>) -> Result<Vec<(String, String)>> {
    parse_metadata(&read_to_string(path.as_ref())?)
}

pub fn write_metadata(entries: &[(String, String)], path: impl AsRef<Path>) -> Result<()> {
    write_string(path.as_ref(), &format_metadata(entries))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_label_last_without_header() {
        let d = parse_labeled_csv("1.0,2.0,1\n3.0,4.0,2\n", &LabelColumn::Auto).unwrap();
        assert_eq!(d.samples().as_slice(), &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(d.labels(), &[1, 2]);
    }

    #[test]
    fn csv_header_label_anywhere() {
        let d = parse_labeled_csv("label,a,b\n3,0.5,1\n7,2,3\n", &LabelColumn::Auto).unwrap();
        assert_eq!(d.samples().as_slice(), &[0.5, 1.0, 2.0, 3.0]);
        assert_eq!(d.label_names(), &[3, 7]);
    }

    #[test]
    fn csv_non_numeric_cell_reports_position() {
        let err =
            parse_labeled_csv("1.0,2.0,1\n3.0,4.0,abc\n", &LabelColumn::Index(0)).unwrap_err();
        match err {
            NssError::Parse { line, column, .. } => assert_eq!((line, column), (2, 3)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn csv_ragged() {
        let err = parse_labeled_csv("1,2,1\n3,1\n", &LabelColumn::Auto).unwrap_err();
        assert!(matches!(
            err,
            NssError::RaggedRows {
                line: 2,
                expected: 3,
                found: 2
            }
        ));
    }

    #[test]
    fn libsvm_examples() {
        let d = parse_libsvm("2 1:0.5 3:1.0\n", None).unwrap();
        assert_eq!(d.samples().as_slice(), &[0.5, 0.0, 1.0]);
        assert_eq!(d.label_names(), &[2]);

        let d = parse_libsvm("1 \n2 2:1\n", None).unwrap();
        assert_eq!(d.row(0), &[0.0, 0.0]);
        assert_eq!(d.label_name(d.labels()[0]), 1);

        assert!(matches!(
            parse_libsvm("1 1:1 4:2\n", Some(3)),
            Err(NssError::Parse { .. })
        ));
        assert!(matches!(
            parse_libsvm("1 3:1 2:2\n", None),
            Err(NssError::NonAscendingIndex { line: 1 })
        ));
    }

    #[test]
    fn libsvm_labels() {
        let d = parse_libsvm("2.0 1:1\n+1 1:2\n-1 1:3\n", None).unwrap();
        assert_eq!(d.label_names(), &[-1, 1, 2]);
        assert!(matches!(
            parse_libsvm("1.5 1:1\n", None),
            Err(NssError::Parse { .. })
        ));
        assert!(matches!(
            parse_libsvm("a 1:1\n", None),
            Err(NssError::Parse { .. })
        ));
    }

    #[test]
    fn metadata_round_trip() {
        let entries = vec![
            ("seed".to_string(), "7".to_string()),
            ("n".into(), "1200".into()),
        ];
        let text = format_metadata(&entries);
        assert_eq!(parse_metadata(&text).unwrap(), entries);
        assert!(parse_metadata("novalue\n").is_err());
    }
}

//! Plain-text model files.
//!
//! ```text
//! nss-model 1
//! classifier nss
//! labels 1 2 3
//! classes 3
//! ambient 50
//! dim 2
//! class 1
//! d 2
//! D 50
//! samples 120
//! mean <D values>
//! basis <D·d values, column-major>
//! class 2
//! ...
//! scaler unit              (optional preprocessing)
//! ...
//! end
//! ```
//!
//! Every real is written with 17 significant digits, which reproduces the
//! original `f64` exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::classifiers::{CentroidModel, Classifier, LdaModel, NssModel};
use crate::dataio::{PcaReducer, Preprocessor, ScaleMode, ScalerParams};
use crate::error::{NssError, Result};
use crate::linalg::Matrix;
use crate::subspace::SubspaceModel;

pub const FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "nss-model";

#[derive(Debug, Clone, PartialEq)]
pub enum TrainedModel {
    Nss(NssModel),
    Lda(LdaModel),
    Centroid(CentroidModel),
}

impl TrainedModel {
    pub fn tag(&self) -> &'static str {
        match self {
            TrainedModel::Nss(_) => "nss",
            TrainedModel::Lda(_) => "lda",
            TrainedModel::Centroid(_) => "centroid",
        }
    }

    pub fn as_classifier(&self) -> &dyn Classifier {
        match self {
            TrainedModel::Nss(m) => m,
            TrainedModel::Lda(m) => m,
            TrainedModel::Centroid(m) => m,
        }
    }
}

/// A classifier together with the preprocessing fitted alongside it and the
/// original label of each class.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile {
    pub model: TrainedModel,
    pub preprocessing: Preprocessor,
    pub label_names: Vec<i64>,
}

impl ModelFile {
    pub fn new(
        model: TrainedModel,
        preprocessing: Preprocessor,
        label_names: Vec<i64>,
    ) -> Result<Self> {
        if label_names.len() != model.as_classifier().n_classes() {
            return Err(NssError::ModelFormat(format!(
                "{} label names for {} classes",
                label_names.len(),
                model.as_classifier().n_classes()
            )));
        }
        Ok(ModelFile {
            model,
            preprocessing,
            label_names,
        })
    }

    /// Dimension of the raw feature vectors the file expects.
    pub fn input_dim(&self) -> usize {
        self.preprocessing
            .input_dim()
            .unwrap_or_else(|| self.model.as_classifier().ambient_dim())
    }

    /// Applies preprocessing and returns the predicted class (1-based).
    pub fn predict(&self, raw: &[f64]) -> Result<usize> {
        let x = self.preprocessing.apply_row(raw)?;
        self.model.as_classifier().predict(&x)
    }

    /// Per-class residuals, for NSS models only.
    pub fn residuals(&self, raw: &[f64]) -> Result<Option<Vec<f64>>> {
        match &self.model {
            TrainedModel::Nss(m) => Ok(Some(m.residuals(&self.preprocessing.apply_row(raw)?)?)),
            _ => Ok(None),
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        line(&mut out, MAGIC, &[FORMAT_VERSION.to_string()]);
        line(&mut out, "classifier", &[self.model.tag().to_string()]);
        line(
            &mut out,
            "labels",
            &self
                .label_names
                .iter()
                .map(i64::to_string)
                .collect::<Vec<_>>(),
        );
        let clf = self.model.as_classifier();
        line(&mut out, "classes", &[clf.n_classes().to_string()]);
        line(&mut out, "ambient", &[clf.ambient_dim().to_string()]);
        match &self.model {
            TrainedModel::Nss(m) => {
                line(&mut out, "dim", &[m.dim().to_string()]);
                for (k, s) in m.subspaces().iter().enumerate() {
                    line(&mut out, "class", &[(k + 1).to_string()]);
                    line(&mut out, "d", &[s.dim().to_string()]);
                    line(&mut out, "D", &[s.ambient_dim().to_string()]);
                    line(&mut out, "samples", &[s.n_samples().to_string()]);
                    reals(&mut out, "mean", s.mean());
                    reals(&mut out, "basis", &column_major(s.basis()));
                }
            }
            TrainedModel::Lda(m) => {
                for (k, (mu, lp)) in m.class_means().iter().zip(m.log_priors()).enumerate() {
                    line(&mut out, "class", &[(k + 1).to_string()]);
                    reals(&mut out, "mean", mu);
                    reals(&mut out, "log_prior", &[*lp]);
                }
                reals(
                    &mut out,
                    "inverse_covariance",
                    m.pooled_covariance_inverse().as_slice(),
                );
            }
            TrainedModel::Centroid(m) => {
                for (k, mu) in m.means().iter().enumerate() {
                    line(&mut out, "class", &[(k + 1).to_string()]);
                    reals(&mut out, "mean", mu);
                }
            }
        }
        if let Some(s) = &self.preprocessing.scaler {
            line(&mut out, "scaler", &[s.mode.name().to_string()]);
            reals(&mut out, "scaler_offset", &s.offset);
            reals(&mut out, "scaler_span", &s.span);
            line(
                &mut out,
                "scaler_zero_range",
                &s.zero_range
                    .iter()
                    .map(|&z| u8::from(z).to_string())
                    .collect::<Vec<_>>(),
            );
        }
        if let Some(p) = &self.preprocessing.pca {
            line(
                &mut out,
                "pca",
                &[p.input_dim().to_string(), p.output_dim().to_string()],
            );
            reals(&mut out, "pca_center", &p.center);
            reals(&mut out, "pca_components", &column_major(&p.components));
            reals(&mut out, "pca_explained", &[p.explained_variance_ratio]);
        }
        out.push_str("end\n");
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut r = Reader::new(text);
        let version: u32 = r.scalar(MAGIC)?;
        if version != FORMAT_VERSION {
            return Err(NssError::ModelFormat(format!(
                "unsupported version {version}"
            )));
        }
        let tag: String = r.scalar("classifier")?;
        let label_names: Vec<i64> = r.list("labels")?;
        let k: usize = r.scalar("classes")?;
        let ambient: usize = r.scalar("ambient")?;
        if k == 0 || label_names.len() != k {
            return Err(NssError::ModelFormat(
                "label count does not match class count".into(),
            ));
        }
        let model = match tag.as_str() {
            "nss" => {
                let dim: usize = r.scalar("dim")?;
                let mut subspaces = Vec::with_capacity(k);
                for class in 1..=k {
                    r.expect_class(class)?;
                    let d: usize = r.scalar("d")?;
                    let big_d: usize = r.scalar("D")?;
                    if d != dim || big_d != ambient {
                        return Err(NssError::ModelFormat(format!(
                            "class {class} shape mismatch"
                        )));
                    }
                    let n: usize = r.scalar("samples")?;
                    let mean = r.reals("mean", ambient)?;
                    let basis = from_column_major(ambient, d, r.reals("basis", ambient * d)?)?;
                    subspaces.push(SubspaceModel::with_samples(mean, basis, n)?);
                }
                TrainedModel::Nss(NssModel::new(subspaces)?)
            }
            "lda" => {
                let mut means = Vec::with_capacity(k);
                let mut log_priors = Vec::with_capacity(k);
                for class in 1..=k {
                    r.expect_class(class)?;
                    means.push(r.reals("mean", ambient)?);
                    log_priors.push(r.reals("log_prior", 1)?[0]);
                }
                let inv = Matrix::new(
                    ambient,
                    ambient,
                    r.reals("inverse_covariance", ambient * ambient)?,
                )?;
                TrainedModel::Lda(LdaModel::from_parts(means, inv, log_priors)?)
            }
            "centroid" => {
                let mut means = Vec::with_capacity(k);
                for class in 1..=k {
                    r.expect_class(class)?;
                    means.push(r.reals("mean", ambient)?);
                }
                TrainedModel::Centroid(CentroidModel::new(means)?)
            }
            other => {
                return Err(NssError::ModelFormat(format!(
                    "unknown classifier {other:?}"
                )))
            }
        };

        let mut preprocessing = Preprocessor::default();
        loop {
            let key = r.peek_key()?;
            match key.as_str() {
                "end" => break,
                "scaler" => {
                    let mode: String = r.scalar("scaler")?;
                    let mode = ScaleMode::from_name(&mode)
                        .ok_or_else(|| NssError::ModelFormat(format!("unknown scaler {mode:?}")))?;
                    let offset = r.reals_any("scaler_offset")?;
                    let n = offset.len();
                    let span = r.reals("scaler_span", n)?;
                    let zero: Vec<u8> = r.list("scaler_zero_range")?;
                    if zero.len() != n {
                        return Err(NssError::ModelFormat("scaler length mismatch".into()));
                    }
                    preprocessing.scaler = Some(ScalerParams {
                        mode,
                        offset,
                        span,
                        zero_range: zero.into_iter().map(|z| z != 0).collect(),
                    });
                }
                "pca" => {
                    let shape: Vec<usize> = r.list("pca")?;
                    let [input, output] = shape[..] else {
                        return Err(NssError::ModelFormat("pca expects two sizes".into()));
                    };
                    let center = r.reals("pca_center", input)?;
                    let components = from_column_major(
                        input,
                        output,
                        r.reals("pca_components", input * output)?,
                    )?;
                    let explained = r.reals("pca_explained", 1)?[0];
                    preprocessing.pca = Some(PcaReducer {
                        center,
                        components,
                        explained_variance_ratio: explained,
                    });
                }
                other => return Err(NssError::ModelFormat(format!("unexpected key {other:?}"))),
            }
        }
        let file = ModelFile::new(model, preprocessing, label_names)?;
        let processed = file
            .preprocessing
            .pca
            .as_ref()
            .map(PcaReducer::output_dim)
            .or_else(|| file.preprocessing.scaler.as_ref().map(ScalerParams::dim));
        if let Some(p) = processed {
            if p != ambient {
                return Err(NssError::ModelFormat(
                    "preprocessing output does not match model dimension".into(),
                ));
            }
        }
        Ok(file)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_text()).map_err(|e| NssError::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| NssError::io(path, e))?;
        Self::from_text(&text)
    }
}

fn line(out: &mut String, key: &str, values: &[String]) {
    out.push_str(key);
    for v in values {
        out.push(' ');
        out.push_str(v);
    }
    out.push('\n');
}

fn reals(out: &mut String, key: &str, values: &[f64]) {
    out.push_str(key);
    for v in values {
        let _ = write!(out, " {v:.16e}");
    }
    out.push('\n');
}

fn column_major(m: &Matrix) -> Vec<f64> {
    m.transpose().into_vec()
}

fn from_column_major(rows: usize, cols: usize, values: Vec<f64>) -> Result<Matrix> {
    Ok(Matrix::new(cols, rows, values)?.transpose())
}

struct Reader<'a> {
    lines: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(text: &'a str) -> Self {
        let lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
            .collect();
        Reader { lines, pos: 0 }
    }

    fn peek_key(&self) -> Result<String> {
        self.lines
            .get(self.pos)
            .map(|(_, l)| l.split_whitespace().next().unwrap_or("").to_string())
            .ok_or_else(|| NssError::ModelFormat("unexpected end of file".into()))
    }

    fn take(&mut self, key: &str) -> Result<(usize, Vec<&'a str>)> {
        let (no, l) = *self
            .lines
            .get(self.pos)
            .ok_or_else(|| NssError::ModelFormat(format!("missing `{key}`")))?;
        let mut toks = l.split_whitespace();
        let found = toks.next().unwrap_or("");
        if found != key {
            return Err(NssError::ModelFormat(format!(
                "line {no}: expected `{key}`, found `{found}`"
            )));
        }
        self.pos += 1;
        Ok((no, toks.collect()))
    }

    fn list<T: std::str::FromStr>(&mut self, key: &str) -> Result<Vec<T>> {
        let (no, toks) = self.take(key)?;
        toks.iter()
            .map(|t| {
                t.parse()
                    .map_err(|_| NssError::ModelFormat(format!("line {no}: bad value {t:?}")))
            })
            .collect()
    }

    fn scalar<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        let mut v = self.list(key)?;
        if v.len() != 1 {
            return Err(NssError::ModelFormat(format!("`{key}` takes one value")));
        }
        Ok(v.remove(0))
    }

    fn reals_any(&mut self, key: &str) -> Result<Vec<f64>> {
        let v: Vec<f64> = self.list(key)?;
        if v.iter().any(|x| !x.is_finite()) {
            return Err(NssError::ModelFormat(format!(
                "non-finite value in `{key}`"
            )));
        }
        Ok(v)
    }

    fn reals(&mut self, key: &str, n: usize) -> Result<Vec<f64>> {
        let v = self.reals_any(key)?;
        if v.len() != n {
            return Err(NssError::ModelFormat(format!(
                "`{key}` has {} values, expected {n}",
                v.len()
            )));
        }
        Ok(v)
    }

    fn expect_class(&mut self, class: usize) -> Result<()> {
        let got: usize = self.scalar("class")?;
        if got != class {
            return Err(NssError::ModelFormat(format!(
                "expected class {class}, found {got}"
            )));
        }
        Ok(())
    }
}

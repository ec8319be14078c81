//! Repeated split / tune / fit / evaluate runs and their summary tables.

use std::fmt::Write as _;
use std::time::Instant;

use crate::classifiers::{centroid_fit, default_cv_grid, lda_fit, nss_cross_validate, nss_fit};
use crate::datagen::{
    benchmark_subspace_spec, exp_subspace_spec, paper_gaussian_spec, sample_gaussian_mixture,
    sample_subspace_family, SubspaceFamilySpec,
};
use crate::dataio::{PcaSettings, Preprocessor, ScaleMode};
use crate::dataset::{stratified_split, LabeledDataset};
use crate::error::{NssError, Result};
use crate::model_file::TrainedModel;
use crate::par;
use crate::risk::{median, ConsistencyCurve};
use crate::rng::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClassifierKind {
    Nss,
    Lda,
    Centroid,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 3] = [
        ClassifierKind::Nss,
        ClassifierKind::Lda,
        ClassifierKind::Centroid,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ClassifierKind::Nss => "nss",
            ClassifierKind::Lda => "lda",
            ClassifierKind::Centroid => "centroid",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }
}

/// Fits one classifier; `dim` is only read by NSS.
pub fn fit_classifier(
    kind: ClassifierKind,
    train: &LabeledDataset,
    dim: usize,
) -> Result<TrainedModel> {
    Ok(match kind {
        ClassifierKind::Nss => TrainedModel::Nss(nss_fit(train, dim)?),
        ClassifierKind::Lda => TrainedModel::Lda(lda_fit(train)?),
        ClassifierKind::Centroid => TrainedModel::Centroid(centroid_fit(train)?),
    })
}

/// Built-in synthetic generators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Builtin {
    /// Three-class Gaussian mixture in R³.
    GaussianPaper { n: usize },
    /// Three noisy 2-planes in R⁵⁰ drawn afresh from each seed.
    SubspacePaper { n: usize },
    /// Subspace family with noise confined to the orthogonal complements.
    ExpSubspace {
        classes: usize,
        ambient_dim: usize,
        intrinsic_dim: usize,
        alpha: f64,
        radius: f64,
        n: usize,
    },
}

pub const DEFAULT_BUILTIN_SAMPLES: usize = 1200;

impl Builtin {
    pub const NAMES: [&'static str; 3] = ["gaussian-paper", "subspace-paper", "exp-subspace"];

    /// Generator by name with default parameters.
    pub fn from_name(name: &str) -> Option<Self> {
        let n = DEFAULT_BUILTIN_SAMPLES;
        match name {
            "gaussian-paper" => Some(Builtin::GaussianPaper { n }),
            "subspace-paper" => Some(Builtin::SubspacePaper { n }),
            "exp-subspace" => Some(Builtin::ExpSubspace {
                classes: 3,
                ambient_dim: 20,
                intrinsic_dim: 2,
                alpha: 200.0,
                radius: 1.0,
                n,
            }),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Builtin::GaussianPaper { .. } => "gaussian-paper",
            Builtin::SubspacePaper { .. } => "subspace-paper",
            Builtin::ExpSubspace { .. } => "exp-subspace",
        }
    }

    pub fn n_samples(&self) -> usize {
        match *self {
            Builtin::GaussianPaper { n }
            | Builtin::SubspacePaper { n }
            | Builtin::ExpSubspace { n, .. } => n,
        }
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        match &mut self {
            Builtin::GaussianPaper { n }
            | Builtin::SubspacePaper { n }
            | Builtin::ExpSubspace { n, .. } => *n = samples,
        }
        self
    }

    /// The subspace family drawn for `seed`, if this generator has one.
    pub fn subspace_spec(&self, seed: u64) -> Result<Option<SubspaceFamilySpec>> {
        let spec_seed = derive_seed(seed, "spec", 0);
        Ok(match *self {
            Builtin::GaussianPaper { .. } => None,
            Builtin::SubspacePaper { .. } => Some(benchmark_subspace_spec(spec_seed)?),
            Builtin::ExpSubspace {
                classes,
                ambient_dim,
                intrinsic_dim,
                alpha,
                radius,
                ..
            } => Some(exp_subspace_spec(
                classes,
                ambient_dim,
                intrinsic_dim,
                alpha,
                radius,
                spec_seed,
            )?),
        })
    }

    pub fn generate(&self, seed: u64) -> Result<LabeledDataset> {
        match self.subspace_spec(seed)? {
            None => sample_gaussian_mixture(&paper_gaussian_spec(), self.n_samples(), seed),
            Some(spec) => {
                sample_subspace_family(&spec, self.n_samples(), derive_seed(seed, "sample", 0))
            }
        }
    }

    /// `key=value` pairs sufficient to regenerate the data.
    pub fn metadata(&self, seed: u64) -> Vec<(String, String)> {
        let mut out = vec![
            ("generator".to_string(), self.name().to_string()),
            ("seed".to_string(), seed.to_string()),
            ("n".to_string(), self.n_samples().to_string()),
        ];
        match *self {
            Builtin::GaussianPaper { .. } => {}
            Builtin::SubspacePaper { .. } => {
                out.extend(
                    [
                        ("classes", "3"),
                        ("ambient_dim", "50"),
                        ("intrinsic_dim", "2"),
                    ]
                    .map(|(k, v)| (k.to_string(), v.to_string())),
                );
                out.push(("radius".into(), "1".into()));
                out.push(("noise_sigma".into(), "0.05".into()));
                out.push(("min_angle".into(), std::f64::consts::FRAC_PI_8.to_string()));
            }
            Builtin::ExpSubspace {
                classes,
                ambient_dim,
                intrinsic_dim,
                alpha,
                radius,
                ..
            } => {
                out.push(("classes".into(), classes.to_string()));
                out.push(("ambient_dim".into(), ambient_dim.to_string()));
                out.push(("intrinsic_dim".into(), intrinsic_dim.to_string()));
                out.push(("radius".into(), radius.to_string()));
                out.push(("alpha".into(), alpha.to_string()));
                out.push(("min_angle".into(), std::f64::consts::FRAC_PI_8.to_string()));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    /// Regenerated from a fresh seed in every repeat.
    Builtin(Builtin),
    /// A fixed dataset, re-split in every repeat.
    Dataset(LabeledDataset),
}

impl DataSource {
    pub fn default_repeats(&self) -> usize {
        match self {
            DataSource::Builtin(_) => 200,
            DataSource::Dataset(_) => 10,
        }
    }
}

/// How NSS picks its subspace dimension.
#[derive(Debug, Clone, PartialEq)]
pub enum DimensionChoice {
    Fixed(usize),
    CrossValidate {
        /// `None` uses [`default_cv_grid`] of the preprocessed dimension.
        candidates: Option<Vec<usize>>,
        folds: usize,
        /// Tune on the first repeat's training split only and reuse the result.
        once: bool,
    },
}

impl Default for DimensionChoice {
    fn default() -> Self {
        DimensionChoice::CrossValidate {
            candidates: None,
            folds: 10,
            once: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub source: DataSource,
    pub classifiers: Vec<ClassifierKind>,
    pub train_fraction: f64,
    /// `None` takes the source default.
    pub repeats: Option<usize>,
    pub dimension: DimensionChoice,
    pub scale: Option<ScaleMode>,
    pub pca: Option<PcaSettings>,
    pub seed: u64,
    /// Run repeats one after another, e.g. for timing.
    pub serial: bool,
}

impl BenchConfig {
    pub fn new(source: DataSource) -> Self {
        BenchConfig {
            source,
            classifiers: ClassifierKind::ALL.to_vec(),
            train_fraction: 0.8,
            repeats: None,
            dimension: DimensionChoice::default(),
            scale: None,
            pca: None,
            seed: 0,
            serial: false,
        }
    }

    pub fn repeats(&self) -> usize {
        self.repeats
            .unwrap_or_else(|| self.source.default_repeats())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(NssError::InvalidConfig(format!(
                "train fraction {} must lie in (0, 1)",
                self.train_fraction
            )));
        }
        if self.repeats() == 0 {
            return Err(NssError::InvalidConfig("repeats must be at least 1".into()));
        }
        if self.classifiers.is_empty() {
            return Err(NssError::InvalidConfig("no classifiers selected".into()));
        }
        match &self.dimension {
            DimensionChoice::Fixed(0) => {
                Err(NssError::InvalidConfig("--dim must be positive".into()))
            }
            DimensionChoice::CrossValidate {
                candidates: Some(c),
                ..
            } if c.is_empty() => Err(NssError::InvalidConfig("empty CV grid".into())),
            DimensionChoice::CrossValidate { folds, .. } if *folds < 2 => Err(
                NssError::InvalidConfig("at least two folds are needed".into()),
            ),
            _ => Ok(()),
        }
    }
}

/// One classifier in one repeat.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub classifier: ClassifierKind,
    /// `Err` holds the failure message.
    pub accuracy: std::result::Result<f64, String>,
    pub fit_seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RepeatRow {
    pub repeat: usize,
    pub seed: u64,
    /// NSS dimension used in this repeat.
    pub dim: Option<usize>,
    pub outcomes: Vec<Outcome>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierSummary {
    pub classifier: ClassifierKind,
    pub mean_accuracy: f64,
    /// n−1 denominator; NaN with fewer than two successes.
    pub std_accuracy: f64,
    pub mean_fit_seconds: f64,
    pub median_fit_seconds: f64,
    pub successes: usize,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchResult {
    pub summaries: Vec<ClassifierSummary>,
    pub rows: Vec<RepeatRow>,
}

/// Runs every repeat. Failures of individual classifiers are kept in the
/// rows and excluded from that classifier's summary; anything else aborts.
pub fn run_bench(config: &BenchConfig) -> Result<BenchResult> {
    config.validate()?;
    let repeats = config.repeats();
    let mut classifiers = config.classifiers.clone();
    classifiers.sort_unstable();
    classifiers.dedup();
    let wants_nss = classifiers.contains(&ClassifierKind::Nss);

    let fixed_dim = match &config.dimension {
        DimensionChoice::Fixed(d) => Some(Ok(*d)),
        DimensionChoice::CrossValidate { once: true, .. } if wants_nss => {
            let (train, _) = prepare(config, repeat_seed(config.seed, 0))?;
            Some(choose_dim(config, &train, repeat_seed(config.seed, 0)).map_err(|e| e.to_string()))
        }
        _ => None,
    };

    let run = |r: usize| run_repeat(config, &classifiers, wants_nss, fixed_dim.clone(), r);
    let rows = if config.serial {
        (0..repeats).map(run).collect::<Vec<_>>()
    } else {
        par::map_indexed(repeats, run)
    };
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let summaries = classifiers.iter().map(|&k| summarize(k, &rows)).collect();
    Ok(BenchResult { summaries, rows })
}

fn repeat_seed(seed: u64, r: usize) -> u64 {
    derive_seed(seed, "repeat", r as u64)
}

/// Split and preprocess the data of one repeat.
fn prepare(config: &BenchConfig, seed: u64) -> Result<(LabeledDataset, LabeledDataset)> {
    let generated;
    let data = match &config.source {
        DataSource::Builtin(b) => {
            generated = b.generate(derive_seed(seed, "data", 0))?;
            &generated
        }
        DataSource::Dataset(d) => d,
    };
    let (train_idx, test_idx) =
        stratified_split(data, config.train_fraction, derive_seed(seed, "split", 0))?;
    let (train, test) = (data.subset(&train_idx), data.subset(&test_idx));
    let pre = Preprocessor::fit(train.samples(), config.scale, config.pca)?;
    Ok((pre.apply_dataset(&train)?, pre.apply_dataset(&test)?))
}

fn choose_dim(config: &BenchConfig, train: &LabeledDataset, seed: u64) -> Result<usize> {
    match &config.dimension {
        DimensionChoice::Fixed(d) => Ok(*d),
        DimensionChoice::CrossValidate {
            candidates, folds, ..
        } => {
            let grid = candidates
                .clone()
                .unwrap_or_else(|| default_cv_grid(train.dim()));
            if grid.is_empty() {
                return Err(NssError::BadDimension(format!(
                    "no candidate dimension below {}",
                    train.dim()
                )));
            }
            Ok(nss_cross_validate(train, &grid, *folds, derive_seed(seed, "cv", 0))?.chosen_dim)
        }
    }
}

fn run_repeat(
    config: &BenchConfig,
    classifiers: &[ClassifierKind],
    wants_nss: bool,
    fixed_dim: Option<Result<usize, String>>,
    r: usize,
) -> Result<RepeatRow> {
    let seed = repeat_seed(config.seed, r);
    let (train, test) = prepare(config, seed)?;
    let dim: Option<Result<usize, String>> = if !wants_nss {
        None
    } else {
        Some(match fixed_dim {
            Some(d) => d,
            None => choose_dim(config, &train, seed).map_err(|e| e.to_string()),
        })
    };
    let outcomes = classifiers
        .iter()
        .map(|&kind| {
            let d = match (&dim, kind) {
                (Some(Err(msg)), ClassifierKind::Nss) => {
                    return Outcome {
                        classifier: kind,
                        accuracy: Err(msg.clone()),
                        fit_seconds: f64::NAN,
                    }
                }
                (Some(Ok(d)), _) => *d,
                _ => 0,
            };
            let start = Instant::now();
            let fitted = fit_classifier(kind, &train, d);
            let fit_seconds = start.elapsed().as_secs_f64();
            let accuracy = fitted
                .and_then(|m| m.as_classifier().accuracy(&test))
                .map_err(|e| e.to_string());
            Outcome {
                classifier: kind,
                accuracy,
                fit_seconds,
            }
        })
        .collect();
    Ok(RepeatRow {
        repeat: r,
        seed,
        dim: dim.and_then(|d| d.ok()),
        outcomes,
    })
}

fn summarize(kind: ClassifierKind, rows: &[RepeatRow]) -> ClassifierSummary {
    let outcomes: Vec<&Outcome> = rows
        .iter()
        .flat_map(|r| r.outcomes.iter())
        .filter(|o| o.classifier == kind)
        .collect();
    let accs: Vec<f64> = outcomes
        .iter()
        .filter_map(|o| o.accuracy.clone().ok())
        .collect();
    let times: Vec<f64> = outcomes
        .iter()
        .filter(|o| o.accuracy.is_ok())
        .map(|o| o.fit_seconds)
        .collect();
    let (mean, std) = mean_std(&accs);
    ClassifierSummary {
        classifier: kind,
        mean_accuracy: mean,
        std_accuracy: std,
        mean_fit_seconds: mean_std(&times).0,
        median_fit_seconds: median(&times),
        successes: accs.len(),
        failures: outcomes.len() - accs.len(),
    }
}

/// Mean and sample standard deviation (n−1).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn percent(v: f64) -> String {
    if v.is_nan() {
        "-".to_string()
    } else {
        format!("{:.2}", 100.0 * v)
    }
}

impl BenchResult {
    pub fn summary(&self, kind: ClassifierKind) -> Option<&ClassifierSummary> {
        self.summaries.iter().find(|s| s.classifier == kind)
    }

    /// Accuracies as `mean ± std` percentages; fit times only when asked,
    /// since they are the one output not fixed by the seed.
    pub fn format_table(&self, timing: bool) -> String {
        let mut out = String::new();
        let _ = write!(
            out,
            "{:<10} {:>16} {:>8} {:>8}",
            "classifier", "accuracy (%)", "ok", "failed"
        );
        if timing {
            let _ = write!(out, " {:>14} {:>14}", "mean fit (s)", "median fit (s)");
        }
        out.push('\n');
        for s in &self.summaries {
            let acc = format!("{} ± {}", percent(s.mean_accuracy), percent(s.std_accuracy));
            let _ = write!(
                out,
                "{:<10} {:>16} {:>8} {:>8}",
                s.classifier.name(),
                acc,
                s.successes,
                s.failures
            );
            if timing {
                let _ = write!(
                    out,
                    " {:>14.6} {:>14.6}",
                    s.mean_fit_seconds, s.median_fit_seconds
                );
            }
            out.push('\n');
        }
        out
    }

    /// One row per repeat and classifier; accuracies are written with full
    /// precision so the summaries can be recomputed exactly.
    pub fn to_csv(&self, timing: bool) -> String {
        let mut out = String::from("repeat,seed,classifier,dim,accuracy,status");
        if timing {
            out.push_str(",fit_seconds");
        }
        out.push('\n');
        for row in &self.rows {
            for o in &row.outcomes {
                let dim = match (o.classifier, row.dim) {
                    (ClassifierKind::Nss, Some(d)) => d.to_string(),
                    _ => String::new(),
                };
                let (acc, status) = match &o.accuracy {
                    Ok(a) => (a.to_string(), "ok".to_string()),
                    Err(msg) => (String::new(), csv_safe(msg)),
                };
                let _ = write!(
                    out,
                    "{},{},{},{},{},{}",
                    row.repeat,
                    row.seed,
                    o.classifier.name(),
                    dim,
                    acc,
                    status
                );
                if timing {
                    let _ = write!(out, ",{}", o.fit_seconds);
                }
                out.push('\n');
            }
        }
        out
    }
}

fn csv_safe(msg: &str) -> String {
    msg.replace([',', '\n', '\r'], ";")
}

/// Per train size: median gap, median bound, and the gap range over trials.
pub fn format_consistency_table(curve: &ConsistencyCurve) -> String {
    let mut out = format!(
        "{:>8} {:>12} {:>12} {:>12} {:>12}\n",
        "n", "median gap", "min gap", "max gap", "median bound"
    );
    for (i, n) in curve.train_sizes.iter().enumerate() {
        let gaps = curve.gaps(i);
        let lo = gaps.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = gaps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let _ = writeln!(
            out,
            "{:>8} {:>12.6} {:>12.6} {:>12.6} {:>12.6}",
            n,
            curve.median_gap(i),
            lo,
            hi,
            curve.median_bound(i)
        );
    }
    out
}

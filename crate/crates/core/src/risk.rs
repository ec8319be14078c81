//! Bayes rules, paired risk estimates and the convergence study for the
//! synthetic families whose class densities are known.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::classifiers::{argmax, argmin, nss_fit, Classifier, NssModel};
use crate::datagen::{
    sample_subspace_class, sample_subspace_family, GaussianMixtureSpec, OrthogonalNoise,
    SubspaceFamilySpec,
};
use crate::dataset::LabeledDataset;
use crate::error::{NssError, Result};
use crate::linalg::{self, check_len};
use crate::par;
use crate::rng::derive_seed;
use crate::subspace::SubspaceModel;

/// A distribution whose Bayes rule can be evaluated pointwise.
#[derive(Debug, Clone, PartialEq)]
pub enum GroundTruth {
    Gaussian(GaussianMixtureSpec),
    /// Subspace family with exponential orthogonal noise and equal priors.
    Subspace(SubspaceFamilySpec),
}

impl GroundTruth {
    pub fn gaussian(spec: GaussianMixtureSpec) -> Self {
        GroundTruth::Gaussian(spec)
    }

    /// Fails with `UnsupportedFamily` for isotropic ambient noise, whose class
    /// densities have no closed form.
    pub fn subspace(spec: SubspaceFamilySpec) -> Result<Self> {
        require_exponential(&spec)?;
        Ok(GroundTruth::Subspace(spec))
    }
}

fn require_exponential(spec: &SubspaceFamilySpec) -> Result<f64> {
    match spec.noise() {
        OrthogonalNoise::Exponential { alpha } => Ok(alpha),
        OrthogonalNoise::Ambient { .. } => Err(NssError::UnsupportedFamily),
    }
}

impl Classifier for GroundTruth {
    fn predict(&self, x: &[f64]) -> Result<usize> {
        match self {
            GroundTruth::Gaussian(spec) => {
                let scores = (1..=spec.n_classes())
                    .map(|k| Ok(spec.priors()[k - 1].ln() + spec.log_density(k, x)?))
                    .collect::<Result<Vec<f64>>>()?;
                Ok(argmax(scores))
            }
            GroundTruth::Subspace(spec) => {
                require_exponential(spec)?;
                check_len(spec.ambient_dim(), x.len())?;
                let r2 = spec.radius() * spec.radius();
                let mut dist = Vec::with_capacity(spec.n_classes());
                let mut inside = Vec::with_capacity(spec.n_classes());
                for k in 1..=spec.n_classes() {
                    let (coords, t) = spec.decompose(k, x)?;
                    dist.push(t);
                    inside.push(linalg::norm_sq(&coords) <= r2);
                }
                // equal priors and a shared α make the density ordering the
                // reverse of the distance ordering among supports holding x
                if inside.iter().any(|&b| b) {
                    Ok(argmin(dist.iter().zip(&inside).map(|(&t, &b)| {
                        if b {
                            t
                        } else {
                            f64::INFINITY
                        }
                    })))
                } else {
                    Ok(argmin(dist))
                }
            }
        }
    }

    fn ambient_dim(&self) -> usize {
        match self {
            GroundTruth::Gaussian(s) => s.ambient_dim(),
            GroundTruth::Subspace(s) => s.ambient_dim(),
        }
    }

    fn n_classes(&self) -> usize {
        match self {
            GroundTruth::Gaussian(s) => s.n_classes(),
            GroundTruth::Subspace(s) => s.n_classes(),
        }
    }
}

/// Class (1-based) maximizing `π_k g_k(x)`; ties go to the smaller index.
pub fn bayes_predict(truth: &GroundTruth, x: &[f64]) -> Result<usize> {
    truth.predict(x)
}

/// Misclassified fraction of `test`.
pub fn empirical_risk(classifier: &dyn Classifier, test: &LabeledDataset) -> Result<f64> {
    if test.is_empty() {
        return Err(NssError::InvalidConfig("empty test set".into()));
    }
    Ok(1.0 - classifier.accuracy(test)?)
}

/// Risks of a classifier and of the Bayes rule on the same test sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairedRisk {
    pub empirical_risk: f64,
    pub bayes_risk: f64,
    pub gap: f64,
    pub empirical_stderr: f64,
    pub bayes_stderr: f64,
    /// From the per-point differences of the two error indicators.
    pub gap_stderr: f64,
    pub n_test: usize,
}

pub fn paired_risk(
    classifier: &dyn Classifier,
    truth: &GroundTruth,
    test: &LabeledDataset,
) -> Result<PairedRisk> {
    let n = test.len();
    if n == 0 {
        return Err(NssError::InvalidConfig("empty test set".into()));
    }
    let mut err_f = Vec::with_capacity(n);
    let mut err_b = Vec::with_capacity(n);
    for (i, &y) in test.labels().iter().enumerate() {
        let x = test.row(i);
        err_f.push(f64::from(u8::from(classifier.predict(x)? != y)));
        err_b.push(f64::from(u8::from(truth.predict(x)? != y)));
    }
    let diff: Vec<f64> = err_f.iter().zip(&err_b).map(|(a, b)| a - b).collect();
    let (rf, sf) = mean_stderr(&err_f);
    let (rb, sb) = mean_stderr(&err_b);
    let (gap, sg) = mean_stderr(&diff);
    Ok(PairedRisk {
        empirical_risk: rf,
        bayes_risk: rb,
        gap,
        empirical_stderr: sf,
        bayes_stderr: sb,
        gap_stderr: sg,
        n_test: n,
    })
}

/// Sample mean and the standard error of the mean (n−1 variance).
fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// The class subspaces of a family as an NSS model.
pub fn truth_model(spec: &SubspaceFamilySpec) -> Result<NssModel> {
    NssModel::new(
        spec.centers()
            .iter()
            .zip(spec.bases())
            .map(|(u, b)| SubspaceModel::new(u.clone(), b.clone()))
            .collect::<Result<Vec<_>>>()?,
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundEstimate {
    pub value: f64,
    pub stderr: f64,
}

/// Monte Carlo estimate of `(1/K) Σ_k ∫ |g_k − ĝ_k|`, where `ĝ_k` is the
/// family density with the fitted mean and basis of class `k` substituted
/// and α, M unchanged.
///
/// Each integral is taken against the mixture `(g_k + ĝ_k)/2`: half of
/// `mc_samples` come from `g_k`, half from `ĝ_k`, and the integrand
/// `2|g−ĝ|/(g+ĝ)` stays in `[0, 2]`.
pub fn lemma1_bound(
    spec: &SubspaceFamilySpec,
    model: &NssModel,
    mc_samples: usize,
    seed: u64,
) -> Result<BoundEstimate> {
    require_exponential(spec)?;
    if mc_samples < 4 {
        return Err(NssError::InvalidConfig(
            "at least four Monte Carlo samples are needed".into(),
        ));
    }
    let plugin = spec.with_estimates(model)?;
    let half = mc_samples / 2;
    let k_total = spec.n_classes();
    let mut sum = 0.0;
    let mut var = 0.0;
    for k in 1..=k_total {
        let mut means = [0.0; 2];
        let mut vars = [0.0; 2];
        for (side, source) in [spec, &plugin].into_iter().enumerate() {
            let tag = if side == 0 {
                "bound-true"
            } else {
                "bound-plugin"
            };
            let pts = sample_subspace_class(source, k, half, derive_seed(seed, tag, k as u64))?;
            let vals = pts
                .row_iter()
                .map(|x| {
                    Ok(l1_integrand(
                        spec.log_class_density(k, x)?,
                        plugin.log_class_density(k, x)?,
                    ))
                })
                .collect::<Result<Vec<f64>>>()?;
            let (m, se) = mean_stderr(&vals);
            means[side] = m;
            vars[side] = se * se;
        }
        sum += 0.5 * (means[0] + means[1]);
        var += 0.25 * (vars[0] + vars[1]);
    }
    Ok(BoundEstimate {
        value: sum / k_total as f64,
        stderr: var.sqrt() / k_total as f64,
    })
}

/// `2|g − ĝ|/(g + ĝ)` from log densities.
fn l1_integrand(log_g: f64, log_h: f64) -> f64 {
    match (log_g.is_finite(), log_h.is_finite()) {
        (true, true) => 2.0 * (0.5 * (log_h - log_g)).tanh().abs(),
        (false, false) => 0.0,
        _ => 2.0,
    }
}

/// One (train size, trial) cell of a consistency study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskReport {
    pub n_train: usize,
    pub n_test: usize,
    pub trial: usize,
    pub seed: u64,
    pub empirical_risk: f64,
    pub bayes_risk: f64,
    pub gap: f64,
    pub lemma1_bound: f64,
    pub empirical_stderr: f64,
    pub bayes_stderr: f64,
    pub gap_stderr: f64,
    pub bound_stderr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyCurve {
    /// Strictly increasing.
    pub train_sizes: Vec<usize>,
    /// `reports[i][j]`: size `train_sizes[i]`, trial `j`.
    pub reports: Vec<Vec<RiskReport>>,
}

impl ConsistencyCurve {
    pub fn gaps(&self, size_index: usize) -> Vec<f64> {
        self.reports[size_index].iter().map(|r| r.gap).collect()
    }

    pub fn median_gap(&self, size_index: usize) -> f64 {
        median(&self.gaps(size_index))
    }

    pub fn median_bound(&self, size_index: usize) -> f64 {
        median(
            &self.reports[size_index]
                .iter()
                .map(|r| r.lemma1_bound)
                .collect::<Vec<_>>(),
        )
    }

    pub fn all_reports(&self) -> impl Iterator<Item = &RiskReport> {
        self.reports.iter().flatten()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "n,trial,R_n,R_star,gap,lemma1_bound,R_n_stderr,R_star_stderr,gap_stderr,lemma1_stderr\n",
        );
        for r in self.all_reports() {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                r.n_train,
                r.trial,
                r.empirical_risk,
                r.bayes_risk,
                r.gap,
                r.lemma1_bound,
                r.empirical_stderr,
                r.bayes_stderr,
                r.gap_stderr,
                r.bound_stderr
            );
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_csv()).map_err(|e| NssError::io(path, e))
    }
}

/// Median; the mean of the two central values for even lengths.
pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudySettings {
    pub train_sizes: Vec<usize>,
    pub trials: usize,
    pub n_test: usize,
    /// Points per class for the bound; zero skips it (reported as NaN).
    pub mc_samples: usize,
    pub seed: u64,
}

/// Default train-size ladder.
pub const DEFAULT_TRAIN_SIZES: [usize; 5] = [100, 300, 1000, 3000, 10000];

/// Fits NSS with the true `d` on fresh training samples of each size and
/// compares it against the Bayes rule on a fresh paired test sample.
pub fn consistency_study(
    spec: &SubspaceFamilySpec,
    settings: &StudySettings,
) -> Result<ConsistencyCurve> {
    require_exponential(spec)?;
    let sizes = &settings.train_sizes;
    if sizes.is_empty() || sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(NssError::InvalidConfig(
            "train sizes must be non-empty and strictly increasing".into(),
        ));
    }
    let min_size = spec.n_classes() * (spec.intrinsic_dim() + 1);
    if sizes[0] < min_size {
        return Err(NssError::InvalidConfig(format!(
            "train sizes must be at least K·(d+1) = {min_size}"
        )));
    }
    if settings.trials == 0 || settings.n_test == 0 {
        return Err(NssError::InvalidConfig(
            "trials and n_test must be positive".into(),
        ));
    }
    let truth = GroundTruth::Subspace(spec.clone());
    let trials = settings.trials;
    let cells = par::map_indexed(sizes.len() * trials, |cell| {
        let n = sizes[cell / trials];
        let trial = cell % trials;
        let trial_seed = derive_seed(
            derive_seed(settings.seed, "consistency", n as u64),
            "trial",
            trial as u64,
        );
        run_trial(spec, &truth, n, trial, trial_seed, settings)
    });
    let mut cells = cells.into_iter();
    let mut reports = Vec::with_capacity(sizes.len());
    for _ in sizes {
        reports.push((&mut cells).take(trials).collect::<Result<Vec<_>>>()?);
    }
    Ok(ConsistencyCurve {
        train_sizes: sizes.clone(),
        reports,
    })
}

fn run_trial(
    spec: &SubspaceFamilySpec,
    truth: &GroundTruth,
    n: usize,
    trial: usize,
    seed: u64,
    settings: &StudySettings,
) -> Result<RiskReport> {
    let train = sample_subspace_family(spec, n, derive_seed(seed, "train", 0))?;
    let model = nss_fit(&train, spec.intrinsic_dim())?;
    let test = sample_subspace_family(spec, settings.n_test, derive_seed(seed, "test", 0))?;
    let risk = paired_risk(&model, truth, &test)?;
    let bound = if settings.mc_samples > 0 {
        lemma1_bound(
            spec,
            &model,
            settings.mc_samples,
            derive_seed(seed, "bound", 0),
        )?
    } else {
        BoundEstimate {
            value: f64::NAN,
            stderr: f64::NAN,
        }
    };
    Ok(RiskReport {
        n_train: n,
        n_test: settings.n_test,
        trial,
        seed,
        empirical_risk: risk.empirical_risk,
        bayes_risk: risk.bayes_risk,
        gap: risk.gap,
        lemma1_bound: bound.value,
        empirical_stderr: risk.empirical_stderr,
        bayes_stderr: risk.bayes_stderr,
        gap_stderr: risk.gap_stderr,
        bound_stderr: bound.stderr,
    })
}

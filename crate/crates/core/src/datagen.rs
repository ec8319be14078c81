//! Synthetic class-conditional distributions with known ground truth.
//!
//! Two families are provided: a Gaussian mixture with arbitrary means and
//! covariances, and a family of bounded subspaces where each class is uniform
//! on a `d`-ball inside its affine subspace plus Gaussian noise. The noise is
//! either isotropic in the ambient space or confined to the orthogonal
//! complement of the class subspace; the latter has the closed-form density
//! `C(d)·β·exp(−α t)` with `t` the squared distance to the subspace.

use std::f64::consts::{FRAC_PI_8, PI};

use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::classifiers::NssModel;
use crate::dataset::LabeledDataset;
use crate::error::{NssError, Result};
use crate::linalg::{self, check_len, cholesky, orthonormalize_columns, principal_angles, Matrix};
use crate::rng::{self, Rng};

/// Rejection budget when drawing separated subspaces.
pub const MAX_ANGLE_REJECTIONS: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMixtureSpec {
    means: Vec<Vec<f64>>,
    covariances: Vec<Matrix>,
    priors: Vec<f64>,
    chol: Vec<Matrix>,
}

impl GaussianMixtureSpec {
    pub fn new(means: Vec<Vec<f64>>, covariances: Vec<Matrix>, priors: Vec<f64>) -> Result<Self> {
        let k = means.len();
        if k == 0 || covariances.len() != k || priors.len() != k {
            return Err(NssError::InvalidSpec(
                "need one mean, covariance and prior per class".into(),
            ));
        }
        let dim = means[0].len();
        let mut chol = Vec::with_capacity(k);
        for (mu, cov) in means.iter().zip(&covariances) {
            check_len(dim, mu.len())?;
            check_len(dim, cov.rows())?;
            check_len(dim, cov.cols())?;
            if cov.max_asymmetry() > 1e-12 {
                return Err(NssError::InvalidSpec("covariance is not symmetric".into()));
            }
            chol.push(cholesky(cov).ok_or_else(|| {
                NssError::InvalidSpec("covariance is not positive definite".into())
            })?);
        }
        if priors.iter().any(|&p| p.is_nan() || p < 0.0)
            || (priors.iter().sum::<f64>() - 1.0).abs() > 1e-12
        {
            return Err(NssError::InvalidSpec(
                "priors must be non-negative and sum to 1".into(),
            ));
        }
        Ok(GaussianMixtureSpec {
            means,
            covariances,
            priors,
            chol,
        })
    }

    pub fn n_classes(&self) -> usize {
        self.means.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.means[0].len()
    }

    pub fn means(&self) -> &[Vec<f64>] {
        &self.means
    }

    pub fn covariances(&self) -> &[Matrix] {
        &self.covariances
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    /// `log N(x; μ_k, Σ_k)` for class `k` (1-based).
    pub fn log_density(&self, k: usize, x: &[f64]) -> Result<f64> {
        check_len(self.ambient_dim(), x.len())?;
        let l = &self.chol[k - 1];
        let mu = &self.means[k - 1];
        let dim = x.len();
        // forward substitution L z = x − μ
        let mut z = vec![0.0; dim];
        for i in 0..dim {
            let mut s = x[i] - mu[i];
            for j in 0..i {
                s -= l[(i, j)] * z[j];
            }
            z[i] = s / l[(i, i)];
        }
        let log_det: f64 = (0..dim).map(|i| l[(i, i)].ln()).sum::<f64>() * 2.0;
        Ok(-0.5 * (dim as f64 * (2.0 * PI).ln() + log_det + linalg::norm_sq(&z)))
    }
}

/// The three-class Gaussian mixture in R³ used for the Gaussian benchmark.
pub fn paper_gaussian_spec() -> GaussianMixtureSpec {
    let means = vec![
        vec![1.0, 2.0, 3.0],
        vec![-1.0, -2.0, -3.0],
        vec![-1.0, 2.0, -3.0],
    ];
    let covariances = vec![
        Matrix::from_rows(&[[3.0, 0.2, 0.1], [0.2, 2.0, 0.2], [0.1, 0.2, 2.0]]).expect("3x3"),
        Matrix::diagonal(&[2.0, 1.0, 1.0]),
        Matrix::diagonal(&[2.0, 2.0, 3.0]),
    ];
    GaussianMixtureSpec::new(means, covariances, vec![1.0 / 3.0; 3])
        .expect("constant spec is valid")
}

/// Per-class sample counts: exact `n·π_k` when integral, otherwise
/// largest-remainder rounding (ties to the lower class index).
pub fn allocate_counts(priors: &[f64], n: usize) -> Vec<usize> {
    let raw: Vec<f64> = priors.iter().map(|p| p * n as f64).collect();
    let mut counts: Vec<usize> = raw.iter().map(|r| (r + 1e-9).floor() as usize).collect();
    let mut short = n.saturating_sub(counts.iter().sum());
    let mut order: Vec<usize> = (0..priors.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = raw[a] - counts[a] as f64;
        let fb = raw[b] - counts[b] as f64;
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    for &i in order.iter().cycle() {
        if short == 0 {
            break;
        }
        counts[i] += 1;
        short -= 1;
    }
    counts
}

fn standard_normals(rng: &mut Rng, out: &mut [f64]) {
    for v in out.iter_mut() {
        *v = rng.sample(StandardNormal);
    }
}

/// Draws `n` samples, class by class; class `k` is `μ_k + L_k z` with
/// `L_k L_kᵀ = Σ_k` and `z` standard normal.
pub fn sample_gaussian_mixture(
    spec: &GaussianMixtureSpec,
    n: usize,
    seed: u64,
) -> Result<LabeledDataset> {
    let counts = allocate_counts(&spec.priors, n);
    let dim = spec.ambient_dim();
    let mut data = Vec::with_capacity(n * dim);
    let mut labels = Vec::with_capacity(n);
    let mut z = vec![0.0; dim];
    for (k, &count) in counts.iter().enumerate() {
        let mut rng = rng::seeded(rng::derive_seed(seed, "gaussian", k as u64));
        let l = &spec.chol[k];
        for _ in 0..count {
            standard_normals(&mut rng, &mut z);
            for i in 0..dim {
                let mut v = spec.means[k][i];
                for j in 0..=i {
                    v += l[(i, j)] * z[j];
                }
                data.push(v);
            }
            labels.push(k + 1);
        }
    }
    LabeledDataset::new(Matrix::new(n, dim, data)?, labels, spec.n_classes())
}

/// How samples leave their class subspace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OrthogonalNoise {
    /// Isotropic Gaussian noise in the full ambient space, per-coordinate
    /// standard deviation `sigma`.
    Ambient { sigma: f64 },
    /// Gaussian noise restricted to the orthogonal complement with
    /// per-coordinate variance `1/(2α)`, i.e. density `∝ exp(−α t)`.
    Exponential { alpha: f64 },
}

impl OrthogonalNoise {
    /// α whose orthogonal spread matches a per-coordinate standard deviation.
    pub fn exponential_from_sigma(sigma: f64) -> Self {
        OrthogonalNoise::Exponential {
            alpha: 1.0 / (2.0 * sigma * sigma),
        }
    }
}

/// Classes living near bounded `d`-dimensional affine subspaces of R^D.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceFamilySpec {
    ambient_dim: usize,
    intrinsic_dim: usize,
    radius: f64,
    noise: OrthogonalNoise,
    centers: Vec<Vec<f64>>,
    bases: Vec<Matrix>,
    min_angle: f64,
}

impl SubspaceFamilySpec {
    pub fn new(
        centers: Vec<Vec<f64>>,
        bases: Vec<Matrix>,
        radius: f64,
        noise: OrthogonalNoise,
        min_angle: f64,
    ) -> Result<Self> {
        let k = centers.len();
        if k == 0 || bases.len() != k {
            return Err(NssError::InvalidSpec(
                "need one center and one basis per class".into(),
            ));
        }
        let ambient_dim = centers[0].len();
        let intrinsic_dim = bases[0].cols();
        if intrinsic_dim == 0 || intrinsic_dim >= ambient_dim {
            return Err(NssError::BadDimension(format!(
                "intrinsic dimension {intrinsic_dim} must satisfy 1 <= d < {ambient_dim}"
            )));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(NssError::InvalidSpec("ball radius must be positive".into()));
        }
        match noise {
            OrthogonalNoise::Ambient { sigma } if !(sigma >= 0.0 && sigma.is_finite()) => {
                return Err(NssError::InvalidSpec(
                    "noise sigma must be non-negative".into(),
                ))
            }
            OrthogonalNoise::Exponential { alpha } if !(alpha > 0.0 && alpha.is_finite()) => {
                return Err(NssError::InvalidSpec("alpha must be positive".into()))
            }
            _ => {}
        }
        for (c, b) in centers.iter().zip(&bases) {
            check_len(ambient_dim, c.len())?;
            check_len(ambient_dim, b.rows())?;
            check_len(intrinsic_dim, b.cols())?;
            if linalg::orthonormality_error(b) > 1e-8 {
                return Err(NssError::InvalidSpec(
                    "class basis is not orthonormal".into(),
                ));
            }
        }
        let spec = SubspaceFamilySpec {
            ambient_dim,
            intrinsic_dim,
            radius,
            noise,
            centers,
            bases,
            min_angle,
        };
        let worst = spec.min_pairwise_angle()?;
        if worst + 1e-12 < min_angle {
            return Err(NssError::InvalidSpec(format!(
                "pairwise subspace angle {worst} below the required {min_angle}"
            )));
        }
        Ok(spec)
    }

    pub fn n_classes(&self) -> usize {
        self.centers.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn intrinsic_dim(&self) -> usize {
        self.intrinsic_dim
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn noise(&self) -> OrthogonalNoise {
        self.noise
    }

    pub fn centers(&self) -> &[Vec<f64>] {
        &self.centers
    }

    pub fn bases(&self) -> &[Matrix] {
        &self.bases
    }

    pub fn min_angle(&self) -> f64 {
        self.min_angle
    }

    pub fn alpha(&self) -> Result<f64> {
        match self.noise {
            OrthogonalNoise::Exponential { alpha } => Ok(alpha),
            OrthogonalNoise::Ambient { .. } => Err(NssError::WrongMode),
        }
    }

    /// Largest principal angle between every pair of class subspaces.
    pub fn pairwise_largest_angles(&self) -> Result<Vec<((usize, usize), f64)>> {
        largest_angles(&self.bases)
    }

    fn min_pairwise_angle(&self) -> Result<f64> {
        Ok(self
            .pairwise_largest_angles()?
            .into_iter()
            .map(|(_, a)| a)
            .fold(f64::INFINITY, f64::min))
    }

    /// The same family with fitted centers and bases substituted (α, M and
    /// the dimensions unchanged): the plug-in distribution of a fitted model.
    pub fn with_estimates(&self, model: &NssModel) -> Result<SubspaceFamilySpec> {
        if model.subspaces().len() != self.n_classes()
            || model.dim() != self.intrinsic_dim
            || model.subspaces()[0].ambient_dim() != self.ambient_dim
        {
            return Err(NssError::DimensionMismatch {
                expected: self.intrinsic_dim,
                found: model.dim(),
            });
        }
        Ok(SubspaceFamilySpec {
            ambient_dim: self.ambient_dim,
            intrinsic_dim: self.intrinsic_dim,
            radius: self.radius,
            noise: self.noise,
            centers: model
                .subspaces()
                .iter()
                .map(|s| s.mean().to_vec())
                .collect(),
            bases: model
                .subspaces()
                .iter()
                .map(|s| s.basis().clone())
                .collect(),
            min_angle: 0.0,
        })
    }

    /// On-subspace coordinates of `x` and its squared orthogonal distance `t`
    /// with respect to class `k`.
    pub fn decompose(&self, k: usize, x: &[f64]) -> Result<(Vec<f64>, f64)> {
        check_len(self.ambient_dim, x.len())?;
        let w = linalg::sub(x, &self.centers[k - 1]);
        let coords = self.bases[k - 1].tr_matvec(&w)?;
        let t = (linalg::norm_sq(&w) - linalg::norm_sq(&coords)).max(0.0);
        Ok((coords, t))
    }

    /// `log(C(d)·β)`: the log of the density at distance zero inside the
    /// support, `−log Vol_d(M) + ((D−d)/2)·log(α/π)`.
    pub fn log_normalizer(&self) -> Result<f64> {
        let alpha = self.alpha()?;
        let codim = (self.ambient_dim - self.intrinsic_dim) as f64;
        Ok(-log_ball_volume(self.intrinsic_dim, self.radius) + 0.5 * codim * (alpha / PI).ln())
    }

    /// Log density of class `k`; `-∞` outside the on-subspace ball.
    pub fn log_class_density(&self, k: usize, x: &[f64]) -> Result<f64> {
        let norm = self.log_normalizer()?;
        let alpha = self.alpha()?;
        let (coords, t) = self.decompose(k, x)?;
        if linalg::norm_sq(&coords) > self.radius * self.radius {
            return Ok(f64::NEG_INFINITY);
        }
        Ok(norm - alpha * t)
    }
}

/// `log Vol` of the `d`-ball of radius `r`: `(d/2) log π + d log r − log Γ(d/2 + 1)`.
pub fn log_ball_volume(d: usize, r: f64) -> f64 {
    0.5 * d as f64 * PI.ln() + d as f64 * r.ln() - ln_gamma_half(d + 2)
}

/// `log Γ(m/2)` for a positive integer `m`.
fn ln_gamma_half(m: usize) -> f64 {
    assert!(m > 0);
    // Γ(1) = 1, Γ(1/2) = √π, Γ(x + 1) = x Γ(x)
    let (mut acc, mut x) = if m.is_multiple_of(2) {
        (0.0, 1.0)
    } else {
        (0.5 * PI.ln(), 0.5)
    };
    while x < m as f64 / 2.0 {
        acc += x.ln();
        x += 1.0;
    }
    acc
}

fn largest_angles(bases: &[Matrix]) -> Result<Vec<((usize, usize), f64)>> {
    let mut out = Vec::new();
    for i in 0..bases.len() {
        for j in (i + 1)..bases.len() {
            let angles = principal_angles(&bases[i], &bases[j])?;
            out.push(((i + 1, j + 1), *angles.last().unwrap_or(&0.0)));
        }
    }
    Ok(out)
}

fn random_basis(rng: &mut Rng, ambient: usize, intrinsic: usize) -> Result<Matrix> {
    let mut raw = vec![0.0; ambient * intrinsic];
    standard_normals(rng, &mut raw);
    orthonormalize_columns(&Matrix::new(ambient, intrinsic, raw)?)
}

/// Draws `k` random `d`-dimensional linear subspaces through the origin whose
/// pairwise largest principal angles all reach `min_angle`.
pub fn random_subspace_spec(
    k: usize,
    ambient_dim: usize,
    intrinsic_dim: usize,
    min_angle: f64,
    radius: f64,
    noise: OrthogonalNoise,
    seed: u64,
) -> Result<SubspaceFamilySpec> {
    if k == 0 || intrinsic_dim == 0 || intrinsic_dim >= ambient_dim {
        return Err(NssError::BadDimension(format!(
            "need K >= 1 and 1 <= d < D (K={k}, d={intrinsic_dim}, D={ambient_dim})"
        )));
    }
    if min_angle > std::f64::consts::FRAC_PI_2 + 1e-12 {
        return Err(NssError::AngleInfeasible {
            min_angle,
            attempts: 0,
        });
    }
    let mut rng = rng::seeded(rng::derive_seed(seed, "subspaces", 0));
    for _ in 0..MAX_ANGLE_REJECTIONS {
        let bases = (0..k)
            .map(|_| random_basis(&mut rng, ambient_dim, intrinsic_dim))
            .collect::<Result<Vec<_>>>()?;
        let ok = largest_angles(&bases)?.iter().all(|&(_, a)| a >= min_angle);
        if ok {
            let centers = vec![vec![0.0; ambient_dim]; k];
            return SubspaceFamilySpec::new(centers, bases, radius, noise, min_angle);
        }
    }
    Err(NssError::AngleInfeasible {
        min_angle,
        attempts: MAX_ANGLE_REJECTIONS,
    })
}

/// Three 2-planes in R⁵⁰ inside the unit disk, separated by at least π/8,
/// with isotropic noise of standard deviation 0.05.
pub fn benchmark_subspace_spec(seed: u64) -> Result<SubspaceFamilySpec> {
    random_subspace_spec(
        3,
        50,
        2,
        FRAC_PI_8,
        1.0,
        OrthogonalNoise::Ambient { sigma: 0.05 },
        seed,
    )
}

/// Exponential-orthogonal family used for consistency experiments.
pub fn exp_subspace_spec(
    k: usize,
    ambient_dim: usize,
    intrinsic_dim: usize,
    alpha: f64,
    radius: f64,
    seed: u64,
) -> Result<SubspaceFamilySpec> {
    random_subspace_spec(
        k,
        ambient_dim,
        intrinsic_dim,
        FRAC_PI_8,
        radius,
        OrthogonalNoise::Exponential { alpha },
        seed,
    )
}

/// Draws `n` samples split evenly over classes (the first `n mod K` classes
/// get one extra). Class `k` samples are `u_k + B_k c + noise` with `c`
/// uniform in the `d`-ball of radius `M`.
pub fn sample_subspace_family(
    spec: &SubspaceFamilySpec,
    n: usize,
    seed: u64,
) -> Result<LabeledDataset> {
    let k = spec.n_classes();
    let counts: Vec<usize> = (0..k).map(|i| n / k + usize::from(i < n % k)).collect();
    let dim = spec.ambient_dim;
    let mut data = Vec::with_capacity(n * dim);
    let mut labels = Vec::with_capacity(n);
    for (class, &count) in counts.iter().enumerate() {
        let block = sample_subspace_class(
            spec,
            class + 1,
            count,
            rng::derive_seed(seed, "subspace-class", class as u64),
        )?;
        data.extend_from_slice(block.as_slice());
        labels.extend(std::iter::repeat_n(class + 1, count));
    }
    LabeledDataset::new(Matrix::new(n, dim, data)?, labels, k)
}

/// Draws `n` points from class `k` (1-based) alone.
pub fn sample_subspace_class(
    spec: &SubspaceFamilySpec,
    k: usize,
    n: usize,
    seed: u64,
) -> Result<Matrix> {
    if k == 0 || k > spec.n_classes() {
        return Err(NssError::InvalidConfig(format!(
            "class {k} outside 1..={}",
            spec.n_classes()
        )));
    }
    let mut rng = rng::seeded(seed);
    let mut data = Vec::with_capacity(n * spec.ambient_dim);
    for _ in 0..n {
        data.extend(sample_one(spec, k - 1, &mut rng));
    }
    Matrix::new(n, spec.ambient_dim, data)
}

/// Uniform point in the `d`-ball: Gaussian direction times `M·U^{1/d}`.
fn ball_point(rng: &mut Rng, d: usize, radius: f64) -> Vec<f64> {
    let mut dir = vec![0.0; d];
    loop {
        standard_normals(rng, &mut dir);
        let nrm = linalg::norm_sq(&dir).sqrt();
        if nrm > 0.0 {
            dir.iter_mut().for_each(|v| *v /= nrm);
            break;
        }
    }
    let u: f64 = rng.random();
    let r = radius * u.powf(1.0 / d as f64);
    dir.iter_mut().for_each(|v| *v *= r);
    dir
}

fn sample_one(spec: &SubspaceFamilySpec, class: usize, rng: &mut Rng) -> Vec<f64> {
    let dim = spec.ambient_dim;
    let basis = &spec.bases[class];
    let coords = ball_point(rng, spec.intrinsic_dim, spec.radius);
    let mut x = spec.centers[class].clone();
    for (xi, b_row) in x.iter_mut().zip(basis.row_iter()) {
        *xi += linalg::dot(b_row, &coords);
    }
    let mut noise = vec![0.0; dim];
    match spec.noise {
        OrthogonalNoise::Ambient { sigma } => {
            if sigma > 0.0 {
                standard_normals(rng, &mut noise);
                for (xi, g) in x.iter_mut().zip(&noise) {
                    *xi += sigma * g;
                }
            }
        }
        OrthogonalNoise::Exponential { alpha } => {
            let s = (0.5 / alpha).sqrt();
            standard_normals(rng, &mut noise);
            let along = basis.tr_matvec(&noise).expect("dims agree");
            for ((xi, g), b_row) in x.iter_mut().zip(&noise).zip(basis.row_iter()) {
                *xi += s * (g - linalg::dot(b_row, &along));
            }
        }
    }
    x
}

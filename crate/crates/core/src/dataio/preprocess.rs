//! Feature scaling and PCA dimension reduction, fitted on training data and
//! reapplied unchanged to test data.

use crate::dataset::LabeledDataset;
use crate::error::{NssError, Result};
use crate::linalg::{check_len, Matrix};
use crate::subspace::ClassSpectrum;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScaleMode {
    /// Per-feature min/max mapped onto `[0, 1]`.
    Unit,
    /// Per-feature division by the maximum absolute value, onto `[−1, 1]`.
    Symmetric,
}

impl ScaleMode {
    pub fn name(self) -> &'static str {
        match self {
            ScaleMode::Unit => "unit",
            ScaleMode::Symmetric => "sym",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "unit" => Some(ScaleMode::Unit),
            "sym" => Some(ScaleMode::Symmetric),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalerParams {
    pub mode: ScaleMode,
    /// Feature minimum (unit mode) or zero (symmetric mode).
    pub offset: Vec<f64>,
    /// Feature range (unit mode) or maximum absolute value (symmetric mode).
    pub span: Vec<f64>,
    /// Features with zero span; they map to 0.
    pub zero_range: Vec<bool>,
}

impl ScalerParams {
    pub fn dim(&self) -> usize {
        self.offset.len()
    }

    pub fn has_zero_range(&self) -> bool {
        self.zero_range.iter().any(|&z| z)
    }

    pub fn apply_row(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.dim(), x.len())?;
        Ok(x.iter()
            .enumerate()
            .map(|(j, &v)| {
                if self.zero_range[j] {
                    0.0
                } else {
                    (v - self.offset[j]) / self.span[j]
                }
            })
            .collect())
    }

    pub fn invert_row(&self, y: &[f64]) -> Result<Vec<f64>> {
        check_len(self.dim(), y.len())?;
        Ok(y.iter()
            .enumerate()
            .map(|(j, &v)| {
                if self.zero_range[j] {
                    // the constant value itself (0 in symmetric mode)
                    self.offset[j]
                } else {
                    v * self.span[j] + self.offset[j]
                }
            })
            .collect())
    }

    pub fn apply(&self, samples: &Matrix) -> Result<Matrix> {
        map_rows(samples, self.dim(), |r| self.apply_row(r))
    }

    pub fn invert(&self, samples: &Matrix) -> Result<Matrix> {
        map_rows(samples, self.dim(), |r| self.invert_row(r))
    }
}

fn map_rows(
    samples: &Matrix,
    out_dim: usize,
    f: impl Fn(&[f64]) -> Result<Vec<f64>>,
) -> Result<Matrix> {
    let mut data = Vec::with_capacity(samples.rows() * out_dim);
    for r in samples.row_iter() {
        data.extend(f(r)?);
    }
    Matrix::new(samples.rows(), out_dim, data)
}

pub fn fit_scaler(samples: &Matrix, mode: ScaleMode) -> Result<ScalerParams> {
    if samples.rows() == 0 {
        return Err(NssError::InvalidConfig(
            "cannot fit a scaler on no samples".into(),
        ));
    }
    let dim = samples.cols();
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for r in samples.row_iter() {
        for (j, &v) in r.iter().enumerate() {
            lo[j] = lo[j].min(v);
            hi[j] = hi[j].max(v);
        }
    }
    let (offset, span): (Vec<f64>, Vec<f64>) = match mode {
        ScaleMode::Unit => lo.iter().zip(&hi).map(|(&l, &h)| (l, h - l)).unzip(),
        ScaleMode::Symmetric => lo
            .iter()
            .zip(&hi)
            .map(|(&l, &h)| (0.0, l.abs().max(h.abs())))
            .unzip(),
    };
    let zero_range = span.iter().map(|&s| s == 0.0).collect();
    Ok(ScalerParams {
        mode,
        offset,
        span,
        zero_range,
    })
}

/// Centered projection onto leading principal components.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaReducer {
    pub center: Vec<f64>,
    /// D×m, orthonormal columns.
    pub components: Matrix,
    /// Share of total variance captured by the kept components.
    pub explained_variance_ratio: f64,
}

impl PcaReducer {
    pub fn input_dim(&self) -> usize {
        self.center.len()
    }

    pub fn output_dim(&self) -> usize {
        self.components.cols()
    }

    /// `componentsᵀ (x − center)`.
    pub fn apply_row(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.input_dim(), x.len())?;
        let w: Vec<f64> = x.iter().zip(&self.center).map(|(a, b)| a - b).collect();
        self.components.tr_matvec(&w)
    }

    pub fn apply(&self, samples: &Matrix) -> Result<Matrix> {
        map_rows(samples, self.output_dim(), |r| self.apply_row(r))
    }

    /// Maps reduced coordinates back to the input space.
    pub fn reconstruct_row(&self, y: &[f64]) -> Result<Vec<f64>> {
        check_len(self.output_dim(), y.len())?;
        let mut x = self.components.matvec(y)?;
        for (xi, c) in x.iter_mut().zip(&self.center) {
            *xi += c;
        }
        Ok(x)
    }
}

/// Keeps the fewest leading components whose eigenvalue share reaches
/// `variance_target`, but never more than `max_dim`.
pub fn fit_pca(samples: &Matrix, variance_target: f64, max_dim: usize) -> Result<PcaReducer> {
    if samples.rows() < 2 {
        return Err(NssError::InvalidConfig(
            "PCA needs at least two samples".into(),
        ));
    }
    if !(variance_target > 0.0 && variance_target <= 1.0) || max_dim == 0 {
        return Err(NssError::InvalidConfig(format!(
            "PCA target {variance_target} must lie in (0, 1] and max dimension must be positive"
        )));
    }
    let dim = samples.cols();
    let cap = max_dim.min(dim);
    // the Gram route returns only non-null directions, which always suffice
    // because the null directions add no variance
    let rank_hint = cap.min(samples.rows() - 1).max(1);
    let spectrum = ClassSpectrum::compute(samples, rank_hint)?;
    let values: Vec<f64> = spectrum.eigenvalues().iter().map(|v| v.max(0.0)).collect();
    let total: f64 = values.iter().sum();
    let mut m = cap;
    if total > 0.0 {
        let mut acc = 0.0;
        for (i, v) in values.iter().enumerate().take(cap) {
            acc += v;
            if acc / total >= variance_target * (1.0 - 1e-12) {
                m = i + 1;
                break;
            }
        }
    } else {
        m = 1;
    }
    let m = m.min(spectrum.available_dims());
    let kept: f64 = values[..m].iter().sum();
    Ok(PcaReducer {
        center: spectrum.mean().to_vec(),
        components: spectrum.directions(m)?,
        explained_variance_ratio: if total > 0.0 { kept / total } else { 1.0 },
    })
}

/// Preprocessing fitted on a training split.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Preprocessor {
    pub scaler: Option<ScalerParams>,
    pub pca: Option<PcaReducer>,
}

/// PCA settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PcaSettings {
    pub variance_target: f64,
    pub max_dim: usize,
}

impl Default for PcaSettings {
    fn default() -> Self {
        PcaSettings {
            variance_target: 0.95,
            max_dim: 1000,
        }
    }
}

impl Preprocessor {
    /// Fits scaling, then PCA on the scaled training samples.
    pub fn fit(train: &Matrix, scale: Option<ScaleMode>, pca: Option<PcaSettings>) -> Result<Self> {
        let scaler = scale.map(|m| fit_scaler(train, m)).transpose()?;
        let pca = match pca {
            Some(p) => {
                let scaled = match &scaler {
                    Some(s) => s.apply(train)?,
                    None => train.clone(),
                };
                Some(fit_pca(&scaled, p.variance_target, p.max_dim)?)
            }
            None => None,
        };
        Ok(Preprocessor { scaler, pca })
    }

    pub fn is_identity(&self) -> bool {
        self.scaler.is_none() && self.pca.is_none()
    }

    pub fn input_dim(&self) -> Option<usize> {
        self.scaler
            .as_ref()
            .map(ScalerParams::dim)
            .or_else(|| self.pca.as_ref().map(PcaReducer::input_dim))
    }

    pub fn apply_row(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut v = match &self.scaler {
            Some(s) => s.apply_row(x)?,
            None => x.to_vec(),
        };
        if let Some(p) = &self.pca {
            v = p.apply_row(&v)?;
        }
        Ok(v)
    }

    pub fn apply(&self, samples: &Matrix) -> Result<Matrix> {
        let mut m = match &self.scaler {
            Some(s) => s.apply(samples)?,
            None => samples.clone(),
        };
        if let Some(p) = &self.pca {
            m = p.apply(&m)?;
        }
        Ok(m)
    }

    pub fn apply_dataset(&self, data: &LabeledDataset) -> Result<LabeledDataset> {
        if self.is_identity() {
            return Ok(data.clone());
        }
        data.with_samples(self.apply(data.samples())?)
    }
}

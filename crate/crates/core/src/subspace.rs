//! Affine subspace fitted to one class, and the squared orthogonal distance
//! to it.

use log::warn;

use crate::error::{NssError, Result};
use crate::linalg::{self, centered_scatter, check_len, dot, mean_vector, symmetric_eigen, Matrix};

/// One class's affine subspace: `mean + span(basis)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceModel {
    mean: Vec<f64>,
    /// D×d, orthonormal columns.
    basis: Matrix,
    n_samples: usize,
}

impl SubspaceModel {
    /// Assembles a model from known parameters, checking orthonormality.
    pub fn new(mean: Vec<f64>, basis: Matrix) -> Result<Self> {
        Self::with_samples(mean, basis, usize::MAX)
    }

    pub(crate) fn with_samples(mean: Vec<f64>, basis: Matrix, n_samples: usize) -> Result<Self> {
        check_len(basis.rows(), mean.len())?;
        let d = basis.cols();
        if d >= mean.len() && !(d == 0 && mean.is_empty()) {
            return Err(NssError::BadDimension(format!(
                "subspace dimension {d} must be below ambient dimension {}",
                mean.len()
            )));
        }
        if mean.iter().any(|v| !v.is_finite()) {
            return Err(NssError::NonFinite("subspace mean"));
        }
        let err = linalg::orthonormality_error(&basis);
        if err > 1e-8 {
            return Err(NssError::BadDimension(format!(
                "basis is not orthonormal (deviation {err:e})"
            )));
        }
        Ok(SubspaceModel {
            mean,
            basis,
            n_samples,
        })
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.mean.len()
    }

    /// True when the model was fitted from no more than `d` points, so part
    /// of its basis is an arbitrary completion.
    /// Number of training points, or `usize::MAX` when built from parts.
    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn is_degenerate(&self) -> bool {
        self.n_samples <= self.dim()
    }

    /// Coordinates of `x − mean` in the basis.
    pub fn coordinates(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.ambient_dim(), x.len())?;
        let w = linalg::sub(x, &self.mean);
        self.basis.tr_matvec(&w)
    }

    /// Squared distance from `x` to the affine subspace, computed as
    /// `‖x−u‖² − ‖Bᵀ(x−u)‖²` and clamped at zero.
    pub fn residual(&self, x: &[f64]) -> Result<f64> {
        check_len(self.ambient_dim(), x.len())?;
        Ok(self.residual_unchecked(x))
    }

    pub(crate) fn residual_unchecked(&self, x: &[f64]) -> f64 {
        let d = self.dim();
        if d == 0 {
            return x
                .iter()
                .zip(&self.mean)
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
        }
        let mut coef = [0.0f64; 16];
        let mut heap;
        let coef: &mut [f64] = if d <= coef.len() {
            &mut coef[..d]
        } else {
            heap = vec![0.0; d];
            &mut heap
        };
        let mut total = 0.0;
        for ((&xi, &ui), b_row) in x.iter().zip(&self.mean).zip(self.basis.row_iter()) {
            let w = xi - ui;
            total += w * w;
            for (c, &b) in coef.iter_mut().zip(b_row) {
                *c += b * w;
            }
        }
        (total - dot(coef, coef)).max(0.0)
    }

    /// Sum of residuals over the rows of `points`, the quantity the fitted
    /// basis minimizes.
    pub fn objective(&self, points: &Matrix) -> Result<f64> {
        check_len(self.ambient_dim(), points.cols())?;
        Ok(points.row_iter().map(|r| self.residual_unchecked(r)).sum())
    }

    /// `BBᵀ`, only for verification; classification never forms it.
    pub fn projector(&self) -> Matrix {
        self.basis
            .matmul(&self.basis.transpose())
            .expect("shapes agree by construction")
    }
}

/// Mean and leading principal directions of one class, computed once so
/// that models of several dimensions can be cut from it.
#[derive(Debug, Clone)]
pub struct ClassSpectrum {
    mean: Vec<f64>,
    /// Eigenvalues of the centered scatter, non-increasing.
    values: Vec<f64>,
    /// D×r eigenvectors, r ≥ every dimension requested from `model`.
    vectors: Matrix,
    n_samples: usize,
}

impl ClassSpectrum {
    /// Computes enough of the spectrum to cut models up to `max_dim`.
    ///
    /// The D×D scatter is decomposed when `D ≤ n`; otherwise the n×n Gram
    /// matrix of the centered points is used, falling back to the scatter
    /// when its rank cannot supply `max_dim` directions.
    pub fn compute(points: &Matrix, max_dim: usize) -> Result<Self> {
        let n = points.rows();
        let dim = points.cols();
        let mean = mean_vector(points)?;
        if max_dim > dim {
            return Err(NssError::BadDimension(format!(
                "requested {max_dim} directions in ambient dimension {dim}"
            )));
        }
        if n < dim {
            if let Some(spec) = Self::from_gram(points, &mean, max_dim)? {
                return Ok(spec);
            }
        }
        let scatter = centered_scatter(points, &mean)?;
        let eig = symmetric_eigen(&scatter)?;
        Ok(ClassSpectrum {
            mean,
            values: eig.values,
            vectors: eig.vectors,
            n_samples: n,
        })
    }

    fn from_gram(points: &Matrix, mean: &[f64], max_dim: usize) -> Result<Option<Self>> {
        let n = points.rows();
        let centered: Vec<Vec<f64>> = points.row_iter().map(|r| linalg::sub(r, mean)).collect();
        let mut gram = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let g = dot(&centered[i], &centered[j]);
                gram[(i, j)] = g;
                gram[(j, i)] = g;
            }
        }
        let eig = symmetric_eigen(&gram)?;
        let top = eig.values.first().copied().unwrap_or(0.0);
        let usable = eig
            .values
            .iter()
            .take_while(|&&l| l > 1e-10 * top.max(f64::MIN_POSITIVE))
            .count();
        if usable < max_dim {
            return Ok(None);
        }
        let dim = mean.len();
        let mut cols = Vec::with_capacity(usable);
        for i in 0..usable {
            let v = eig.vector(i);
            let inv = 1.0 / eig.values[i].sqrt();
            let mut u = vec![0.0; dim];
            for (c, &vi) in centered.iter().zip(&v) {
                for (uj, &cj) in u.iter_mut().zip(c) {
                    *uj += vi * cj;
                }
            }
            u.iter_mut().for_each(|x| *x *= inv);
            linalg::fix_sign(&mut u);
            cols.push(u);
        }
        let mut values = eig.values[..usable].to_vec();
        values.resize(dim, 0.0);
        Ok(Some(ClassSpectrum {
            mean: mean.to_vec(),
            values,
            vectors: Matrix::from_columns(&cols)?,
            n_samples: n,
        }))
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.values
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn available_dims(&self) -> usize {
        self.vectors.cols()
    }

    /// The `d` leading eigenvectors as columns.
    pub fn directions(&self, d: usize) -> Result<Matrix> {
        if d > self.available_dims() {
            return Err(NssError::BadDimension(format!(
                "spectrum holds {} directions, {d} requested",
                self.available_dims()
            )));
        }
        Ok(self.vectors.leading_columns(d))
    }

    pub fn model(&self, d: usize) -> Result<SubspaceModel> {
        if d > self.available_dims() {
            return Err(NssError::BadDimension(format!(
                "spectrum holds {} directions, {d} requested",
                self.available_dims()
            )));
        }
        SubspaceModel::with_samples(
            self.mean.clone(),
            self.vectors.leading_columns(d),
            self.n_samples,
        )
    }
}

/// Fits the affine subspace of dimension `d` minimizing the summed squared
/// orthogonal residual of `points`.
pub fn fit_subspace(points: &Matrix, d: usize) -> Result<SubspaceModel> {
    if points.rows() == 0 {
        return Err(NssError::EmptyClass { class: 0 });
    }
    if d == 0 || d >= points.cols() {
        return Err(NssError::BadDimension(format!(
            "intrinsic dimension {d} must satisfy 1 <= d < {}",
            points.cols()
        )));
    }
    let model = ClassSpectrum::compute(points, d)?.model(d)?;
    if model.is_degenerate() {
        warn!(
            "degenerate class: {} points for a {d}-dimensional subspace",
            points.rows()
        );
    }
    Ok(model)
}

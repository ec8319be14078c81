use crate::classifiers::{argmax, Classifier};
use crate::dataset::LabeledDataset;
use crate::error::{NssError, Result};
use crate::linalg::{self, centered_scatter, check_len, dot, mean_vector, symmetric_eigen, Matrix};

/// Pooled covariances with a larger condition number are treated as singular.
pub const MAX_CONDITION: f64 = 1e12;

/// Gaussian discriminant with a shared (pooled) covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct LdaModel {
    class_means: Vec<Vec<f64>>,
    pooled_covariance_inverse: Matrix,
    log_priors: Vec<f64>,
    // Σ⁻¹μ_k and −½μ_kᵀΣ⁻¹μ_k + log π_k, cached for prediction
    weights: Vec<Vec<f64>>,
    offsets: Vec<f64>,
}

impl LdaModel {
    pub fn from_parts(
        class_means: Vec<Vec<f64>>,
        pooled_covariance_inverse: Matrix,
        log_priors: Vec<f64>,
    ) -> Result<Self> {
        let dim = pooled_covariance_inverse.rows();
        if class_means.len() != log_priors.len() || class_means.is_empty() {
            return Err(NssError::InvalidSpec(
                "one mean and one prior per class".into(),
            ));
        }
        let mut weights = Vec::with_capacity(class_means.len());
        let mut offsets = Vec::with_capacity(class_means.len());
        for (mu, &lp) in class_means.iter().zip(&log_priors) {
            check_len(dim, mu.len())?;
            let w = pooled_covariance_inverse.matvec(mu)?;
            offsets.push(-0.5 * dot(mu, &w) + lp);
            weights.push(w);
        }
        Ok(LdaModel {
            class_means,
            pooled_covariance_inverse,
            log_priors,
            weights,
            offsets,
        })
    }

    pub fn class_means(&self) -> &[Vec<f64>] {
        &self.class_means
    }

    pub fn pooled_covariance_inverse(&self) -> &Matrix {
        &self.pooled_covariance_inverse
    }

    pub fn log_priors(&self) -> &[f64] {
        &self.log_priors
    }

    /// Linear discriminant scores `xᵀΣ⁻¹μ_k − ½μ_kᵀΣ⁻¹μ_k + log π_k`.
    pub fn scores(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.ambient_dim(), x.len())?;
        Ok(self
            .weights
            .iter()
            .zip(&self.offsets)
            .map(|(w, b)| dot(x, w) + b)
            .collect())
    }
}

impl Classifier for LdaModel {
    fn predict(&self, x: &[f64]) -> Result<usize> {
        Ok(argmax(self.scores(x)?))
    }

    fn ambient_dim(&self) -> usize {
        self.pooled_covariance_inverse.rows()
    }

    fn n_classes(&self) -> usize {
        self.class_means.len()
    }
}

/// Fits class means, empirical priors and the inverse of the pooled
/// within-class covariance (denominator `n − K`).
pub fn lda_fit(data: &LabeledDataset) -> Result<LdaModel> {
    data.require_all_classes()?;
    let dim = data.dim();
    let n = data.len();
    let k = data.n_classes();
    let mut pooled = Matrix::zeros(dim, dim);
    let mut means = Vec::with_capacity(k);
    let mut log_priors = Vec::with_capacity(k);
    for class in 1..=k {
        let rows = data.class_rows(class);
        let mu = mean_vector(&rows)?;
        let s = centered_scatter(&rows, &mu)?;
        for (p, v) in pooled.as_mut_slice().iter_mut().zip(s.as_slice()) {
            *p += v;
        }
        log_priors.push((rows.rows() as f64 / n as f64).ln());
        means.push(mu);
    }
    if n <= k {
        return Err(NssError::SingularCovariance {
            condition: f64::INFINITY,
        });
    }
    pooled.scale(1.0 / (n - k) as f64);

    let eig = symmetric_eigen(&pooled)?;
    let largest = eig.values[0];
    let smallest = *eig.values.last().expect("dim >= 1");
    let condition = if smallest > 0.0 {
        largest / smallest
    } else {
        f64::INFINITY
    };
    if condition.is_nan() || condition > MAX_CONDITION || linalg::cholesky(&pooled).is_none() {
        return Err(NssError::SingularCovariance { condition });
    }
    let mut inverse = Matrix::zeros(dim, dim);
    for (idx, &lambda) in eig.values.iter().enumerate() {
        let v = eig.vector(idx);
        for i in 0..dim {
            let vi = v[i] / lambda;
            for j in 0..dim {
                inverse[(i, j)] += vi * v[j];
            }
        }
    }
    // exact symmetry for serialization round trips
    for i in 0..dim {
        for j in 0..i {
            let avg = 0.5 * (inverse[(i, j)] + inverse[(j, i)]);
            inverse[(i, j)] = avg;
            inverse[(j, i)] = avg;
        }
    }
    LdaModel::from_parts(means, inverse, log_priors)
}

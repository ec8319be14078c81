use crate::classifiers::{argmin, Classifier};
use crate::dataset::LabeledDataset;
use crate::error::{NssError, Result};
use crate::linalg::check_len;
use crate::par;
use crate::subspace::{fit_subspace, SubspaceModel};

/// One affine subspace per class, all of the same dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct NssModel {
    subspaces: Vec<SubspaceModel>,
    dim: usize,
}

impl NssModel {
    pub fn new(subspaces: Vec<SubspaceModel>) -> Result<Self> {
        let first = subspaces
            .first()
            .ok_or_else(|| NssError::InvalidSpec("model needs at least one class".into()))?;
        let (dim, ambient) = (first.dim(), first.ambient_dim());
        for s in &subspaces {
            if s.dim() != dim || s.ambient_dim() != ambient {
                return Err(NssError::DimensionMismatch {
                    expected: dim,
                    found: s.dim(),
                });
            }
        }
        Ok(NssModel { subspaces, dim })
    }

    pub fn subspaces(&self) -> &[SubspaceModel] {
        &self.subspaces
    }

    pub fn subspace(&self, k: usize) -> &SubspaceModel {
        &self.subspaces[k - 1]
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Residual of `x` to every class subspace, in class order.
    pub fn residuals(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.ambient_dim(), x.len())?;
        Ok(self
            .subspaces
            .iter()
            .map(|s| s.residual_unchecked(x))
            .collect())
    }
}

impl Classifier for NssModel {
    fn predict(&self, x: &[f64]) -> Result<usize> {
        Ok(argmin(self.residuals(x)?))
    }

    fn ambient_dim(&self) -> usize {
        self.subspaces[0].ambient_dim()
    }

    fn n_classes(&self) -> usize {
        self.subspaces.len()
    }
}

/// Fits one `d`-dimensional affine subspace per class.
pub fn nss_fit(data: &LabeledDataset, d: usize) -> Result<NssModel> {
    data.require_all_classes()?;
    if d == 0 || d >= data.dim() {
        return Err(NssError::BadDimension(format!(
            "intrinsic dimension {d} must satisfy 1 <= d < {}",
            data.dim()
        )));
    }
    let fits = par::map_indexed(data.n_classes(), |i| {
        fit_subspace(&data.class_rows(i + 1), d)
    });
    let subspaces = fits
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            r.map_err(|e| match e {
                NssError::EmptyClass { .. } => NssError::EmptyClass { class: i + 1 },
                other => other,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    NssModel::new(subspaces)
}

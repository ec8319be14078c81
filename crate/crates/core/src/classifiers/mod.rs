//! Nearest-subspace classification and the linear baselines it is compared
//! against.

mod centroid;
mod cv;
mod lda;
mod nss;

pub use centroid::{centroid_fit, CentroidModel};
pub use cv::{default_cv_grid, nss_cross_validate, CvReport};
pub use lda::{lda_fit, LdaModel};
pub use nss::{nss_fit, NssModel};

use crate::dataset::LabeledDataset;
use crate::error::Result;

/// A fitted classifier mapping a feature vector to a class in `1..=K`.
pub trait Classifier {
    fn predict(&self, x: &[f64]) -> Result<usize>;

    fn ambient_dim(&self) -> usize;

    fn n_classes(&self) -> usize;

    fn predict_all(&self, data: &LabeledDataset) -> Result<Vec<usize>> {
        (0..data.len()).map(|i| self.predict(data.row(i))).collect()
    }

    /// Fraction of rows whose prediction matches the label.
    fn accuracy(&self, data: &LabeledDataset) -> Result<f64> {
        let pred = self.predict_all(data)?;
        let hits = pred
            .iter()
            .zip(data.labels())
            .filter(|(p, l)| p == l)
            .count();
        Ok(hits as f64 / data.len() as f64)
    }
}

/// Index (1-based) of the smallest score; the first wins ties.
pub(crate) fn argmin(scores: impl IntoIterator<Item = f64>) -> usize {
    let mut iter = scores.into_iter();
    let Some(mut best) = iter.next() else {
        return 1;
    };
    let mut idx = 0;
    for (i, s) in iter.enumerate() {
        if s < best {
            best = s;
            idx = i + 1;
        }
    }
    idx + 1
}

/// Index (1-based) of the largest score; the first wins ties.
pub(crate) fn argmax(scores: impl IntoIterator<Item = f64>) -> usize {
    argmin(scores.into_iter().map(|s| -s))
}

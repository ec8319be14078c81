use crate::classifiers::{Classifier, NssModel};
use crate::dataset::{stratified_folds, LabeledDataset};
use crate::error::{NssError, Result};
use crate::par;
use crate::subspace::ClassSpectrum;

/// Outcome of selecting the intrinsic dimension by k-fold cross validation.
#[derive(Debug, Clone, PartialEq)]
pub struct CvReport {
    /// Ascending, deduplicated.
    pub candidate_dims: Vec<usize>,
    /// `fold_accuracies[c][f]`: accuracy of candidate `c` on fold `f`.
    pub fold_accuracies: Vec<Vec<f64>>,
    pub chosen_dim: usize,
}

impl CvReport {
    pub fn mean_accuracy(&self, candidate: usize) -> f64 {
        let accs = &self.fold_accuracies[candidate];
        accs.iter().sum::<f64>() / accs.len() as f64
    }
}

/// `{1, 2, 3, 5, 8, 12, 20, ⌊D/2⌋} ∩ [1, D−1]`.
pub fn default_cv_grid(ambient_dim: usize) -> Vec<usize> {
    let mut grid: Vec<usize> = [1, 2, 3, 5, 8, 12, 20, ambient_dim / 2]
        .into_iter()
        .filter(|&d| d >= 1 && d < ambient_dim)
        .collect();
    grid.sort_unstable();
    grid.dedup();
    grid
}

/// Picks the shared subspace dimension maximizing mean validation accuracy
/// over stratified folds; ties go to the smaller dimension.
///
/// Each fold decomposes every class once and cuts all candidate models from
/// that spectrum.
pub fn nss_cross_validate(
    data: &LabeledDataset,
    candidate_dims: &[usize],
    folds: usize,
    seed: u64,
) -> Result<CvReport> {
    let mut dims = candidate_dims.to_vec();
    dims.sort_unstable();
    dims.dedup();
    let max_dim = match dims.last() {
        Some(&m) => m,
        None => return Err(NssError::InvalidConfig("no candidate dimensions".into())),
    };
    if dims[0] == 0 || max_dim >= data.dim() {
        return Err(NssError::BadDimension(format!(
            "candidate dimensions must lie in [1, {}]",
            data.dim() - 1
        )));
    }
    data.require_all_classes()?;
    let assignment = stratified_folds(data, folds, seed)?;

    let per_fold: Vec<Result<Vec<f64>>> = par::map_indexed(folds, |f| {
        let held_out = &assignment[f];
        let train_idx: Vec<usize> = assignment
            .iter()
            .enumerate()
            .filter(|&(g, _)| g != f)
            .flat_map(|(_, idx)| idx.iter().copied())
            .collect();
        let train = data.subset(&train_idx);
        let valid = data.subset(held_out);
        let spectra = (1..=data.n_classes())
            .map(|k| ClassSpectrum::compute(&train.class_rows(k), max_dim))
            .collect::<Result<Vec<_>>>()?;
        dims.iter()
            .map(|&d| {
                let model = NssModel::new(
                    spectra
                        .iter()
                        .map(|s| s.model(d))
                        .collect::<Result<Vec<_>>>()?,
                )?;
                model.accuracy(&valid)
            })
            .collect()
    });
    let per_fold = per_fold.into_iter().collect::<Result<Vec<_>>>()?;

    let fold_accuracies: Vec<Vec<f64>> = (0..dims.len())
        .map(|c| per_fold.iter().map(|accs| accs[c]).collect())
        .collect();
    let mut report = CvReport {
        candidate_dims: dims,
        fold_accuracies,
        chosen_dim: 0,
    };
    let mut best = f64::NEG_INFINITY;
    for c in 0..report.candidate_dims.len() {
        let acc = report.mean_accuracy(c);
        if acc > best {
            best = acc;
            report.chosen_dim = report.candidate_dims[c];
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;

    #[test]
    fn grid_respects_ambient_dimension() {
        assert_eq!(default_cv_grid(50), vec![1, 2, 3, 5, 8, 12, 20, 25]);
        assert_eq!(default_cv_grid(3), vec![1, 2]);
        assert_eq!(default_cv_grid(13), vec![1, 2, 3, 5, 6, 8, 12]);
        assert!(default_cv_grid(1).is_empty());
    }

    fn blobs() -> LabeledDataset {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..20 {
            let t = i as f64;
            rows.push(vec![t, 0.1 * (t * 1.7).sin(), 0.1 * (t * 0.3).cos()]);
            labels.push(1);
            rows.push(vec![0.1 * (t * 2.1).sin(), t, 5.0 + 0.1 * (t * 0.9).cos()]);
            labels.push(2);
        }
        LabeledDataset::new(Matrix::from_rows(&rows).unwrap(), labels, 2).unwrap()
    }

    #[test]
    fn single_candidate_is_chosen() {
        let r = nss_cross_validate(&blobs(), &[2], 5, 1).unwrap();
        assert_eq!(r.chosen_dim, 2);
        assert_eq!(r.fold_accuracies.len(), 1);
        assert_eq!(r.fold_accuracies[0].len(), 5);
    }

    #[test]
    fn ties_prefer_smaller_dimension() {
        // perfectly separable at every candidate → all accuracies 1
        let r = nss_cross_validate(&blobs(), &[2, 1], 4, 3).unwrap();
        assert_eq!(r.candidate_dims, vec![1, 2]);
        assert_eq!(r.mean_accuracy(0), r.mean_accuracy(1));
        assert_eq!(r.chosen_dim, 1);
    }

    #[test]
    fn deterministic_given_seed() {
        let a = nss_cross_validate(&blobs(), &[1, 2], 10, 42).unwrap();
        let b = nss_cross_validate(&blobs(), &[1, 2], 10, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_candidates() {
        assert!(matches!(
            nss_cross_validate(&blobs(), &[3], 5, 0),
            Err(NssError::BadDimension(_))
        ));
        assert!(matches!(
            nss_cross_validate(&blobs(), &[1], 1, 0),
            Err(NssError::InfeasibleFolds(_))
        ));
    }
}

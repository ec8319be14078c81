use crate::classifiers::{argmin, Classifier};
use crate::dataset::LabeledDataset;
use crate::error::{NssError, Result};
use crate::linalg::{check_len, mean_vector};

/// Nearest class mean.
#[derive(Debug, Clone, PartialEq)]
pub struct CentroidModel {
    means: Vec<Vec<f64>>,
}

impl CentroidModel {
    pub fn new(means: Vec<Vec<f64>>) -> Result<Self> {
        let dim = means
            .first()
            .ok_or_else(|| NssError::InvalidSpec("model needs at least one class".into()))?
            .len();
        for m in &means {
            check_len(dim, m.len())?;
        }
        Ok(CentroidModel { means })
    }

    pub fn means(&self) -> &[Vec<f64>] {
        &self.means
    }
}

impl Classifier for CentroidModel {
    fn predict(&self, x: &[f64]) -> Result<usize> {
        check_len(self.ambient_dim(), x.len())?;
        Ok(argmin(self.means.iter().map(|m| {
            x.iter().zip(m).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()
        })))
    }

    fn ambient_dim(&self) -> usize {
        self.means[0].len()
    }

    fn n_classes(&self) -> usize {
        self.means.len()
    }
}

pub fn centroid_fit(data: &LabeledDataset) -> Result<CentroidModel> {
    data.require_all_classes()?;
    let means = (1..=data.n_classes())
        .map(|k| mean_vector(&data.class_rows(k)))
        .collect::<Result<Vec<_>>>()?;
    CentroidModel::new(means)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::NssModel;
    use crate::datagen::{sample_gaussian_mixture, GaussianMixtureSpec};
    use crate::linalg::Matrix;
    use crate::subspace::SubspaceModel;

    #[test]
    fn midpoint_goes_to_first_class() {
        let m = CentroidModel::new(vec![vec![0.0, 0.0], vec![2.0, 2.0]]).unwrap();
        assert_eq!(m.predict(&[1.0, 1.0]).unwrap(), 1);
        assert_eq!(m.predict(&[1.5, 1.0]).unwrap(), 2);
    }

    #[test]
    fn equals_nss_with_empty_bases() {
        let means = vec![
            vec![0.0, 1.0, 2.0],
            vec![-1.0, 0.5, 0.0],
            vec![3.0, 3.0, -1.0],
        ];
        let c = CentroidModel::new(means.clone()).unwrap();
        let nss = NssModel::new(
            means
                .iter()
                .map(|m| SubspaceModel::new(m.clone(), Matrix::zeros(3, 0)).unwrap())
                .collect(),
        )
        .unwrap();
        let spec =
            GaussianMixtureSpec::new(means, vec![Matrix::identity(3); 3], vec![1.0 / 3.0; 3])
                .unwrap();
        let test = sample_gaussian_mixture(&spec, 600, 5).unwrap();
        assert_eq!(
            c.predict_all(&test).unwrap(),
            nss.predict_all(&test).unwrap()
        );
    }

    #[test]
    fn distant_gaussians_are_easy() {
        // analytic error Φ(−‖μ₁−μ₂‖/2σ) = Φ(−3) ≈ 0.00135 per point
        let spec = GaussianMixtureSpec::new(
            vec![vec![0.0, 0.0], vec![6.0, 0.0]],
            vec![Matrix::identity(2); 2],
            vec![0.5, 0.5],
        )
        .unwrap();
        let train = sample_gaussian_mixture(&spec, 1000, 11).unwrap();
        let test = sample_gaussian_mixture(&spec, 1000, 12).unwrap();
        let m = centroid_fit(&train).unwrap();
        assert!(m.accuracy(&test).unwrap() >= 0.99);
    }
}

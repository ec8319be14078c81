//! Nearest-subspace (NSS) classification.
//!
//! Each class is summarized by its mean and the `d` leading principal
//! directions of its centered samples; a point is assigned to the class whose
//! affine subspace is nearest in squared Euclidean distance. Around that
//! classifier the crate provides linear baselines, synthetic distributions
//! with known Bayes rules, dataset I/O and preprocessing, and a Monte Carlo
//! laboratory for measuring how fast the NSS risk approaches the Bayes risk.

pub mod bench;
pub mod classifiers;
pub mod datagen;
pub mod dataio;
pub mod dataset;
pub mod error;
pub mod linalg;
pub mod model_file;
mod par;
pub mod risk;
pub mod rng;
pub mod subspace;

pub use classifiers::{
    centroid_fit, default_cv_grid, lda_fit, nss_cross_validate, nss_fit, CentroidModel, Classifier,
    CvReport, LdaModel, NssModel,
};
pub use dataset::LabeledDataset;
pub use error::{ErrorClass, NssError, Result};
pub use linalg::Matrix;
pub use subspace::{fit_subspace, SubspaceModel};

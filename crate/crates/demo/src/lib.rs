//! WebAssembly bindings for the browser demo in `www/`.

use wasm_bindgen::prelude::*;

use nss_core::bench::Builtin;
use nss_core::datagen::{
    exp_subspace_spec, sample_subspace_family, OrthogonalNoise, SubspaceFamilySpec,
};
use nss_core::risk::{consistency_study, StudySettings};
use nss_core::{default_cv_grid, nss_cross_validate, nss_fit, Classifier, Matrix, NssError};

fn js(e: NssError) -> JsError {
    JsError::new(&e.to_string())
}

/// Samples, fitted lines and the NSS label of every grid cell.
#[wasm_bindgen]
pub struct DecisionMap {
    points: Vec<f64>,
    labels: Vec<u32>,
    grid: Vec<u8>,
    lines: Vec<f64>,
    resolution: usize,
    extent: f64,
}

#[wasm_bindgen]
impl DecisionMap {
    /// Interleaved `x, y` of every sample.
    pub fn points(&self) -> Vec<f64> {
        self.points.clone()
    }

    pub fn labels(&self) -> Vec<u32> {
        self.labels.clone()
    }

    /// Row-major class labels, row 0 at the top (`y = extent`).
    pub fn grid(&self) -> Vec<u8> {
        self.grid.clone()
    }

    /// Per class: mean `x, y` then direction `x, y`.
    pub fn lines(&self) -> Vec<f64> {
        self.lines.clone()
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    /// Half-width of the square shown.
    pub fn extent(&self) -> f64 {
        self.extent
    }
}

/// Three noisy segments through nearby offsets, `spread_deg` degrees apart,
/// classified by NSS with one-dimensional subspaces.
#[wasm_bindgen]
pub fn decision_map(
    spread_deg: f64,
    sigma: f64,
    per_class: usize,
    seed: u64,
    resolution: usize,
) -> Result<DecisionMap, JsError> {
    build_decision_map(spread_deg, sigma, per_class, seed, resolution).map_err(js)
}

fn build_decision_map(
    spread_deg: f64,
    sigma: f64,
    per_class: usize,
    seed: u64,
    resolution: usize,
) -> nss_core::Result<DecisionMap> {
    if resolution == 0 || resolution > 1024 || per_class < 2 {
        return Err(NssError::InvalidConfig(
            "resolution must be in 1..=1024 and at least two points per class are needed".into(),
        ));
    }
    let offsets = [[0.0, 0.0], [0.3, -0.2], [-0.25, 0.25]];
    let mut centers = Vec::new();
    let mut bases = Vec::new();
    for (k, off) in offsets.iter().enumerate() {
        let a = (k as f64 * spread_deg).to_radians();
        centers.push(off.to_vec());
        bases.push(Matrix::from_columns(&[vec![a.cos(), a.sin()]])?);
    }
    let spec =
        SubspaceFamilySpec::new(centers, bases, 1.0, OrthogonalNoise::Ambient { sigma }, 0.0)?;
    let data = sample_subspace_family(&spec, 3 * per_class, seed)?;
    let model = nss_fit(&data, 1)?;

    let extent = 1.5;
    let mut grid = Vec::with_capacity(resolution * resolution);
    for i in 0..resolution {
        let y = extent - (i as f64 + 0.5) * 2.0 * extent / resolution as f64;
        for j in 0..resolution {
            let x = -extent + (j as f64 + 0.5) * 2.0 * extent / resolution as f64;
            grid.push(model.predict(&[x, y])? as u8);
        }
    }
    let lines = model
        .subspaces()
        .iter()
        .flat_map(|s| {
            let b = s.basis();
            [s.mean()[0], s.mean()[1], b[(0, 0)], b[(1, 0)]]
        })
        .collect();
    Ok(DecisionMap {
        points: data.samples().as_slice().to_vec(),
        labels: data.labels().iter().map(|&l| l as u32).collect(),
        grid,
        lines,
        resolution,
        extent,
    })
}

/// Cross-validated accuracy of each candidate subspace dimension.
#[wasm_bindgen]
pub struct CvScores {
    dims: Vec<u32>,
    accuracies: Vec<f64>,
    chosen: u32,
}

#[wasm_bindgen]
impl CvScores {
    pub fn dims(&self) -> Vec<u32> {
        self.dims.clone()
    }

    pub fn accuracies(&self) -> Vec<f64> {
        self.accuracies.clone()
    }

    pub fn chosen(&self) -> u32 {
        self.chosen
    }
}

/// `generator` is `subspace-paper`, `gaussian-paper` or `exp-subspace`.
#[wasm_bindgen]
pub fn cv_scores(
    generator: &str,
    samples: usize,
    folds: usize,
    seed: u64,
) -> Result<CvScores, JsError> {
    build_cv_scores(generator, samples, folds, seed).map_err(js)
}

fn build_cv_scores(
    generator: &str,
    samples: usize,
    folds: usize,
    seed: u64,
) -> nss_core::Result<CvScores> {
    let b = Builtin::from_name(generator)
        .ok_or_else(|| NssError::InvalidConfig(format!("unknown generator {generator:?}")))?
        .with_samples(samples);
    let data = b.generate(seed)?;
    let report = nss_cross_validate(&data, &default_cv_grid(data.dim()), folds, seed)?;
    Ok(CvScores {
        accuracies: (0..report.candidate_dims.len())
            .map(|c| report.mean_accuracy(c))
            .collect(),
        dims: report.candidate_dims.iter().map(|&d| d as u32).collect(),
        chosen: report.chosen_dim as u32,
    })
}

/// Median risk gap and density bound per training size.
#[wasm_bindgen]
pub struct Curve {
    sizes: Vec<u32>,
    median_gaps: Vec<f64>,
    median_bounds: Vec<f64>,
}

#[wasm_bindgen]
impl Curve {
    pub fn sizes(&self) -> Vec<u32> {
        self.sizes.clone()
    }

    pub fn median_gaps(&self) -> Vec<f64> {
        self.median_gaps.clone()
    }

    pub fn median_bounds(&self) -> Vec<f64> {
        self.median_bounds.clone()
    }
}

/// A small consistency study: three planes in R¹⁰ with orthogonal noise of
/// precision `alpha`.
#[wasm_bindgen]
pub fn consistency_curve(alpha: f64, trials: usize, seed: u64) -> Result<Curve, JsError> {
    build_curve(alpha, trials, seed).map_err(js)
}

fn build_curve(alpha: f64, trials: usize, seed: u64) -> nss_core::Result<Curve> {
    let spec = exp_subspace_spec(3, 10, 2, alpha, 1.0, seed)?;
    let settings = StudySettings {
        train_sizes: vec![30, 100, 300, 1000],
        trials,
        n_test: 2000,
        mc_samples: 2000,
        seed,
    };
    let curve = consistency_study(&spec, &settings)?;
    Ok(Curve {
        sizes: curve.train_sizes.iter().map(|&n| n as u32).collect(),
        median_gaps: (0..curve.train_sizes.len())
            .map(|i| curve.median_gap(i))
            .collect(),
        median_bounds: (0..curve.train_sizes.len())
            .map(|i| curve.median_bound(i))
            .collect(),
    })
}

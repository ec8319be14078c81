use rand::seq::SliceRandom;

use crate::error::{NssError, Result};
use crate::linalg::Matrix;
use crate::rng;

/// Dense samples (one row each) with class labels in `1..=K`.
///
/// Files may carry arbitrary integer labels; `label_names[k - 1]` keeps the
/// original label of class `k` so predictions can be reported in the file's
/// own vocabulary.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    samples: Matrix,
    labels: Vec<usize>,
    n_classes: usize,
    label_names: Vec<i64>,
}

impl LabeledDataset {
    pub fn new(samples: Matrix, labels: Vec<usize>, n_classes: usize) -> Result<Self> {
        let names = (1..=n_classes as i64).collect();
        Self::with_names(samples, labels, n_classes, names)
    }

    pub fn with_names(
        samples: Matrix,
        labels: Vec<usize>,
        n_classes: usize,
        label_names: Vec<i64>,
    ) -> Result<Self> {
        if samples.rows() != labels.len() {
            return Err(NssError::DimensionMismatch {
                expected: samples.rows(),
                found: labels.len(),
            });
        }
        if samples.rows() == 0 || samples.cols() == 0 {
            return Err(NssError::InvalidSpec(
                "dataset must have n >= 1 and D >= 1".into(),
            ));
        }
        if label_names.len() != n_classes {
            return Err(NssError::InvalidSpec(format!(
                "{} label names for {n_classes} classes",
                label_names.len()
            )));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l == 0 || l > n_classes) {
            return Err(NssError::InvalidSpec(format!(
                "label {bad} outside 1..={n_classes}"
            )));
        }
        Ok(LabeledDataset {
            samples,
            labels,
            n_classes,
            label_names,
        })
    }

    /// Maps arbitrary integer labels onto `1..=K` in ascending order.
    pub fn from_raw_labels(samples: Matrix, raw: &[i64]) -> Result<Self> {
        let mut names: Vec<i64> = raw.to_vec();
        names.sort_unstable();
        names.dedup();
        let labels = raw
            .iter()
            .map(|r| names.binary_search(r).expect("present") + 1)
            .collect();
        let k = names.len();
        Self::with_names(samples, labels, k, names)
    }

    pub fn samples(&self) -> &Matrix {
        &self.samples
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn label_names(&self) -> &[i64] {
        &self.label_names
    }

    /// Original label of class `k` (1-based).
    pub fn label_name(&self, k: usize) -> i64 {
        self.label_names[k - 1]
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.samples.cols()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.samples.row(i)
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes];
        for &l in &self.labels {
            counts[l - 1] += 1;
        }
        counts
    }

    /// Row indices of class `k`, ascending.
    pub fn class_indices(&self, k: usize) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter_map(|(i, &l)| (l == k).then_some(i))
            .collect()
    }

    pub fn class_rows(&self, k: usize) -> Matrix {
        self.samples.select_rows(&self.class_indices(k))
    }

    /// Fails with `EmptyClass` unless every class has a sample.
    pub fn require_all_classes(&self) -> Result<()> {
        match self.class_counts().iter().position(|&c| c == 0) {
            Some(k) => Err(NssError::EmptyClass { class: k + 1 }),
            None => Ok(()),
        }
    }

    /// Rows at `indices`, keeping the class vocabulary.
    pub fn subset(&self, indices: &[usize]) -> LabeledDataset {
        LabeledDataset {
            samples: self.samples.select_rows(indices),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            n_classes: self.n_classes,
            label_names: self.label_names.clone(),
        }
    }

    /// Same labels, new features (e.g. after scaling or projection).
    pub fn with_samples(&self, samples: Matrix) -> Result<LabeledDataset> {
        Self::with_names(
            samples,
            self.labels.clone(),
            self.n_classes,
            self.label_names.clone(),
        )
    }
}

/// Stratified fold assignment: each class is shuffled with the seed and dealt
/// round-robin, continuing the deal across classes so folds stay balanced.
pub fn stratified_folds(data: &LabeledDataset, folds: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if folds < 2 {
        return Err(NssError::InfeasibleFolds(format!(
            "{folds} folds requested, need >= 2"
        )));
    }
    if folds > data.len() {
        return Err(NssError::InfeasibleFolds(format!(
            "{folds} folds for {} samples",
            data.len()
        )));
    }
    for (k, &c) in data.class_counts().iter().enumerate() {
        if c < 2 {
            return Err(NssError::InfeasibleFolds(format!(
                "class {} has {c} sample(s); every training fold needs one",
                k + 1
            )));
        }
    }
    let mut out = vec![Vec::new(); folds];
    let mut next = 0;
    for k in 1..=data.n_classes() {
        let mut idx = data.class_indices(k);
        idx.shuffle(&mut rng::seeded(rng::derive_seed(seed, "fold", k as u64)));
        for i in idx {
            out[next].push(i);
            next = (next + 1) % folds;
        }
    }
    for f in &mut out {
        f.sort_unstable();
    }
    Ok(out)
}

/// Stratified train/test split with roughly `train_fraction` of every class
/// in training. Both parts keep at least one sample per class.
pub fn stratified_split(
    data: &LabeledDataset,
    train_fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(NssError::InvalidConfig(format!(
            "train fraction {train_fraction} outside (0, 1)"
        )));
    }
    let mut train = Vec::new();
    let mut test = Vec::new();
    for k in 1..=data.n_classes() {
        let mut idx = data.class_indices(k);
        if idx.len() < 2 {
            return Err(NssError::InfeasibleFolds(format!(
                "class {k} has {} sample(s), cannot split",
                idx.len()
            )));
        }
        idx.shuffle(&mut rng::seeded(rng::derive_seed(seed, "split", k as u64)));
        let n_train =
            ((idx.len() as f64 * train_fraction).round() as usize).clamp(1, idx.len() - 1);
        train.extend_from_slice(&idx[..n_train]);
        test.extend_from_slice(&idx[n_train..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

//! Invariant checks driven by proptest with a fixed RNG, so every run sees
//! the same cases.

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

use nss_core::classifiers::{nss_cross_validate, nss_fit, Classifier, NssModel};
use nss_core::datagen::{
    exp_subspace_spec, sample_gaussian_mixture, sample_subspace_family, GaussianMixtureSpec,
};
use nss_core::dataio::{
    fit_pca, fit_scaler, format_csv, format_libsvm, parse_labeled_csv, parse_libsvm, LabelColumn,
    Preprocessor, ScaleMode,
};
use nss_core::dataset::stratified_split;
use nss_core::linalg::{
    self, centered_scatter, mean_vector, orthonormalize_columns, symmetric_eigen,
};
use nss_core::risk::{bayes_predict, lemma1_bound, GroundTruth};
use nss_core::{fit_subspace, LabeledDataset, Matrix, SubspaceModel};

pub type Check = fn(u32) -> Result<(), String>;

/// Every property with its name; the argument is the number of cases.
pub const ALL: &[(&str, Check)] = &[
    (
        "projector is a symmetric idempotent of trace d",
        projector_invariants,
    ),
    (
        "residual agrees with the explicit projector",
        residual_matches_projector,
    ),
    (
        "residual is translation equivariant",
        translation_equivariance,
    ),
    ("residual is rotation equivariant", rotation_equivariance),
    ("NSS labels survive a rigid motion", nss_rigid_motion),
    ("NSS labels follow a class permutation", nss_relabeling),
    ("ties go to the smaller class index", tie_breaking),
    ("a single class always predicts 1", single_class),
    ("fitted basis minimizes the objective", optimality),
    ("eigenvalues sum to the trace", sum_rule),
    ("top eigenvalues bound every Rayleigh trace", rayleigh),
    ("residual sum equals the tail eigenvalues", eckart_young),
    ("cross validation is deterministic", cv_determinism),
    ("scaler round trip", scaler_round_trip),
    ("PCA keeps distances on full-rank data", pca_isometry),
    (
        "split is disjoint and preprocessing ignores test rows",
        leakage_free_split,
    ),
    ("CSV round trip is bit-exact", csv_bit_exact),
    ("LIBSVM round trip is bit-exact", libsvm_bit_exact),
    (
        "Gaussian Bayes rule is affine invariant",
        gaussian_bayes_affine,
    ),
    (
        "generators are deterministic in the seed",
        generator_determinism,
    ),
    (
        "density distance estimate is nonnegative",
        density_distance_nonnegative,
    ),
];

fn run<S>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String>
where
    S: Strategy,
    S::Value: std::fmt::Debug,
{
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    let rng = TestRng::deterministic_rng(RngAlgorithm::ChaCha);
    TestRunner::new_with_rng(config, rng)
        .run(&strategy, test)
        .map_err(|e| e.to_string())
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

/// An `n × dim` cloud with entries in `[-5, 5]`.
fn cloud(
    n: std::ops::RangeInclusive<usize>,
    dim: std::ops::RangeInclusive<usize>,
) -> impl Strategy<Value = Matrix> {
    (n, dim).prop_flat_map(|(n, dim)| {
        prop::collection::vec(-5.0..5.0f64, n * dim)
            .prop_map(move |v| Matrix::new(n, dim, v).unwrap())
    })
}

/// A cloud plus a subspace dimension `1 ≤ d < D`.
fn cloud_and_dim() -> impl Strategy<Value = (Matrix, usize)> {
    cloud(2..=30, 2..=8).prop_flat_map(|m| {
        let dim = m.cols();
        (Just(m), 1..dim)
    })
}

fn orthogonal(dim: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(-1.0..1.0f64, dim * dim).prop_filter_map("rank deficient", move |v| {
        orthonormalize_columns(&Matrix::new(dim, dim, v).ok()?).ok()
    })
}

fn point(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-8.0..8.0f64, dim)
}

/// The best `d`-plane is unique only when the spectrum has a gap after `d`.
fn identifiable(pts: &Matrix, d: usize) -> bool {
    let values = symmetric_eigen(&scatter_of(pts)).unwrap().values;
    let next = values.get(d).copied().unwrap_or(0.0);
    values[d - 1] - next > 1e-6 * values[0].max(1e-300)
}

fn explicit_residual(m: &SubspaceModel, x: &[f64]) -> f64 {
    let w = linalg::sub(x, m.mean());
    let pw = m.projector().matvec(&w).unwrap();
    linalg::norm_sq(&linalg::sub(&w, &pw))
}

fn rotate_rows(m: &Matrix, q: &Matrix) -> Matrix {
    m.matmul(&q.transpose()).unwrap()
}

fn shift_rows(m: &Matrix, c: &[f64]) -> Matrix {
    let mut out = m.clone();
    for i in 0..out.rows() {
        for (v, ci) in out.row_mut(i).iter_mut().zip(c) {
            *v += ci;
        }
    }
    out
}

/// Labels cycled over `k` classes, so each class gets at least one row.
fn labeled(points: Matrix, k: usize) -> LabeledDataset {
    let labels = (0..points.rows()).map(|i| i % k + 1).collect();
    LabeledDataset::new(points, labels, k).unwrap()
}

/// True when the two smallest residuals are within `tol` of each other.
fn near_tie(residuals: &[f64], tol: f64) -> bool {
    let mut r = residuals.to_vec();
    r.sort_by(f64::total_cmp);
    r.len() > 1 && close(r[0], r[1], tol)
}

pub fn projector_invariants(cases: u32) -> Result<(), String> {
    run(cases, cloud_and_dim(), |(pts, d)| {
        let m = fit_subspace(&pts, d).unwrap();
        let p = m.projector();
        prop_assert!(p.max_asymmetry() <= 1e-8);
        prop_assert!(p.matmul(&p).unwrap().max_abs_diff(&p) <= 1e-8);
        prop_assert!((p.trace() - d as f64).abs() <= 1e-8);
        Ok(())
    })
}

pub fn residual_matches_projector(cases: u32) -> Result<(), String> {
    let s = cloud_and_dim().prop_flat_map(|(pts, d)| {
        let dim = pts.cols();
        (Just(pts), Just(d), point(dim))
    });
    run(cases, s, |(pts, d, x)| {
        let m = fit_subspace(&pts, d).unwrap();
        let r = m.residual(&x).unwrap();
        prop_assert!(r >= 0.0);
        prop_assert!(close(r, explicit_residual(&m, &x), 1e-8));
        Ok(())
    })
}

pub fn translation_equivariance(cases: u32) -> Result<(), String> {
    let s = cloud_and_dim().prop_flat_map(|(pts, d)| {
        let dim = pts.cols();
        (Just(pts), Just(d), point(dim), point(dim))
    });
    run(cases, s, |(pts, d, x, c)| {
        prop_assume!(identifiable(&pts, d));
        let a = fit_subspace(&pts, d).unwrap();
        let b = fit_subspace(&shift_rows(&pts, &c), d).unwrap();
        let xc: Vec<f64> = x.iter().zip(&c).map(|(u, v)| u + v).collect();
        prop_assert!(close(
            a.residual(&x).unwrap(),
            b.residual(&xc).unwrap(),
            1e-8
        ));
        Ok(())
    })
}

pub fn rotation_equivariance(cases: u32) -> Result<(), String> {
    let s = cloud_and_dim().prop_flat_map(|(pts, d)| {
        let dim = pts.cols();
        (Just(pts), Just(d), point(dim), orthogonal(dim))
    });
    run(cases, s, |(pts, d, x, q)| {
        prop_assume!(identifiable(&pts, d));
        let a = fit_subspace(&pts, d).unwrap();
        let b = fit_subspace(&rotate_rows(&pts, &q), d).unwrap();
        let qx = q.matvec(&x).unwrap();
        prop_assert!(close(
            a.residual(&x).unwrap(),
            b.residual(&qx).unwrap(),
            1e-8
        ));
        Ok(())
    })
}

fn dataset_case() -> impl Strategy<Value = (LabeledDataset, usize, Matrix)> {
    (2usize..=4, 3usize..=6).prop_flat_map(|(k, dim)| {
        (
            cloud(3 * k..=12 * k, dim..=dim).prop_map(move |m| labeled(m, k)),
            1..dim,
            cloud(5..=20, dim..=dim),
        )
    })
}

pub fn nss_rigid_motion(cases: u32) -> Result<(), String> {
    let s = dataset_case().prop_flat_map(|(data, d, test)| {
        let dim = data.dim();
        (Just(data), Just(d), Just(test), orthogonal(dim), point(dim))
    });
    run(cases, s, |(data, d, test, q, c)| {
        for k in 1..=data.n_classes() {
            prop_assume!(identifiable(&data.class_rows(k), d));
        }
        let moved = data
            .with_samples(shift_rows(&rotate_rows(data.samples(), &q), &c))
            .unwrap();
        let a = nss_fit(&data, d).unwrap();
        let b = nss_fit(&moved, d).unwrap();
        for x in test.row_iter() {
            let r = a.residuals(x).unwrap();
            if near_tie(&r, 1e-8) {
                continue;
            }
            let y: Vec<f64> = q
                .matvec(x)
                .unwrap()
                .iter()
                .zip(&c)
                .map(|(u, v)| u + v)
                .collect();
            prop_assert_eq!(a.predict(x).unwrap(), b.predict(&y).unwrap());
        }
        Ok(())
    })
}

pub fn nss_relabeling(cases: u32) -> Result<(), String> {
    let s = dataset_case().prop_flat_map(|(data, d, test)| {
        let k = data.n_classes();
        (
            Just(data),
            Just(d),
            Just(test),
            Just((0..k).collect::<Vec<_>>()).prop_shuffle(),
        )
    });
    run(cases, s, |(data, d, test, perm)| {
        let labels: Vec<usize> = data.labels().iter().map(|&l| perm[l - 1] + 1).collect();
        let relabeled =
            LabeledDataset::new(data.samples().clone(), labels, data.n_classes()).unwrap();
        let a = nss_fit(&data, d).unwrap();
        let b = nss_fit(&relabeled, d).unwrap();
        for x in test.row_iter() {
            if near_tie(&a.residuals(x).unwrap(), 1e-8) {
                continue;
            }
            prop_assert_eq!(perm[a.predict(x).unwrap() - 1] + 1, b.predict(x).unwrap());
        }
        Ok(())
    })
}

pub fn tie_breaking(cases: u32) -> Result<(), String> {
    let s = cloud_and_dim().prop_flat_map(|(pts, d)| {
        let dim = pts.cols();
        (Just(pts), Just(d), cloud(1..=10, dim..=dim), 2usize..=4)
    });
    run(cases, s, |(pts, d, xs, copies)| {
        let m = fit_subspace(&pts, d).unwrap();
        let model = NssModel::new(vec![m; copies]).unwrap();
        for x in xs.row_iter() {
            prop_assert_eq!(model.predict(x).unwrap(), 1);
        }
        Ok(())
    })
}

pub fn single_class(cases: u32) -> Result<(), String> {
    let s = cloud_and_dim().prop_flat_map(|(pts, d)| {
        let dim = pts.cols();
        (Just(pts), Just(d), cloud(1..=10, dim..=dim))
    });
    run(cases, s, |(pts, d, xs)| {
        let model = nss_fit(&labeled(pts, 1), d).unwrap();
        for x in xs.row_iter() {
            prop_assert_eq!(model.predict(x).unwrap(), 1);
        }
        Ok(())
    })
}

pub fn optimality(cases: u32) -> Result<(), String> {
    let s = cloud_and_dim().prop_flat_map(|(pts, d)| {
        let dim = pts.cols();
        (
            Just(pts),
            Just(d),
            prop::collection::vec(orthogonal(dim), 100),
        )
    });
    run(cases, s, |(pts, d, candidates)| {
        let fitted = fit_subspace(&pts, d).unwrap();
        let best = fitted.objective(&pts).unwrap();
        for q in candidates {
            let other = SubspaceModel::new(fitted.mean().to_vec(), q.leading_columns(d)).unwrap();
            let obj = other.objective(&pts).unwrap();
            prop_assert!(
                best <= obj + 1e-8 * obj.max(1.0),
                "fitted {best} > candidate {obj}"
            );
        }
        Ok(())
    })
}

fn scatter_of(pts: &Matrix) -> Matrix {
    centered_scatter(pts, &mean_vector(pts).unwrap()).unwrap()
}

pub fn sum_rule(cases: u32) -> Result<(), String> {
    run(cases, cloud(2..=30, 1..=8), |pts| {
        let s = scatter_of(&pts);
        let eig = symmetric_eigen(&s).unwrap();
        let total: f64 = eig.values.iter().sum();
        prop_assert!((total - s.trace()).abs() <= 1e-8 * s.trace().abs().max(1.0));
        Ok(())
    })
}

pub fn rayleigh(cases: u32) -> Result<(), String> {
    let s = cloud_and_dim().prop_flat_map(|(pts, d)| {
        let dim = pts.cols();
        (
            Just(pts),
            Just(d),
            prop::collection::vec(orthogonal(dim), 20),
        )
    });
    run(cases, s, |(pts, d, candidates)| {
        let s = scatter_of(&pts);
        let eig = symmetric_eigen(&s).unwrap();
        let top: f64 = eig.values[..d].iter().sum();
        for q in candidates {
            let b = q.leading_columns(d);
            let t = b
                .transpose()
                .matmul(&s)
                .unwrap()
                .matmul(&b)
                .unwrap()
                .trace();
            prop_assert!(t <= top + 1e-8 * top.abs().max(1.0));
        }
        Ok(())
    })
}

pub fn eckart_young(cases: u32) -> Result<(), String> {
    run(cases, cloud_and_dim(), |(pts, d)| {
        let m = fit_subspace(&pts, d).unwrap();
        let eig = symmetric_eigen(&scatter_of(&pts)).unwrap();
        let tail: f64 = eig.values[d..].iter().sum();
        prop_assert!(close(m.objective(&pts).unwrap(), tail, 1e-8));
        Ok(())
    })
}

pub fn cv_determinism(cases: u32) -> Result<(), String> {
    let s = (2usize..=3, 3usize..=5).prop_flat_map(|(k, dim)| {
        (
            cloud(10 * k..=16 * k, dim..=dim).prop_map(move |m| labeled(m, k)),
            2usize..=5,
            any::<u64>(),
        )
    });
    run(cases, s, |(data, folds, seed)| {
        let grid: Vec<usize> = (1..data.dim()).collect();
        let a = nss_cross_validate(&data, &grid, folds, seed).unwrap();
        let b = nss_cross_validate(&data, &grid, folds, seed).unwrap();
        prop_assert_eq!(a, b);
        Ok(())
    })
}

pub fn scaler_round_trip(cases: u32) -> Result<(), String> {
    run(
        cases,
        (cloud(1..=20, 1..=6), any::<bool>()),
        |(pts, sym)| {
            let mode = if sym {
                ScaleMode::Symmetric
            } else {
                ScaleMode::Unit
            };
            let s = fit_scaler(&pts, mode).unwrap();
            let y = s.apply(&pts).unwrap();
            let (lo, hi) = if sym { (-1.0, 1.0) } else { (0.0, 1.0) };
            prop_assert!(y.as_slice().iter().all(|&v| (lo..=hi).contains(&v)));
            let back = s.invert(&y).unwrap();
            for i in 0..pts.rows() {
                for j in 0..pts.cols() {
                    if !s.zero_range[j] {
                        prop_assert!(
                            (back[(i, j)] - pts[(i, j)]).abs()
                                <= 1e-10 * pts[(i, j)].abs().max(1.0)
                        );
                    }
                }
            }
            Ok(())
        },
    )
}

pub fn pca_isometry(cases: u32) -> Result<(), String> {
    // points on a random m-plane inside R^D, so the centered rank is m
    let s = (2usize..=8).prop_flat_map(|dim| {
        (1..=dim).prop_flat_map(move |m| (Just(m), orthogonal(dim), cloud(m + 2..=30, m..=m)))
    });
    run(cases, s, |(m, q, coords)| {
        let dim = q.rows();
        let pts = coords.matmul(&q.leading_columns(m).transpose()).unwrap();
        prop_assert_eq!(pts.cols(), dim);
        let p = fit_pca(&pts, 1.0, dim).unwrap();
        prop_assert!(p.output_dim() <= m);
        let y = p.apply(&pts).unwrap();
        for i in 0..pts.rows() {
            let back = p.reconstruct_row(y.row(i)).unwrap();
            let err = linalg::norm_sq(&linalg::sub(&back, pts.row(i))).sqrt();
            prop_assert!(err <= 1e-8 * linalg::norm_sq(pts.row(i)).sqrt().max(1.0));
            for j in 0..i {
                let a = linalg::norm_sq(&linalg::sub(pts.row(i), pts.row(j)));
                let b = linalg::norm_sq(&linalg::sub(y.row(i), y.row(j)));
                prop_assert!(close(a, b, 1e-8), "{a} vs {b}");
            }
        }
        Ok(())
    })
}

pub fn leakage_free_split(cases: u32) -> Result<(), String> {
    let s = (2usize..=4).prop_flat_map(|k| {
        (
            cloud(4 * k..=20 * k, 2..=5).prop_map(move |m| labeled(m, k)),
            0.2..0.9f64,
            any::<u64>(),
        )
    });
    run(cases, s, |(data, frac, seed)| {
        let (train, test) = stratified_split(&data, frac, seed).unwrap();
        let mut all: Vec<usize> = train.iter().chain(&test).copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..data.len()).collect::<Vec<_>>());
        let tr = data.subset(&train);
        let te = data.subset(&test);
        prop_assert!(tr.class_counts().iter().all(|&c| c > 0));
        prop_assert!(te.class_counts().iter().all(|&c| c > 0));

        // overwrite every test row; the fitted preprocessing must not move
        let mut poisoned = data.samples().clone();
        for &i in &test {
            poisoned.row_mut(i).iter_mut().for_each(|v| *v = 1e6);
        }
        let poisoned = data.with_samples(poisoned).unwrap();
        let settings = Some(nss_core::dataio::PcaSettings {
            variance_target: 0.9,
            max_dim: 10,
        });
        let a = Preprocessor::fit(tr.samples(), Some(ScaleMode::Unit), settings).unwrap();
        let b = Preprocessor::fit(
            poisoned.subset(&train).samples(),
            Some(ScaleMode::Unit),
            settings,
        )
        .unwrap();
        prop_assert_eq!(a, b);
        Ok(())
    })
}

fn any_finite() -> impl Strategy<Value = f64> {
    any::<f64>().prop_filter("finite", |v| v.is_finite())
}

fn raw_dataset() -> impl Strategy<Value = LabeledDataset> {
    (1usize..=12, 1usize..=6).prop_flat_map(|(n, dim)| {
        (
            prop::collection::vec(any_finite(), n * dim),
            prop::collection::vec(-3i64..=3, n),
        )
            .prop_map(move |(v, labels)| {
                LabeledDataset::from_raw_labels(Matrix::new(n, dim, v).unwrap(), &labels).unwrap()
            })
    })
}

fn bits(m: &Matrix) -> Vec<u64> {
    m.as_slice().iter().map(|v| v.to_bits()).collect()
}

pub fn csv_bit_exact(cases: u32) -> Result<(), String> {
    run(cases, raw_dataset(), |data| {
        let back = parse_labeled_csv(&format_csv(&data), &LabelColumn::Auto).unwrap();
        prop_assert_eq!(bits(back.samples()), bits(data.samples()));
        prop_assert_eq!(back.labels(), data.labels());
        prop_assert_eq!(back.label_names(), data.label_names());
        Ok(())
    })
}

pub fn libsvm_bit_exact(cases: u32) -> Result<(), String> {
    // sparse rows: most entries exactly zero
    let s = raw_dataset().prop_flat_map(|data| {
        let n = data.len() * data.dim();
        (
            Just(data),
            prop::collection::vec(prop::bool::weighted(0.6), n),
        )
    });
    run(cases, s, |(data, zero)| {
        let mut m = data.samples().clone();
        for (v, z) in m.as_mut_slice().iter_mut().zip(zero) {
            if z {
                *v = 0.0;
            }
        }
        let data = data.with_samples(m).unwrap();
        let back = parse_libsvm(&format_libsvm(&data), Some(data.dim())).unwrap();
        prop_assert_eq!(bits(back.samples()), bits(data.samples()));
        prop_assert_eq!(back.label_names(), data.label_names());
        Ok(())
    })
}

fn spd(dim: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(-1.0..1.0f64, dim * dim).prop_map(move |v| {
        let a = Matrix::new(dim, dim, v).unwrap();
        let mut s = a.matmul(&a.transpose()).unwrap();
        for i in 0..dim {
            s[(i, i)] += 0.5;
        }
        s
    })
}

pub fn gaussian_bayes_affine(cases: u32) -> Result<(), String> {
    let s = (2usize..=3, 1usize..=4).prop_flat_map(|(k, dim)| {
        (
            prop::collection::vec(point(dim), k),
            prop::collection::vec(spd(dim), k),
            prop::collection::vec(0.2..1.0f64, k),
            spd(dim),
            point(dim),
            cloud(10..=10, dim..=dim),
        )
    });
    run(cases, s, |(means, covs, w, a, b, xs)| {
        let total: f64 = w.iter().sum();
        let priors: Vec<f64> = w.iter().map(|v| v / total).collect();
        let map = |x: &[f64]| -> Vec<f64> {
            a.matvec(x)
                .unwrap()
                .iter()
                .zip(&b)
                .map(|(u, v)| u + v)
                .collect()
        };
        let original =
            GaussianMixtureSpec::new(means.clone(), covs.clone(), priors.clone()).unwrap();
        let mapped = GaussianMixtureSpec::new(
            means.iter().map(|m| map(m)).collect(),
            covs.iter()
                .map(|c| {
                    let t = a.matmul(c).unwrap().matmul(&a.transpose()).unwrap();
                    // exact symmetry despite rounding
                    let mut s = t.clone();
                    for i in 0..s.rows() {
                        for j in 0..s.cols() {
                            s[(i, j)] = 0.5 * (t[(i, j)] + t[(j, i)]);
                        }
                    }
                    s
                })
                .collect(),
            priors.clone(),
        )
        .unwrap();
        let g0 = GroundTruth::gaussian(original.clone());
        let g1 = GroundTruth::gaussian(mapped);
        for x in xs.row_iter() {
            let scores: Vec<f64> = (1..=original.n_classes())
                .map(|k| priors[k - 1].ln() + original.log_density(k, x).unwrap())
                .collect();
            let mut sorted = scores.clone();
            sorted.sort_by(|p, q| q.total_cmp(p));
            if close(sorted[0], sorted[1], 1e-9) {
                continue;
            }
            prop_assert_eq!(
                bayes_predict(&g0, x).unwrap(),
                bayes_predict(&g1, &map(x)).unwrap()
            );
        }
        Ok(())
    })
}

fn small_family() -> impl Strategy<Value = (usize, usize, usize, f64, u64)> {
    (2usize..=4, 3usize..=8)
        .prop_flat_map(|(k, dim)| (Just(k), Just(dim), 1..dim, 1.0..500.0f64, any::<u64>()))
}

pub fn generator_determinism(cases: u32) -> Result<(), String> {
    run(
        cases,
        (small_family(), 10usize..=60),
        |((k, dim, d, alpha, seed), n)| {
            let spec = exp_subspace_spec(k, dim, d, alpha, 1.0, seed).unwrap();
            prop_assert_eq!(
                spec.clone(),
                exp_subspace_spec(k, dim, d, alpha, 1.0, seed).unwrap()
            );
            let a = sample_subspace_family(&spec, n, seed).unwrap();
            prop_assert_eq!(
                bits(a.samples()),
                bits(sample_subspace_family(&spec, n, seed).unwrap().samples())
            );
            let again = sample_subspace_family(&spec, n, seed).unwrap();
            prop_assert_eq!(a.labels(), again.labels());
            let g = nss_core::datagen::paper_gaussian_spec();
            let b = sample_gaussian_mixture(&g, n, seed).unwrap();
            prop_assert_eq!(b, sample_gaussian_mixture(&g, n, seed).unwrap());
            Ok(())
        },
    )
}

pub fn density_distance_nonnegative(cases: u32) -> Result<(), String> {
    run(cases, small_family(), |(k, dim, d, alpha, seed)| {
        let spec = exp_subspace_spec(k, dim, d, alpha, 1.0, seed).unwrap();
        let train = sample_subspace_family(&spec, k * (d + 3), seed ^ 1).unwrap();
        let model = nss_fit(&train, d).unwrap();
        let est = lemma1_bound(&spec, &model, 40, seed ^ 2).unwrap();
        prop_assert!(est.value >= 0.0 && est.value <= 2.0, "{}", est.value);
        prop_assert!(est.stderr >= 0.0);
        Ok(())
    })
}

//! Eigenvalues by bisection on an inertia count, sharing no code with the
//! library's tridiagonal QL solver.
//!
//! `S − xI` is reduced by symmetric Bunch–Parlett elimination. Every step is
//! a congruence, so by Sylvester's law the negative pivots (1×1 blocks below
//! zero, one per 2×2 block, which always has a negative determinant) count the
//! eigenvalues below `x`.

use nss_core::Matrix;

/// Count of eigenvalues of symmetric `s` strictly below `x`.
pub fn count_below(s: &Matrix, x: f64) -> usize {
    let n = s.rows();
    let mut a: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| s[(i, j)] - if i == j { x } else { 0.0 })
                .collect()
        })
        .collect();
    let growth = (1.0 + 17f64.sqrt()) / 8.0;
    let mut active: Vec<usize> = (0..n).collect();
    let mut negatives = 0;
    while !active.is_empty() {
        let &p = active
            .iter()
            .max_by(|&&i, &&j| a[i][i].abs().total_cmp(&a[j][j].abs()))
            .unwrap();
        let mut off = (0.0, p, p);
        for (u, &r) in active.iter().enumerate() {
            for &c in &active[u + 1..] {
                if a[r][c].abs() > off.0 {
                    off = (a[r][c].abs(), r, c);
                }
            }
        }
        if a[p][p].abs() >= growth * off.0 {
            if a[p][p] == 0.0 {
                // the remaining block is zero
                break;
            }
            if a[p][p] < 0.0 {
                negatives += 1;
            }
            active.retain(|&i| i != p);
            for &i in &active {
                for &j in &active {
                    a[i][j] -= a[i][p] * a[p][j] / a[p][p];
                }
            }
        } else {
            let (_, r, c) = off;
            let (e11, e12, e22) = (a[r][r], a[r][c], a[c][c]);
            let det = e11 * e22 - e12 * e12;
            negatives += 1;
            active.retain(|&i| i != r && i != c);
            for &i in &active {
                for &j in &active {
                    // a_ij −= [a_ir a_ic] E⁻¹ [a_rj a_cj]ᵀ
                    let (u, v) = (a[i][r], a[i][c]);
                    let (w, z) = (a[r][j], a[c][j]);
                    a[i][j] -= (u * (e22 * w - e12 * z) + v * (e11 * z - e12 * w)) / det;
                }
            }
        }
    }
    negatives
}

/// All eigenvalues, descending.
pub fn eigenvalues(s: &Matrix) -> Vec<f64> {
    let n = s.rows();
    // Gershgorin interval
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r: f64 = (0..n).filter(|&j| j != i).map(|j| s[(i, j)].abs()).sum();
        lo = lo.min(s[(i, i)] - r);
        hi = hi.max(s[(i, i)] + r);
    }
    lo -= 1.0;
    hi += 1.0;
    let mut out: Vec<f64> = (0..n)
        .map(|k| {
            // the (k+1)-th smallest: smallest x with count_below(x) > k
            let (mut a, mut b) = (lo, hi);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                if count_below(s, mid) > k {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            0.5 * (a + b)
        })
        .collect();
    out.reverse();
    out
}

/// Product of `n` random Householder reflections: a random orthogonal matrix.
pub fn random_orthogonal(rng: &mut impl rand::Rng, n: usize) -> Matrix {
    let mut q = Matrix::identity(n);
    for _ in 0..n {
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let vv: f64 = v.iter().map(|x| x * x).sum();
        if vv < 1e-12 {
            continue;
        }
        // q ← q (I − 2 v vᵀ / vᵀv)
        for i in 0..n {
            let qv: f64 = (0..n).map(|j| q[(i, j)] * v[j]).sum();
            for j in 0..n {
                q[(i, j)] -= 2.0 * qv * v[j] / vv;
            }
        }
    }
    q
}

/// `Q diag(values) Qᵀ`, summed in plain loops.
pub fn with_spectrum(q: &Matrix, values: &[f64]) -> Matrix {
    let n = values.len();
    let mut s = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v: f64 = (0..n).map(|k| q[(i, k)] * values[k] * q[(j, k)]).sum();
            s[(i, j)] = v;
            s[(j, i)] = v;
        }
    }
    s
}

/// A symmetric matrix of size 1..=6. Every third case has a repeated
/// eigenvalue, every fifth has a dense random fill instead of a chosen
/// spectrum.
pub fn random_symmetric(rng: &mut impl rand::Rng, case: usize) -> Matrix {
    let n = rng.random_range(1..=6);
    if case % 5 == 4 {
        let mut s = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let v = rng.random_range(-3.0..3.0);
                s[(i, j)] = v;
                s[(j, i)] = v;
            }
        }
        return s;
    }
    let mut values: Vec<f64> = (0..n).map(|_| rng.random_range(-4.0..4.0)).collect();
    if case.is_multiple_of(3) && n > 1 {
        let k = rng.random_range(1..n);
        let v0 = values[0];
        values[1..=k].fill(v0);
    }
    with_spectrum(&random_orthogonal(rng, n), &values)
}

//! Dense matrix primitives and the symmetric eigensolver.
//!
//! Everything here works on row-major `f64` storage. The eigensolver is the
//! classic Householder tridiagonalization followed by implicit QL iteration,
//! which is accurate to working precision for the symmetric matrices produced
//! by scatter and covariance accumulation.

use std::ops::{Index, IndexMut};

use crate::error::{NssError, Result};

/// Numerical tolerances shared by the spectral routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Allowed deviation of `VᵀV` from the identity.
    pub orthonormality: f64,
    /// Allowed relative eigen-residual `‖Sv − λv‖ / max(1, |λ|)`.
    pub residual: f64,
    /// Allowed relative asymmetry of an input matrix.
    pub symmetry: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            orthonormality: 1e-8,
            residual: 1e-6,
            symmetry: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(NssError::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(NssError::NonFinite("matrix entries"));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Matrix::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    /// Builds a matrix whose rows are the given vectors.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(NssError::DimensionMismatch {
                    expected: cols,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Matrix::new(rows.len(), cols, data)
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns<C: AsRef<[f64]>>(columns: &[C]) -> Result<Self> {
        Ok(Matrix::from_rows(columns)?.transpose())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[f64]> + '_ {
        // chunks_exact(0) panics; a matrix with no columns has no meaningful rows
        self.data.chunks_exact(self.cols.max(1)).take(self.rows)
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows)
            .map(|i| self.data[i * self.cols + j])
            .collect()
    }

    /// Selects the given rows, in order.
    pub fn select_rows(&self, indices: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(indices.len() * self.cols);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        Matrix {
            rows: indices.len(),
            cols: self.cols,
            data,
        }
    }

    /// Keeps the first `k` columns.
    pub fn leading_columns(&self, k: usize) -> Matrix {
        assert!(k <= self.cols);
        let mut data = Vec::with_capacity(self.rows * k);
        for r in self.row_iter() {
            data.extend_from_slice(&r[..k]);
        }
        Matrix {
            rows: self.rows,
            cols: k,
            data,
        }
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(NssError::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.cols, x.len())?;
        Ok(self.row_iter().map(|r| dot(r, x)).collect())
    }

    /// Computes `selfᵀ x` without forming the transpose.
    pub fn tr_matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.rows, x.len())?;
        let mut out = vec![0.0; self.cols];
        for (r, &xi) in self.row_iter().zip(x) {
            for (o, &v) in out.iter_mut().zip(r) {
                *o += v * xi;
            }
        }
        Ok(out)
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Largest `|a_ij − a_ji|`.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols.min(self.rows) {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn scale(&mut self, factor: f64) {
        self.data.iter_mut().for_each(|v| *v *= factor);
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(NssError::DimensionMismatch { expected, found })
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Arithmetic mean of the rows of `points`.
pub fn mean_vector(points: &Matrix) -> Result<Vec<f64>> {
    if points.rows() == 0 {
        return Err(NssError::EmptyClass { class: 0 });
    }
    let mut mean = vec![0.0; points.cols()];
    for r in points.row_iter() {
        for (m, &v) in mean.iter_mut().zip(r) {
            *m += v;
        }
    }
    let inv = 1.0 / points.rows() as f64;
    mean.iter_mut().for_each(|m| *m *= inv);
    Ok(mean)
}

/// `Σ (x_i − c)(x_i − c)ᵀ` over the rows of `points`.
pub fn centered_scatter(points: &Matrix, center: &[f64]) -> Result<Matrix> {
    if points.rows() == 0 {
        return Err(NssError::EmptyClass { class: 0 });
    }
    let dim = points.cols();
    check_len(dim, center.len())?;
    let mut s = Matrix::zeros(dim, dim);
    let mut w = vec![0.0; dim];
    for r in points.row_iter() {
        for ((wi, &x), &c) in w.iter_mut().zip(r).zip(center) {
            *wi = x - c;
        }
        for i in 0..dim {
            let wi = w[i];
            if wi == 0.0 {
                continue;
            }
            let row = &mut s.data[i * dim + i..(i + 1) * dim];
            for (sij, &wj) in row.iter_mut().zip(&w[i..]) {
                *sij += wi * wj;
            }
        }
    }
    for i in 0..dim {
        for j in 0..i {
            s.data[i * dim + j] = s.data[j * dim + i];
        }
    }
    Ok(s)
}

/// Eigenvalues sorted non-increasing with matching orthonormal eigenvectors
/// stored as the columns of `vectors`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

impl EigenPairs {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn vector(&self, i: usize) -> Vec<f64> {
        self.vectors.column(i)
    }

    /// Keeps the leading `d` pairs.
    pub fn truncate(&self, d: usize) -> EigenPairs {
        EigenPairs {
            values: self.values[..d].to_vec(),
            vectors: self.vectors.leading_columns(d),
        }
    }
}

fn check_symmetric(s: &Matrix, tol: f64) -> Result<()> {
    if !s.is_square() {
        return Err(NssError::DimensionMismatch {
            expected: s.rows(),
            found: s.cols(),
        });
    }
    let asym = s.max_asymmetry();
    if asym > tol * s.max_abs().max(1.0) {
        return Err(NssError::NotSymmetric {
            max_asymmetry: asym,
        });
    }
    Ok(())
}

/// Full eigendecomposition of a symmetric matrix.
pub fn symmetric_eigen(s: &Matrix) -> Result<EigenPairs> {
    symmetric_eigen_with(s, &Tolerances::default())
}

pub fn symmetric_eigen_with(s: &Matrix, tol: &Tolerances) -> Result<EigenPairs> {
    check_symmetric(s, tol.symmetry)?;
    let n = s.rows();
    if n == 0 {
        return Ok(EigenPairs {
            values: Vec::new(),
            vectors: Matrix::zeros(0, 0),
        });
    }
    // Use the upper triangle only, so tiny asymmetries cannot leak in.
    let mut v = s.clone();
    for i in 0..n {
        for j in 0..i {
            v.data[i * n + j] = v.data[j * n + i];
        }
    }
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tridiagonalize(&mut v, &mut d, &mut e);
    ql_implicit(&mut v, &mut d, &mut e)?;

    let mut order: Vec<usize> = (0..n).collect();
    // stable sort keeps the solver's order among equal eigenvalues
    order.sort_by(|&a, &b| d[b].total_cmp(&d[a]));
    let values: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (new_col, &old_col) in order.iter().enumerate() {
        let mut col = v.column(old_col);
        fix_sign(&mut col);
        for (r, x) in col.into_iter().enumerate() {
            vectors.data[r * n + new_col] = x;
        }
    }
    Ok(EigenPairs { values, vectors })
}

/// The `d` largest eigenpairs of a symmetric matrix.
pub fn top_eigenpairs(s: &Matrix, d: usize) -> Result<EigenPairs> {
    if d == 0 || d > s.rows() {
        return Err(NssError::BadDimension(format!(
            "requested {d} eigenpairs of a {}x{} matrix",
            s.rows(),
            s.cols()
        )));
    }
    Ok(symmetric_eigen(s)?.truncate(d))
}

/// Flips `v` so that its largest-magnitude entry is positive.
pub(crate) fn fix_sign(v: &mut [f64]) {
    let mut best = 0.0f64;
    let mut sign = 1.0;
    for &x in v.iter() {
        // strict comparison: the first of equal-magnitude entries decides
        if x.abs() > best {
            best = x.abs();
            sign = x.signum();
        }
    }
    if sign < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Householder reduction to tridiagonal form, accumulating the
/// transformation in `v`. On return `d` holds the diagonal and `e` the
/// subdiagonal in `e[1..]`.
fn tridiagonalize(v: &mut Matrix, d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
    let idx = |i: usize, j: usize| i * n + j;
    let a = &mut v.data;
    for j in 0..n {
        d[j] = a[idx(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for dk in &d[..i] {
            scale += dk.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = a[idx(i - 1, j)];
                a[idx(i, j)] = 0.0;
                a[idx(j, i)] = 0.0;
            }
        } else {
            for dk in d[..i].iter_mut() {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e[..i].iter_mut() {
                *ej = 0.0;
            }
            for j in 0..i {
                f = d[j];
                a[idx(j, i)] = f;
                g = e[j] + a[idx(j, j)] * f;
                for k in (j + 1)..i {
                    g += a[idx(k, j)] * d[k];
                    e[k] += a[idx(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    a[idx(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = a[idx(i - 1, j)];
                a[idx(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }

    for i in 0..n.saturating_sub(1) {
        a[idx(n - 1, i)] = a[idx(i, i)];
        a[idx(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = a[idx(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += a[idx(k, i + 1)] * a[idx(k, j)];
                }
                for k in 0..=i {
                    a[idx(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            a[idx(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = a[idx(n - 1, j)];
        a[idx(n - 1, j)] = 0.0;
    }
    a[idx(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

/// Implicit QL iteration on the tridiagonal matrix `(d, e)`, rotating the
/// columns of `v` into eigenvectors.
fn ql_implicit(v: &mut Matrix, d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    let a = &mut v.data;
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    let eps = f64::EPSILON;
    let max_iter = 60 * n.max(1);
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > max_iter {
                    return Err(NssError::NonFinite("eigenvalue iteration did not converge"));
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d[(l + 2)..n].iter_mut() {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        let row = k * n;
                        h = a[row + i + 1];
                        a[row + i + 1] = s * a[row + i] + c * h;
                        a[row + i] = c * a[row + i] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    if d.iter().any(|x| !x.is_finite()) {
        return Err(NssError::NonFinite("eigenvalues"));
    }
    Ok(())
}

/// Orthonormalizes the columns of `m` by modified Gram–Schmidt with one
/// reorthogonalization pass.
pub fn orthonormalize_columns(m: &Matrix) -> Result<Matrix> {
    let mut cols: Vec<Vec<f64>> = (0..m.cols()).map(|j| m.column(j)).collect();
    for j in 0..cols.len() {
        let (done, rest) = cols.split_at_mut(j);
        let c = &mut rest[0];
        let original = norm_sq(c).sqrt();
        for _ in 0..2 {
            for q in done.iter() {
                let proj = dot(q, c);
                for (ci, qi) in c.iter_mut().zip(q) {
                    *ci -= proj * qi;
                }
            }
        }
        let nrm = norm_sq(c).sqrt();
        if nrm <= 1e-12 * original.max(f64::MIN_POSITIVE) || nrm == 0.0 {
            return Err(NssError::BadDimension(format!(
                "column {j} is linearly dependent on earlier columns"
            )));
        }
        c.iter_mut().for_each(|x| *x /= nrm);
    }
    Matrix::from_columns(&cols)
}

/// Lower-triangular Cholesky factor, or `None` if `a` is not positive definite.
pub fn cholesky(a: &Matrix) -> Option<Matrix> {
    let n = a.rows();
    if !a.is_square() {
        return None;
    }
    let mut l = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[(i, j)];
            for k in 0..j {
                sum -= l[(i, k)] * l[(j, k)];
            }
            if i == j {
                if sum <= 0.0 || !sum.is_finite() {
                    return None;
                }
                l[(i, i)] = sum.sqrt();
            } else {
                l[(i, j)] = sum / l[(j, j)];
            }
        }
    }
    Some(l)
}

/// Largest deviation of `BᵀB` from the identity.
pub fn orthonormality_error(basis: &Matrix) -> f64 {
    let gram = basis
        .transpose()
        .matmul(basis)
        .expect("shapes agree by construction");
    gram.max_abs_diff(&Matrix::identity(basis.cols()))
}

/// Principal angles (radians, ascending) between `span(a)` and `span(b)`,
/// both given as orthonormal column sets.
pub fn principal_angles(a: &Matrix, b: &Matrix) -> Result<Vec<f64>> {
    check_len(a.rows(), b.rows())?;
    let m = a.transpose().matmul(b)?;
    let k = m.rows().min(m.cols());
    let gram = if m.rows() <= m.cols() {
        m.matmul(&m.transpose())?
    } else {
        m.transpose().matmul(&m)?
    };
    let eig = symmetric_eigen(&gram)?;
    let mut angles: Vec<f64> = eig.values[..k]
        .iter()
        .map(|&l| l.max(0.0).sqrt().min(1.0).acos())
        .collect();
    angles.sort_by(f64::total_cmp);
    Ok(angles)
}

//! Dense linear algebra kept deliberately small: a deterministic cyclic
//! Jacobi eigensolver for the (tiny, N-independent) vertex problems, a
//! complex matrix type for per-block Gram machinery, and Gram-driven
//! modified Gram-Schmidt.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("jacobi eigensolver did not converge: off-diagonal residual {residual:e}")]
    NoConvergence { residual: f64 },
    #[error("rank deficiency at vector {index}: residual norm {norm:e} below tolerance")]
    RankDeficient { index: usize, norm: f64 },
    #[error("dimension mismatch: {0}")]
    Shape(String),
}

/// Row-major square real symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct RealMat {
    n: usize,
    data: Vec<f64>,
}

impl RealMat {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    fn off_diagonal_norm(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    acc += self.get(i, j) * self.get(i, j);
                }
            }
        }
        acc.sqrt()
    }

    fn frobenius(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// Cyclic Jacobi eigendecomposition of a real symmetric matrix.
///
/// Sweeps the upper triangle row by row with the classical rotation until
/// the off-diagonal Frobenius norm falls below `1e-14` times the matrix
/// norm. Fully deterministic: fixed sweep order, no pivot searches.
/// Returns (eigenvalues, eigenvectors as columns), unsorted.
pub fn jacobi_eigh(a: &RealMat) -> Result<(Vec<f64>, RealMat), LinalgError> {
    let n = a.n;
    let mut m = a.clone();
    let mut v = RealMat::zeros(n);
    for i in 0..n {
        v.set(i, i, 1.0);
    }
    let scale = m.frobenius().max(f64::MIN_POSITIVE);
    let target = 1e-14 * scale;
    let max_sweeps = 64;

    for _ in 0..max_sweeps {
        if m.off_diagonal_norm() <= target {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.get(p, q);
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let app = m.get(p, p);
                let aqq = m.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                for i in 0..n {
                    if i != p && i != q {
                        let aip = m.get(i, p);
                        let aiq = m.get(i, q);
                        m.set(i, p, c * aip - s * aiq);
                        m.set(p, i, m.get(i, p));
                        m.set(i, q, s * aip + c * aiq);
                        m.set(q, i, m.get(i, q));
                    }
                }
                m.set(p, p, app - t * apq);
                m.set(q, q, aqq + t * apq);
                m.set(p, q, 0.0);
                m.set(q, p, 0.0);

                for i in 0..n {
                    let vip = v.get(i, p);
                    let viq = v.get(i, q);
                    v.set(i, p, c * vip - s * viq);
                    v.set(i, q, s * vip + c * viq);
                }
            }
        }
    }

    let residual = m.off_diagonal_norm();
    if residual > target.max(1e-12 * scale) {
        return Err(LinalgError::NoConvergence { residual });
    }
    let eigenvalues = (0..n).map(|i| m.get(i, i)).collect();
    Ok((eigenvalues, v))
}

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c);
            data.extend(row);
        }
        Self {
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Conjugate transpose.
    pub fn hermitian(&self) -> CMat {
        let mut out = CMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    pub fn transpose(&self) -> CMat {
        let mut out = CMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    pub fn mul(&self, other: &CMat) -> CMat {
        assert_eq!(self.cols, other.rows);
        let mut out = CMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, x.len());
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .map(|(a, b)| a * b)
                    .sum::<Complex64>()
            })
            .collect()
    }

    pub fn max_abs_diff(&self, other: &CMat) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Inner product of coefficient vectors `u`, `v` under the Hermitian form
/// given by `gram` with entries `gram[j][j'] = <phi_j, phi_j'>`:
/// `<U, V> = sum_{j,j'} u_j conj(v_{j'}) gram[j][j']`.
pub fn gram_inner(gram: &CMat, u: &[Complex64], v: &[Complex64]) -> Complex64 {
    let d = gram.rows();
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..d {
        if u[j] == Complex64::new(0.0, 0.0) {
            continue;
        }
        let mut inner = Complex64::new(0.0, 0.0);
        for jp in 0..d {
            inner += gram.get(j, jp) * v[jp].conj();
        }
        acc += u[j] * inner;
    }
    acc
}

/// Modified Gram-Schmidt in coefficient space with one reorthogonalization
/// pass. Input is the Hermitian Gram matrix of a basis; output `B` has rows
/// `b_i` such that `eta_i = sum_j b_ij phi_j` are orthonormal in the form.
/// Rank tolerance is relative to each vector's own initial norm.
pub fn gram_schmidt_from_gram(gram: &CMat, rank_tol: f64) -> Result<CMat, LinalgError> {
    let d = gram.rows();
    if gram.cols() != d {
        return Err(LinalgError::Shape(format!(
            "gram must be square, got {}x{}",
            gram.rows(),
            gram.cols()
        )));
    }
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(d);
    for i in 0..d {
        let mut b = vec![Complex64::new(0.0, 0.0); d];
        b[i] = Complex64::new(1.0, 0.0);
        // Two passes of projection removal.
        for _ in 0..2 {
            for eta in &basis {
                let proj = gram_inner(gram, &b, eta);
                for (bj, ej) in b.iter_mut().zip(eta) {
                    *bj -= proj * ej;
                }
            }
        }
        let norm_sq = gram_inner(gram, &b, &b).re;
        let scale = gram.get(i, i).re.sqrt().max(1.0);
        if norm_sq.is_nan() || norm_sq <= 0.0 || norm_sq.sqrt() < rank_tol * scale {
            return Err(LinalgError::RankDeficient {
                index: i,
                norm: norm_sq.max(0.0).sqrt(),
            });
        }
        let inv = 1.0 / norm_sq.sqrt();
        for bj in &mut b {
            *bj *= inv;
        }
        basis.push(b);
    }
    Ok(CMat::from_rows(basis))
}

/// Complex linear solve by partial-pivot LU; used as an independent dense
/// oracle against the Gram-Schmidt recovery path.
pub fn lu_solve(a: &CMat, rhs: &[Complex64]) -> Result<Vec<Complex64>, LinalgError> {
    let n = a.rows();
    if a.cols() != n || rhs.len() != n {
        return Err(LinalgError::Shape(format!(
            "lu_solve wants square system, got {}x{} with rhs {}",
            a.rows(),
            a.cols(),
            rhs.len()
        )));
    }
    let mut m = a.clone();
    let mut b = rhs.to_vec();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r1, &r2| {
                m.get(r1, col)
                    .norm()
                    .partial_cmp(&m.get(r2, col).norm())
                    .expect("finite entries")
            })
            .expect("nonempty range");
        if m.get(pivot_row, col).norm() < 1e-14 {
            return Err(LinalgError::RankDeficient {
                index: col,
                norm: m.get(pivot_row, col).norm(),
            });
        }
        if pivot_row != col {
            for j in 0..n {
                let tmp = m.get(col, j);
                m.set(col, j, m.get(pivot_row, j));
                m.set(pivot_row, j, tmp);
            }
            b.swap(col, pivot_row);
        }
        let pivot = m.get(col, col);
        for row in (col + 1)..n {
            let factor = m.get(row, col) / pivot;
            if factor == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in col..n {
                let v = m.get(row, j) - factor * m.get(col, j);
                m.set(row, j, v);
            }
            let t = factor * b[col];
            b[row] -= t;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for j in (row + 1)..n {
            acc -= m.get(row, j) * x[j];
        }
        x[row] = acc / m.get(row, row);
    }
    Ok(x)
}

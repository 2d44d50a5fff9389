use std::ops::{Index, IndexMut};

use num_complex::Complex64 as C64;

use super::tol;
use crate::{Error, Result};

/// Dense complex matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Panics if `data.len() != rows * cols`.
    pub fn from_rows(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix entry count");
        ComplexMatrix { rows, cols, data }
    }

    pub fn from_col(v: &[C64]) -> Self {
        Self::from_rows(v.len(), 1, v.to_vec())
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_cols<V: AsRef<[C64]>>(rows: usize, cols: &[V]) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (k, c) in cols.iter().enumerate() {
            let c = c.as_ref();
            assert_eq!(c.len(), rows);
            for (r, &z) in c.iter().enumerate() {
                m[(r, k)] = z;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn row(&self, r: usize) -> &[C64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col(&self, c: usize) -> Vec<C64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    /// Rows `start..end` as a new matrix.
    pub fn row_block(&self, start: usize, end: usize) -> ComplexMatrix {
        ComplexMatrix::from_rows(
            end - start,
            self.cols,
            self.data[start * self.cols..end * self.cols].to_vec(),
        )
    }

    pub fn set_row_block(&mut self, start: usize, block: &ComplexMatrix) {
        assert_eq!(block.cols, self.cols);
        let off = start * self.cols;
        self.data[off..off + block.data.len()].copy_from_slice(&block.data);
    }

    pub fn transpose(&self) -> ComplexMatrix {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)];
            }
        }
        t
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> ComplexMatrix {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)].conj();
            }
        }
        t
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, other.rows, "matmul inner dimension");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let orow = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let brow = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, &b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `self · otherᵀ` without materializing the transpose.
    pub fn matmul_transpose(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, other.cols, "matmul_transpose inner dimension");
        let mut out = Self::zeros(self.rows, other.rows);
        for i in 0..self.rows {
            let arow = self.row(i);
            for j in 0..other.rows {
                out.data[i * other.rows + j] = arow.iter().zip(other.row(j)).map(|(a, b)| a * b).sum();
            }
        }
        out
    }

    /// `selfᴴ · other` without materializing the adjoint.
    pub fn adjoint_matmul(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.rows, other.rows, "adjoint_matmul row count");
        let mut out = Self::zeros(self.cols, other.cols);
        for k in 0..self.rows {
            let arow = self.row(k);
            let brow = other.row(k);
            for (i, a) in arow.iter().enumerate() {
                let a = a.conj();
                let orow = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (o, &b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn scale(&self, s: C64) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn sub(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.shape(), other.shape());
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn add(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.shape(), other.shape());
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn frobenius_sqr(&self) -> f64 {
        super::norm_sqr(&self.data)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

/// Lower Cholesky factor of a Hermitian positive-definite matrix.
fn cholesky(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::Shape(format!("cholesky of {}x{}", n, a.cols())));
    }
    let scale = (0..n).map(|i| a[(i, i)].re.abs()).fold(0.0, f64::max);
    if scale == 0.0 || !scale.is_finite() {
        return Err(Error::Singular);
    }
    let mut l = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if d <= tol::CHOLESKY_PIVOT * scale || !d.is_finite() {
            return Err(Error::Singular);
        }
        let d = d.sqrt();
        l[(j, j)] = C64::new(d, 0.0);
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / d;
        }
    }
    Ok(l)
}

/// Solves `A X = B` for Hermitian positive-definite `A`.
pub fn cholesky_solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.rows() != b.rows() {
        return Err(Error::Shape(format!("solve: {} vs {} rows", a.rows(), b.rows())));
    }
    let l = cholesky(a)?;
    let n = a.rows();
    let mut x = b.clone();
    for c in 0..b.cols() {
        // forward: L y = b
        for i in 0..n {
            let mut s = x[(i, c)];
            for k in 0..i {
                s -= l[(i, k)] * x[(k, c)];
            }
            x[(i, c)] = s / l[(i, i)].re;
        }
        // backward: Lᴴ x = y
        for i in (0..n).rev() {
            let mut s = x[(i, c)];
            for k in i + 1..n {
                s -= l[(k, i)].conj() * x[(k, c)];
            }
            x[(i, c)] = s / l[(i, i)].re;
        }
    }
    Ok(x)
}

/// Inverse of a Hermitian positive-definite matrix.
pub fn hermitian_inverse(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    cholesky_solve(a, &ComplexMatrix::identity(a.rows()))
}

/// Regularized least squares: solves `(AᴴA + λI) X = Aᴴ B`.
pub fn ridge_solve(a: &ComplexMatrix, b: &ComplexMatrix, lambda: f64) -> Result<ComplexMatrix> {
    if a.rows() != b.rows() {
        return Err(Error::Shape(format!("ridge_solve: {} vs {} rows", a.rows(), b.rows())));
    }
    if !(lambda >= 0.0) {
        return Err(Error::Config(format!("ridge_solve: lambda {lambda} < 0")));
    }
    let mut gram = a.adjoint_matmul(a);
    for i in 0..gram.rows() {
        gram[(i, i)] += lambda;
    }
    let rhs = a.adjoint_matmul(b);
    cholesky_solve(&gram, &rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn random(rng: &mut ChaCha8Rng, r: usize, c: usize) -> ComplexMatrix {
        ComplexMatrix::from_rows(
            r,
            c,
            (0..r * c)
                .map(|_| C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
                .collect(),
        )
    }

    fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
        a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn ridge_identity_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let b = random(&mut rng, 4, 3);
        let i4 = ComplexMatrix::identity(4);
        assert!(max_abs_diff(&ridge_solve(&i4, &b, 0.0).unwrap(), &b) < 1e-14);
        let half = b.scale(C64::new(0.5, 0.0));
        assert!(max_abs_diff(&ridge_solve(&i4, &b, 1.0).unwrap(), &half) < 1e-14);
    }

    /// Dense Gauss-Jordan inverse, independent of the Cholesky path.
    fn gauss_jordan_inverse(a: &ComplexMatrix) -> ComplexMatrix {
        let n = a.rows();
        let mut aug = ComplexMatrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = a[(i, j)];
            }
            aug[(i, n + i)] = C64::new(1.0, 0.0);
        }
        for col in 0..n {
            let piv = (col..n).max_by(|&x, &y| aug[(x, col)].norm().total_cmp(&aug[(y, col)].norm())).unwrap();
            for j in 0..2 * n {
                let t = aug[(col, j)];
                aug[(col, j)] = aug[(piv, j)];
                aug[(piv, j)] = t;
            }
            let p = aug[(col, col)];
            for j in 0..2 * n {
                aug[(col, j)] /= p;
            }
            for i in 0..n {
                if i != col {
                    let f = aug[(i, col)];
                    for j in 0..2 * n {
                        let v = aug[(col, j)];
                        aug[(i, j)] -= f * v;
                    }
                }
            }
        }
        let mut inv = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = aug[(i, n + j)];
            }
        }
        inv
    }

    #[test]
    fn ridge_matches_dense_inverse_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let a = random(&mut rng, 6, 3);
        let b = random(&mut rng, 6, 2);
        for lambda in [0.0, 0.3] {
            let x = ridge_solve(&a, &b, lambda).unwrap();
            let mut g = a.adjoint().matmul(&a);
            for i in 0..3 {
                g[(i, i)] += lambda;
            }
            let oracle = gauss_jordan_inverse(&g).matmul(&a.adjoint().matmul(&b));
            assert!(max_abs_diff(&x, &oracle) < 1e-10);
            // normal-equation residual
            let res = g.matmul(&x).sub(&a.adjoint().matmul(&b));
            let rel = (res.frobenius_sqr() / a.adjoint().matmul(&b).frobenius_sqr()).sqrt();
            assert!(rel < tol::RIDGE_RESIDUAL);
        }
    }

    #[test]
    fn singular_without_regularization() {
        let a = ComplexMatrix::from_cols(3, &[vec![C64::new(1.0, 0.0); 3], vec![C64::new(1.0, 0.0); 3]]);
        let b = ComplexMatrix::zeros(3, 1);
        assert_eq!(ridge_solve(&a, &b, 0.0), Err(Error::Singular));
        assert!(ridge_solve(&a, &b, 1e-3).is_ok());
    }
}

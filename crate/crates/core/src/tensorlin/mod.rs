//! Dense complex linear algebra and tensor helpers.
//!
//! Storage is row-major everywhere: a matrix entry `(r, c)` lives at
//! `r * cols + c`, and a tensor's last index runs fastest. Under this layout
//! the row-stacked vectorization of `x hᵀ` is exactly `kron(x, h)`, which is
//! how the unsourced observation is viewed as a `(n_1, …, n_D, M)` tensor.

mod matrix;
mod tensor;

pub use matrix::{cholesky_solve, hermitian_inverse, ridge_solve, ComplexMatrix};
pub use tensor::ComplexTensor;

use num_complex::Complex64;

/// Default numerical tolerances shared by the crate.
pub mod tol {
    /// Relative residual accepted from [`super::ridge_solve`].
    pub const RIDGE_RESIDUAL: f64 = 1e-9;
    /// Pivot below this (relative to the largest diagonal) is treated as singular.
    pub const CHOLESKY_PIVOT: f64 = 1e-13;
    /// Unit-norm check on emitted constellation points.
    pub const UNIT_NORM: f64 = 1e-12;
    /// Transmit power normalization check, relative to `n`.
    pub const POWER: f64 = 1e-9;
}

pub type C64 = Complex64;

/// Kronecker product of two vectors: `out[i * b.len() + j] = a[i] * b[j]`.
pub fn kron(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &x in a {
        out.extend(b.iter().map(|&y| x * y));
    }
    out
}

/// Kronecker product of a sequence of vectors, left to right.
pub fn kron_all<V: AsRef<[C64]>>(factors: &[V]) -> Vec<C64> {
    let mut acc = vec![C64::new(1.0, 0.0)];
    for f in factors {
        acc = kron(&acc, f.as_ref());
    }
    acc
}

/// Row-stacked vectorization, so that `vectorize(x hᵀ) == kron(x, h)`.
pub fn vectorize(a: &ComplexMatrix) -> Vec<C64> {
    a.as_slice().to_vec()
}

/// Column-wise Kronecker product.
pub fn khatri_rao(a: &ComplexMatrix, b: &ComplexMatrix) -> crate::Result<ComplexMatrix> {
    if a.cols() != b.cols() {
        return Err(crate::Error::Shape(format!(
            "khatri_rao: {} vs {} columns",
            a.cols(),
            b.cols()
        )));
    }
    let (ra, rb, k) = (a.rows(), b.rows(), a.cols());
    let mut out = ComplexMatrix::zeros(ra * rb, k);
    for i in 0..ra {
        for j in 0..rb {
            for c in 0..k {
                out[(i * rb + j, c)] = a[(i, c)] * b[(j, c)];
            }
        }
    }
    Ok(out)
}

pub fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

pub fn norm(v: &[C64]) -> f64 {
    norm_sqr(v).sqrt()
}

/// `aᴴ b`.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

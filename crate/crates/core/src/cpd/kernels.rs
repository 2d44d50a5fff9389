//! Shared CPD kernels on factor matrices `U_m` (`dims[m] × R`).

use num_complex::Complex64 as C64;

use crate::tensorlin::{hermitian_inverse, khatri_rao, ComplexMatrix};
use crate::{Error, Result};

pub(crate) type Factors = Vec<ComplexMatrix>;

/// `G_m = U_mᴴ U_m`.
pub(crate) fn grams(u: &[ComplexMatrix]) -> Vec<ComplexMatrix> {
    u.iter().map(|m| m.adjoint_matmul(m)).collect()
}

/// Entry-wise product of the Gramians of every mode not in `skip`.
pub(crate) fn hadamard_except(g: &[ComplexMatrix], skip: &[usize]) -> ComplexMatrix {
    let r = g[0].rows();
    let mut w = ComplexMatrix::from_rows(r, r, vec![C64::new(1.0, 0.0); r * r]);
    for (m, gm) in g.iter().enumerate() {
        if skip.contains(&m) {
            continue;
        }
        for (a, b) in w.as_mut_slice().iter_mut().zip(gm.as_slice()) {
            *a *= b;
        }
    }
    w
}

fn conj_kr_chain(u: &[ComplexMatrix], rank: usize) -> ComplexMatrix {
    let mut acc = ComplexMatrix::from_rows(1, rank, vec![C64::new(1.0, 0.0); rank]);
    for m in u {
        acc = khatri_rao(&acc, m).expect("factor ranks agree");
    }
    for z in acc.as_mut_slice() {
        *z = z.conj();
    }
    acc
}

/// `M[i, r] = Σ_{idx: idx_n = i} T[idx] Π_{m≠n} conj(U_m[idx_m, r])`.
pub(crate) fn mttkrp(t: &[C64], dims: &[usize], u: &[ComplexMatrix], mode: usize) -> ComplexMatrix {
    let rank = u[0].cols();
    let left = conj_kr_chain(&u[..mode], rank);
    let right = conj_kr_chain(&u[mode + 1..], rank);
    let (a_n, d, c_n) = (left.rows(), dims[mode], right.rows());
    let mut out = ComplexMatrix::zeros(d, rank);
    let mut v = vec![C64::new(0.0, 0.0); rank];
    for a in 0..a_n {
        let kl = left.row(a);
        for i in 0..d {
            v.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
            let base = (a * d + i) * c_n;
            for c in 0..c_n {
                let x = t[base + c];
                for (vz, &kr) in v.iter_mut().zip(right.row(c)) {
                    *vz += x * kr;
                }
            }
            let orow = &mut out.as_mut_slice()[i * rank..(i + 1) * rank];
            for ((o, &vz), &l) in orow.iter_mut().zip(&v).zip(kl) {
                *o += vz * l;
            }
        }
    }
    out
}

/// Full model tensor `Σ_r U_0[:,r] ⊗ … ⊗ U_{N-1}[:,r]`, flattened.
pub(crate) fn reconstruct(u: &[ComplexMatrix]) -> Vec<C64> {
    let n = u.len();
    let rank = u[0].cols();
    let mut lead = ComplexMatrix::from_rows(1, rank, vec![C64::new(1.0, 0.0); rank]);
    for m in &u[..n - 1] {
        lead = khatri_rao(&lead, m).expect("factor ranks agree");
    }
    lead.matmul(&u[n - 1].transpose()).into_vec()
}

/// `E = model − T`.
pub(crate) fn residual(t: &[C64], u: &[ComplexMatrix]) -> Vec<C64> {
    let mut x = reconstruct(u);
    for (a, b) in x.iter_mut().zip(t) {
        *a -= b;
    }
    x
}

/// Solves `X Wᵀ = B` for Hermitian positive semi-definite `W`, with a small
/// relative ridge so rank-deficient factors stay solvable.
pub(crate) fn solve_right_transposed(b: &ComplexMatrix, w: &ComplexMatrix) -> Result<ComplexMatrix> {
    let inv = regularized_inverse(w)?;
    Ok(b.matmul(&inv.transpose()))
}

/// `(W + εI)⁻¹`, growing the ridge until the factorization succeeds.
pub(crate) fn regularized_inverse(w: &ComplexMatrix) -> Result<ComplexMatrix> {
    let r = w.rows();
    let scale = (0..r).map(|i| w[(i, i)].re).fold(0.0, f64::max);
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::Singular);
    }
    for ridge in [1e-12, 1e-9, 1e-6, 1e-3] {
        let mut reg = w.clone();
        for i in 0..r {
            reg[(i, i)] += ridge * scale;
        }
        if let Ok(inv) = hermitian_inverse(&reg) {
            return Ok(inv);
        }
    }
    Err(Error::Singular)
}

/// Rescales every component so all its mode vectors share the same norm.
pub(crate) fn balance(u: &mut [ComplexMatrix]) {
    let n = u.len() as f64;
    let rank = u[0].cols();
    for r in 0..rank {
        let norms: Vec<f64> = u.iter().map(|m| crate::tensorlin::norm(&m.col(r))).collect();
        if norms.iter().any(|&x| x == 0.0 || !x.is_finite()) {
            continue;
        }
        let target = norms.iter().map(|x| x.ln()).sum::<f64>() / n;
        let target = target.exp();
        for (m, &nm) in u.iter_mut().zip(&norms) {
            let s = target / nm;
            for i in 0..m.rows() {
                m[(i, r)] *= s;
            }
        }
    }
}

// Vector-space helpers on factor lists.

pub(crate) fn dot(a: &[ComplexMatrix], b: &[ComplexMatrix]) -> C64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| crate::tensorlin::inner(x.as_slice(), y.as_slice()))
        .sum()
}

pub(crate) fn fnorm_sqr(a: &[ComplexMatrix]) -> f64 {
    a.iter().map(|m| m.frobenius_sqr()).sum()
}

/// `a + s·b`.
pub(crate) fn axpy(a: &[ComplexMatrix], s: C64, b: &[ComplexMatrix]) -> Factors {
    a.iter().zip(b).map(|(x, y)| x.add(&y.scale(s))).collect()
}

pub(crate) fn scale(a: &[ComplexMatrix], s: C64) -> Factors {
    a.iter().map(|x| x.scale(s)).collect()
}

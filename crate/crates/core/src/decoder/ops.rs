//! Receiver building blocks: single-user TBM decoding, LMMSE detection,
//! channel re-estimation and interference cancellation.

use num_complex::Complex64 as C64;

use crate::bits::BitString;
use crate::cpd::CpdComponent;
use crate::fec::scl_decode;
use crate::grassmod::{compute_eta, gs_llr};
use crate::phy::{map_unsourced_factors, unsourced_coded_bits, SchemeConfig};
use crate::tensorlin::{hermitian_inverse, inner, ridge_solve, ComplexMatrix};
use crate::{Error, Result};

/// Soft-decodes one separated component. On a CRC pass returns the
/// unsourced message and the channel estimate with the `√n_u` amplitude and
/// the per-factor phase ambiguity removed.
pub fn tbm_single_user_decode(
    component: &CpdComponent,
    scheme: &SchemeConfig,
    sigma2: f64,
    eta_uses_full_block: bool,
) -> Result<Option<(BitString, Vec<C64>)>> {
    if component.factors.len() != scheme.sub_specs.len() {
        return Err(Error::Shape(format!(
            "component has {} factors, scheme has {} dimensions",
            component.factors.len(),
            scheme.sub_specs.len()
        )));
    }
    let amp = (scheme.n_u as f64).sqrt();
    let h_cpd: Vec<C64> = component.channel.iter().map(|z| z / amp).collect();
    let n_eta = if eta_uses_full_block { scheme.n } else { scheme.n_u };
    let mut llrs = Vec::with_capacity(scheme.polar_u.tx_len);
    for (v, spec) in component.factors.iter().zip(&scheme.sub_specs) {
        let eta = compute_eta(&h_cpd, n_eta, spec.ambient_dim, sigma2)?;
        match gs_llr(v, spec, eta) {
            Ok(l) => llrs.extend(l),
            Err(Error::ZeroVector) => return Ok(None),
            Err(e) => return Err(e),
        }
    }
    let Some(m_u) = scl_decode(&llrs, &scheme.polar_u)? else {
        return Ok(None);
    };
    let coded = unsourced_coded_bits(&m_u, scheme)?;
    let phase: C64 = map_unsourced_factors(&coded, scheme)?
        .iter()
        .zip(&component.factors)
        .map(|(a, v)| inner(a, v))
        .product();
    let h = h_cpd.iter().map(|z| z * phase).collect();
    Ok(Some((m_u, h)))
}

/// `(ĤᴴĤ + σ²I)⁻¹ Ĥᴴ Y_sᵀ`: row `k` holds user `k`'s symbol estimates.
pub fn noma_lmmse(h_hat: &ComplexMatrix, y_s: &ComplexMatrix, sigma2: f64) -> Result<ComplexMatrix> {
    if h_hat.rows() != y_s.cols() {
        return Err(Error::Shape(format!(
            "noma_lmmse: Ĥ has {} antennas, Y_s has {}",
            h_hat.rows(),
            y_s.cols()
        )));
    }
    if h_hat.cols() == 0 {
        return Err(Error::Config("noma_lmmse: no users".into()));
    }
    ridge_solve(h_hat, &y_s.transpose(), sigma2)
}

/// Per-stream gain `b_k = [(ĤᴴĤ+σ²I)⁻¹ĤᴴĤ]_kk` and the noise-plus-interference
/// variance `σ² [(ĤᴴĤ+σ²I)⁻¹]_kk / b_k` of the gain-normalized estimate.
pub fn lmmse_stream_stats(h_hat: &ComplexMatrix, sigma2: f64) -> Result<Vec<(f64, f64)>> {
    let gram = h_hat.adjoint_matmul(h_hat);
    let mut reg = gram.clone();
    for i in 0..reg.rows() {
        reg[(i, i)] += sigma2;
    }
    let a = hermitian_inverse(&reg)?;
    let gain = a.matmul(&gram);
    Ok((0..gram.rows())
        .map(|k| {
            let b = gain[(k, k)].re.max(f64::MIN_POSITIVE);
            (b, sigma2 * a[(k, k)].re / b)
        })
        .collect())
}

/// `Ĥ` (`M × K̂`) with `Ĥᵀ = (X̂ᴴX̂ + σ²I)⁻¹ X̂ᴴ Y`.
pub fn channel_reestimate(x_hat: &ComplexMatrix, y: &ComplexMatrix, sigma2: f64) -> Result<ComplexMatrix> {
    if x_hat.rows() != y.rows() {
        return Err(Error::Shape(format!(
            "channel_reestimate: X̂ has {} rows, Y has {}",
            x_hat.rows(),
            y.rows()
        )));
    }
    if x_hat.cols() == 0 {
        return Err(Error::Config("channel_reestimate: no users".into()));
    }
    Ok(ridge_solve(x_hat, y, sigma2)?.transpose())
}

/// `Y − X̂ Ĥᵀ`.
pub fn sic_subtract(y: &ComplexMatrix, x_hat: &ComplexMatrix, h_hat: &ComplexMatrix) -> Result<ComplexMatrix> {
    if x_hat.cols() != h_hat.cols() || x_hat.rows() != y.rows() || h_hat.rows() != y.cols() {
        return Err(Error::Shape(format!(
            "sic_subtract: Y {:?}, X̂ {:?}, Ĥ {:?}",
            y.shape(),
            x_hat.shape(),
            h_hat.shape()
        )));
    }
    if x_hat.cols() == 0 {
        return Ok(y.clone());
    }
    Ok(y.sub(&x_hat.matmul(&h_hat.transpose())))
}

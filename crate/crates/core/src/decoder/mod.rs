//! Iterative receiver: tensor-based separation and decoding of the
//! unsourced halves, slot-wise LMMSE decoding of the coherent halves, and
//! successive interference cancellation between the stages.

mod ops;

use num_complex::Complex64 as C64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::cpd::{cpd_decompose, CpdConfig, CpdFactors};
use crate::fec::scl_decode;
use crate::phy::{coherent_symbols, encode_unsourced, place_in_slot, slot_select, SchemeConfig};
use crate::tensorlin::{ComplexMatrix, ComplexTensor};
use crate::{Error, Result};

pub use crate::phy::qam::qam_soft_demap;
pub use ops::{channel_reestimate, lmmse_stream_stats, noma_lmmse, sic_subtract, tbm_single_user_decode};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecoderConfig {
    pub j_max: usize,
    pub j_u_max: usize,
    pub j_c_max: usize,
    pub cpd: CpdConfig,
    /// Joint cancellation of finalized users before the next outer pass.
    pub outer_sic: bool,
    /// Cancellation between CPD rounds of the unsourced loop.
    pub tbm_sic: bool,
    /// Cancellation between LMMSE rounds inside a slot.
    pub noma_sic: bool,
    /// Use the full block length `n` (rather than `n_u`) in the factor
    /// reliability `η`.
    pub eta_uses_full_block: bool,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        DecoderConfig {
            j_max: 3,
            j_u_max: 6,
            j_c_max: 3,
            cpd: CpdConfig::default(),
            outer_sic: true,
            tbm_sic: true,
            noma_sic: true,
            eta_uses_full_block: true,
        }
    }
}

impl DecoderConfig {
    pub fn validate(&self) -> Result<()> {
        if self.j_max == 0 || self.j_u_max == 0 || self.j_c_max == 0 {
            return Err(Error::Config("decoder iteration caps must be ≥ 1".into()));
        }
        self.cpd.validate()
    }
}

/// Where a message was first decoded: outer pass and unsourced-loop round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Origin {
    pub outer: usize,
    pub inner: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodedUser {
    pub m_u: BitString,
    /// Empty when the scheme has no coherent sub-block.
    pub m_c: BitString,
    pub h_hat: Vec<C64>,
    pub slot: usize,
    pub origin: Origin,
}

impl DecodedUser {
    pub fn message(&self) -> BitString {
        self.m_u.concat(&self.m_c)
    }
}

#[derive(Debug, Clone)]
pub struct DecodeReport {
    pub users: Vec<DecodedUser>,
    pub outer_iterations: usize,
    pub cpd_calls: usize,
    /// Unsourced halves recovered, summed over outer passes.
    pub unsourced_decoded: usize,
}

/// Separates the unsourced tensor into `rank` components.
pub type Separator<'a> = dyn FnMut(&ComplexTensor, usize) -> Result<CpdFactors> + 'a;

struct Unsourced {
    m_u: BitString,
    x_u: Vec<C64>,
    h: Vec<C64>,
    origin: Origin,
}

struct Finalized {
    user: DecodedUser,
    x: Vec<C64>,
}

/// Runs the receiver with CPD separation.
pub fn run_decoder<R: Rng + ?Sized>(
    y: &ComplexMatrix,
    k_a: usize,
    sigma2: f64,
    scheme: &SchemeConfig,
    cfg: &DecoderConfig,
    rng: &mut R,
) -> Result<Vec<DecodedUser>> {
    Ok(run_decoder_report(y, k_a, sigma2, scheme, cfg, rng)?.users)
}

pub fn run_decoder_report<R: Rng + ?Sized>(
    y: &ComplexMatrix,
    k_a: usize,
    sigma2: f64,
    scheme: &SchemeConfig,
    cfg: &DecoderConfig,
    rng: &mut R,
) -> Result<DecodeReport> {
    let cpd = cfg.cpd.clone();
    let mut sep = |t: &ComplexTensor, rank: usize| cpd_decompose(t, rank, &cpd, rng);
    run_decoder_with(y, k_a, sigma2, scheme, cfg, &mut sep)
}

/// Runs the receiver with a caller-supplied separation step.
pub fn run_decoder_with(
    y: &ComplexMatrix,
    k_a: usize,
    sigma2: f64,
    scheme: &SchemeConfig,
    cfg: &DecoderConfig,
    separate: &mut Separator<'_>,
) -> Result<DecodeReport> {
    if k_a == 0 {
        return Err(Error::Config("K_a must be ≥ 1".into()));
    }
    if y.rows() != scheme.n {
        return Err(Error::Length { expected: scheme.n, got: y.rows() });
    }
    if !(sigma2 > 0.0) {
        return Err(Error::Config(format!("noise variance {sigma2} must be positive")));
    }
    cfg.validate()?;
    let mut dims = scheme.dims.clone();
    dims.push(y.cols());

    let mut finalized: Vec<Finalized> = Vec::new();
    let mut y_res = y.clone();
    let mut report =
        DecodeReport { users: Vec::new(), outer_iterations: 0, cpd_calls: 0, unsourced_decoded: 0 };

    for j in 0..cfg.j_max {
        let k_rem = k_a.saturating_sub(finalized.len());
        if k_rem == 0 {
            break;
        }
        report.outer_iterations += 1;
        let y_res_u = y_res.row_block(0, scheme.n_u);
        let known = |m: &BitString, extra: &[Unsourced]| {
            finalized.iter().any(|f| &f.user.m_u == m) || extra.iter().any(|u| &u.m_u == m)
        };

        let mut unsourced: Vec<Unsourced> = Vec::new();
        let mut y_work = y_res_u.clone();
        for j_u in 0..cfg.j_u_max {
            let rank = k_rem.saturating_sub(unsourced.len()).max(1);
            let tensor = ComplexTensor::from_matrix(&y_work, &scheme.dims)?;
            let rank = rank.min(max_rank(&dims));
            let factors = separate(&tensor, rank)?;
            report.cpd_calls += 1;
            let mut fresh = 0;
            for comp in &factors.components {
                let Some((m_u, h)) = tbm_single_user_decode(comp, scheme, sigma2, cfg.eta_uses_full_block)?
                else {
                    continue;
                };
                if known(&m_u, &unsourced) {
                    continue;
                }
                let x_u = encode_unsourced(&m_u, scheme)?;
                unsourced.push(Unsourced { m_u, x_u, h, origin: Origin { outer: j, inner: j_u } });
                fresh += 1;
            }
            if unsourced.is_empty() {
                break;
            }
            let x_hat = columns(scheme.n_u, unsourced.iter().map(|u| &u.x_u[..]));
            let h_hat = channel_reestimate(&x_hat, &y_res_u, sigma2)?;
            for (k, u) in unsourced.iter_mut().enumerate() {
                u.h = h_hat.col(k);
            }
            y_work = sic_subtract(&y_res_u, &x_hat, &h_hat)?;
            if unsourced.len() >= k_rem || fresh == 0 || !cfg.tbm_sic {
                break;
            }
        }

        report.unsourced_decoded += unsourced.len();
        let fresh_final = if scheme.has_coherent() {
            decode_slots(&y_res, &unsourced, sigma2, scheme, cfg)?
        } else {
            unsourced
                .into_iter()
                .map(|u| Finalized {
                    x: u.x_u,
                    user: DecodedUser {
                        m_u: u.m_u,
                        m_c: BitString::zeros(0),
                        h_hat: u.h,
                        slot: 0,
                        origin: u.origin,
                    },
                })
                .collect()
        };
        if fresh_final.is_empty() {
            break;
        }
        finalized.extend(fresh_final);

        let x_all = columns(scheme.n, finalized.iter().map(|f| &f.x[..]));
        let h_all = channel_reestimate(&x_all, y, sigma2)?;
        for (k, f) in finalized.iter_mut().enumerate() {
            f.user.h_hat = h_all.col(k);
        }
        y_res = sic_subtract(y, &x_all, &h_all)?;
        if !cfg.outer_sic {
            break;
        }
    }

    report.users = finalized.into_iter().map(|f| f.user).collect();
    Ok(report)
}

/// Per-slot LMMSE detection and coherent decoding of the users whose
/// unsourced halves were recovered. Users whose coherent half never passes
/// its CRC are dropped.
fn decode_slots(
    y_res: &ComplexMatrix,
    unsourced: &[Unsourced],
    sigma2: f64,
    scheme: &SchemeConfig,
    cfg: &DecoderConfig,
) -> Result<Vec<Finalized>> {
    let polar_c = scheme.polar_c.as_ref().expect("coherent scheme");
    let boost = (scheme.s_c as f64).sqrt();
    let mut out = Vec::new();
    for slot in 0..scheme.s_c {
        let members: Vec<&Unsourced> = unsourced
            .iter()
            .filter(|u| slot_select(&u.m_u, scheme.s_c).ok() == Some(slot))
            .collect();
        if members.is_empty() {
            continue;
        }
        let start = scheme.n_u + slot * scheme.n_s;
        let y_slot = y_res.row_block(start, start + scheme.n_s);
        let mut y_work = y_slot.clone();
        let mut pending: Vec<&Unsourced> = members;
        for _ in 0..cfg.j_c_max {
            if pending.is_empty() {
                break;
            }
            let h_eff = ComplexMatrix::from_cols(
                y_slot.cols(),
                &pending.iter().map(|u| u.h.iter().map(|z| z * boost).collect::<Vec<_>>()).collect::<Vec<_>>(),
            );
            let est = noma_lmmse(&h_eff, &y_work, sigma2)?;
            let stats = lmmse_stream_stats(&h_eff, sigma2)?;
            let mut still = Vec::new();
            let mut decoded = Vec::new();
            for (k, u) in pending.iter().enumerate() {
                let (gain, var) = stats[k];
                let symbols: Vec<C64> = est.row(k).iter().map(|z| z / gain).collect();
                let llrs = qam_soft_demap(&symbols, &vec![var; symbols.len()], scheme.qam_order)?;
                match scl_decode(&llrs, polar_c)? {
                    Some(m_c) => decoded.push((*u, m_c)),
                    None => still.push(*u),
                }
            }
            if decoded.is_empty() {
                break;
            }
            for (u, m_c) in decoded {
                let q = coherent_symbols(&m_c, scheme)?;
                if cfg.noma_sic {
                    for (r, s) in q.iter().enumerate() {
                        for (a, h) in u.h.iter().enumerate() {
                            y_work[(r, a)] -= s * boost * h;
                        }
                    }
                }
                let mut x = u.x_u.clone();
                x.extend(place_in_slot(&q, slot, scheme));
                out.push(Finalized {
                    x,
                    user: DecodedUser { m_u: u.m_u.clone(), m_c, h_hat: u.h.clone(), slot, origin: u.origin },
                });
            }
            pending = still;
            if !cfg.noma_sic {
                break;
            }
        }
    }
    Ok(out)
}

fn columns<'a>(rows: usize, cols: impl Iterator<Item = &'a [C64]>) -> ComplexMatrix {
    let cols: Vec<&[C64]> = cols.collect();
    ComplexMatrix::from_cols(rows, &cols)
}

fn max_rank(dims: &[usize]) -> usize {
    let total: usize = dims.iter().product();
    dims.iter().map(|&d| total / d).min().unwrap_or(1)
}

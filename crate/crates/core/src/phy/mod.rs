//! Transmit chain: message split, unsourced rank-1 tensor signal, slot
//! selection, slotted coherent QAM signal, and concatenation.

pub mod qam;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::check_len;
use crate::fec::{crc_append, polar_encode, CrcPoly, PolarSpec};
use crate::grassmod::{gs_map, SubConstellationSpec};
use crate::tensorlin::{kron_all, norm_sqr, tol};
use crate::{Error, Result};

/// User-facing scheme parameters, from which [`SchemeConfig`] derives
/// every bit budget and code.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeParams {
    pub name: String,
    pub n: usize,
    pub n_u: usize,
    pub dims: Vec<usize>,
    pub b: usize,
    pub b_u: usize,
    pub s_c: usize,
    pub qam_order: usize,
    /// Bits per real local coordinate of each sub-constellation.
    pub grid_bits: usize,
    pub list_size: usize,
}

impl SchemeParams {
    /// TBMC with dims (5,5,5,4): n = 1000, n_u = 500, B = 200, B_u = 40,
    /// two coherent slots, 4-QAM. Four coded bits per complex local
    /// coordinate (two per real one) give 68 unsourced coded bits.
    pub fn tbmc_5554() -> Self {
        SchemeParams {
            name: "tbmc-5554".into(),
            n: 1000,
            n_u: 500,
            dims: vec![5, 5, 5, 4],
            b: 200,
            b_u: 40,
            s_c: 2,
            qam_order: 4,
            grid_bits: 2,
            list_size: 32,
        }
    }

    /// Plain tensor-based modulation over the whole block, dims (40, 25),
    /// four coded bits per real local coordinate.
    pub fn tbm_40x25() -> Self {
        SchemeParams {
            name: "tbm-40x25".into(),
            n: 1000,
            n_u: 1000,
            dims: vec![40, 25],
            b: 200,
            b_u: 200,
            s_c: 1,
            qam_order: 4,
            grid_bits: 4,
            list_size: 32,
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        PRESETS
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, f)| f())
            .ok_or_else(|| Error::Unknown { kind: "preset", name: name.to_string() })
    }

    pub fn preset_names() -> impl Iterator<Item = &'static str> {
        PRESETS.iter().map(|(n, _)| *n)
    }
}

type PresetFn = fn() -> SchemeParams;

const PRESETS: &[(&str, PresetFn)] =
    &[("tbmc-5554", SchemeParams::tbmc_5554), ("tbm-40x25", SchemeParams::tbm_40x25)];

/// CRC of the unsourced codeword.
pub const CRC_UNSOURCED: CrcPoly = CrcPoly::CRC11;
/// CRC of the coherent codeword.
pub const CRC_COHERENT: CrcPoly = CrcPoly::CRC16_CCITT;

/// Fully derived scheme configuration.
#[derive(Clone, Debug)]
pub struct SchemeConfig {
    pub params: SchemeParams,
    pub n: usize,
    pub n_u: usize,
    pub n_c: usize,
    pub dims: Vec<usize>,
    pub b: usize,
    pub b_u: usize,
    pub b_c: usize,
    pub s_c: usize,
    pub n_s: usize,
    pub qam_order: usize,
    pub sub_specs: Vec<SubConstellationSpec>,
    pub polar_u: PolarSpec,
    /// Absent when the whole block is unsourced.
    pub polar_c: Option<PolarSpec>,
}

impl SchemeConfig {
    pub fn new(params: SchemeParams) -> Result<Self> {
        let p = &params;
        let cfg_err = |m: String| Err(Error::Config(m));
        if p.dims.len() < 2 || p.dims.iter().any(|&d| d < 2) {
            return cfg_err(format!("tensor dims {:?} need D >= 2 and every n_i >= 2", p.dims));
        }
        if p.dims.iter().product::<usize>() != p.n_u {
            return cfg_err(format!("prod{:?} != n_u = {}", p.dims, p.n_u));
        }
        if p.n_u > p.n || p.b_u > p.b || p.b_u == 0 {
            return cfg_err("need n_u <= n and 0 < B_u <= B".into());
        }
        let (n_c, b_c) = (p.n - p.n_u, p.b - p.b_u);
        if (n_c == 0) != (b_c == 0) {
            return cfg_err("coherent resources and coherent bits must both be zero or both positive".into());
        }
        let sub_specs = p
            .dims
            .iter()
            .map(|&d| SubConstellationSpec::new(d, p.grid_bits))
            .collect::<Result<Vec<_>>>()?;
        let coded_u: usize = sub_specs.iter().map(|s| s.total_bits).sum();
        let polar_u = PolarSpec::new(p.b_u, CRC_UNSOURCED, coded_u, p.list_size)?;

        let (s_c, n_s, polar_c) = if n_c > 0 {
            if !p.s_c.is_power_of_two() {
                return cfg_err(format!("slot count {} is not a power of two", p.s_c));
            }
            if n_c % p.s_c != 0 {
                return cfg_err(format!("n_c = {n_c} not divisible by S_c = {}", p.s_c));
            }
            if (p.s_c.trailing_zeros() as usize) > p.b_u {
                return cfg_err("B_u too short to select a slot".into());
            }
            let n_s = n_c / p.s_c;
            let coded_c = n_s * qam::bits_per_symbol(p.qam_order)?;
            (p.s_c, n_s, Some(PolarSpec::new(b_c, CRC_COHERENT, coded_c, p.list_size)?))
        } else {
            (1, 0, None)
        };

        Ok(SchemeConfig {
            n: p.n,
            n_u: p.n_u,
            n_c,
            dims: p.dims.clone(),
            b: p.b,
            b_u: p.b_u,
            b_c,
            s_c,
            n_s,
            qam_order: p.qam_order,
            sub_specs,
            polar_u,
            polar_c,
            params,
        })
    }

    pub fn preset(name: &str) -> Result<Self> {
        Self::new(SchemeParams::preset(name)?)
    }

    pub fn has_coherent(&self) -> bool {
        self.n_c > 0
    }

    pub fn name(&self) -> &str {
        &self.params.name
    }
}

/// One user's transmit signal.
#[derive(Clone, Debug)]
pub struct TxSignal {
    pub x_u: Vec<C64>,
    pub x_c: Vec<C64>,
    pub x: Vec<C64>,
    pub slot: usize,
}

/// Unsourced codeword: coded bits fill dimension 1 first, then 2, and so on.
pub fn unsourced_coded_bits(m_u: &[u8], cfg: &SchemeConfig) -> Result<BitString> {
    check_len(cfg.b_u, m_u.len())?;
    Ok(polar_encode(&crc_append(m_u, cfg.polar_u.crc), &cfg.polar_u)?.bits)
}

/// Per-dimension constellation points for already-coded bits.
pub fn map_unsourced_factors(coded: &[u8], cfg: &SchemeConfig) -> Result<Vec<Vec<C64>>> {
    let mut off = 0;
    let mut factors = Vec::with_capacity(cfg.sub_specs.len());
    for spec in &cfg.sub_specs {
        factors.push(gs_map(&coded[off..off + spec.total_bits], spec)?.coords);
        off += spec.total_bits;
    }
    Ok(factors)
}

/// `√n_u · a_1 ⊗ … ⊗ a_D`, so that `‖x_u‖² = n_u`.
pub fn encode_unsourced(m_u: &[u8], cfg: &SchemeConfig) -> Result<Vec<C64>> {
    let coded = unsourced_coded_bits(m_u, cfg)?;
    let factors = map_unsourced_factors(&coded, cfg)?;
    let amp = (cfg.n_u as f64).sqrt();
    Ok(kron_all(&factors).into_iter().map(|z| z * amp).collect())
}

/// Slot index from the trailing `log2 S_c` bits of the unsourced message.
pub fn slot_select(m_u: &[u8], s_c: usize) -> Result<usize> {
    if !s_c.is_power_of_two() {
        return Err(Error::Config(format!("slot count {s_c} is not a power of two")));
    }
    let k = s_c.trailing_zeros() as usize;
    if k > m_u.len() {
        return Err(Error::Config(format!("{} bits cannot address {s_c} slots", m_u.len())));
    }
    Ok(BitString::from(&m_u[m_u.len() - k..]).to_uint() as usize)
}

/// Coherent QAM symbols of `m_c` (one slot's worth, unit average energy).
pub fn coherent_symbols(m_c: &[u8], cfg: &SchemeConfig) -> Result<Vec<C64>> {
    let polar_c = cfg
        .polar_c
        .as_ref()
        .ok_or_else(|| Error::Config("scheme has no coherent sub-block".into()))?;
    check_len(cfg.b_c, m_c.len())?;
    let coded = polar_encode(&crc_append(m_c, polar_c.crc), polar_c)?;
    qam::qam_map(&coded.bits, cfg.qam_order)
}

/// `(e_slot ⊗ I_{n_s}) · √S_c · q`.
pub fn encode_coherent(m_c: &[u8], slot: usize, cfg: &SchemeConfig) -> Result<Vec<C64>> {
    if slot >= cfg.s_c {
        return Err(Error::OutOfRange { index: slot, bound: cfg.s_c });
    }
    let q = coherent_symbols(m_c, cfg)?;
    Ok(place_in_slot(&q, slot, cfg))
}

pub(crate) fn place_in_slot(q: &[C64], slot: usize, cfg: &SchemeConfig) -> Vec<C64> {
    let boost = (cfg.s_c as f64).sqrt();
    let mut x_c = vec![C64::new(0.0, 0.0); cfg.n_c];
    for (dst, &s) in x_c[slot * cfg.n_s..(slot + 1) * cfg.n_s].iter_mut().zip(q) {
        *dst = s * boost;
    }
    x_c
}

/// `x = [x_u; x_c]`.
pub fn assemble(x_u: Vec<C64>, x_c: Vec<C64>, slot: usize, cfg: &SchemeConfig) -> Result<TxSignal> {
    check_len(cfg.n_u, x_u.len())?;
    check_len(cfg.n_c, x_c.len())?;
    let mut x = x_u.clone();
    x.extend_from_slice(&x_c);
    let e = norm_sqr(&x);
    if (e - cfg.n as f64).abs() > tol::POWER * cfg.n as f64 && cfg.qam_order == 4 {
        return Err(Error::Config(format!("transmit energy {e} differs from n = {}", cfg.n)));
    }
    Ok(TxSignal { x_u, x_c, x, slot })
}

/// Splits a `B`-bit message into its unsourced and coherent halves.
pub fn split_message(m: &[u8], cfg: &SchemeConfig) -> Result<(BitString, BitString)> {
    check_len(cfg.b, m.len())?;
    Ok((BitString::from(&m[..cfg.b_u]), BitString::from(&m[cfg.b_u..])))
}

/// Full transmit chain for one user.
pub fn encode_user(m: &[u8], cfg: &SchemeConfig) -> Result<TxSignal> {
    let (m_u, m_c) = split_message(m, cfg)?;
    let x_u = encode_unsourced(&m_u, cfg)?;
    if !cfg.has_coherent() {
        return assemble(x_u, Vec::new(), 0, cfg);
    }
    let slot = slot_select(&m_u, cfg.s_c)?;
    let x_c = encode_coherent(&m_c, slot, cfg)?;
    assemble(x_u, x_c, slot, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensorlin::ComplexTensor;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tbmc() -> SchemeConfig {
        SchemeConfig::preset("tbmc-5554").unwrap()
    }

    #[test]
    fn preset_bit_budgets() {
        let c = tbmc();
        assert_eq!((c.n_c, c.b_c, c.n_s), (500, 160, 250));
        // 3·(2 + 8·2) + (2 + 6·2)
        assert_eq!(c.polar_u.tx_len, 68);
        assert_eq!(c.polar_u.mother_len, 128);
        assert_eq!(c.polar_u.info_len, 51);
        let pc = c.polar_c.as_ref().unwrap();
        assert_eq!((pc.tx_len, pc.mother_len, pc.info_len), (500, 512, 176));
        let t = SchemeConfig::preset("tbm-40x25").unwrap();
        assert!(!t.has_coherent());
        assert_eq!(t.polar_u.tx_len, 317 + 196);
        assert!(SchemeConfig::preset("nope").is_err());
    }

    #[test]
    fn invalid_configs_rejected() {
        let mut p = SchemeParams::tbmc_5554();
        p.dims = vec![5, 5, 5, 5];
        assert!(SchemeConfig::new(p).is_err());
        let mut p = SchemeParams::tbmc_5554();
        p.s_c = 3;
        assert!(SchemeConfig::new(p).is_err());
    }

    #[test]
    fn unsourced_signal_is_rank_one_with_power_n_u() {
        let c = tbmc();
        let mut rng = ChaCha8Rng::seed_from_u64(50);
        for _ in 0..20 {
            let m = BitString::random(40, &mut rng);
            let x = encode_unsourced(&m, &c).unwrap();
            assert!((norm_sqr(&x) - 500.0).abs() < 1e-9 * 500.0);
            let t = ComplexTensor::new(c.dims.clone(), x).unwrap();
            for mode in 0..4 {
                let u = t.mode_unfold(mode).unwrap();
                let m = nalgebra::DMatrix::from_fn(u.rows(), u.cols(), |r, cc| u[(r, cc)]);
                let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
                s.sort_by(|a, b| b.total_cmp(a));
                assert!(s[1] < 1e-10 * s[0]);
            }
        }
    }

    #[test]
    fn one_bit_difference_changes_signal() {
        let c = tbmc();
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        for k in 0..500 {
            let m = BitString::random(40, &mut rng);
            let mut m2 = m.clone();
            m2[k % 40] ^= 1;
            let a = encode_unsourced(&m, &c).unwrap();
            let b = encode_unsourced(&m2, &c).unwrap();
            assert!(a.iter().zip(&b).any(|(x, y)| (x - y).norm() > 1e-9));
        }
    }

    #[test]
    fn slot_selection() {
        assert_eq!(slot_select(&[1, 0, 1, 0], 2).unwrap(), 0);
        assert_eq!(slot_select(&[1, 0, 1, 1], 2).unwrap(), 1);
        assert_eq!(slot_select(&[1, 1, 1, 1], 1).unwrap(), 0);
        assert!(slot_select(&[1, 1], 3).is_err());
        let mut counts = [0usize; 4];
        for x in 0..16u64 {
            counts[slot_select(&BitString::from_uint(x, 4), 4).unwrap()] += 1;
        }
        assert_eq!(counts, [4, 4, 4, 4]);
    }

    #[test]
    fn coherent_signal_support_and_modulus() {
        let c = tbmc();
        let mut rng = ChaCha8Rng::seed_from_u64(52);
        let m_c = BitString::random(160, &mut rng);
        for slot in 0..2 {
            let x = encode_coherent(&m_c, slot, &c).unwrap();
            for (i, z) in x.iter().enumerate() {
                if (slot * 250..(slot + 1) * 250).contains(&i) {
                    assert!((z.norm() - 2f64.sqrt()).abs() < 1e-12);
                } else {
                    assert_eq!(*z, C64::new(0.0, 0.0));
                }
            }
            assert!((norm_sqr(&x) - 500.0).abs() < 1e-9);
        }
        assert!(encode_coherent(&m_c, 2, &c).is_err());
    }

    #[test]
    fn assembled_signal() {
        let c = tbmc();
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let m = BitString::random(200, &mut rng);
        let tx = encode_user(&m, &c).unwrap();
        assert!((norm_sqr(&tx.x) - 1000.0).abs() < 1e-9 * 1000.0);
        assert_eq!(&tx.x[..500], &tx.x_u[..]);
        assert_eq!(tx.slot, m[39] as usize);

        let t = SchemeConfig::preset("tbm-40x25").unwrap();
        let tx = encode_user(&BitString::random(200, &mut rng), &t).unwrap();
        assert_eq!(tx.x.len(), 1000);
        assert!((norm_sqr(&tx.x) - 1000.0).abs() < 1e-6);
        assert!(assemble(vec![C64::new(0.0, 0.0); 3], vec![], 0, &c).is_err());
    }

    #[test]
    fn distinct_messages_distinct_signals() {
        let c = tbmc();
        let mut rng = ChaCha8Rng::seed_from_u64(54);
        let mut seen: Vec<Vec<C64>> = Vec::new();
        for _ in 0..50 {
            let x = encode_user(&BitString::random(200, &mut rng), &c).unwrap().x;
            assert!(seen.iter().all(|s| s.iter().zip(&x).any(|(a, b)| (a - b).norm() > 1e-9)));
            seen.push(x);
        }
    }
}

use serde::{Deserialize, Serialize};

use super::construct::build_frozen_set_shortened;
use super::crc::CrcPoly;
use crate::bits::BitString;
use crate::error::check_len;
use crate::{Error, Result};

/// A CRC-aided, possibly shortened, polar code.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolarSpec {
    pub mother_len: usize,
    /// Message bits plus CRC bits.
    pub info_len: usize,
    pub crc: CrcPoly,
    /// Ascending frozen input indices.
    pub frozen_set: Vec<usize>,
    pub list_size: usize,
    pub tx_len: usize,
    #[serde(skip)]
    info_positions: Vec<usize>,
}

impl PolarSpec {
    /// Code carrying `msg_len` message bits in `tx_len` transmitted bits;
    /// the mother length is the next power of two.
    pub fn new(msg_len: usize, crc: CrcPoly, tx_len: usize, list_size: usize) -> Result<Self> {
        let info_len = msg_len + crc.width();
        if msg_len == 0 || info_len > tx_len {
            return Err(Error::Config(format!(
                "polar code cannot carry {info_len} info bits in {tx_len} coded bits"
            )));
        }
        if list_size == 0 {
            return Err(Error::Config("list size must be at least 1".into()));
        }
        let mother_len = tx_len.next_power_of_two();
        let frozen_set = build_frozen_set_shortened(mother_len, info_len, tx_len);
        Self::with_frozen_set(mother_len, info_len, crc, frozen_set, list_size, tx_len)
    }

    pub fn with_frozen_set(
        mother_len: usize,
        info_len: usize,
        crc: CrcPoly,
        frozen_set: Vec<usize>,
        list_size: usize,
        tx_len: usize,
    ) -> Result<Self> {
        if !mother_len.is_power_of_two() || tx_len > mother_len {
            return Err(Error::Config(format!("mother length {mother_len} / tx length {tx_len}")));
        }
        if info_len + frozen_set.len() != mother_len {
            return Err(Error::Config("frozen set size inconsistent with info length".into()));
        }
        if (tx_len..mother_len).any(|i| frozen_set.binary_search(&i).is_err()) {
            return Err(Error::Config("shortened inputs must be frozen".into()));
        }
        let mut spec = PolarSpec {
            mother_len,
            info_len,
            crc,
            frozen_set,
            list_size,
            tx_len,
            info_positions: Vec::new(),
        };
        spec.info_positions = spec.compute_info_positions();
        Ok(spec)
    }

    fn compute_info_positions(&self) -> Vec<usize> {
        (0..self.mother_len).filter(|i| self.frozen_set.binary_search(i).is_err()).collect()
    }

    /// Ascending non-frozen indices.
    pub fn info_positions(&self) -> &[usize] {
        &self.info_positions
    }

    pub fn msg_len(&self) -> usize {
        self.info_len - self.crc.width()
    }

    pub fn is_frozen_mask(&self) -> Vec<bool> {
        let mut m = vec![false; self.mother_len];
        for &i in &self.frozen_set {
            m[i] = true;
        }
        m
    }

    pub fn with_list_size(&self, list_size: usize) -> Self {
        PolarSpec { list_size, ..self.clone() }
    }
}

/// Transmitted coded bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Codeword {
    pub bits: BitString,
}

/// In-place `x = u F^{⊗n}` over GF(2).
pub(crate) fn polar_transform(x: &mut [u8]) {
    let n = x.len();
    let mut h = 1;
    while h < n {
        for start in (0..n).step_by(2 * h) {
            for j in start..start + h {
                x[j] ^= x[j + h];
            }
        }
        h *= 2;
    }
}

/// Encodes `info` (message ‖ CRC, `info_len` bits).
pub fn polar_encode(info: &[u8], spec: &PolarSpec) -> Result<Codeword> {
    check_len(spec.info_len, info.len())?;
    let mut u = vec![0u8; spec.mother_len];
    for (&pos, &b) in spec.info_positions().iter().zip(info) {
        u[pos] = b;
    }
    polar_transform(&mut u);
    debug_assert!(u[spec.tx_len..].iter().all(|&b| b == 0));
    u.truncate(spec.tx_len);
    Ok(Codeword { bits: BitString::from(u) })
}

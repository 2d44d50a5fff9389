use serde::{Deserialize, Serialize};

use crate::bits::BitString;

/// CRC generator polynomial; `poly` holds the coefficients below `x^width`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrcPoly {
    pub poly: u32,
    pub width: u32,
}

impl CrcPoly {
    /// `x^11 + x^10 + x^9 + x^5 + 1`.
    pub const CRC11: CrcPoly = CrcPoly::new(0xE21, 11);
    /// CRC-16-CCITT, `x^16 + x^12 + x^5 + 1`.
    pub const CRC16_CCITT: CrcPoly = CrcPoly::new(0x1021, 16);

    /// Accepts the polynomial with or without its leading `x^width` term.
    pub const fn new(poly: u32, width: u32) -> Self {
        CrcPoly { poly: poly & ((1u32 << width) - 1), width }
    }

    pub fn width(&self) -> usize {
        self.width as usize
    }
}

/// `msg(x) · x^width mod g(x)`, MSB first, zero initial register.
pub fn crc_remainder(msg: &[u8], poly: CrcPoly) -> u32 {
    let mask = (1u32 << poly.width) - 1;
    let top = poly.width - 1;
    let mut reg = 0u32;
    for &b in msg {
        let fb = ((reg >> top) & 1) ^ b as u32;
        reg = (reg << 1) & mask;
        if fb == 1 {
            reg ^= poly.poly;
        }
    }
    reg
}

pub fn crc_append(msg: &[u8], poly: CrcPoly) -> BitString {
    let rem = crc_remainder(msg, poly);
    BitString::from(msg).concat(&BitString::from_uint(rem as u64, poly.width()))
}

/// True when the trailing `width` bits are the CRC of the leading ones.
pub fn crc_check(word: &[u8], poly: CrcPoly) -> bool {
    let w = poly.width();
    if word.len() < w {
        return false;
    }
    let (msg, tail) = word.split_at(word.len() - w);
    crc_remainder(msg, poly) as u64 == BitString::from(tail).to_uint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Polynomial long division over GF(2) on explicit coefficient vectors.
    fn long_division_remainder(msg: &[u8], full_poly: &[u8]) -> Vec<u8> {
        let w = full_poly.len() - 1;
        let mut dividend: Vec<u8> = msg.to_vec();
        dividend.extend(std::iter::repeat(0).take(w));
        for i in 0..msg.len() {
            if dividend[i] == 1 {
                for (j, &p) in full_poly.iter().enumerate() {
                    dividend[i + j] ^= p;
                }
            }
        }
        dividend[msg.len()..].to_vec()
    }

    #[test]
    fn crc11_matches_long_division() {
        // x^11 + x^10 + x^9 + x^5 + 1
        let g = [1, 1, 1, 0, 0, 0, 1, 0, 0, 0, 0, 1];
        let pattern: Vec<u8> = (0..40).map(|i| ((i * 7 + 3) % 5 % 2) as u8).collect();
        let rem = crc_remainder(&pattern, CrcPoly::CRC11);
        let oracle = long_division_remainder(&pattern, &g);
        assert_eq!(BitString::from_uint(rem as u64, 11).into_inner(), oracle);
    }

    #[test]
    fn crc16_matches_long_division() {
        let mut g = vec![0u8; 17];
        for k in [16, 12, 5, 0] {
            g[16 - k] = 1;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        for _ in 0..50 {
            let m = BitString::random(160, &mut rng);
            let rem = crc_remainder(&m, CrcPoly::CRC16_CCITT);
            assert_eq!(BitString::from_uint(rem as u64, 16).into_inner(), long_division_remainder(&m, &g));
        }
    }

    #[test]
    fn append_then_check() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..1000 {
            let len = rng.gen_range(1..200);
            let m = BitString::random(len, &mut rng);
            let w = crc_append(&m, CrcPoly::CRC11);
            assert!(crc_check(&w, CrcPoly::CRC11));
            let mut bad = w.clone();
            let k = rng.gen_range(0..bad.len());
            bad[k] ^= 1;
            assert!(!crc_check(&bad, CrcPoly::CRC11));
        }
    }

    #[test]
    fn zero_message_zero_crc() {
        let w = crc_append(&BitString::zeros(40), CrcPoly::CRC11);
        assert!(w.iter().all(|&b| b == 0));
    }
}

use std::fmt;
use std::ops::{Deref, DerefMut};

use rand::Rng;
use serde::{Deserialize, Serialize};

/// Ordered sequence of bits, one `u8` (0 or 1) per bit.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct BitString(Vec<u8>);

impl BitString {
    pub fn zeros(len: usize) -> Self {
        BitString(vec![0; len])
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        BitString((0..len).map(|_| rng.gen_range(0..2u8)).collect())
    }

    /// Big-endian bits of `value` (MSB first), `width` bits.
    pub fn from_uint(value: u64, width: usize) -> Self {
        BitString((0..width).rev().map(|k| ((value >> k) & 1) as u8).collect())
    }

    /// Interprets the bits as a big-endian unsigned integer.
    pub fn to_uint(&self) -> u64 {
        self.0.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64)
    }

    pub fn concat(&self, other: &BitString) -> BitString {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        BitString(v)
    }

    pub fn slice(&self, start: usize, end: usize) -> BitString {
        BitString(self.0[start..end].to_vec())
    }

    pub fn xor(&self, other: &BitString) -> BitString {
        BitString(self.0.iter().zip(&other.0).map(|(a, b)| a ^ b).collect())
    }

    pub fn into_inner(self) -> Vec<u8> {
        self.0
    }
}

impl From<Vec<u8>> for BitString {
    fn from(v: Vec<u8>) -> Self {
        debug_assert!(v.iter().all(|&b| b <= 1));
        BitString(v)
    }
}

impl From<&[u8]> for BitString {
    fn from(v: &[u8]) -> Self {
        BitString::from(v.to_vec())
    }
}

impl Deref for BitString {
    type Target = [u8];
    fn deref(&self) -> &[u8] {
        &self.0
    }
}

impl DerefMut for BitString {
    fn deref_mut(&mut self) -> &mut [u8] {
        &mut self.0
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString(")?;
        for b in &self.0 {
            write!(f, "{b}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// Binary-reflected Gray code of `m`.
pub fn gray_encode(m: u64) -> u64 {
    m ^ (m >> 1)
}

/// Inverse of [`gray_encode`].
pub fn gray_decode(mut g: u64) -> u64 {
    let mut m = g;
    while g > 0 {
        g >>= 1;
        m ^= g;
    }
    m
}

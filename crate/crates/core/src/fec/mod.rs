//! CRC-aided polar coding.
//!
//! Encoding uses the natural-order transform `x = u F^{⊗n}` with
//! `F = [[1,0],[1,1]]`. Shortening drops the last `mother_len - tx_len`
//! output positions; their inputs are frozen, which makes the dropped
//! outputs identically zero and lets the decoder treat them as known.

mod construct;
mod crc;
mod polar;
mod scl;

pub use construct::{bhattacharyya_reliability, build_frozen_set, build_frozen_set_shortened, DESIGN_SNR_DB};
pub use crc::{crc_append, crc_check, crc_remainder, CrcPoly};
pub use polar::{polar_encode, Codeword, PolarSpec};
pub use scl::{scl_decode, scl_decode_info};

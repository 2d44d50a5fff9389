//! Link-level building blocks for unsourced random access with tensor-based
//! modulation and coherent concatenation (TBMC).
//!
//! Each user splits its message into an unsourced part, sent as a rank-1
//! tensor of Grassmannian cube-split symbols, and a coherent part, sent as
//! polar-coded QAM in a slot chosen by the unsourced bits. The receiver
//! separates users by canonical polyadic decomposition, decodes them one by
//! one, then decodes the coherent halves with per-slot LMMSE detection and
//! successive interference cancellation.

pub mod bits;
pub mod error;
pub mod fec;
pub mod grassmod;
pub mod phy;
pub mod channel;
pub mod cpd;
pub mod decoder;
pub mod rng;
pub mod tensorlin;

pub use bits::BitString;
pub use error::{Error, Result};
pub use tensorlin::{ComplexMatrix, ComplexTensor, C64};

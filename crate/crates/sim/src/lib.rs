//! Monte Carlo harness for the TBMC link-level simulator: trial execution,
//! error-rate estimation, minimum-Eb/N0 search and result emission.

pub mod config;
pub mod emit;
pub mod error;
pub mod metrics;
pub mod search;
pub mod trial;

pub use config::{SchemeSpec, SearchSpec, SimConfig};
pub use emit::{Format, Record};
pub use error::{SimError, SimResult};
pub use metrics::{estimate_pe, summarize, MetricSummary};
pub use search::{min_ebn0_search, SearchOutcome};
pub use trial::{run_trial, TrialContext, TrialResult};

//! Minimum Eb/N0 meeting a target error probability: a doubling bracket
//! scan followed by bisection.

use crate::config::SearchSpec;
use crate::metrics::MetricSummary;
use crate::{SimError, SimResult};

#[derive(Clone, Debug, PartialEq)]
pub struct SearchOutcome {
    /// Lowest evaluated point meeting the target.
    pub ebn0_db: f64,
    pub summary: MetricSummary,
    /// Every evaluation in the order made.
    pub evaluations: Vec<(f64, MetricSummary)>,
}

/// `eval(ebn0_db, trials)` estimates the error probability at one point.
/// A bisection midpoint whose estimate is out of order with the bracket
/// ends is re-measured once with twice the trials.
pub fn min_ebn0_search<F>(mut eval: F, epsilon: f64, spec: &SearchSpec, trials: usize) -> SimResult<SearchOutcome>
where
    F: FnMut(f64, usize) -> SimResult<MetricSummary>,
{
    if !(spec.tol_db > 0.0 && spec.step_db > 0.0) {
        return Err(SimError::Config("search needs positive step_db and tol_db".into()));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(SimError::Config(format!("epsilon {epsilon} outside (0, 1)")));
    }
    let mut evaluations = Vec::new();
    let mut probe = |x: f64, t: usize, log: &mut Vec<(f64, MetricSummary)>| -> SimResult<MetricSummary> {
        let s = eval(x, t)?;
        log.push((x, s.clone()));
        Ok(s)
    };

    let first = probe(spec.start_db, trials, &mut evaluations)?;
    let passes = |s: &MetricSummary| s.p_e <= epsilon;
    let start_ok = passes(&first);
    let dir = if start_ok { -1.0 } else { 1.0 };
    let mut prev = (spec.start_db, first);
    let mut step = spec.step_db;
    let mut bracket = None;
    for _ in 0..spec.max_scan_steps {
        let x = prev.0 + dir * step;
        let s = probe(x, trials, &mut evaluations)?;
        if passes(&s) != start_ok {
            bracket = Some(if start_ok { ((x, s), prev.clone()) } else { (prev.clone(), (x, s)) });
            break;
        }
        prev = (x, s);
        step *= 2.0;
    }
    let (mut lo, mut hi) = bracket.ok_or_else(|| {
        SimError::Search(format!(
            "no Eb/N0 bracket for target {epsilon} within {} scan steps from {} dB (last point {} dB, P_e = {})",
            spec.max_scan_steps, spec.start_db, prev.0, prev.1.p_e
        ))
    })?;

    while hi.0 - lo.0 > spec.tol_db {
        let mid = 0.5 * (lo.0 + hi.0);
        let mut s = probe(mid, trials, &mut evaluations)?;
        if s.p_e > lo.1.p_e || s.p_e < hi.1.p_e {
            s = probe(mid, 2 * trials, &mut evaluations)?;
        }
        if passes(&s) {
            hi = (mid, s);
        } else {
            lo = (mid, s);
        }
    }
    Ok(SearchOutcome { ebn0_db: hi.0, summary: hi.1, evaluations })
}

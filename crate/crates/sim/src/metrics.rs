//! Misdetection, false-alarm and error-probability estimates.

use rayon::prelude::*;

use crate::trial::{run_trial, TrialContext, TrialResult};
use crate::SimResult;

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959963984540054;

#[derive(Clone, Debug, PartialEq)]
pub struct MetricSummary {
    pub p_md: f64,
    pub p_fa: f64,
    /// `min(p_md + p_fa, 1)`.
    pub p_e: f64,
    pub trials: usize,
    pub p_md_half_width: f64,
    pub p_fa_half_width: f64,
    pub p_e_half_width: f64,
}

fn mean_and_half_width(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::INFINITY);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, Z95 * (var / n).sqrt())
}

/// Averages per-trial ratios. A trial with an empty decoded list adds 0 to
/// the false-alarm average.
pub fn summarize(results: &[TrialResult]) -> MetricSummary {
    assert!(!results.is_empty(), "no trials to summarize");
    let md: Vec<f64> = results.iter().map(|r| r.md_count as f64 / r.tx_list.len() as f64).collect();
    let fa: Vec<f64> = results
        .iter()
        .map(|r| if r.rx_list.is_empty() { 0.0 } else { r.fa_count as f64 / r.rx_list.len() as f64 })
        .collect();
    let both: Vec<f64> = md.iter().zip(&fa).map(|(a, b)| a + b).collect();
    let (p_md, p_md_half_width) = mean_and_half_width(&md);
    let (p_fa, p_fa_half_width) = mean_and_half_width(&fa);
    let (_, p_e_half_width) = mean_and_half_width(&both);
    MetricSummary {
        p_md,
        p_fa,
        p_e: (p_md + p_fa).min(1.0),
        trials: results.len(),
        p_md_half_width,
        p_fa_half_width,
        p_e_half_width,
    }
}

/// Runs trials `0..trials` in parallel; results are reduced in index order.
pub fn run_trials(ctx: &TrialContext, k_a: usize, ebn0_db: f64, trials: usize) -> SimResult<Vec<TrialResult>> {
    (0..trials as u64).into_par_iter().map(|i| run_trial(ctx, k_a, ebn0_db, i)).collect()
}

pub fn estimate_pe(ctx: &TrialContext, k_a: usize, ebn0_db: f64, trials: usize) -> SimResult<MetricSummary> {
    Ok(summarize(&run_trials(ctx, k_a, ebn0_db, trials)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use tbmc_core::BitString;

    fn bs(v: u64) -> BitString {
        BitString::from_uint(v, 8)
    }

    #[test]
    fn perfect_trials_have_zero_error() {
        let r = vec![TrialResult::from_lists(vec![bs(1), bs(2)], vec![bs(2), bs(1)], 1); 4];
        let s = summarize(&r);
        assert_eq!((s.p_md, s.p_fa, s.p_e, s.trials), (0.0, 0.0, 0.0, 4));
        assert_eq!(s.p_e_half_width, 0.0);
    }

    #[test]
    fn constructed_lists() {
        let s = summarize(&[TrialResult::from_lists(vec![bs(1), bs(2)], vec![bs(1), bs(3)], 1)]);
        assert_eq!((s.p_md, s.p_fa, s.p_e), (0.5, 0.5, 1.0));
    }

    #[test]
    fn error_probability_is_capped() {
        let s = summarize(&[TrialResult::from_lists(vec![bs(1)], vec![bs(3)], 1)]);
        assert_eq!((s.p_md, s.p_fa, s.p_e), (1.0, 1.0, 1.0));
    }

    #[test]
    fn aggregation_matches_loop_oracle() {
        let mut results = Vec::new();
        for t in 0..10u64 {
            let tx: Vec<BitString> = (0..5).map(|k| bs(10 * t + k)).collect();
            let rx: Vec<BitString> = (0..(t % 4)).map(|k| bs(10 * t + 3 * k)).collect();
            results.push(TrialResult::from_lists(tx, rx, 1));
        }
        let (mut md, mut fa) = (0.0, 0.0);
        for r in &results {
            let missed = r.tx_list.iter().filter(|m| !r.rx_list.contains(m)).count();
            md += missed as f64 / 5.0;
            if !r.rx_list.is_empty() {
                let extra = r.rx_list.iter().filter(|m| !r.tx_list.contains(m)).count();
                fa += extra as f64 / r.rx_list.len() as f64;
            }
        }
        let s = summarize(&results);
        assert!((s.p_md - md / 10.0).abs() < 1e-15);
        assert!((s.p_fa - fa / 10.0).abs() < 1e-15);
        assert!(s.p_fa > 0.0 && s.p_md_half_width > 0.0);
    }
}

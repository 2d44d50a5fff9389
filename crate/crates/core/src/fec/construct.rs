//! Frozen-set design from Bhattacharyya parameters.

/// Design point of the construction (symbol SNR, dB).
pub const DESIGN_SNR_DB: f64 = 2.0;

/// `ln(a + b - ab)` from `ln a`, `ln b` (the "minus" bit-channel).
fn log_minus(la: f64, lb: f64) -> f64 {
    let (hi, lo) = if la >= lb { (la, lb) } else { (lb, la) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    // a + b - ab = hi_val * (1 + lo_val/hi_val - lo_val)
    hi + (1.0 + (lo - hi).exp() - lo.exp()).ln()
}

fn synthesize(leaves: &[f64], out: &mut [f64]) {
    let n = leaves.len();
    if n == 1 {
        out[0] = leaves[0];
        return;
    }
    let h = n / 2;
    let minus: Vec<f64> = (0..h).map(|j| log_minus(leaves[j], leaves[j + h])).collect();
    let plus: Vec<f64> = (0..h).map(|j| leaves[j] + leaves[j + h]).collect();
    let (lo, hi) = out.split_at_mut(h);
    synthesize(&minus, lo);
    synthesize(&plus, hi);
}

/// Log-Bhattacharyya parameter of every input bit-channel, for a mother code
/// whose last `mother_len - tx_len` outputs are known (shortened).
pub fn bhattacharyya_reliability(mother_len: usize, tx_len: usize, design_snr_db: f64) -> Vec<f64> {
    assert!(mother_len.is_power_of_two() && tx_len <= mother_len);
    let lz0 = -(10f64.powf(design_snr_db / 10.0));
    let leaves: Vec<f64> =
        (0..mother_len).map(|j| if j < tx_len { lz0 } else { f64::NEG_INFINITY }).collect();
    let mut out = vec![0.0; mother_len];
    synthesize(&leaves, &mut out);
    out
}

/// Frozen indices (ascending) for an unshortened code.
pub fn build_frozen_set(mother_len: usize, info_len: usize) -> Vec<usize> {
    build_frozen_set_shortened(mother_len, info_len, mother_len)
}

/// Frozen indices (ascending). Inputs at or beyond `tx_len` are always frozen;
/// among the rest the `info_len` most reliable carry information.
pub fn build_frozen_set_shortened(mother_len: usize, info_len: usize, tx_len: usize) -> Vec<usize> {
    assert!(info_len <= tx_len, "info_len {info_len} exceeds tx_len {tx_len}");
    let z = bhattacharyya_reliability(mother_len, tx_len, DESIGN_SNR_DB);
    let mut order: Vec<usize> = (0..tx_len).collect();
    // least reliable first; ties resolved towards the lower index
    order.sort_by(|&a, &b| z[b].total_cmp(&z[a]).then(a.cmp(&b)));
    let mut frozen: Vec<usize> = order[..tx_len - info_len].to_vec();
    frozen.extend(tx_len..mother_len);
    frozen.sort_unstable();
    frozen
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Plain-domain list-doubling recursion: `z -> (2z - z², z²)`.
    fn bhattacharyya_oracle(n: usize, z0: f64) -> Vec<f64> {
        let mut z = vec![z0];
        while z.len() < n {
            z = z.iter().flat_map(|&x| [2.0 * x - x * x, x * x]).collect();
        }
        z
    }

    #[test]
    fn matches_list_doubling_oracle() {
        let z0 = (-(10f64.powf(0.2))).exp();
        for n in [8, 64] {
            let oracle = bhattacharyya_oracle(n, z0);
            let got = bhattacharyya_reliability(n, n, DESIGN_SNR_DB);
            for (o, g) in oracle.iter().zip(&got) {
                assert!((o.ln() - g).abs() < 1e-9, "{o} vs {}", g.exp());
            }
        }
    }

    #[test]
    fn length_eight_extremes() {
        let z = bhattacharyya_reliability(8, 8, DESIGN_SNR_DB);
        let best = (0..8).min_by(|&a, &b| z[a].total_cmp(&z[b])).unwrap();
        let worst = (0..8).max_by(|&a, &b| z[a].total_cmp(&z[b])).unwrap();
        assert_eq!((best, worst), (7, 0));
        assert_eq!(build_frozen_set(8, 1), vec![0, 1, 2, 3, 4, 5, 6]);
    }

    #[test]
    fn full_rate_and_determinism() {
        assert!(build_frozen_set(64, 64).is_empty());
        assert_eq!(build_frozen_set(128, 51), build_frozen_set(128, 51));
        assert_eq!(build_frozen_set(128, 51).len(), 77);
    }

    #[test]
    fn shortened_tail_is_frozen() {
        let f = build_frozen_set_shortened(512, 176, 500);
        assert_eq!(f.len(), 512 - 176);
        assert!((500..512).all(|i| f.contains(&i)));
    }
}

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use tbmc_core::fec::{crc_append, polar_encode, scl_decode, CrcPoly, PolarSpec};
use tbmc_core::BitString;

/// Block errors of BPSK over AWGN, `ebn0_db` per message bit.
fn bler(spec: &PolarSpec, ebn0_db: f64, trials: usize, seed: u64) -> Vec<bool> {
    let rate = spec.msg_len() as f64 / spec.tx_len as f64;
    let sigma2 = 1.0 / (2.0 * rate * 10f64.powf(ebn0_db / 10.0));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..trials)
        .map(|_| {
            let m = BitString::random(spec.msg_len(), &mut rng);
            let cw = polar_encode(&crc_append(&m, spec.crc), spec).unwrap();
            let llrs: Vec<f64> = cw
                .bits
                .iter()
                .map(|&b| {
                    let n: f64 = StandardNormal.sample(&mut rng);
                    let y = 1.0 - 2.0 * b as f64 + n * sigma2.sqrt();
                    -2.0 * y / sigma2
                })
                .collect();
            scl_decode(&llrs, spec).unwrap() != Some(m)
        })
        .collect()
}

fn count(errs: &[bool]) -> usize {
    errs.iter().filter(|&&e| e).count()
}

#[test]
fn awgn_block_error_rate_at_4db() {
    let spec = PolarSpec::new(40, CrcPoly::CRC11, 128, 32).unwrap();
    assert_eq!(spec.info_len, 51);
    let e = count(&bler(&spec, 4.0, 2000, 500));
    assert!((e as f64) < 0.05 * 2000.0, "{e} block errors");
}

#[test]
fn larger_list_never_does_worse_on_paired_noise() {
    let spec = PolarSpec::new(40, CrcPoly::CRC11, 128, 32).unwrap();
    let sc = spec.with_list_size(1);
    let big = bler(&spec, 2.0, 1000, 501);
    let small = bler(&sc, 2.0, 1000, 501);
    assert!(count(&big) <= count(&small), "{} vs {}", count(&big), count(&small));
    assert!(count(&small) > count(&big));
}

#[test]
fn block_errors_fall_with_snr() {
    let spec = PolarSpec::new(40, CrcPoly::CRC11, 128, 8).unwrap();
    let t = 2000;
    let rates: Vec<f64> =
        [1.0, 2.0, 3.0].iter().map(|&s| count(&bler(&spec, s, t, 502)) as f64 / t as f64).collect();
    let mut inversions = 0;
    for w in rates.windows(2) {
        if w[1] > w[0] {
            let se = ((w[0] * (1.0 - w[0]) + w[1] * (1.0 - w[1])) / t as f64).sqrt();
            assert!(w[1] - w[0] < 2.0 * se, "{rates:?}");
            inversions += 1;
        }
    }
    assert!(inversions <= 1, "{rates:?}");
}

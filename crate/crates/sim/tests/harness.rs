use tbmc_core::channel::ScenarioGeometry;
use tbmc_sim::metrics::run_trials;
use tbmc_sim::{estimate_pe, run_trial, SimConfig, TrialContext};

fn ctx(seed: u64) -> TrialContext {
    TrialContext::new(&SimConfig { master_seed: seed, ..Default::default() }).unwrap()
}

#[test]
fn same_trial_twice_is_identical() {
    let c = ctx(11);
    let a = run_trial(&c, 3, 0.0, 5).unwrap();
    let b = run_trial(&c, 3, 0.0, 5).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.tx_list.len(), 3);
}

#[test]
fn single_user_at_high_snr_is_clean() {
    let c = ctx(12);
    let results = run_trials(&c, 1, 20.0, 100).unwrap();
    let clean = results.iter().filter(|r| r.md_count == 0 && r.fa_count == 0).count();
    assert!(clean >= 99, "{clean}/100");
}

#[test]
fn hopeless_noise_gives_empty_lists() {
    let c = ctx(13);
    let s = estimate_pe(&c, 2, -40.0, 5).unwrap();
    assert_eq!((s.p_md, s.p_fa, s.p_e), (1.0, 0.0, 1.0));
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let c = ctx(14);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_trials(&c, 3, -4.0, 6).unwrap())
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn degenerate_cell_matches_unit_fading() {
    let plain = ctx(15);
    let mut cell = plain.clone();
    cell.geometry = Some(ScenarioGeometry::umi(10.0).unwrap());
    for i in 0..4 {
        assert_eq!(run_trial(&plain, 3, -5.0, i).unwrap(), run_trial(&cell, 3, -5.0, i).unwrap());
    }
}

#[test]
fn error_probability_falls_with_ebn0() {
    let c = ctx(16);
    let pts = [-12.0, -9.0, -6.0, -3.0];
    let s: Vec<_> = pts.iter().map(|&x| estimate_pe(&c, 4, x, 30).unwrap()).collect();
    let mut inversions = 0;
    for w in s.windows(2) {
        if w[1].p_e > w[0].p_e {
            let two_se = (w[0].p_e_half_width.powi(2) + w[1].p_e_half_width.powi(2)).sqrt() * 2.0 / 1.96;
            assert!(w[1].p_e - w[0].p_e <= two_se, "{s:?}");
            inversions += 1;
        }
    }
    assert!(inversions <= 1);
    assert!(s[0].p_e > s[3].p_e, "{s:?}");
}

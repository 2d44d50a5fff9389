//! One end-to-end Monte Carlo trial.

use std::collections::BTreeSet;

use tbmc_core::channel::{apply_channel_with_noise, awgn, sample_channel, sample_lsfc, sigma2_from_ebn0, ScenarioGeometry};
use tbmc_core::decoder::{run_decoder_report, DecoderConfig};
use tbmc_core::phy::{encode_user, SchemeConfig};
use tbmc_core::rng::{stream_rng, StreamTag};
use tbmc_core::{BitString, ComplexMatrix};

use crate::{SimConfig, SimResult};

/// Immutable state shared by every trial of a run.
#[derive(Clone, Debug)]
pub struct TrialContext {
    pub scheme: SchemeConfig,
    pub m: usize,
    pub geometry: Option<ScenarioGeometry>,
    pub decoder: DecoderConfig,
    pub master_seed: u64,
}

impl TrialContext {
    pub fn new(cfg: &SimConfig) -> SimResult<Self> {
        Ok(TrialContext {
            scheme: cfg.validate()?,
            m: cfg.m,
            geometry: cfg.geometry,
            decoder: cfg.decoder.clone(),
            master_seed: cfg.master_seed,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialResult {
    pub tx_list: Vec<BitString>,
    pub rx_list: Vec<BitString>,
    pub md_count: usize,
    pub fa_count: usize,
    pub decode_iterations_used: usize,
}

impl TrialResult {
    pub fn from_lists(tx_list: Vec<BitString>, rx_list: Vec<BitString>, decode_iterations_used: usize) -> Self {
        let tx: BTreeSet<&BitString> = tx_list.iter().collect();
        let rx: BTreeSet<&BitString> = rx_list.iter().collect();
        let md_count = tx.difference(&rx).count();
        let fa_count = rx.difference(&tx).count();
        TrialResult { tx_list, rx_list, md_count, fa_count, decode_iterations_used }
    }
}

/// `k_a` distinct uniformly drawn `B`-bit messages.
fn draw_messages(ctx: &TrialContext, k_a: usize, trial_index: u64) -> Vec<BitString> {
    let mut rng = stream_rng(ctx.master_seed, trial_index, StreamTag::Messages);
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(k_a);
    while out.len() < k_a {
        let m = BitString::random(ctx.scheme.b, &mut rng);
        if seen.insert(m.clone()) {
            out.push(m);
        }
    }
    out
}

pub fn run_trial(ctx: &TrialContext, k_a: usize, ebn0_db: f64, trial_index: u64) -> SimResult<TrialResult> {
    let scheme = &ctx.scheme;
    let tx_list = draw_messages(ctx, k_a, trial_index);
    let cols = tx_list.iter().map(|m| Ok(encode_user(m, scheme)?.x)).collect::<SimResult<Vec<_>>>()?;
    let x = ComplexMatrix::from_cols(scheme.n, &cols);

    let lsfc = match &ctx.geometry {
        Some(g) => sample_lsfc(g, k_a, &mut stream_rng(ctx.master_seed, trial_index, StreamTag::LargeScale)),
        None => vec![1.0; k_a],
    };
    let channel = sample_channel(&lsfc, ctx.m, &mut stream_rng(ctx.master_seed, trial_index, StreamTag::SmallScale))?;
    let sigma2 = sigma2_from_ebn0(ebn0_db, scheme.n, scheme.b);
    let noise = awgn(scheme.n, ctx.m, sigma2, &mut stream_rng(ctx.master_seed, trial_index, StreamTag::Noise));
    let y = apply_channel_with_noise(&x, &channel, &noise)?;

    let mut rng = stream_rng(ctx.master_seed, trial_index, StreamTag::Decoder);
    let report = run_decoder_report(&y, k_a, sigma2, scheme, &ctx.decoder, &mut rng)?;
    let rx_list = report.users.iter().map(|u| u.message()).collect();
    Ok(TrialResult::from_lists(tx_list, rx_list, report.outer_iterations))
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tbmc_core::channel::ScenarioGeometry;
use tbmc_sim::emit::emit_results;
use tbmc_sim::{estimate_pe, min_ebn0_search, Format, Record, SimConfig, SimError, SimResult, TrialContext};

/// Link-level simulator for tensor-based modulation with coherent
/// concatenation in unsourced random access.
///
/// p_fa averages per-trial false-alarm ratios; trials whose decoded list is
/// empty contribute 0.
#[derive(Parser)]
#[command(name = "tbmc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Error rates at fixed Eb/N0 points.
    Simulate(Common),
    /// Minimum Eb/N0 meeting the target error probability, per K_a.
    MinEbn0(Common),
    /// Minimum Eb/N0 per K_a over a sweep of cell radii.
    FadingSweep {
        #[command(flatten)]
        common: Common,
        /// Cell radii in metres (comma separated).
        #[arg(long, value_delimiter = ',')]
        r_max: Vec<f64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args)]
struct Common {
    /// JSON configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Active user counts (comma separated).
    #[arg(long, value_delimiter = ',')]
    ka: Vec<usize>,
    /// Eb/N0 points in dB; for searches, the scan start.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    ebn0: Vec<f64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    #[arg(long, value_parser = ["tbmc-5554", "tbm-40x25"])]
    preset: Option<String>,
}

impl Common {
    fn load(&self) -> SimResult<SimConfig> {
        let mut cfg = match &self.config {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| SimError::Config(format!("{}: {e}", p.display())))?;
                SimConfig::from_json(&text)?
            }
            None => SimConfig::default(),
        };
        if let Some(p) = &self.preset {
            cfg.scheme = tbmc_sim::SchemeSpec::Preset(p.clone());
        }
        if !self.ka.is_empty() {
            cfg.ka = self.ka.clone();
        }
        if !self.ebn0.is_empty() {
            cfg.ebn0_db = self.ebn0.clone();
            cfg.search.start_db = self.ebn0[0];
        }
        if let Some(t) = self.trials {
            cfg.trials = t;
        }
        if let Some(s) = self.seed {
            cfg.master_seed = s;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn format(&self) -> Format {
        match self.format {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

fn record(cfg: &SimConfig, ctx: &TrialContext, scheme: String, ka: usize, ebn0_db: f64, s: &tbmc_sim::MetricSummary) -> Record {
    Record {
        scheme,
        ka,
        m: cfg.m,
        n: ctx.scheme.n,
        ebn0_db,
        trials: s.trials,
        pmd: s.p_md,
        pfa: s.p_fa,
        pe: s.p_e,
        seed: cfg.master_seed,
    }
}

fn search_all(cfg: &SimConfig, ctx: &TrialContext, scheme: &str) -> SimResult<Vec<Record>> {
    let mut out = Vec::new();
    for &ka in &cfg.ka {
        let eval = |x: f64, t: usize| {
            let s = estimate_pe(ctx, ka, x, t)?;
            eprintln!("{scheme} ka={ka} ebn0={x:.4} dB trials={t} pe={:.4} (±{:.4})", s.p_e, s.p_e_half_width);
            Ok(s)
        };
        let found = min_ebn0_search(eval, cfg.epsilon, &cfg.search, cfg.trials)?;
        out.push(record(cfg, ctx, scheme.to_string(), ka, found.ebn0_db, &found.summary));
    }
    Ok(out)
}

fn run(cli: Cli) -> SimResult<()> {
    let (common, records) = match &cli.command {
        Command::Simulate(c) => {
            let cfg = c.load()?;
            if cfg.ebn0_db.is_empty() {
                return Err(SimError::Config("simulate needs Eb/N0 points (--ebn0 or ebn0_db)".into()));
            }
            let ctx = TrialContext::new(&cfg)?;
            let mut recs = Vec::new();
            for &ka in &cfg.ka {
                for &x in &cfg.ebn0_db {
                    let s = estimate_pe(&ctx, ka, x, cfg.trials)?;
                    eprintln!("ka={ka} ebn0={x:.4} dB pe={:.4} (±{:.4})", s.p_e, s.p_e_half_width);
                    recs.push(record(&cfg, &ctx, ctx.scheme.name().to_string(), ka, x, &s));
                }
            }
            (c, recs)
        }
        Command::MinEbn0(c) => {
            let cfg = c.load()?;
            let ctx = TrialContext::new(&cfg)?;
            (c, search_all(&cfg, &ctx, ctx.scheme.name())?)
        }
        Command::FadingSweep { common: c, r_max } => {
            let mut cfg = c.load()?;
            if !r_max.is_empty() {
                cfg.r_max_sweep = r_max.clone();
            }
            if cfg.r_max_sweep.is_empty() {
                return Err(SimError::Config("fading-sweep needs cell radii (--r-max or r_max_sweep)".into()));
            }
            let base = match cfg.geometry {
                Some(g) => g,
                None => ScenarioGeometry::umi(10.0)?,
            };
            let mut recs = Vec::new();
            for &r in &cfg.r_max_sweep.clone() {
                cfg.geometry = Some(ScenarioGeometry::new(base.r_min, r, base.beta)?);
                let ctx = TrialContext::new(&cfg)?;
                let tag = format!("{}@r_max={r}", ctx.scheme.name());
                recs.extend(search_all(&cfg, &ctx, &tag)?);
            }
            (c, recs)
        }
    };
    emit_results(&records, common.out.as_deref(), common.format())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tbmc: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

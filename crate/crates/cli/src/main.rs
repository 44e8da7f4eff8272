use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use fracsparse::harness::{emit_report, run_experiment, ExperimentConfig, ExperimentKind, OutputPaths};
use log::{info, warn};

#[derive(Parser)]
#[command(name = "fracsparse", version, about = "Sparse-domination and fractional-power experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// A_p, A_inf, RH and A_{p,q} characteristics of the configured weights
    Weights(Common),
    /// Sparse domination constants for random instances and m = 0, 1, 2
    Dominate(Common),
    /// Two-weight sparse bound: measured constant against the characteristic
    Twoweight(Common),
    /// Testing-condition study on random sparse families
    Testing(Common),
    /// Bloom-type commutator bound
    Bloom(Common),
    /// Fractional powers, functional calculus and the Q-integral
    Fracpow(Common),
    /// Weak-type endpoint of the fractional power and its truncation
    Weaktype(Common),
    /// Small deterministic battery over every experiment
    Verify(Common),
}

#[derive(Args)]
struct Common {
    /// JSON merged over the experiment's defaults
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the seed from the config
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (created if missing)
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Write <out>/<experiment>.csv
    #[arg(long)]
    csv: bool,
    /// Write <out>/<experiment>.svg
    #[arg(long)]
    svg: bool,
}

impl Command {
    fn split(&self) -> (ExperimentKind, &Common) {
        match self {
            Self::Weights(c) => (ExperimentKind::Weights, c),
            Self::Dominate(c) => (ExperimentKind::Dominate, c),
            Self::Twoweight(c) => (ExperimentKind::TwoWeight, c),
            Self::Testing(c) => (ExperimentKind::Testing, c),
            Self::Bloom(c) => (ExperimentKind::Bloom, c),
            Self::Fracpow(c) => (ExperimentKind::FracPow, c),
            Self::Weaktype(c) => (ExperimentKind::WeakType, c),
            Self::Verify(c) => (ExperimentKind::Verify, c),
        }
    }
}

fn load_config(kind: ExperimentKind, opts: &Common) -> Result<ExperimentConfig> {
    let preset = ExperimentConfig::preset(kind);
    let mut cfg = match &opts.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            ExperimentConfig::from_json_over(&preset, &text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => preset,
    };
    if let Some(s) = opts.seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<bool> {
    let (kind, opts) = cli.command.split();
    let cfg = load_config(kind, opts)?;
    let (records, checks) = run_experiment(kind, &cfg)?;
    if let Some(r) = records.iter().find(|r| !r.value.is_finite()) {
        bail!("{}: non-finite value for {}", r.experiment, r.quantity);
    }

    let mut paths = OutputPaths::default();
    if opts.csv || opts.svg {
        std::fs::create_dir_all(&opts.out).with_context(|| format!("creating {}", opts.out.display()))?;
    }
    if opts.csv {
        paths.csv = Some(opts.out.join(format!("{}.csv", kind.name())));
    }
    if opts.svg {
        paths.svg = Some(opts.out.join(format!("{}.svg", kind.name())));
    }
    emit_report(kind.name(), &records, &paths)?;
    for p in [&paths.csv, &paths.svg].into_iter().flatten() {
        info!("wrote {}", p.display());
    }

    if !opts.csv {
        for r in &records {
            println!("{:<40} {:>14.6e}  {}", r.quantity, r.value, r.meta);
        }
    }
    let mut ok = true;
    for c in &checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        if !c.passed {
            warn!("check {} failed", c.name);
            ok = false;
        }
    }
    Ok(ok)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

use clap::{Parser, ValueEnum};
use rv2x::config::{ErrorLawPreset, SimConfig};
use rv2x::harness::{run, AllocatorKind};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AllocatorArg {
    Proposed,
    Gaussian,
    Hpr,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ErrorLawArg {
    Type1,
    Type2,
    /// Keep the mixture given in the configuration file.
    Custom,
}

/// Simulate absorption and adaptation over Monte Carlo trials and write
/// per-slot records, a summary and plot tables.
#[derive(Debug, Parser)]
#[command(version)]
struct Cli {
    /// TOML configuration; missing keys take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "proposed")]
    allocator: AllocatorArg,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Overrides the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, value_enum)]
    error_law: Option<ErrorLawArg>,
    /// Hazard-rate weight applied to every V2V link.
    #[arg(long)]
    lambda_v: Option<f64>,
    /// Worker threads; defaults to the RV2X_THREADS variable or all cores.
    #[arg(long)]
    threads: Option<usize>,
}

fn execute(cli: Cli) -> rv2x::Result<()> {
    let mut cfg = match &cli.config {
        Some(path) => SimConfig::load(path)?,
        None => SimConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.rng_seed = seed;
    }
    match cli.error_law {
        Some(ErrorLawArg::Type1) => cfg.error_law = ErrorLawPreset::TypeOne.components(),
        Some(ErrorLawArg::Type2) => cfg.error_law = ErrorLawPreset::TypeTwo.components(),
        Some(ErrorLawArg::Custom) | None => {}
    }
    if let Some(l) = cli.lambda_v {
        cfg.hr_weights = vec![l];
    }
    cfg.validate()?;
    let allocator = match cli.allocator {
        AllocatorArg::Proposed => AllocatorKind::Proposed,
        AllocatorArg::Gaussian => AllocatorKind::Gaussian,
        AllocatorArg::Hpr => AllocatorKind::Hpr,
    };
    let report = run(&cfg, allocator, cli.trials, cli.threads)?;
    for f in &report.failures {
        eprintln!(
            "{}",
            serde_json::json!({ "trial_failed": f.trial, "cause": f.cause })
        );
    }
    report.emit(&cli.out)?;
    println!("{}", serde_json::to_string(&report.summary())?);
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", serde_json::json!({ "error": e.to_string() }));
            ExitCode::FAILURE
        }
    }
}

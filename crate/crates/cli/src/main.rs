use std::path::PathBuf;
use std::process::ExitCode;

use clap::builder::PossibleValuesParser;
use clap::error::ErrorKind;
use clap::{CommandFactory, Parser};
use rand_acim::config::{Experiment, ExperimentConfig, Overrides};
use rand_acim::experiment::run;

/// Random acim experiments for cocycles of piecewise expanding circle maps.
#[derive(Debug, Parser)]
#[command(name = "rand-acim", version, about)]
struct Cli {
    /// Experiment to run.
    #[arg(value_parser = PossibleValuesParser::new(Experiment::NAMES))]
    experiment: String,

    /// TOML configuration file; built-in defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output directory (overrides `output_dir`).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Ulam bin count (overrides `scheme.ulam_k`).
    #[arg(long)]
    k: Option<usize>,

    /// Galerkin mode count K (overrides `scheme.modes`).
    #[arg(long)]
    modes: Option<usize>,

    /// Burn-in steps (overrides `scheme.steps`).
    #[arg(long)]
    steps: Option<usize>,

    /// Write SVG figures.
    #[arg(long)]
    plot: bool,
}

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("RAND_ACIM_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| format!("RAND_ACIM_THREADS must be a positive integer, got {v:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => e.exit(),
        Err(e) => {
            let _ = e.print();
            eprintln!("\n{}", Cli::command().render_usage());
            return ExitCode::from(2);
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let mut config = match &cli.config {
        Some(path) => match ExperimentConfig::from_file(path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        },
        None => ExperimentConfig::default(),
    };
    config.apply(&Overrides {
        experiment: Some(cli.experiment.parse().expect("validated by clap")),
        output_dir: cli.out,
        k: cli.k,
        modes: cli.modes,
        steps: cli.steps,
        plot: cli.plot,
    });
    match run(&config) {
        Ok(outcome) => {
            for path in &outcome.artifacts {
                println!("wrote {}", path.display());
            }
            for (name, c) in &outcome.summary.checks {
                let status = if c.passed { "pass" } else { "FAIL" };
                println!("{status} {name}: {} = {:e} (threshold {:e})", c.description, c.value, c.threshold);
            }
            if outcome.passed() {
                ExitCode::SUCCESS
            } else {
                eprintln!(
                    "error: {} invariant check(s) failed: {}",
                    config.experiment,
                    outcome.summary.failed_checks().join(", ")
                );
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {} failed: {e}", config.experiment);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

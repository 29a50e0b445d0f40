use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use pqs_harness::config::{Backend, CutoffPolicy, ExperimentConfig};
use pqs_harness::verify::{self, VerifyOptions};
use pqs_harness::{dump, spot, sweep, HarnessError, Result};

#[derive(Parser)]
#[command(name = "pqs", version, about = "Heralded polarization-entanglement preparation with quantum scissors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Matrix,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Analytic,
    Numeric,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a preparation over a two-axis parameter grid.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Overrides the config file's backend.
        #[arg(long, value_enum)]
        backend: Option<BackendArg>,
        /// Overrides the config file's cutoff.
        #[arg(long)]
        cutoff: Option<u32>,
        /// Worker threads; 1 runs serially.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Cross-check the circuit simulation against the closed forms.
    Verify {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Pin δ instead of drawing it.
        #[arg(long)]
        delta: Option<f64>,
        /// Pin φ instead of drawing it.
        #[arg(long)]
        phi: Option<f64>,
    },
    /// Dump a source, target or prepared state.
    State {
        /// e.g. `xi:delta=1,phi=0,t0=0.5` or `bell-pqs1:delta=0.8,t=0.98`.
        #[arg(long)]
        prep: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a named Bell-pair operating point (`pqs1`, `pqs2`).
    Spot {
        #[arg(long)]
        point: String,
    },
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{}", text),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Sweep { config, out, format, backend, cutoff, jobs } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| HarnessError::Config(format!("{}: {}", config.display(), e)))?;
            let mut cfg = ExperimentConfig::parse(&text)?;
            if let Some(b) = backend {
                cfg.backend = match b {
                    BackendArg::Analytic => Backend::Analytic,
                    BackendArg::Numeric => Backend::Numeric,
                    BackendArg::Both => Backend::Both,
                };
            }
            if let Some(c) = cutoff {
                cfg.cutoff = CutoffPolicy::Fixed(c);
            }
            if jobs == Some(0) {
                return Err(HarnessError::Config("--jobs must be at least 1".into()));
            }
            let grid = sweep::run_sweep(&cfg, jobs)?;
            let text = match format {
                Format::Csv => grid.to_csv()?,
                Format::Matrix => grid.to_matrix(),
                Format::Json => grid.to_json()? + "\n",
            };
            emit(&text, out.as_ref())?;
            let s = grid.summary();
            eprintln!("{} rows, {} flagged", s.rows, s.flagged);
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { seed, samples, delta, phi } => {
            if samples == 0 {
                return Err(HarnessError::Config("--samples must be at least 1".into()));
            }
            let report = verify::run_verify(&VerifyOptions { seed, samples, delta, phi })?;
            print!("{}", report.render());
            Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::State { prep, out } => {
            emit(&dump::dump_state(&prep)?, out.as_ref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Spot { point } => {
            print!("{}", spot::run_spot(&spot::point(&point)?)?.render());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

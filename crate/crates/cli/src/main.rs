use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};

use resonance_cli::load_config;
use resonance_cli::pipeline::{list_registry, run_experiment, write_artifacts, RunOptions, Stage, EXIT_CONFIG};

#[derive(Parser)]
#[command(name = "resonance", version, about = "Spectral-Galerkin experiments for parabolic equations at resonance")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline and write report.toml, trajectory CSVs and plot.gp.
    Run {
        /// Config file, or the name of a bundled experiment.
        config: String,
        /// Output directory (default: out/<experiment name>).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides [checks] seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Leave the timestamp out of the report.
        #[arg(long)]
        no_timestamp: bool,
    },
    /// List built-in nonlinearities and bundled experiments.
    List,
    /// Hypotheses and sign conditions only; prints the report.
    Check {
        config: String,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Orbit search only; prints the report.
    Orbit {
        config: String,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn exit(code: i32) -> ExitCode {
    ExitCode::from(code as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (config, stage, out, seed, timestamp) = match cli.command {
        Command::List => {
            print!("{}", list_registry());
            return ExitCode::SUCCESS;
        }
        Command::Run {
            config,
            out,
            seed,
            no_timestamp,
        } => {
            let ts = (!no_timestamp).then(|| {
                SystemTime::now()
                    .duration_since(UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0)
            });
            (config, Stage::Run, out, seed, ts)
        }
        Command::Check { config, seed } => (config, Stage::Check, None, seed, None),
        Command::Orbit { config, seed } => (config, Stage::Orbit, None, seed, None),
    };
    let cfg = match load_config(&config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return exit(EXIT_CONFIG);
        }
    };
    let outcome = match run_experiment(&cfg, stage, &RunOptions { seed, timestamp }) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return exit(e.exit_code());
        }
    };
    match stage {
        Stage::Run => {
            let dir = out.unwrap_or_else(|| PathBuf::from("out").join(&cfg.config.experiment.name));
            match write_artifacts(&outcome, &dir) {
                Ok(files) => {
                    for f in files {
                        println!("wrote {}", f.display());
                    }
                }
                Err(e) => {
                    eprintln!("error: writing artifacts to {}: {e}", dir.display());
                    return exit(1);
                }
            }
            if outcome.exit_code != 0 {
                print!("{}", outcome.report.to_toml().unwrap_or_default());
            }
        }
        _ => print!("{}", outcome.report.to_toml().unwrap_or_default()),
    }
    for f in &outcome.report.failures {
        eprintln!("failure: {f}");
    }
    exit(outcome.exit_code)
}

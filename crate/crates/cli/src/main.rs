//! `evecerr`: runs the eigenvector-error experiments and writes CSVs plus a
//! manifest.
//!
//! Exit status is 0 on success, 1 for configuration errors and 2 for runtime
//! failures; failures also print a JSON error record on stderr.

mod config;
mod experiments;
mod output;
mod validate;

use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;

use config::ExperimentConfig;
use experiments::Experiment;
use output::OutputDir;

#[derive(Debug, Parser)]
#[command(name = "evecerr", version, about = "Eigenvector error experiments on random regular graph covariances")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one experiment and write its outputs and manifest.
    Run {
        #[arg(value_enum)]
        experiment: Experiment,
        #[command(flatten)]
        config: ExperimentConfig,
    },
    /// Check a configuration and print warnings as JSON.
    Validate {
        #[command(flatten)]
        config: ExperimentConfig,
    },
}

#[derive(Serialize)]
struct ErrorRecord<'a> {
    error: ErrorBody<'a>,
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    message: String,
}

fn fail(kind: &str, message: String, code: u8) -> ExitCode {
    let record = ErrorRecord {
        error: ErrorBody { kind, message },
    };
    eprintln!("{}", serde_json::to_string(&record).unwrap_or_default());
    ExitCode::from(code)
}

fn configure_threads(threads: usize) -> Result<(), String> {
    if threads == 0 {
        return Ok(());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| e.to_string())
}

fn run(experiment: Experiment, config: &ExperimentConfig) -> ExitCode {
    if let Err(msg) = config.validate().and_then(|_| configure_threads(config.threads)) {
        return fail("config", msg, 1);
    }
    let start = Instant::now();
    let result = OutputDir::create(&config.out)
        .map_err(evecerr::Error::from)
        .and_then(|mut out| {
            experiment.run(config, &mut out)?;
            out.finish(&experiment.name(), config, start.elapsed().as_secs_f64())?;
            Ok(())
        });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail("runtime", e.to_string(), 2),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version.
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail("config", e.to_string().trim_end().to_string(), 1),
    };
    match cli.command {
        Command::Run { experiment, config } => run(experiment, &config),
        Command::Validate { config } => {
            let report = validate::validate(&config);
            match serde_json::to_string_pretty(&report) {
                Ok(json) => {
                    println!("{json}");
                    ExitCode::SUCCESS
                }
                Err(e) => fail("runtime", e.to_string(), 2),
            }
        }
    }
}

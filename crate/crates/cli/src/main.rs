//! Command-line front end: single runs, sweeps, plot emission and the
//! validation gate.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use stenoflow_core::{emit_plots, parse_config, run, sweep, validate, RunConfig, RunError, SolverError};

const EXIT_CONFIG: u8 = 1;
const EXIT_DIVERGED: u8 = 2;
const EXIT_VALIDATION: u8 = 3;

#[derive(Parser)]
#[command(
    name = "stenoflow",
    version,
    about = "Pulsatile magneto-micropolar flow through a stenosed artery"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration and write its CSV artifacts.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run every point of the configuration's sweep axes.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Concurrent sweep points (defaults to the available cores).
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Run the oracle and invariant checks.
    Validate,
    /// Write gnuplot data and scripts for a run or sweep directory.
    Plot {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

fn load(path: &Path) -> Result<RunConfig, RunError> {
    let text = std::fs::read_to_string(path).map_err(|source| RunError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(parse_config(&text)?)
}

fn exit_code(err: &RunError) -> u8 {
    match err {
        RunError::Solver(SolverError::Diverged { .. }) => EXIT_DIVERGED,
        _ => EXIT_CONFIG,
    }
}

fn fail(err: RunError) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(exit_code(&err))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, out } => {
            let result = load(&config).and_then(|cfg| run(&cfg, &out));
            match result {
                Ok(r) => {
                    if let Ok(c) = r.last_cycle() {
                        println!(
                            "Q_mean = {:.6}, lambda = {:.6}, periodicity defect = {:.2e}",
                            c.q_mean, c.lambda_cycle, c.periodicity_defect
                        );
                    }
                    println!("artifacts written to {}", out.display());
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            }
        }
        Command::Sweep { config, out, workers } => {
            let workers = workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            let points = match load(&config).and_then(|cfg| sweep(&cfg, &out, workers)) {
                Ok(points) => points,
                Err(e) => return fail(e),
            };
            let mut code = 0;
            for p in &points {
                match &p.result {
                    Ok(s) => println!(
                        "{}: Q_mean = {:.6}, lambda = {:.6}",
                        p.dir.display(),
                        s.q_mean,
                        s.lambda_cycle
                    ),
                    Err(e) => {
                        eprintln!("{}: {e}", p.dir.display());
                        code = code.max(exit_code(e));
                    }
                }
            }
            ExitCode::from(code)
        }
        Command::Validate => {
            let report = validate();
            println!("{report}");
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_VALIDATION)
            }
        }
        Command::Plot { input } => match emit_plots(&input) {
            Ok(scripts) => {
                println!("{} plot scripts written", scripts.len());
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        },
    }
}

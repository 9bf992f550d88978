//! Batch front-end: experiment configs in, reports and curve data out.

pub mod commands;
pub mod config;
pub mod lab;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{Invocation, Outcome};
pub use config::ConfigDocument;

pub const THREADS_ENV: &str = "EA_LAB_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "ea-lab",
    version,
    about = "Runtime-analysis laboratory for evolutionary algorithms"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Simulate, evaluate bounds and oracle, and compare.
    Run(CommonArgs),
    /// Run the experiment for every value of the sweep variable.
    Sweep(CommonArgs),
    /// Evaluate the requested bounds without simulating.
    Bounds(CommonArgs),
}

#[derive(Args, Debug)]
pub struct CommonArgs {
    /// Experiment configuration (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; overrides the document.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads, 0 for all cores. Falls back to EA_LAB_THREADS.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Master seed; overrides the document.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub quiet: bool,
}

fn threads_from_env() -> anyhow::Result<usize> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| {
            anyhow::anyhow!("{THREADS_ENV} must be a non-negative integer, got `{v}`")
        }),
        Err(_) => Ok(0),
    }
}

fn dispatch(cli: Cli) -> anyhow::Result<Outcome> {
    let (Command::Run(a) | Command::Sweep(a) | Command::Bounds(a)) = &cli.command;
    let threads = match a.threads {
        Some(t) => t,
        None => threads_from_env()?,
    };
    let inv = Invocation::new(&a.config, a.out.clone(), threads, a.seed, a.quiet)?;
    match cli.command {
        Command::Run(_) => commands::cmd_run(&inv),
        Command::Sweep(_) => commands::cmd_sweep(&inv),
        Command::Bounds(_) => commands::cmd_bounds(&inv),
    }
}

/// Parses arguments and runs a verb. Returns 0 when all checks hold, 2 when
/// some check failed and 1 on any error.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(o) => o.code(),
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

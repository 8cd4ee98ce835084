use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use swift_cli::config::RunConfig;
use swift_cli::{init_threads, runner, CliError};

/// Transport experiment runner: executes one configured case (or a
/// convergence study) and writes statistics, snapshots, and contour plots.
#[derive(Parser)]
#[command(name = "swift-cli", version)]
struct Args {
    /// Path to the JSON run configuration.
    #[arg(long)]
    config: PathBuf,

    /// Output directory (overrides the configuration's `output`).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Comma-separated snapshot times in seconds (overrides the
    /// configuration's `snapshots`).
    #[arg(long, value_delimiter = ',')]
    snapshots: Option<Vec<f64>>,

    /// Suppress the run summary on stdout.
    #[arg(long)]
    quiet: bool,
}

fn run(args: Args) -> Result<(), CliError> {
    let mut cfg = RunConfig::from_path(&args.config)?;
    if args.out.is_some() {
        cfg.output = args.out;
    }
    if args.snapshots.is_some() {
        cfg.snapshots = args.snapshots;
    }
    let resolved = cfg.resolve()?;
    runner::execute(&resolved, args.quiet)
}

fn main() -> ExitCode {
    init_threads();
    let args = Args::parse();
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

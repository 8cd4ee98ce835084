//! Library behind the `swift-cli` binary: configuration parsing, run
//! execution, and statistics/snapshot/plot output. Kept as a library so
//! the pieces (config resolution, contouring, rate tables) are unit
//! testable without spawning the binary.

pub mod config;
pub mod contour;
pub mod convergence;
pub mod output;
pub mod runner;

use std::fmt;

/// Failure classes mapped onto process exit codes: configuration and I/O
/// problems exit 2, numerical failures during time stepping exit 3.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(format!("i/o: {e}"))
    }
}

/// Caps the global worker pool when `SWIFT_THREADS` is set. Results are
/// bitwise independent of the thread count; this only bounds CPU use.
/// Call once at startup; later calls are no-ops.
pub fn init_threads() {
    if let Ok(s) = std::env::var("SWIFT_THREADS") {
        if let Ok(n) = s.trim().parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
        }
    }
}

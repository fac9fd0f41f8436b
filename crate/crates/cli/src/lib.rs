//! Command-line harness around [`strainflow_core`]: JSON configs, initial
//! condition presets, ω-limit classification, the regime × initial-condition
//! convergence matrix, and parameter sweeps. See `src/main.rs` for the
//! binary surface.

pub mod classify;
pub mod config;
pub mod csvout;
pub mod error;
pub mod initial;
pub mod matrix;
pub mod report;
pub mod sweep;

pub use error::CliError;

/// Environment variable supplying the default `--jobs`.
pub const JOBS_ENV: &str = "STRAINFLOW_JOBS";

/// `--jobs` beats the environment; garbage in the environment is an error.
pub fn resolve_jobs(cli: Option<usize>) -> Result<Option<usize>, CliError> {
    if cli.is_some() {
        return Ok(cli);
    }
    match std::env::var(JOBS_ENV) {
        Err(_) => Ok(None),
        Ok(raw) => raw.trim().parse::<usize>().map(Some).map_err(|_| {
            CliError::config(JOBS_ENV, format!("expected a job count, got '{raw}'"))
        }),
    }
}

/// Runs `f` on a dedicated pool of `jobs` threads, or on the global pool.
/// Results are independent of the job count; only wall time changes.
pub fn with_jobs<R: Send>(
    jobs: Option<usize>,
    f: impl FnOnce() -> R + Send,
) -> Result<R, CliError> {
    match jobs {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| CliError::Pool(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

//! Experiment driver for `qcl-core`: command-line configuration, parameter
//! sweeps, and reproducible CSV/JSON artifacts.
//!
//! Each subcommand writes its CSV curves plus a `<command>.json` report
//! carrying the configuration echo, fitted results, pass/fail checks and the
//! SHA-256 of every CSV it wrote. Report layouts are described by the JSON
//! Schemas in `schemas/`.

pub mod commands;
pub mod config;
pub mod error;
pub mod families;
pub mod io;
pub mod report;
pub mod summary;

pub use error::{exit, LabError, Result};

/// Environment variable capping the worker threads.
pub const THREADS_ENV: &str = "QCL_THREADS";

/// Size the global thread pool from [`THREADS_ENV`], if set.
pub fn init_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| LabError::usage(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| LabError::usage(format!("cannot size the thread pool: {e}")))
}

//! Experiment driver: file formats, configuration, and the `lowrank` subcommands.

pub mod commands;
pub mod config;
pub mod io;

use std::path::PathBuf;

use thiserror::Error;

pub use commands::{
    cmd_certify, cmd_gen, cmd_solve, cmd_sweep, cmd_tau_frontier, run_sweep_trial, FrontierOptions, FrontierReport,
    Outcome, TauPolicy, TrialRecord, CSV_HEADER,
};
pub use config::{GenConfig, SolverConfig, SweepConfig};
pub use io::{read_bundle, Bundle, InstanceMeta, ProblemKind};

/// Environment variable that overrides the worker thread count.
pub const THREADS_ENV: &str = "LOWRANK_THREADS";

#[derive(Debug, Error)]
pub enum ExpError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },
    #[error("config field `{field}`: {msg}")]
    Config { field: &'static str, msg: String },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] crate::error::Error),
}

impl ExpError {
    /// Process exit status: every error maps to 1; quantitative failures (2) are not errors.
    pub fn exit_code(&self) -> i32 {
        1
    }
}

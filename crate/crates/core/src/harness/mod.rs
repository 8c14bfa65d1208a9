//! Configuration files, reports and the batch driver behind the `nlevp`
//! binary.

pub mod config;
pub mod report;
pub mod run;

use std::path::PathBuf;

use thiserror::Error;

pub use config::{
    DomainKind, DomainSpec, ExperimentConfig, MatrixSpec, Mode, OutputSection, Pipeline, ProblemName, ProblemSpec,
    RandomInstance, SolverSection,
};
pub use report::{echoed_config, OracleBlock, Report, SolveBlock, Status, SweepBlock, SweepRow};
pub use run::{run, run_oracle, run_solve, run_sweep, write_outputs};

/// Process exit status for a configuration error.
pub const EXIT_CONFIG: i32 = 1;
/// Process exit status when the iteration did not converge.
pub const EXIT_NOT_CONVERGED: i32 = 2;
/// Process exit status after a numerical failure.
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl HarnessError {
    pub(crate) fn config(field: &str, message: impl std::fmt::Display) -> Self {
        HarnessError::Config(format!("{field}: {message}"))
    }

    pub fn exit_code(&self) -> i32 {
        EXIT_CONFIG
    }
}

//! Reading run tables and writing reports.
//!
//! The runs CSV (`instance_id,solver_id,status,time_s[,obj]`) plus an
//! optional trajectory CSV (`instance_id,solver_id,t_s,obj`) is the
//! canonical interchange format. The ASlib `algorithm_runs.arff` reader is a
//! convenience for importing public scenarios.

pub mod aslib;
pub mod report;
pub mod runs;

use std::path::PathBuf;

use thiserror::Error;

use crate::scenario::ScenarioError;

pub use aslib::{parse_aslib_runs, read_aslib_runs, AslibImport};
pub use report::{emit_report, Provenance, Report, ReportFormat, ScenarioRow};
pub use runs::{parse_runs, read_runs, trajectory_path_for, write_runs, write_trajectories};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("schema error: {0}")]
    SchemaError(String),
    #[error("line {line}: {message}")]
    RowError { line: u64, message: String },
    #[error("unsupported attribute `{name}`: {reason}")]
    UnsupportedAttribute { name: String, reason: String },
    #[error("invalid scenario: {0}")]
    Validation(#[from] ScenarioError),
}

impl IoError {
    pub(crate) fn row(line: u64, message: impl Into<String>) -> Self {
        IoError::RowError { line, message: message.into() }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        IoError::Io { path: path.into(), source }
    }
}

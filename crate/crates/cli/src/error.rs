use std::path::PathBuf;

use thiserror::Error;

use crate::config::ScenarioKind;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("cannot read config {path}: {source}", path = .path.display())]
    ReadConfig { path: PathBuf, source: std::io::Error },

    #[error("cannot parse config {path}: {source}", path = .path.display())]
    ParseConfig { path: PathBuf, source: serde_json::Error },

    #[error("scenario {scenario} failed: {source}")]
    Scenario { scenario: ScenarioKind, source: mforce::Error },

    #[error("table {table}: {reason}")]
    Table { table: String, reason: String },

    #[error("cannot write {path}: {source}", path = .path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error("cannot write {path}: {source}", path = .path.display())]
    Csv { path: PathBuf, source: csv::Error },

    #[error("cannot write manifest {path}: {source}", path = .path.display())]
    Manifest { path: PathBuf, source: serde_json::Error },

    #[error("MFORCE_THREADS: {0}")]
    Threads(String),
}

pub type Result<T> = std::result::Result<T, CliError>;

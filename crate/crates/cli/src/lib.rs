//! Scenario runner for the `mforce` library.
//!
//! A run resolves a [`ScenarioConfig`], computes the tables of its panels and
//! writes them as CSV files next to a `manifest.json` describing the run.
//! Outputs of a failed run are removed.

pub mod config;
pub mod error;
pub mod scenarios;
pub mod table;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use config::{resolve, ConfigFile, DefaultNote, Overrides, ScenarioConfig, ScenarioKind};
pub use error::{CliError, Result};
pub use table::{read_csv, OutputTable};

pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub scenario: ScenarioKind,
    pub version: String,
    pub config: ScenarioConfig,
    pub defaults_applied: Vec<DefaultNote>,
    pub outputs: Vec<String>,
    pub threads: usize,
    pub runtime_seconds: f64,
}

/// Caps the global worker pool at `MFORCE_THREADS` when that variable is set.
pub fn configure_threads() -> Result<Option<usize>> {
    let Ok(raw) = std::env::var("MFORCE_THREADS") else {
        return Ok(None);
    };
    let n: usize = raw.trim().parse().map_err(|_| CliError::Threads(format!("{raw:?} is not a positive integer")))?;
    if n == 0 {
        return Err(CliError::Threads("must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Threads(e.to_string()))?;
    Ok(Some(n))
}

/// Files written so far; removed on drop unless the run is committed.
struct Outputs {
    dir: PathBuf,
    created_dir: bool,
    files: Vec<PathBuf>,
    committed: bool,
}

impl Outputs {
    fn open(dir: &Path) -> Result<Self> {
        let created_dir = !dir.exists();
        fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.into(), source })?;
        Ok(Self { dir: dir.into(), created_dir, files: Vec::new(), committed: false })
    }
}

impl Drop for Outputs {
    fn drop(&mut self) {
        if self.committed {
            return;
        }
        for f in &self.files {
            let _ = fs::remove_file(f);
        }
        if self.created_dir {
            let _ = fs::remove_dir(&self.dir);
        }
    }
}

/// Computes the tables of a scenario without touching the file system.
pub fn compute(cfg: &ScenarioConfig) -> Result<Vec<OutputTable>> {
    let tables = scenarios::tables(cfg).map_err(|source| CliError::Scenario { scenario: cfg.scenario, source })?;
    tables.iter().try_for_each(OutputTable::validate)?;
    Ok(tables)
}

/// Runs a resolved scenario and writes its CSV files and manifest into
/// `cfg.output_path`.
pub fn run(cfg: &ScenarioConfig, defaults: &[DefaultNote]) -> Result<Manifest> {
    let start = Instant::now();
    cfg.validate()?;
    let tables = compute(cfg)?;
    let mut out = Outputs::open(&cfg.output_path)?;
    for t in &tables {
        let target = out.dir.join(t.file_name());
        out.files.push(target);
        t.write_csv(&out.dir)?;
    }
    let manifest = Manifest {
        scenario: cfg.scenario,
        version: env!("CARGO_PKG_VERSION").into(),
        config: cfg.clone(),
        defaults_applied: defaults.to_vec(),
        outputs: tables.iter().map(OutputTable::file_name).collect(),
        threads: rayon::current_num_threads(),
        runtime_seconds: start.elapsed().as_secs_f64(),
    };
    let path = out.dir.join(MANIFEST);
    out.files.push(path.clone());
    let file = fs::File::create(&path).map_err(|source| CliError::Io { path: path.clone(), source })?;
    serde_json::to_writer_pretty(file, &manifest).map_err(|source| CliError::Manifest { path, source })?;
    out.committed = true;
    Ok(manifest)
}

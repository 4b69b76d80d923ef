//! JSON-configured batch runs. Every task writes one CSV and a
//! `summary.json`; CSV bytes depend only on (config, seed, version).

mod config;
mod tasks;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

pub use config::{ExperimentConfig, Task};

/// Failure classes, mapped to process exit codes.
#[derive(Debug, Clone, PartialEq)]
pub enum ExperimentError {
    /// Bad config, unknown task, unwritable output: exit 1.
    Config(String),
    /// A mathematical invariant failed mid-run: exit 2.
    Invariant(String),
}

impl ExperimentError {
    pub fn exit_code(&self) -> i32 {
        match self {
            ExperimentError::Config(_) => 1,
            ExperimentError::Invariant(_) => 2,
        }
    }
}

impl std::fmt::Display for ExperimentError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExperimentError::Config(m) => write!(f, "configuration error: {m}"),
            ExperimentError::Invariant(m) => write!(f, "invariant violation: {m}"),
        }
    }
}

impl std::error::Error for ExperimentError {}

impl From<crate::Error> for ExperimentError {
    fn from(e: crate::Error) -> Self {
        use crate::Error::*;
        match e {
            Parameter(_) | Geometry(_) | ResourceLimit(_) | Precondition(_) | QuadratureInsufficient { .. } => {
                ExperimentError::Config(e.to_string())
            }
            Resolution(_) | Lookup(_) | Undefined(_) => ExperimentError::Invariant(e.to_string()),
        }
    }
}

pub type ExperimentResult<T> = std::result::Result<T, ExperimentError>;

/// Contents of `summary.json`.
#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub task: Task,
    pub version: &'static str,
    pub config_hash: String,
    pub seed: u64,
    pub csv: String,
    /// `ok`, or the invariant that failed.
    pub status: String,
    pub wall_clock_seconds: f64,
    pub results: Value,
}

/// What a task hands back: its summary section and, when set, a violated invariant.
pub(crate) struct TaskOutput {
    pub results: Value,
    pub violation: Option<String>,
}

/// Parse a config file; any failure is a configuration error.
pub fn load_config(path: &Path) -> ExperimentResult<ExperimentConfig> {
    let text = fs::read_to_string(path).map_err(|e| ExperimentError::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| ExperimentError::Config(format!("{}: {e}", path.display())))
}

/// Run `task` and write `<task>.csv` and `summary.json` into `out`.
pub fn run_experiment(task: Task, config: &ExperimentConfig, out: &Path) -> ExperimentResult<Summary> {
    if let Some(t) = config.task {
        if t != task {
            return Err(ExperimentError::Config(format!("config is for task {t}, command line asked for {task}")));
        }
    }
    fs::create_dir_all(out).map_err(|e| ExperimentError::Config(format!("output {}: {e}", out.display())))?;
    let csv_path: PathBuf = out.join(format!("{}.csv", task.stem()));
    let started = Instant::now();
    let output = tasks::run(task, config, &csv_path)?;
    let summary = Summary {
        task,
        version: crate::VERSION,
        config_hash: config.hash(),
        seed: config.seed,
        csv: csv_path.file_name().unwrap().to_string_lossy().into_owned(),
        status: output.violation.clone().unwrap_or_else(|| "ok".into()),
        wall_clock_seconds: started.elapsed().as_secs_f64(),
        results: output.results,
    };
    let json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    fs::write(out.join("summary.json"), json + "\n")
        .map_err(|e| ExperimentError::Config(format!("output {}: {e}", out.display())))?;
    match output.violation {
        Some(v) => Err(ExperimentError::Invariant(v)),
        None => Ok(summary),
    }
}

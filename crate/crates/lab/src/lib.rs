//! Experiment runner: configuration, the seven experiment suites, and
//! deterministic report output.

use std::path::PathBuf;

pub mod config;
pub mod experiments;
pub mod report;

pub use config::{Experiment, ExperimentConfig, Overrides, RunConfig};
pub use experiments::run_experiment;
pub use report::{emit_report, Check, Outcome};

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error(
        "unknown experiment `{0}` (expected one of commbound, expfactor, techlemma, compose, bott, perturb, appendixB)"
    )]
    UnknownExperiment(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("cannot write {}: {message}", path.display())]
    Io { path: PathBuf, message: String },
    #[error("experiment produced no checks")]
    EmptyResults,
    #[error("internal error: {0}")]
    Internal(String),
    #[error(transparent)]
    Core(#[from] apair_core::Error),
}

impl LabError {
    /// Process exit status for this error. A completed run with a failing
    /// check exits with 1; see [`run_cli`].
    pub fn exit_code(&self) -> i32 {
        use apair_core::Error as E;
        match self {
            LabError::UnknownExperiment(_) => 2,
            LabError::InvalidGrid(_)
            | LabError::InvalidParameter(_)
            | LabError::Core(E::InvalidGrid(_) | E::InvalidParameter { .. }) => 3,
            LabError::Io { .. } => 4,
            LabError::Config(_) => 5,
            LabError::EmptyResults | LabError::Internal(_) | LabError::Core(_) => 6,
        }
    }
}

/// Resolves the configuration, runs the experiment and writes the report.
/// Returns the outcome and the directory written to.
pub fn run_cli(config: Option<&std::path::Path>, overrides: Overrides) -> Result<(RunConfig, Outcome), LabError> {
    // The experiment name is checked before the file is read so that an
    // unknown name always exits with the same status.
    if let Some(name) = &overrides.experiment {
        name.parse::<Experiment>()?;
    }
    let file = match config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    let cfg = RunConfig::resolve(file, overrides)?;
    let outcome = run_experiment(&cfg)?;
    emit_report(&outcome, &cfg, &cfg.out)?;
    Ok((cfg, outcome))
}

//! Scenario configuration, catalog, commands and file output.

pub mod analyze;
pub mod catalog;
pub mod config;
pub mod init;
pub mod output;
pub mod pattern;
pub mod simulate;
pub mod sweep;

use std::path::PathBuf;

use thiserror::Error;

use crate::bifurcation::BifurcationError;
use crate::eigenbasis::EigenError;
use crate::grid::GridError;
use crate::solver::SolverError;

pub use analyze::{cmd_analyze, AnalyticsReport};
pub use catalog::{catalog_entry, scenario_catalog};
pub use config::{emit, parse_config, ConfigError, ScenarioConfig};
pub use simulate::{cmd_simulate, SimulationSummary};
pub use sweep::{cmd_sweep, SweepAxis, SweepRow};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("scenario `{scenario}`: {source}")]
    Bifurcation {
        scenario: String,
        source: BifurcationError,
    },
    #[error("scenario `{scenario}`: {source}")]
    Eigen { scenario: String, source: EigenError },
    #[error("scenario `{scenario}`: {source}")]
    Grid { scenario: String, source: GridError },
    #[error("scenario `{scenario}`: {source}")]
    Solver { scenario: String, source: SolverError },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl HarnessError {
    /// True for problems with the input rather than with the computation.
    pub fn is_config(&self) -> bool {
        matches!(self, HarnessError::Config(_) | HarnessError::Grid { .. })
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.into();
        move |source| HarnessError::Io { path, source }
    }
}

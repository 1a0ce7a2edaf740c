//! Reproducible pipelines around `latgas`: price ingestion, configuration,
//! and the `simulate`, `predict`, `analyze` and `fit-kappa` commands.
//!
//! Every command is a function of its resolved [`Config`], its input files
//! and the master seed. Outputs are CSV and JSON files whose first lines
//! record the tool version, seed, configuration hash and input hashes.

pub mod cli;
pub mod commands;
pub mod config;
pub mod data;
pub mod output;

use std::path::PathBuf;

use latgas::dynamics::DynamicsError;
use latgas::stats::StatsError;
use latgas::theory::TheoryError;
use latgas::trend::TrendError;
use thiserror::Error;

pub use config::Config;
pub use data::{load_price_csv, MarketSeries, PriceTable, Schema};

pub const TOOL: &str = "latgas";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad configuration, arguments or input data.
    #[error("{0}")]
    Validation(String),
    /// Failure while computing.
    #[error("{0}")]
    Runtime(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Runtime(_) | CliError::Io { .. } => 1,
        }
    }
}

impl From<DynamicsError> for CliError {
    fn from(e: DynamicsError) -> Self {
        match e {
            DynamicsError::InvalidParams(_) | DynamicsError::Lattice(_) => CliError::Validation(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<TheoryError> for CliError {
    fn from(e: TheoryError) -> Self {
        match e {
            TheoryError::Domain(_) | TheoryError::Quadrature(_) => CliError::Runtime(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<StatsError> for CliError {
    fn from(e: StatsError) -> Self {
        match e {
            StatsError::InvalidArgument(_) | StatsError::TooShort { .. } | StatsError::NonPositive { .. } => {
                CliError::Validation(e.to_string())
            }
            StatsError::Theory(t) => t.into(),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<TrendError> for CliError {
    fn from(e: TrendError) -> Self {
        CliError::Validation(e.to_string())
    }
}

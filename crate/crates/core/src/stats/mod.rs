//! Estimation: the cubic next-day regression with bootstrap and
//! cross-validation, scaling fits, and a Gaussian test-signal generator.

mod gp;
mod linalg;
mod parabolic;
mod regression;
mod scaling;

use thiserror::Error;

use crate::theory::TheoryError;

pub use gp::{gaussian_process_from_propagator, MAX_GP_LENGTH};
pub use parabolic::{fit_parabolic_b, ParabolicFit};
pub use regression::{
    bootstrap_errors, cross_validate, fit_cubic, fit_cubic_data, fit_langevin_pair, BootstrapResult, Coefficient,
    CrossValidation, ErrorMethod, FitAdjustment, LangevinFit, Observation, RegressionData, RegressionReport,
    Resampling, MIN_BOOTSTRAP_SAMPLES, MIN_FOLD_SIZE, MIN_OBSERVATIONS,
};
pub use scaling::{fit_kappa, fit_kappa_linear, moment_scaling, tilde_variance, ScalingFit, SeriesKind};

/// Fraction rendered in basis points (`1 bp = 10⁻⁴`).
pub fn basis_points(x: f64) -> f64 {
    x * 1e4
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum StatsError {
    #[error("not enough data: need at least {needed}, got {got}")]
    TooShort { needed: usize, got: usize },
    #[error("rank-deficient design: {0}")]
    RankDeficient(String),
    #[error("series lengths differ: {0} vs {1}")]
    Misaligned(usize, usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("non-positive value {value} at position {index}")]
    NonPositive { index: usize, value: f64 },
    #[error("degenerate fit: {0}")]
    Degenerate(String),
    #[error("covariance is indefinite: innovation variance {variance} at step {step}")]
    IndefiniteCovariance { step: usize, variance: f64 },
    #[error(transparent)]
    Theory(#[from] TheoryError),
}

//! Critical exponents, the zero-mode propagator and the predictions that
//! follow from it.

mod exponents;
mod predictions;
mod propagator;
pub mod quadrature;

use thiserror::Error;

pub use exponents::{
    dimension_for_kappa, eta_from_beta_nu, exponents_for_dimension, kappa_for_dimension, predicted_hurst,
    table1_exponents, CriticalExponents, DYNAMIC_SLOPE, MAX_DIMENSION, MIN_DIMENSION,
};
pub use predictions::{
    predicted_adjacent_window_correlation, predicted_return_autocorrelation, predicted_trend_return_correlation,
    predicted_trend_variance, prediction_curve, Curve, TrendEstimator, CURVE_SCALES, SCALING_HORIZON_FRACTION,
};
pub use propagator::{PropagatorModel, Regime};
pub use quadrature::QuadratureError;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum TheoryError {
    #[error("dimension {0} outside the tabulated range [1.5, 4]")]
    DimensionOutOfRange(f64),
    #[error("kappa {kappa} outside the attainable range [{min}, 1]")]
    KappaOutOfRange { kappa: f64, min: f64 },
    #[error("outside the model's domain: {0}")]
    Domain(String),
    #[error("invalid propagator model: {0}")]
    InvalidModel(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

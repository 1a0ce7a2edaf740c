pub mod analyze;
pub mod fit_kappa;
pub mod predict;
pub mod simulate;

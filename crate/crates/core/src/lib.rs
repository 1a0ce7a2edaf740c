//! Lattice-gas / Ising model of a market and the scaling analysis built on it.
//!
//! The crate is organised bottom-up:
//!
//! - [`lattice`]: periodic hypercubic spin lattice, energies, magnetization and
//!   the magnetization-to-price map.
//! - [`dynamics`]: Glauber (Model A) Monte Carlo, magnetization time series,
//!   criticality diagnostics and the zero-mode Langevin integrator.
//! - [`trend`]: normalized returns and the exponentially weighted trend
//!   strengths, computed by direct convolution or recursively.
//! - [`theory`]: critical exponents, the two-regime propagator and the
//!   predictions derived from it (autocorrelations, trend variances, Hurst).
//! - [`stats`]: cubic next-day regression with bootstrap and cross-validation,
//!   scaling fits and a Gaussian test-signal generator.

pub mod dynamics;
pub mod lattice;
pub mod rng;
pub mod stats;
pub mod theory;
pub mod trend;

pub use dynamics::{MagnetizationSeries, SimulationParams};
pub use lattice::{Init, SpinLattice};
pub use theory::{CriticalExponents, PropagatorModel, Regime};
pub use trend::{ReturnSeries, TrendSeries, WeightFunction, WeightKind};

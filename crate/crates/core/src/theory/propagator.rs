//! Two-point function `Δ(t) = ⟨π(0)π(t)⟩` of the price deviation.
//!
//! - scaling regime (`t ≪ τ`): `Δ = (τ^κ − |t|^κ)/2`, defined for `|t| ≤ τ`;
//! - exponential regime (`t ≫ τ`): `Δ = (τ^κ/2)·e^{−|t|/τ}`;
//! - matched: scaling up to `t*`, then an exponential tail rescaled to be
//!   continuous at `t*`. This interpolation is a heuristic, not a result.

use serde::{Deserialize, Serialize};

use super::TheoryError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Regime {
    Scaling,
    Exponential,
    Matched { t_star: f64 },
}

impl Regime {
    pub fn is_heuristic(&self) -> bool {
        matches!(self, Regime::Matched { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropagatorModel {
    /// Correlation time `τ = ξ^z`.
    pub tau: f64,
    pub kappa: f64,
    pub regime: Regime,
}

impl PropagatorModel {
    pub fn new(tau: f64, kappa: f64, regime: Regime) -> Result<Self, TheoryError> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(TheoryError::InvalidModel(format!("tau must be positive, got {tau}")));
        }
        if !(kappa > 0.0 && kappa <= 1.0) {
            return Err(TheoryError::InvalidModel(format!("kappa must lie in (0, 1], got {kappa}")));
        }
        if let Regime::Matched { t_star } = regime {
            if !(t_star > 0.0 && t_star < tau) {
                return Err(TheoryError::InvalidModel(format!("t_star must lie in (0, tau), got {t_star}")));
            }
        }
        Ok(PropagatorModel { tau, kappa, regime })
    }

    pub fn scaling(tau: f64, kappa: f64) -> Result<Self, TheoryError> {
        Self::new(tau, kappa, Regime::Scaling)
    }

    pub fn exponential(tau: f64, kappa: f64) -> Result<Self, TheoryError> {
        Self::new(tau, kappa, Regime::Exponential)
    }

    /// `Δ(0) = τ^κ/2`.
    pub fn static_value(&self) -> f64 {
        0.5 * self.tau.powf(self.kappa)
    }

    /// Largest `|t|` at which [`value`](Self::value) is defined.
    pub fn domain_limit(&self) -> f64 {
        match self.regime {
            Regime::Scaling => self.tau,
            _ => f64::INFINITY,
        }
    }

    fn check_domain(&self, t: f64) -> Result<(), TheoryError> {
        if t.abs() > self.domain_limit() {
            return Err(TheoryError::Domain(format!(
                "scaling regime is defined for |t| <= tau = {}, got t = {t}",
                self.tau
            )));
        }
        Ok(())
    }

    fn scaling_value(&self, t: f64) -> f64 {
        0.5 * (self.tau.powf(self.kappa) - t.abs().powf(self.kappa))
    }

    /// `Δ(t)`.
    pub fn value(&self, t: f64) -> Result<f64, TheoryError> {
        self.check_domain(t)?;
        let t = t.abs();
        Ok(match self.regime {
            Regime::Scaling => self.scaling_value(t),
            Regime::Exponential => self.static_value() * (-t / self.tau).exp(),
            Regime::Matched { t_star } => {
                if t <= t_star {
                    self.scaling_value(t)
                } else {
                    self.scaling_value(t_star) * (-(t - t_star) / self.tau).exp()
                }
            }
        })
    }

    /// `(Δ̇(t), Δ̈(t))` for `t > 0`.
    pub fn derivatives(&self, t: f64) -> Result<(f64, f64), TheoryError> {
        if !(t > 0.0) {
            return Err(TheoryError::Domain(format!("derivatives need t > 0, got {t}")));
        }
        self.check_domain(t)?;
        Ok(self.raw_derivatives(t))
    }

    /// Derivatives with the scaling form extended past `τ`; this is the
    /// `τ → ∞` idealization used by the Laplace-type integrals.
    pub(crate) fn raw_derivatives(&self, t: f64) -> (f64, f64) {
        let k = self.kappa;
        let power = |t: f64| (-0.5 * k * t.powf(k - 1.0), 0.5 * k * (1.0 - k) * t.powf(k - 2.0));
        match self.regime {
            Regime::Scaling => power(t),
            Regime::Exponential => {
                let e = (-t / self.tau).exp();
                (-0.5 * self.tau.powf(k - 1.0) * e, 0.5 * self.tau.powf(k - 2.0) * e)
            }
            Regime::Matched { t_star } => {
                if t <= t_star {
                    power(t)
                } else {
                    let amp = self.scaling_value(t_star) * (-(t - t_star) / self.tau).exp();
                    (-amp / self.tau, amp / (self.tau * self.tau))
                }
            }
        }
    }

    /// Location where the functional form changes, if any.
    pub(crate) fn knee(&self) -> Option<f64> {
        match self.regime {
            Regime::Matched { t_star } => Some(t_star),
            _ => None,
        }
    }
}

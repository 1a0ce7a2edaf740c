//! Critical exponents of the Ising universality class versus lattice
//! dimension, and the map between the dimension and `κ = (2 − η)/z`.

use serde::{Deserialize, Serialize};

use super::TheoryError;

/// Slope `c` in the dynamic-exponent approximation `z ≈ 2 + c·η`.
pub const DYNAMIC_SLOPE: f64 = 2.0 / 3.0;

pub const MIN_DIMENSION: f64 = 1.5;
pub const MAX_DIMENSION: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalExponents {
    pub dimension: f64,
    /// Anomalous dimension.
    pub eta: f64,
    /// Dynamic exponent.
    pub z: f64,
    /// `(2 − η)/z`, computed from `eta` and `z`.
    pub kappa: f64,
    /// The three-decimal κ as tabulated, for table rows.
    pub table_kappa: Option<f64>,
    pub beta: Option<f64>,
    pub nu: Option<f64>,
}

impl CriticalExponents {
    fn new(dimension: f64, eta: f64, z: f64) -> Self {
        CriticalExponents { dimension, eta, z, kappa: kappa_of(eta, z), table_kappa: None, beta: None, nu: None }
    }

    /// Hurst exponent `κ/2` of the scaling regime.
    pub fn hurst(&self) -> f64 {
        self.kappa / 2.0
    }
}

fn kappa_of(eta: f64, z: f64) -> f64 {
    (2.0 - eta) / z
}

// (D, η, z, κ) as tabulated, in increasing D.
const TABLE: [(f64, f64, f64, f64); 6] = [
    (1.5, 0.523, 2.352, 0.628),
    (2.0, 0.250, 2.167, 0.808),
    (2.5, 0.106, 2.071, 0.915),
    (3.0, 0.036, 2.024, 0.970),
    (3.5, 0.002, 2.001, 0.998),
    (4.0, 0.00, 2.000, 1.000),
];

/// The tabulated exponents for `D ∈ {4, 3.5, 3, 2.5, 2, 1.5}`, in that order.
///
/// `beta`/`nu` are attached where they are known: the rounded 3D values, the
/// exact 2D Ising values and mean field at `D = 4`.
pub fn table1_exponents() -> Vec<CriticalExponents> {
    TABLE
        .iter()
        .rev()
        .map(|&(d, eta, z, k)| {
            let mut row = CriticalExponents::new(d, eta, z);
            row.table_kappa = Some(k);
            (row.beta, row.nu) = match d {
                x if x == 3.0 => (Some(0.33), Some(0.63)),
                x if x == 2.0 => (Some(0.125), Some(1.0)),
                x if x == 4.0 => (Some(0.5), Some(0.5)),
                _ => (None, None),
            };
            row
        })
        .collect()
}

/// Monotone piecewise-cubic Hermite interpolant (Fritsch–Carlson slopes).
struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    fn new(xs: Vec<f64>, ys: Vec<f64>) -> Self {
        let n = xs.len();
        let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|k| (ys[k + 1] - ys[k]) / h[k]).collect();
        let mut slopes = vec![0.0; n];
        for k in 1..n - 1 {
            if delta[k - 1] * delta[k] > 0.0 {
                let w1 = 2.0 * h[k] + h[k - 1];
                let w2 = h[k] + 2.0 * h[k - 1];
                slopes[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
            }
        }
        let end = |h0: f64, h1: f64, d0: f64, d1: f64| {
            let s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
            if s.signum() != d0.signum() {
                0.0
            } else if d0.signum() != d1.signum() && s.abs() > 3.0 * d0.abs() {
                3.0 * d0
            } else {
                s
            }
        };
        slopes[0] = end(h[0], h[1], delta[0], delta[1]);
        slopes[n - 1] = end(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        MonotoneCubic { xs, ys, slopes }
    }

    fn eval(&self, x: f64) -> f64 {
        let k = match self.xs.iter().rposition(|&xk| xk <= x) {
            Some(k) if k + 1 < self.xs.len() => k,
            Some(k) => k - 1,
            None => 0,
        };
        let h = self.xs[k + 1] - self.xs[k];
        let t = (x - self.xs[k]) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.ys[k] + h10 * h * self.slopes[k] + h01 * self.ys[k + 1] + h11 * h * self.slopes[k + 1]
    }
}

fn eta_interpolant() -> &'static MonotoneCubic {
    use std::sync::OnceLock;
    static CELL: OnceLock<MonotoneCubic> = OnceLock::new();
    CELL.get_or_init(|| MonotoneCubic::new(TABLE.iter().map(|r| r.0).collect(), TABLE.iter().map(|r| r.1).collect()))
}

fn check_dimension(d: f64) -> Result<(), TheoryError> {
    if (MIN_DIMENSION..=MAX_DIMENSION).contains(&d) {
        Ok(())
    } else {
        Err(TheoryError::DimensionOutOfRange(d))
    }
}

/// Exponents at a possibly fractional dimension: `η` interpolated through the
/// table, `z = 2 + (2/3)·η`, `κ = (2 − η)/z`.
pub fn exponents_for_dimension(d: f64) -> Result<CriticalExponents, TheoryError> {
    check_dimension(d)?;
    let eta = eta_interpolant().eval(d);
    Ok(CriticalExponents::new(d, eta, 2.0 + DYNAMIC_SLOPE * eta))
}

pub fn kappa_for_dimension(d: f64) -> Result<f64, TheoryError> {
    Ok(exponents_for_dimension(d)?.kappa)
}

/// Inverse of [`kappa_for_dimension`] by bisection.
pub fn dimension_for_kappa(kappa: f64) -> Result<f64, TheoryError> {
    let lo_kappa = kappa_for_dimension(MIN_DIMENSION)?;
    if !(lo_kappa..=1.0).contains(&kappa) {
        return Err(TheoryError::KappaOutOfRange { kappa, min: lo_kappa });
    }
    // κ(D) is flat to rounding just below D = 4
    if kappa == 1.0 {
        return Ok(MAX_DIMENSION);
    }
    let (mut lo, mut hi) = (MIN_DIMENSION, MAX_DIMENSION);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if kappa_for_dimension(mid)? < kappa {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `η = 2β/ν + 2 − D`.
pub fn eta_from_beta_nu(beta: f64, nu: f64, d: f64) -> Result<f64, TheoryError> {
    if !(nu > 0.0) {
        return Err(TheoryError::InvalidArgument(format!("nu must be positive, got {nu}")));
    }
    Ok(2.0 * beta / nu + 2.0 - d)
}

/// Predicted Hurst exponent `κ(D)/2`.
pub fn predicted_hurst(d: f64) -> Result<f64, TheoryError> {
    Ok(kappa_for_dimension(d)? / 2.0)
}

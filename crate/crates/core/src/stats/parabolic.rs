//! Scale dependence of the linear coefficient,
//! `b(k) = A·(1 − (k − k₀)²/Δk²)`, with a scale-independent cubic term `c`.

use serde::{Deserialize, Serialize};

use super::linalg;
use super::StatsError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParabolicFit {
    /// Peak value `A`.
    pub amplitude: f64,
    pub k0: f64,
    pub delta_k: f64,
    /// Mean of the cubic coefficients over scales.
    pub c_const: f64,
    /// Delta-method standard errors of `(A, k₀, Δk)`.
    pub std_errors: [f64; 3],
    pub c_std_error: f64,
    /// `b_k − b(k)` per input scale.
    pub residuals: Vec<f64>,
}

impl ParabolicFit {
    pub fn eval(&self, k: f64) -> f64 {
        self.amplitude * (1.0 - ((k - self.k0) / self.delta_k).powi(2))
    }
}

const MIN_SCALES: usize = 4;

/// Least squares fit of the parabola.
///
/// The model is the quadratic `α + βk + γk²` reparametrized, so the fit is an
/// exact linear least-squares problem with a unique minimum:
/// `k₀ = −β/(2γ)`, `A = α − β²/(4γ)`, `Δk² = −A/γ`. Standard errors follow by
/// linearizing that map around the estimate.
pub fn fit_parabolic_b(b_by_scale: &[(f64, f64)], c_by_scale: &[(f64, f64)]) -> Result<ParabolicFit, StatsError> {
    let n = b_by_scale.len();
    if n < MIN_SCALES {
        return Err(StatsError::TooShort { needed: MIN_SCALES, got: n });
    }
    if c_by_scale.is_empty() {
        return Err(StatsError::TooShort { needed: 1, got: 0 });
    }
    // centre k for conditioning
    let kbar = b_by_scale.iter().map(|p| p.0).sum::<f64>() / n as f64;
    let mut xtx = [[0.0; 3]; 3];
    let mut xty = [0.0; 3];
    for &(k, b) in b_by_scale {
        let u = k - kbar;
        let row = [1.0, u, u * u];
        for i in 0..3 {
            for j in 0..3 {
                xtx[i][j] += row[i] * row[j];
            }
            xty[i] += row[i] * b;
        }
    }
    let inv = linalg::inverse(&xtx)?;
    let coef: [f64; 3] = std::array::from_fn(|i| (0..3).map(|j| inv[i][j] * xty[j]).sum());
    let [alpha, beta, gamma] = coef;
    let residuals: Vec<f64> =
        b_by_scale.iter().map(|&(k, b)| b - (alpha + beta * (k - kbar) + gamma * (k - kbar).powi(2))).collect();
    let rss: f64 = residuals.iter().map(|r| r * r).sum();
    let scale = xty[0].abs() / n as f64 + rss.sqrt();
    if gamma.abs() <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
        return Err(StatsError::Degenerate(format!("no curvature (Δk → ∞), residual sum of squares {rss:e}")));
    }
    let u0 = -beta / (2.0 * gamma);
    let amplitude = alpha - beta * beta / (4.0 * gamma);
    let dk2 = -amplitude / gamma;
    if !(dk2 > 0.0) {
        return Err(StatsError::Degenerate(format!(
            "curvature and peak have the same sign (A = {amplitude:e}, γ = {gamma:e}), residual sum of squares {rss:e}"
        )));
    }
    let delta_k = dk2.sqrt();

    // Jacobian of (A, k₀, Δk) with respect to (α, β, γ)
    let d_a = [1.0, -beta / (2.0 * gamma), beta * beta / (4.0 * gamma * gamma)];
    let d_k0 = [0.0, -1.0 / (2.0 * gamma), beta / (2.0 * gamma * gamma)];
    // Δk = sqrt(−A/γ)
    let d_dk: [f64; 3] = std::array::from_fn(|i| {
        let d_dk2 = -d_a[i] / gamma + if i == 2 { amplitude / (gamma * gamma) } else { 0.0 };
        d_dk2 / (2.0 * delta_k)
    });
    let sigma2 = if n > 3 { rss / (n - 3) as f64 } else { 0.0 };
    let se = |g: &[f64; 3]| {
        let mut v = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                v += g[i] * inv[i][j] * g[j];
            }
        }
        (sigma2 * v).max(0.0).sqrt()
    };
    let std_errors = [se(&d_a), se(&d_k0), se(&d_dk)];

    let m = c_by_scale.len() as f64;
    let c_const = c_by_scale.iter().map(|p| p.1).sum::<f64>() / m;
    let c_std_error = if c_by_scale.len() > 1 {
        (c_by_scale.iter().map(|p| (p.1 - c_const).powi(2)).sum::<f64>() / (m - 1.0) / m).sqrt()
    } else {
        0.0
    };
    Ok(ParabolicFit { amplitude, k0: kbar + u0, delta_k, c_const, std_errors, c_std_error, residuals })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn parabola(a: f64, k0: f64, dk: f64) -> impl Fn(f64) -> f64 {
        move |k| a * (1.0 - ((k - k0) / dk).powi(2))
    }

    fn scales() -> Vec<f64> {
        (1..=10).map(f64::from).collect()
    }

    #[test]
    fn exact_parabola() {
        let f = parabola(0.02, 6.0, 5.0);
        let b: Vec<(f64, f64)> = scales().into_iter().map(|k| (k, f(k))).collect();
        let c: Vec<(f64, f64)> = scales().into_iter().map(|k| (k, -0.0062)).collect();
        let fit = fit_parabolic_b(&b, &c).unwrap();
        assert!((fit.amplitude - 0.02).abs() < 1e-12);
        assert!((fit.k0 - 6.0).abs() < 1e-10);
        assert!((fit.delta_k - 5.0).abs() < 1e-10);
        assert!((fit.c_const + 0.0062).abs() < 1e-15);
        assert!(fit.residuals.iter().all(|r| r.abs() < 1e-14));
        assert!((fit.eval(6.0) - 0.02).abs() < 1e-12);
    }

    #[test]
    fn constant_input_is_degenerate() {
        let b: Vec<(f64, f64)> = scales().into_iter().map(|k| (k, 0.01)).collect();
        assert!(matches!(fit_parabolic_b(&b, &b), Err(StatsError::Degenerate(_))));
    }

    #[test]
    fn upward_parabola_with_positive_peak_is_degenerate() {
        let b: Vec<(f64, f64)> = scales().into_iter().map(|k| (k, 0.01 + 0.001 * (k - 5.0).powi(2))).collect();
        assert!(matches!(fit_parabolic_b(&b, &b), Err(StatsError::Degenerate(_))));
    }

    #[test]
    fn too_few_scales() {
        let b = [(1.0, 0.0), (2.0, 1.0), (3.0, 0.0)];
        assert!(matches!(fit_parabolic_b(&b, &b), Err(StatsError::TooShort { needed: 4, got: 3 })));
    }

    #[test]
    fn noisy_parabola_within_three_standard_errors() {
        // σ = 0.005 on 10 scales leaves A and k₀ only loosely determined; use
        // finer sampling of k so the delta method is in its linear regime.
        let f = parabola(0.02, 6.0, 5.0);
        let ks: Vec<f64> = (0..=90).map(|i| 1.0 + 0.1 * i as f64).collect();
        let mut covered = 0;
        let trials = 200;
        for seed in 0..trials {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let b: Vec<(f64, f64)> =
                ks.iter().map(|&k| (k, f(k) + 0.005 * rng.sample::<f64, _>(StandardNormal))).collect();
            let fit = fit_parabolic_b(&b, &[(1.0, 0.0)]).unwrap();
            let ok = (fit.amplitude - 0.02).abs() < 3.0 * fit.std_errors[0]
                && (fit.k0 - 6.0).abs() < 3.0 * fit.std_errors[1]
                && (fit.delta_k - 5.0).abs() < 3.0 * fit.std_errors[2];
            covered += ok as u32;
        }
        assert!(covered as f64 >= 0.95 * trials as f64, "{covered}/{trials}");
    }
}

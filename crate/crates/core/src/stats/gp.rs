//! Gaussian test signals with a prescribed propagator.

use rand_distr::{Distribution, StandardNormal};

use super::StatsError;
use crate::rng;
use crate::theory::PropagatorModel;

/// Largest path the O(n²) generator accepts.
pub const MAX_GP_LENGTH: usize = 1 << 15;

/// Innovation variances below `−CLIP·Δ(0)` mean the covariance is not
/// positive semi-definite; smaller negative values are rounding and clipped
/// to zero.
const CLIP: f64 = 1e-10;

/// Zero-mean Gaussian path `π(0..n)` with `Cov(π(i), π(j)) = Δ(|i − j|)`.
///
/// Uses the Durbin–Levinson recursion, which factors the Toeplitz covariance
/// one step at a time: `π(t)` is its best linear prediction from the past plus
/// an independent innovation. In the scaling regime `Δ` is only defined up to
/// `τ`, so `n ≤ τ + 1` there.
pub fn gaussian_process_from_propagator(model: &PropagatorModel, n: usize, seed: u64) -> Result<Vec<f64>, StatsError> {
    if n == 0 || n > MAX_GP_LENGTH {
        return Err(StatsError::InvalidArgument(format!("path length must lie in 1..={MAX_GP_LENGTH}, got {n}")));
    }
    let cov = (0..n).map(|k| model.value(k as f64)).collect::<Result<Vec<f64>, _>>()?;
    let mut rng = rng::stream_rng(seed, rng::STREAM_MAIN);
    let mut draw = || -> f64 { StandardNormal.sample(&mut rng) };
    let c0 = cov[0];
    let mut path = Vec::with_capacity(n);
    path.push(c0.sqrt() * draw());
    let mut phi: Vec<f64> = Vec::with_capacity(n);
    let mut prev: Vec<f64> = Vec::with_capacity(n);
    let mut v = c0;
    for t in 1..n {
        // φ_{t,·} from φ_{t−1,·}
        let acc: f64 = (0..t - 1).map(|j| phi[j] * cov[t - 1 - j]).sum();
        let reflection = if v > 0.0 { (cov[t] - acc) / v } else { 0.0 };
        prev.clear();
        prev.extend_from_slice(&phi);
        for j in 0..t - 1 {
            phi[j] = prev[j] - reflection * prev[t - 2 - j];
        }
        phi.push(reflection);
        v *= 1.0 - reflection * reflection;
        if v < -CLIP * c0 {
            return Err(StatsError::IndefiniteCovariance { step: t, variance: v });
        }
        v = v.max(0.0);
        let mean: f64 = (0..t).map(|j| phi[j] * path[t - 1 - j]).sum();
        path.push(mean + v.sqrt() * draw());
    }
    Ok(path)
}

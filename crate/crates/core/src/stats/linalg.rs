//! Small dense solves for normal equations.

use super::StatsError;

/// Solves `A·x = b` for symmetric positive semi-definite `A` by Gaussian
/// elimination with full pivoting after symmetric diagonal scaling. A pivot
/// below `1e-12` of the scaled diagonal is reported as rank deficiency.
pub(crate) fn solve<const N: usize>(a: &[[f64; N]; N], b: &[f64; N]) -> Result<[f64; N], StatsError> {
    let inv = inverse(a)?;
    let mut x = [0.0; N];
    for i in 0..N {
        x[i] = (0..N).map(|j| inv[i][j] * b[j]).sum();
    }
    Ok(x)
}

pub(crate) fn inverse<const N: usize>(a: &[[f64; N]; N]) -> Result<[[f64; N]; N], StatsError> {
    let mut scale = [0.0; N];
    for i in 0..N {
        if !(a[i][i] > 0.0) || !a[i][i].is_finite() {
            return Err(StatsError::RankDeficient(format!("regressor {i} has no variation")));
        }
        scale[i] = 1.0 / a[i][i].sqrt();
    }
    // work on D·A·D, which has a unit diagonal
    let mut m = [[0.0; N]; N];
    let mut inv = [[0.0; N]; N];
    for i in 0..N {
        for j in 0..N {
            m[i][j] = a[i][j] * scale[i] * scale[j];
        }
        inv[i][i] = 1.0;
    }
    let mut col_perm: [usize; N] = std::array::from_fn(|i| i);
    for k in 0..N {
        let (mut pi, mut pj, mut best) = (k, k, 0.0);
        for i in k..N {
            for j in k..N {
                if m[i][j].abs() > best {
                    (pi, pj, best) = (i, j, m[i][j].abs());
                }
            }
        }
        if best < 1e-12 {
            return Err(StatsError::RankDeficient(format!("pivot {best:e} at step {k}")));
        }
        m.swap(k, pi);
        inv.swap(k, pi);
        if pj != k {
            for row in m.iter_mut() {
                row.swap(k, pj);
            }
            col_perm.swap(k, pj);
        }
        let p = m[k][k];
        for i in 0..N {
            if i == k {
                continue;
            }
            let f = m[i][k] / p;
            if f == 0.0 {
                continue;
            }
            for j in 0..N {
                m[i][j] -= f * m[k][j];
                inv[i][j] -= f * inv[k][j];
            }
        }
        for j in 0..N {
            m[k][j] /= p;
            inv[k][j] /= p;
        }
    }
    // row k of `inv` now belongs to unknown col_perm[k]
    let mut out = [[0.0; N]; N];
    for k in 0..N {
        let r = col_perm[k];
        for j in 0..N {
            out[r][j] = inv[k][j] * scale[r] * scale[j];
        }
    }
    Ok(out)
}

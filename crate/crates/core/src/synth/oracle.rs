//! Deliberately naive reference computations. Nothing here shares code with
//! the estimators it checks.

use crate::error::{Error, Result};
use crate::subsampling::SubsampleMode;

fn path_mean(values: &[f64]) -> f64 {
    let mut s = 0.0;
    for v in values {
        s += v;
    }
    s / values.len() as f64
}

/// `|(1/d) Σ_{j=c+1}^{c+d} (X_j - X̄_n) e^{-iψj}|`, summed afresh.
fn window_modulus(values: &[f64], xbar: f64, c: usize, d: usize, psi: f64) -> f64 {
    let mut re = 0.0;
    let mut im = 0.0;
    for j in c + 1..=c + d {
        let dev = values[j - 1] - xbar;
        let angle = psi * j as f64;
        re += dev * angle.cos();
        im += dev * -angle.sin();
    }
    (re / d as f64).hypot(im / d as f64)
}

/// Subsample statistics in window order (unsorted).
pub fn oracle_subsample_stats(values: &[f64], b: usize, psi: f64, mode: SubsampleMode) -> Result<Vec<f64>> {
    let n = values.len();
    if b == 0 || b >= n {
        return Err(Error::invalid(format!("block length {b} must satisfy 1 <= b < n = {n}")));
    }
    let xbar = path_mean(values);
    let full = window_modulus(values, xbar, 0, n, psi);
    let root_b = (b as f64).sqrt();
    let mut out = Vec::with_capacity(n - b + 1);
    for t in 1..=n - b + 1 {
        let sub = window_modulus(values, xbar, t - 1, b, psi);
        out.push(match mode {
            SubsampleMode::Uncentered => root_b * sub,
            SubsampleMode::Centered => root_b * (sub - full),
        });
    }
    Ok(out)
}

/// Subsampling CDF at `x` as the literal indicator average
/// `(1/(n-b+1)) Σ_t 1{stat_t <= x}`, recomputing every window for each call.
pub fn oracle_subsample_cdf(values: &[f64], b: usize, psi: f64, mode: SubsampleMode, x: f64) -> Result<f64> {
    let stats = oracle_subsample_stats(values, b, psi, mode)?;
    let hits = stats.iter().filter(|&&s| s <= x).count();
    Ok(hits as f64 / stats.len() as f64)
}

/// HP trend by assembling `I + λ DᵀD` densely and solving with Gaussian
/// elimination and partial pivoting.
pub fn dense_hp_trend(values: &[f64], lambda: f64) -> Vec<f64> {
    let n = values.len();
    let mut a = vec![vec![0.0; n]; n];
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    if n >= 3 {
        // D is (n-2) x n with rows (1, -2, 1).
        let mut d = vec![vec![0.0; n]; n - 2];
        for (r, row) in d.iter_mut().enumerate() {
            row[r] = 1.0;
            row[r + 1] = -2.0;
            row[r + 2] = 1.0;
        }
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for row in &d {
                    s += row[i] * row[j];
                }
                a[i][j] += lambda * s;
            }
        }
    }
    let mut rhs = values.to_vec();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        rhs.swap(col, pivot);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            let (top, bottom) = a.split_at_mut(r);
            for (dst, src) in bottom[0][col..].iter_mut().zip(&top[col][col..]) {
                *dst -= f * src;
            }
            rhs[r] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = rhs[i];
        for j in i + 1..n {
            s -= a[i][j] * x[j];
        }
        x[i] = s / a[i][i];
    }
    x
}

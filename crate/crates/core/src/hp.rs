//! Hodrick–Prescott trend/cycle decomposition and the λ ↔ cutoff mapping
//! `λ = 1 / (4 (1 - cos ψ0)^2)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::MonthlySeries;

/// λ values used by default for cycle extraction from monthly data.
pub const DEFAULT_LAMBDAS: [f64; 4] = [5500.0, 12000.0, 32000.0, 55000.0];

/// Smoothing parameter whose cutoff frequency is `psi0` (rad/month).
pub fn lambda_from_cutoff(psi0: f64) -> Result<f64> {
    if !(psi0 > 0.0 && psi0 < PI) {
        return Err(Error::invalid(format!("cutoff {psi0} must lie in (0, π)")));
    }
    // 1 - cos ψ = 2 sin²(ψ/2), without cancellation near 0.
    let one_minus_cos = 2.0 * (psi0 / 2.0).sin().powi(2);
    Ok(1.0 / (4.0 * one_minus_cos * one_minus_cos))
}

/// Inverse of [`lambda_from_cutoff`]: `ψ0 = arccos(1 - 1/(2√λ))`, defined
/// for `λ > 1/16`.
pub fn cutoff_from_lambda(lambda: f64) -> Result<f64> {
    if !(lambda > 1.0 / 16.0 && lambda.is_finite()) {
        return Err(Error::invalid(format!(
            "lambda {lambda} has no cutoff in (0, π); it must exceed 1/16"
        )));
    }
    let one_minus_cos = 1.0 / (2.0 * lambda.sqrt());
    Ok(2.0 * (one_minus_cos / 2.0).sqrt().asin())
}

/// Cutoff period in months for `lambda`.
pub fn cutoff_months(lambda: f64) -> Result<f64> {
    Ok(2.0 * PI / cutoff_from_lambda(lambda)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HpDecomposition {
    pub lambda: f64,
    pub trend: Vec<f64>,
    /// `input - trend`.
    pub cycle: Vec<f64>,
}

/// Bands of `I + λ DᵀD` where `D` is the `(n-2) × n` second-difference
/// matrix: `(diag, first off-diagonal, second off-diagonal)`.
fn penalty_bands(n: usize, lambda: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let mut d0 = vec![1.0; n];
    let mut d1 = vec![0.0; n.saturating_sub(1)];
    let mut d2 = vec![0.0; n.saturating_sub(2)];
    let row = [1.0, -2.0, 1.0];
    for i in 0..n.saturating_sub(2) {
        for a in 0..3 {
            d0[i + a] += lambda * row[a] * row[a];
            for b in a + 1..3 {
                let v = lambda * row[a] * row[b];
                match b - a {
                    1 => d1[i + a] += v,
                    _ => d2[i + a] += v,
                }
            }
        }
    }
    (d0, d1, d2)
}

/// Solve the symmetric positive-definite pentadiagonal system with an
/// `LDLᵀ` factorization.
fn solve_pentadiagonal(d0: &[f64], d1: &[f64], d2: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = d0.len();
    let mut diag = vec![0.0; n];
    // l1[i] = L[i+1][i], l2[i] = L[i+2][i]
    let mut l1 = vec![0.0; n.saturating_sub(1)];
    let mut l2 = vec![0.0; n.saturating_sub(2)];
    for i in 0..n {
        let mut di = d0[i];
        if i >= 1 {
            di -= l1[i - 1] * l1[i - 1] * diag[i - 1];
        }
        if i >= 2 {
            di -= l2[i - 2] * l2[i - 2] * diag[i - 2];
        }
        diag[i] = di;
        if i + 1 < n {
            let mut v = d1[i];
            if i >= 1 {
                v -= l2[i - 1] * l1[i - 1] * diag[i - 1];
            }
            l1[i] = v / di;
        }
        if i + 2 < n {
            l2[i] = d2[i] / di;
        }
    }
    let mut z = rhs.to_vec();
    for i in 0..n {
        if i >= 1 {
            z[i] -= l1[i - 1] * z[i - 1];
        }
        if i >= 2 {
            z[i] -= l2[i - 2] * z[i - 2];
        }
    }
    for i in 0..n {
        z[i] /= diag[i];
    }
    for i in (0..n).rev() {
        if i + 1 < n {
            z[i] -= l1[i] * z[i + 1];
        }
        if i + 2 < n {
            z[i] -= l2[i] * z[i + 2];
        }
    }
    z
}

/// Trend minimizing `Σ(x_t - τ_t)² + λ Σ(Δ²τ_t)²`.
pub fn hp_trend(values: &[f64], lambda: f64) -> Result<Vec<f64>> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::invalid(format!("lambda {lambda} must be a nonnegative real")));
    }
    if values.is_empty() {
        return Err(Error::TooShort {
            what: "the HP filter",
            required: 1,
            actual: 0,
        });
    }
    if lambda == 0.0 {
        return Ok(values.to_vec());
    }
    if values.len() < 4 {
        return Err(Error::TooShort {
            what: "the HP filter with positive lambda",
            required: 4,
            actual: values.len(),
        });
    }
    let (d0, d1, d2) = penalty_bands(values.len(), lambda);
    Ok(solve_pentadiagonal(&d0, &d1, &d2, values))
}

pub fn hp_decompose_values(values: &[f64], lambda: f64) -> Result<HpDecomposition> {
    let trend = hp_trend(values, lambda)?;
    let cycle = values.iter().zip(&trend).map(|(x, t)| x - t).collect();
    Ok(HpDecomposition { lambda, trend, cycle })
}

pub fn hp_decompose(series: &MonthlySeries, lambda: f64) -> Result<HpDecomposition> {
    hp_decompose_values(series.values(), lambda)
}

//! Subsampling distributions over all overlapping blocks, their critical
//! values, confidence intervals for `|m(ψ)|`, and the grid significance scan.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::mean;
use crate::spectral::{centered_window_coeff, period_of, twiddle, FrequencyGrid};

/// Root of the subsample statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubsampleMode {
    /// `√b (|r̂^{t-1,b}(ψ)| - |r̂_n(ψ)|)`; used for confidence intervals.
    Centered,
    /// `√b |r̂^{t-1,b}(ψ)|`; used for the significance test.
    Uncentered,
}

/// Rounded `2.5 √n`, clamped to `[4, n-1]`.
pub fn default_block_length(n: usize) -> Result<usize> {
    if n < 16 {
        return Err(Error::TooShort {
            what: "the default block length",
            required: 16,
            actual: n,
        });
    }
    let b = (2.5 * (n as f64).sqrt()).round() as usize;
    Ok(b.clamp(4, n - 1))
}

fn check_block(n: usize, b: usize) -> Result<()> {
    if b == 0 || b >= n {
        return Err(Error::invalid(format!(
            "block length {b} must satisfy 1 <= b < n = {n}"
        )));
    }
    Ok(())
}

/// `|r̂^{t-1,b}(ψ)|` for `t = 1 ..= n-b+1`, in window order.
/// Same products and summation order as `centered_window_coeff`, with the
/// terms computed once per position instead of once per window.
fn window_moduli(values: &[f64], center: f64, b: usize, psi: f64) -> Vec<f64> {
    let terms: Vec<(f64, f64)> = values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let x = v - center;
            let (cs, sn) = twiddle(psi, i + 1);
            (x * cs, x * sn)
        })
        .collect();
    let d = b as f64;
    terms
        .windows(b)
        .map(|w| {
            let (mut re, mut im) = (0.0, 0.0);
            for (r, i) in w {
                re += r;
                im += i;
            }
            Complex64::new(re / d, im / d).norm()
        })
        .collect()
}

/// Empirical subsampling distribution for one frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsampleDistribution {
    /// Sorted ascending, length `n - b + 1`.
    pub stats: Vec<f64>,
    pub n: usize,
    pub b: usize,
    pub psi: f64,
    pub mode: SubsampleMode,
}

impl SubsampleDistribution {
    pub fn len(&self) -> usize {
        self.stats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stats.is_empty()
    }

    /// Empirical CDF: fraction of subsample statistics `<= x`.
    pub fn cdf(&self, x: f64) -> f64 {
        let count = self.stats.partition_point(|&s| s <= x);
        count as f64 / self.stats.len() as f64
    }
}

pub fn subsample_distribution(
    values: &[f64],
    b: usize,
    psi: f64,
    mode: SubsampleMode,
) -> Result<SubsampleDistribution> {
    let n = values.len();
    check_block(n, b)?;
    let center = mean(values);
    let root_b = (b as f64).sqrt();
    let mut stats = window_moduli(values, center, b, psi);
    match mode {
        SubsampleMode::Uncentered => stats.iter_mut().for_each(|s| *s *= root_b),
        SubsampleMode::Centered => {
            let full = centered_window_coeff(values, center, 0, n, psi).norm();
            stats.iter_mut().for_each(|s| *s = root_b * (*s - full));
        }
    }
    stats.sort_by(f64::total_cmp);
    Ok(SubsampleDistribution {
        stats,
        n,
        b,
        psi,
        mode,
    })
}

fn check_level(gamma: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::invalid(format!(
            "confidence level {gamma} must lie in (0, 1)"
        )));
    }
    Ok(())
}

/// Index (0-based) of the smallest order statistic whose empirical CDF
/// reaches `gamma`, using the same `k/q` arithmetic as [`SubsampleDistribution::cdf`].
fn quantile_index(q: usize, gamma: f64) -> usize {
    let mut k = ((gamma * q as f64).ceil() as usize).clamp(1, q);
    while k > 1 && (k - 1) as f64 / q as f64 >= gamma {
        k -= 1;
    }
    while k < q && (k as f64 / q as f64) < gamma {
        k += 1;
    }
    k - 1
}

/// `inf{x : CDF(x) >= γ}` for confidence level `γ` (e.g. 0.99).
pub fn critical_value(dist: &SubsampleDistribution, gamma: f64) -> Result<f64> {
    check_level(gamma)?;
    if dist.is_empty() {
        return Err(Error::invalid("empty subsampling distribution"));
    }
    Ok(dist.stats[quantile_index(dist.len(), gamma)])
}

/// One-sided interval `[max(0, |r̂_n| - c̃/√n), ∞)` for `|m(ψ)|`, with `c̃`
/// the centered critical value at level `γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceInterval {
    pub lo: f64,
    pub hi: f64,
}

impl ConfidenceInterval {
    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }
}

pub fn confidence_interval(values: &[f64], b: usize, psi: f64, gamma: f64) -> Result<ConfidenceInterval> {
    check_level(gamma)?;
    let dist = subsample_distribution(values, b, psi, SubsampleMode::Centered)?;
    let crit = critical_value(&dist, gamma)?;
    let n = values.len();
    let modulus = centered_window_coeff(values, mean(values), 0, n, psi).norm();
    Ok(ConfidenceInterval {
        lo: (modulus - crit / (n as f64).sqrt()).max(0.0),
        hi: f64::INFINITY,
    })
}

/// Test result at one grid frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub psi: f64,
    pub period_months: f64,
    pub statistic: f64,
    /// Critical values in the order of [`SignificanceScan::gammas`].
    pub critical: Vec<f64>,
    /// `statistic > critical[k]`.
    pub flags: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignificanceScan {
    pub grid: FrequencyGrid,
    pub b: usize,
    pub gammas: Vec<f64>,
    pub points: Vec<ScanPoint>,
}

impl SignificanceScan {
    pub fn gamma_index(&self, gamma: f64) -> Option<usize> {
        self.gammas.iter().position(|&g| (g - gamma).abs() < 1e-12)
    }

    /// Flags of every grid point at level `gamma`.
    pub fn flags_at(&self, gamma: f64) -> Option<Vec<bool>> {
        let k = self.gamma_index(gamma)?;
        Some(self.points.iter().map(|p| p.flags[k]).collect())
    }
}

fn scan_point(values: &[f64], center: f64, b: usize, psi: f64, gammas: &[f64]) -> Result<ScanPoint> {
    let n = values.len();
    let statistic = (n as f64).sqrt() * centered_window_coeff(values, center, 0, n, psi).norm();
    let root_b = (b as f64).sqrt();
    let mut stats: Vec<f64> = window_moduli(values, center, b, psi)
        .into_iter()
        .map(|s| root_b * s)
        .collect();
    stats.sort_by(f64::total_cmp);
    let q = stats.len();
    let critical: Vec<f64> = gammas.iter().map(|&g| stats[quantile_index(q, g)]).collect();
    let flags = critical.iter().map(|&c| statistic > c).collect();
    Ok(ScanPoint {
        psi,
        period_months: period_of(psi)?.months,
        statistic,
        critical,
        flags,
    })
}

/// Test statistic and uncentered subsampling critical values at every grid
/// frequency. Grid points are evaluated in parallel and merged in grid order.
pub fn scan(values: &[f64], grid: &FrequencyGrid, b: usize, gammas: &[f64]) -> Result<SignificanceScan> {
    if grid.is_empty() {
        return Err(Error::invalid("empty frequency grid"));
    }
    if gammas.is_empty() {
        return Err(Error::invalid("at least one confidence level is required"));
    }
    for &g in gammas {
        check_level(g)?;
    }
    check_block(values.len(), b)?;
    let center = mean(values);
    let points = grid
        .points
        .par_iter()
        .map(|&psi| scan_point(values, center, b, psi, gammas))
        .collect::<Result<Vec<_>>>()?;
    Ok(SignificanceScan {
        grid: grid.clone(),
        b,
        gammas: gammas.to_vec(),
        points,
    })
}

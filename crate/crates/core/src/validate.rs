//! Self-checks run by `cyclescope validate`: oracle equivalence of the
//! subsampling distribution, banded vs dense HP solves, the λ table,
//! period conversions, seasonal annihilation and an optional Monte Carlo
//! size/power run.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::filter::ma_2x12;
use crate::hp::{cutoff_months, hp_trend};
use crate::pipeline::PipelineConfig;
use crate::spectral::period_of;
use crate::subsampling::{subsample_distribution, SubsampleMode};
use crate::synth::montecarlo::monte_carlo;
use crate::synth::oracle::{dense_hp_trend, oracle_subsample_cdf, oracle_subsample_stats};
use crate::synth::{Harmonic, NoiseSpec, NormalStream, SyntheticSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn at_most(name: &str, measured: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Self {
            name: name.to_string(),
            measured,
            tolerance,
            passed: measured <= tolerance,
            detail: detail.into(),
        }
    }

    fn at_least(name: &str, measured: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Self {
            name: name.to_string(),
            measured,
            tolerance,
            passed: measured >= tolerance,
            detail: detail.into(),
        }
    }
}

fn noise(seed: u64, n: usize) -> Vec<f64> {
    let mut z = NormalStream::new(seed, 0);
    (0..n).map(|_| z.normal()).collect()
}

/// Every `n <= 12`, `b < n`, ψ ∈ {π/6, π/4, π/2}, both modes: largest
/// difference between sorted module and oracle statistics, and number of
/// CDF evaluations that disagree.
pub fn oracle_equivalence() -> Result<Vec<Check>> {
    let mut max_diff: f64 = 0.0;
    let mut cdf_mismatches = 0usize;
    let mut cases = 0usize;
    for n in 2..=12 {
        let values: Vec<f64> = noise(1000 + n as u64, n)
            .into_iter()
            .enumerate()
            .map(|(i, z)| z + 0.1 * i as f64)
            .collect();
        for b in 1..n {
            for psi in [PI / 6.0, PI / 4.0, PI / 2.0] {
                for mode in [SubsampleMode::Centered, SubsampleMode::Uncentered] {
                    cases += 1;
                    let dist = subsample_distribution(&values, b, psi, mode)?;
                    let mut oracle = oracle_subsample_stats(&values, b, psi, mode)?;
                    oracle.sort_by(f64::total_cmp);
                    for (a, o) in dist.stats.iter().zip(&oracle) {
                        max_diff = max_diff.max((a - o).abs());
                    }
                    for &x in &dist.stats {
                        if dist.cdf(x) != oracle_subsample_cdf(&values, b, psi, mode, x)? {
                            cdf_mismatches += 1;
                        }
                    }
                }
            }
        }
    }
    Ok(vec![
        Check::at_most(
            "oracle: subsample statistics",
            max_diff,
            1e-14,
            format!("{cases} exhaustive cases, max |module - oracle|"),
        ),
        Check::at_most(
            "oracle: empirical CDF",
            cdf_mismatches as f64,
            0.0,
            "CDF disagreements at statistic points",
        ),
    ])
}

/// Banded vs dense HP trend on n = 200 Gaussian noise for three λ, plus
/// the cycle of a straight line.
pub fn hp_oracle() -> Result<Vec<Check>> {
    let x = noise(2024, 200);
    let mut checks = Vec::new();
    for lambda in [1600.0, 5500.0, 55000.0] {
        let banded = hp_trend(&x, lambda)?;
        let dense = dense_hp_trend(&x, lambda);
        let err = banded
            .iter()
            .zip(&dense)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        checks.push(Check::at_most(
            &format!("hp: banded vs dense, lambda {lambda}"),
            err,
            1e-10,
            "max-abs trend difference, n = 200",
        ));
    }
    let line: Vec<f64> = (1..=200).map(|t| 2.0 + 0.03 * t as f64).collect();
    let trend = hp_trend(&line, 55000.0)?;
    let cyc = line
        .iter()
        .zip(&trend)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    checks.push(Check::at_most("hp: linear input cycle", cyc, 1e-10, "max |cycle|"));
    Ok(checks)
}

/// Cutoff periods of the default λ values against 4.5 / 5.5 / 7 / 8 years.
pub fn lambda_table() -> Result<Vec<Check>> {
    [(5500.0, 4.5), (12000.0, 5.5), (32000.0, 7.0), (55000.0, 8.0)]
        .iter()
        .map(|&(lambda, years)| {
            let got = cutoff_months(lambda)? / 12.0;
            Ok(Check::at_most(
                &format!("lambda {lambda}"),
                (got - years).abs() / years,
                0.02,
                format!("{got:.3} years vs {years}"),
            ))
        })
        .collect()
}

/// Period conversions of the three reference frequencies.
pub fn period_table() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let y = period_of(0.062)?.years;
    let off = if (8.4..=8.5).contains(&y) { 0.0 } else { (y - 8.45).abs() - 0.05 };
    out.push(Check::at_most("period of 0.062", off, 0.0, format!("{y:.4} years vs 8.4-8.5")));
    for (psi, years) in [(0.153, 3.4), (0.258, 2.0)] {
        let y = period_of(psi)?.years;
        out.push(Check::at_most(
            &format!("period of {psi}"),
            (y - years).abs(),
            0.05,
            format!("{y:.4} years vs {years}"),
        ));
    }
    Ok(out)
}

/// Zeros of the 2x12 transfer at the seasonal frequencies, and the filtered
/// interior of a pure seasonal input.
pub fn seasonal_annihilation() -> Result<Vec<Check>> {
    let ma = ma_2x12();
    let worst = (1..=11)
        .map(|k| ma.transfer(2.0 * PI * k as f64 / 12.0).norm())
        .fold(0.0, f64::max);
    let input: Vec<f64> = (1..=240)
        .map(|t| {
            let t = t as f64;
            (1..=11)
                .map(|k| (1.0 / k as f64) * (2.0 * PI * k as f64 * t / 12.0 + 0.3 * k as f64).cos())
                .sum()
        })
        .collect();
    let out = ma.apply_values(&input)?;
    let resid = out.iter().map(|v| v.abs()).fold(0.0, f64::max);
    Ok(vec![
        Check::at_most("seasonal: transfer zeros", worst, 1e-12, "max |L(e^{-i2πk/12})|, k = 1..11"),
        Check::at_most("seasonal: filtered input", resid, 1e-10, "max |output| of pure seasonal input"),
    ])
}

/// Size at γ = 0.95 on noise and power at γ = 0.99 for a harmonic at 0.153
/// with `√n |m| / σ = 8`, both with n = 1800.
pub fn monte_carlo_checks(replications: usize) -> Result<Vec<Check>> {
    let n = 1800;
    let config = PipelineConfig {
        log_transform: false,
        ..Default::default()
    };
    let null = SyntheticSpec {
        trend: vec![0.0, 0.001],
        harmonics: vec![],
        seasonal: vec![],
        noise: NoiseSpec {
            ar: 0.0,
            sigma: 0.05,
            volatility: vec![],
        },
        seed: 11,
        exponentiate: false,
    };
    let targets = [0.062, 0.153, 0.2, 0.258];
    let size = monte_carlo(&null, n, replications, 0.95, &targets, &config)?;
    let mut out = Vec::new();
    for t in &size.targets {
        let bound = 0.05 + 3.0 * (0.05 * 0.95 / replications as f64).sqrt();
        out.push(Check::at_most(
            &format!("size at {}", t.psi),
            t.rejection_rate,
            bound,
            "rejection rate under the null, gamma 0.95",
        ));
    }
    let power_spec = power_spec(n);
    let power = monte_carlo(&power_spec, n, replications, 0.99, &[0.153], &config)?;
    out.push(Check::at_least(
        "power at 0.153",
        power.targets[0].interval_rate,
        0.9,
        "share of runs with a detected interval containing 0.153, gamma 0.99",
    ));
    Ok(out)
}

/// Harmonic at 0.153 with amplitude `4|m| = 0.07` and white noise scaled so
/// that `√n |m| / σ = 8`.
pub fn power_spec(n: usize) -> SyntheticSpec {
    let h = Harmonic::with_amplitude(0.153, 0.07);
    let sigma = (n as f64).sqrt() * h.coefficient().norm() / 8.0;
    SyntheticSpec {
        trend: vec![0.0, 0.001],
        harmonics: vec![h],
        seasonal: vec![],
        noise: NoiseSpec {
            ar: 0.0,
            sigma,
            volatility: vec![],
        },
        seed: 23,
        exponentiate: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_checks_pass() {
        for c in oracle_equivalence()
            .unwrap()
            .into_iter()
            .chain(hp_oracle().unwrap())
            .chain(lambda_table().unwrap())
            .chain(period_table().unwrap())
            .chain(seasonal_annihilation().unwrap())
        {
            assert!(c.passed, "{c:?}");
        }
    }
}

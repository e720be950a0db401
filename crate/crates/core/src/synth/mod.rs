//! Ground-truth series with an almost periodic mean: polynomial trend,
//! business-cycle harmonics, monthly seasonals and AR(1) noise with
//! optional month-of-year volatility.

pub mod montecarlo;
pub mod oracle;

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filter::ComplexCoeff;
use crate::series::{MonthlySeries, YearMonth};
use crate::spectral::{amplitude, period_of};

const BURN_IN: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Harmonic {
    pub psi: f64,
    /// Cosine weight.
    pub a: f64,
    /// Sine weight.
    pub b: f64,
}

impl Harmonic {
    /// `m(ψ) = (a - ib)/2`.
    pub fn coefficient(&self) -> ComplexCoeff {
        Complex64::new(self.a / 2.0, -self.b / 2.0)
    }

    /// Harmonic whose amplitude `4|m|` is `amp`, as a pure cosine.
    pub fn with_amplitude(psi: f64, amp: f64) -> Self {
        Self {
            psi,
            a: amp / 2.0,
            b: 0.0,
        }
    }
}

/// `c cos(2πk t/12 + phase)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Seasonal {
    pub k: u32,
    pub c: f64,
    #[serde(default)]
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    /// AR(1) coefficient in (-1, 1).
    #[serde(default)]
    pub ar: f64,
    pub sigma: f64,
    /// Month-of-year multipliers `s_1..s_12`; empty means constant volatility.
    #[serde(default)]
    pub volatility: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    /// Polynomial trend coefficients `β_0, β_1, ...` in `t`.
    #[serde(default)]
    pub trend: Vec<f64>,
    #[serde(default)]
    pub harmonics: Vec<Harmonic>,
    #[serde(default)]
    pub seasonal: Vec<Seasonal>,
    pub noise: NoiseSpec,
    #[serde(default)]
    pub seed: u64,
    /// Emit `exp(value)` so the model describes the log of the series.
    #[serde(default)]
    pub exponentiate: bool,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        for h in &self.harmonics {
            if !(h.psi > 0.0 && h.psi < PI) || !h.a.is_finite() || !h.b.is_finite() {
                return Err(Error::invalid(format!("harmonic at {} must have ψ in (0, π)", h.psi)));
            }
        }
        for s in &self.seasonal {
            if !(1..=11).contains(&s.k) {
                return Err(Error::invalid(format!("seasonal index {} outside 1..11", s.k)));
            }
        }
        let noise = &self.noise;
        if !(noise.ar > -1.0 && noise.ar < 1.0) {
            return Err(Error::invalid(format!("AR coefficient {} outside (-1, 1)", noise.ar)));
        }
        if !(noise.sigma >= 0.0 && noise.sigma.is_finite()) {
            return Err(Error::invalid("noise sigma must be nonnegative"));
        }
        if !noise.volatility.is_empty()
            && (noise.volatility.len() != 12 || noise.volatility.iter().any(|s| s.is_nan() || *s <= 0.0))
        {
            return Err(Error::invalid("volatility needs twelve positive multipliers"));
        }
        if self.trend.iter().any(|b| !b.is_finite()) {
            return Err(Error::invalid("trend coefficients must be finite"));
        }
        Ok(())
    }

    /// Deterministic mean at time `t` (before any exponentiation).
    pub fn mean_at(&self, t: i64) -> f64 {
        let tf = t as f64;
        let trend: f64 = self
            .trend
            .iter()
            .rev()
            .fold(0.0, |acc, beta| acc * tf + beta);
        let cycles: f64 = self
            .harmonics
            .iter()
            .map(|h| h.a * (h.psi * tf).cos() + h.b * (h.psi * tf).sin())
            .sum();
        let seasonal: f64 = self
            .seasonal
            .iter()
            .map(|s| s.c * (2.0 * PI * s.k as f64 * tf / 12.0 + s.phase).cos())
            .sum();
        trend + cycles + seasonal
    }

    fn volatility_at(&self, t: i64) -> f64 {
        if self.noise.volatility.is_empty() {
            1.0
        } else {
            self.noise.volatility[t.rem_euclid(12) as usize]
        }
    }

    /// Bundled fixture: harmonics at 0.062 / 0.153 / 0.258 rad/month with
    /// amplitudes 0.13 / 0.07 / 0.05 on the log scale, a linear trend,
    /// monthly seasonals and AR(1) noise with month-of-year volatility.
    pub fn fixture(seed: u64) -> Self {
        Self {
            trend: vec![4.6, 0.002],
            harmonics: vec![
                Harmonic { psi: 0.062, a: 0.065, b: 0.0 },
                Harmonic { psi: 0.153, a: 0.0, b: 0.035 },
                Harmonic { psi: 0.258, a: 0.025, b: 0.0 },
            ],
            seasonal: vec![
                Seasonal { k: 1, c: 0.05, phase: 0.3 },
                Seasonal { k: 2, c: 0.02, phase: 1.1 },
                Seasonal { k: 4, c: 0.01, phase: 0.0 },
            ],
            noise: NoiseSpec {
                ar: 0.5,
                sigma: FIXTURE_SIGMA,
                volatility: vec![1.0, 1.0, 1.1, 1.2, 1.2, 1.1, 0.9, 0.8, 0.9, 1.0, 1.0, 0.8],
            },
            seed,
            exponentiate: true,
        }
    }
}

/// Innovation scale of [`SyntheticSpec::fixture`].
pub const FIXTURE_SIGMA: f64 = 0.005;

/// Standard normal stream: uniforms from a seeded ChaCha8 counter stream
/// mapped through the inverse normal CDF.
pub struct NormalStream {
    rng: ChaCha8Rng,
}

impl NormalStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { rng }
    }

    /// Uniform on the open interval (0, 1) with 53-bit resolution.
    pub fn uniform(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    pub fn normal(&mut self) -> f64 {
        -std::f64::consts::SQRT_2 * statrs::function::erf::erfc_inv(2.0 * self.uniform())
    }
}

/// Generate `n` observations of `spec` starting at `start`, using noise
/// stream 0 of the spec's seed.
pub fn generate(spec: &SyntheticSpec, n: usize, start: YearMonth) -> Result<MonthlySeries> {
    generate_stream(spec, n, start, 0)
}

/// As [`generate`], drawing from noise stream `stream` (one per Monte Carlo
/// replication).
pub fn generate_stream(spec: &SyntheticSpec, n: usize, start: YearMonth, stream: u64) -> Result<MonthlySeries> {
    spec.validate()?;
    if n == 0 {
        return Err(Error::TooShort {
            what: "generation",
            required: 1,
            actual: 0,
        });
    }
    let mut z = NormalStream::new(spec.seed, stream);
    let phi = spec.noise.ar;
    let sigma = spec.noise.sigma;
    let mut eta = 0.0;
    let mut values = Vec::with_capacity(n);
    for t in (1 - BURN_IN as i64)..=(n as i64) {
        let shock = if sigma > 0.0 {
            sigma * spec.volatility_at(t) * z.normal()
        } else {
            0.0
        };
        eta = phi * eta + shock;
        if t >= 1 {
            let v = spec.mean_at(t) + eta;
            values.push(if spec.exponentiate { v.exp() } else { v });
        }
    }
    MonthlySeries::new(start, values, "synthetic")
}

/// Ground-truth record for one harmonic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthHarmonic {
    pub psi: f64,
    pub period_months: f64,
    pub period_years: f64,
    #[serde(with = "crate::report::complex")]
    pub m: ComplexCoeff,
    pub amplitude: f64,
}

/// Sidecar document written next to simulated series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub spec: SyntheticSpec,
    pub n: usize,
    pub start: YearMonth,
    pub harmonics: Vec<TruthHarmonic>,
}

pub fn ground_truth(spec: &SyntheticSpec, n: usize, start: YearMonth) -> Result<GroundTruth> {
    spec.validate()?;
    let harmonics = spec
        .harmonics
        .iter()
        .map(|h| {
            let period = period_of(h.psi)?;
            Ok(TruthHarmonic {
                psi: h.psi,
                period_months: period.months,
                period_years: period.years,
                m: h.coefficient(),
                amplitude: amplitude(h.coefficient()),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GroundTruth {
        spec: spec.clone(),
        n,
        start,
        harmonics,
    })
}

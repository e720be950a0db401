//! Finite two-sided linear filters `L(B) = Σ_{j=-p}^{q} a_j B^j` with
//! `B^j x_t = x_{t-j}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::MonthlySeries;

/// Complex scalar used for Fourier coefficients and transfer values.
pub type ComplexCoeff = Complex64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearFilterSpec {
    pub name: String,
    /// Lag of `coefficients[0]`; always `<= 0`.
    min_lag: i64,
    coefficients: Vec<f64>,
}

impl LinearFilterSpec {
    /// Build from the coefficient on lag `min_lag` upwards. The lag range
    /// must contain 0 and at least one coefficient must be nonzero.
    pub fn new(name: impl Into<String>, min_lag: i64, coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.is_empty() || coefficients.iter().all(|&a| a == 0.0) {
            return Err(Error::invalid("filter needs at least one nonzero coefficient"));
        }
        if coefficients.iter().any(|a| !a.is_finite()) {
            return Err(Error::invalid("filter coefficients must be finite"));
        }
        let max_lag = min_lag + coefficients.len() as i64 - 1;
        if min_lag > 0 || max_lag < 0 {
            return Err(Error::invalid(format!(
                "lag range [{min_lag}, {max_lag}] must contain 0"
            )));
        }
        Ok(Self {
            name: name.into(),
            min_lag,
            coefficients,
        })
    }

    /// Number of leads `p` (negative lags).
    pub fn leads(&self) -> usize {
        (-self.min_lag) as usize
    }

    /// Number of lags `q` (positive lags).
    pub fn lags(&self) -> usize {
        (self.min_lag + self.coefficients.len() as i64 - 1) as usize
    }

    /// `(lag, coefficient)` pairs in ascending lag order.
    pub fn taps(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.coefficients
            .iter()
            .enumerate()
            .map(move |(i, &a)| (self.min_lag + i as i64, a))
    }

    pub fn coefficient(&self, lag: i64) -> f64 {
        let i = lag - self.min_lag;
        if i < 0 {
            return 0.0;
        }
        self.coefficients.get(i as usize).copied().unwrap_or(0.0)
    }

    /// Transfer function `L(e^{-iψ}) = Σ_j a_j e^{-iψj}` by direct summation.
    pub fn transfer(&self, psi: f64) -> ComplexCoeff {
        self.taps()
            .map(|(j, a)| {
                let arg = psi * j as f64;
                Complex64::new(a * arg.cos(), -a * arg.sin())
            })
            .sum()
    }

    /// Filter product `self(B) · other(B)`: convolution of coefficient maps.
    pub fn compose(&self, other: &LinearFilterSpec) -> LinearFilterSpec {
        let mut out = vec![0.0; self.coefficients.len() + other.coefficients.len() - 1];
        for (i, &a) in self.coefficients.iter().enumerate() {
            for (k, &c) in other.coefficients.iter().enumerate() {
                out[i + k] += a * c;
            }
        }
        LinearFilterSpec {
            name: format!("{}*{}", self.name, other.name),
            min_lag: self.min_lag + other.min_lag,
            coefficients: out,
        }
    }

    /// Apply to raw values. Output position `k` (1-based) is
    /// `Σ_j a_j x[k + q - j]`, i.e. input time `k + q`.
    pub fn apply_values(&self, values: &[f64]) -> Result<Vec<f64>> {
        let (p, q) = (self.leads(), self.lags());
        let required = p + q + 1;
        if values.len() < required {
            return Err(Error::TooShort {
                what: "filtering",
                required,
                actual: values.len(),
            });
        }
        let out_len = values.len() - p - q;
        // Input index of tap j for output i (0-based): i + q - j.
        let out = (0..out_len)
            .map(|i| {
                self.taps()
                    .map(|(j, a)| a * values[(i as i64 + q as i64 - j) as usize])
                    .sum()
            })
            .collect();
        Ok(out)
    }
}

/// Centered 2x12 moving average: weights (1, 2, ..., 2, 1)/24 on lags -6..6.
pub fn ma_2x12() -> LinearFilterSpec {
    let mut c = vec![2.0 / 24.0; 13];
    c[0] = 1.0 / 24.0;
    c[12] = 1.0 / 24.0;
    LinearFilterSpec::new("ma2x12", -6, c).expect("static filter is valid")
}

/// `(1 - B)^order`: signed binomial coefficients on lags 0..order.
pub fn difference_filter(order: u32) -> Result<LinearFilterSpec> {
    if order == 0 {
        return Err(Error::invalid(
            "difference order must be >= 1; skip the differencing step instead",
        ));
    }
    let mut c = vec![1.0];
    for _ in 0..order {
        let mut next = vec![0.0; c.len() + 1];
        for (i, &a) in c.iter().enumerate() {
            next[i] += a;
            next[i + 1] -= a;
        }
        c = next;
    }
    LinearFilterSpec::new(format!("diff{order}"), 0, c)
}

/// Filter a monthly series. The output starts `q` months after the input
/// and is `p + q` observations shorter; no padding.
pub fn apply_filter(series: &MonthlySeries, filter: &LinearFilterSpec) -> Result<MonthlySeries> {
    let out = filter.apply_values(series.values())?;
    Ok(series.with_values(series.start.offset(filter.lags() as i64), out))
}

pub fn transfer(filter: &LinearFilterSpec, psi: f64) -> ComplexCoeff {
    filter.transfer(psi)
}

//! Discrete-spectrum estimators for the mean function: Fourier coefficients
//! at arbitrary frequencies, the scan statistic, argmax refinement and the
//! period/amplitude arithmetic built on them.
//!
//! All sums run over absolute 1-based positions `j = c+1 ..= c+d`, so a
//! coefficient computed on a window carries the phase of the full path.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filter::{ComplexCoeff, LinearFilterSpec};
use crate::series::mean;

/// Upper edge of the business-cycle band in radians per month (cycles
/// longer than ~18 months).
pub const BAND_HI: f64 = 0.35;

/// Default grid spacing, π/720 rad/month.
pub const DEFAULT_STEP: f64 = PI / 720.0;

/// Transfer moduli below this are treated as singular in back-out.
pub const SINGULAR_TRANSFER: f64 = 1e-9;

#[inline]
pub(crate) fn twiddle(psi: f64, j: usize) -> (f64, f64) {
    let arg = psi * j as f64;
    (arg.cos(), -arg.sin())
}

fn check_window(len: usize, c: usize, d: usize) -> Result<()> {
    if d == 0 || c + d > len {
        return Err(Error::WindowOutOfBounds {
            start: c + 1,
            end: c + d,
            len,
        });
    }
    Ok(())
}

/// `(1/d) Σ_{j=c+1}^{c+d} (x_j - center) e^{-iψj}` by direct summation.
pub(crate) fn centered_window_coeff(values: &[f64], center: f64, c: usize, d: usize, psi: f64) -> ComplexCoeff {
    let mut re = 0.0;
    let mut im = 0.0;
    for j in (c + 1)..=(c + d) {
        let x = values[j - 1] - center;
        let (cs, sn) = twiddle(psi, j);
        re += x * cs;
        im += x * sn;
    }
    Complex64::new(re / d as f64, im / d as f64)
}

/// Window estimator `m̂^{c,d}(ψ) = (1/d) Σ_{j=c+1}^{c+d} X_j e^{-iψj}`.
pub fn fourier_coeff(values: &[f64], c: usize, d: usize, psi: f64) -> Result<ComplexCoeff> {
    check_window(values.len(), c, d)?;
    Ok(centered_window_coeff(values, 0.0, c, d, psi))
}

/// Demeaned estimator `r̂^{c,d}(ψ)`: as [`fourier_coeff`] on `X_j - X̄`,
/// where `X̄` is always the mean of the whole path, not of the window.
pub fn demeaned_coeff(values: &[f64], c: usize, d: usize, psi: f64) -> Result<ComplexCoeff> {
    check_window(values.len(), c, d)?;
    Ok(centered_window_coeff(values, mean(values), c, d, psi))
}

/// `√n |r̂_n(ψ)|`.
pub fn scan_statistic(values: &[f64], psi: f64) -> Result<f64> {
    let n = values.len();
    if n < 2 {
        return Err(Error::TooShort {
            what: "the scan statistic",
            required: 2,
            actual: n,
        });
    }
    Ok((n as f64).sqrt() * centered_window_coeff(values, mean(values), 0, n, psi).norm())
}

/// Strictly increasing candidate frequencies in `(0, hi)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    pub step: f64,
    pub hi: f64,
    pub points: Vec<f64>,
}

impl FrequencyGrid {
    /// `{k·step : k = 1, 2, ...} ∩ (0, hi)`.
    pub fn new(step: f64, hi: f64) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::invalid(format!("grid step {step} must be positive")));
        }
        if !(hi > step && hi <= BAND_HI) {
            return Err(Error::invalid(format!(
                "band edge {hi} must exceed the step and not exceed {BAND_HI}"
            )));
        }
        let points: Vec<f64> = (1..)
            .map(|k| k as f64 * step)
            .take_while(|&psi| psi < hi)
            .collect();
        Ok(Self { step, hi, points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

impl Default for FrequencyGrid {
    fn default() -> Self {
        Self::new(DEFAULT_STEP, BAND_HI).expect("default grid is valid")
    }
}

/// Which coefficient enters the argmax of the frequency refinement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RefineObjective {
    /// `√n |r̂_n(x)|`, the path demeaned by its full-sample mean.
    #[default]
    Demeaned,
    /// `√n |m̂_n(x)|` on the raw path.
    Raw,
}

impl RefineObjective {
    fn coeff(self, values: &[f64], center: f64, psi: f64) -> ComplexCoeff {
        let c = match self {
            RefineObjective::Demeaned => center,
            RefineObjective::Raw => 0.0,
        };
        centered_window_coeff(values, c, 0, values.len(), psi)
    }
}

const REFINE_SUBGRID: usize = 1000;
const REFINE_TOL: f64 = 1e-8;

/// Frequency estimate `argmax_{x ∈ [lo, hi]} √n |r̂_n(x)|` (or `m̂_n` with
/// [`RefineObjective::Raw`]). Dense sub-grid search followed by
/// golden-section polish around the best sub-grid point; ties go to the
/// smaller frequency. Returns the maximizer and the coefficient there.
pub fn refine_frequency(
    values: &[f64],
    interval: (f64, f64),
    objective: RefineObjective,
) -> Result<(f64, ComplexCoeff)> {
    let (lo, hi) = interval;
    if !(lo > 0.0 && lo < hi && hi <= BAND_HI) {
        return Err(Error::invalid(format!(
            "refinement interval ({lo}, {hi}) must satisfy 0 < lo < hi <= {BAND_HI}"
        )));
    }
    if values.len() < 2 {
        return Err(Error::TooShort {
            what: "frequency refinement",
            required: 2,
            actual: values.len(),
        });
    }
    let center = mean(values);
    let f = |x: f64| objective.coeff(values, center, x).norm();

    let h = (hi - lo) / REFINE_SUBGRID as f64;
    let mut best_x = lo;
    let mut best_v = f(lo);
    for k in 1..=REFINE_SUBGRID {
        let x = if k == REFINE_SUBGRID { hi } else { lo + k as f64 * h };
        let v = f(x);
        if v > best_v {
            best_x = x;
            best_v = v;
        }
    }

    // Golden-section polish on the bracket around the sub-grid maximum.
    let (mut a, mut b) = ((best_x - h).max(lo), (best_x + h).min(hi));
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while b - a > REFINE_TOL {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    let polished = 0.5 * (a + b);
    let polished_v = f(polished);
    let psi = if polished_v > best_v { polished } else { best_x };
    Ok((psi, objective.coeff(values, center, psi)))
}

/// Cycle length for frequency ψ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Period {
    pub months: f64,
    pub years: f64,
}

pub fn period_of(psi: f64) -> Result<Period> {
    if !(psi > 0.0 && psi.is_finite()) {
        return Err(Error::invalid(format!("frequency {psi} must be positive")));
    }
    let months = 2.0 * PI / psi;
    Ok(Period {
        months,
        years: months / 12.0,
    })
}

/// Undo a filter's effect on a Fourier coefficient: `m_P = m_X / L(e^{-iψ})`.
pub fn backout_coefficient(
    coeff_filtered: ComplexCoeff,
    psi: f64,
    composite: &LinearFilterSpec,
) -> Result<ComplexCoeff> {
    let gain = composite.transfer(psi);
    if gain.norm() <= SINGULAR_TRANSFER {
        return Err(Error::SingularTransfer { psi });
    }
    Ok(coeff_filtered / gain)
}

/// Peak-to-trough range of `t ↦ 2 Re[m e^{iψt}]`, i.e. `4 |m|`.
pub fn amplitude(coeff: ComplexCoeff) -> f64 {
    4.0 * coeff.norm()
}

/// One identified cycle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleEstimate {
    pub psi: f64,
    pub period_months: f64,
    pub period_years: f64,
    /// Demeaned coefficient of the filtered series, on the input's clock.
    #[serde(with = "crate::report::complex")]
    pub coeff_filtered: ComplexCoeff,
    /// Coefficient of the input series' mean after back-out.
    #[serde(with = "crate::report::complex")]
    pub coeff_original: ComplexCoeff,
    pub amplitude: f64,
    pub interval: (f64, f64),
    /// `"trend-band"` for periods above eight years, else `"business"`.
    pub band: String,
}

impl CycleEstimate {
    pub fn new(
        psi: f64,
        coeff_filtered: ComplexCoeff,
        coeff_original: ComplexCoeff,
        interval: (f64, f64),
    ) -> Result<Self> {
        let period = period_of(psi)?;
        let band = if period.years > 8.0 { "trend-band" } else { "business" };
        Ok(Self {
            psi,
            period_months: period.months,
            period_years: period.years,
            coeff_filtered,
            coeff_original,
            amplitude: amplitude(coeff_original),
            interval,
            band: band.to_string(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filter::{difference_filter, ma_2x12};

    /// Textbook summation, written independently of the module helpers.
    fn brute(values: &[f64], center: f64, c: usize, d: usize, psi: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in c + 1..=c + d {
            acc += (values[j - 1] - center) * Complex64::from_polar(1.0, -psi * j as f64);
        }
        acc / d as f64
    }

    #[test]
    fn constant_series_at_zero_frequency() {
        let v = vec![2.5; 10];
        let m = fourier_coeff(&v, 0, 10, 0.0).unwrap();
        assert!((m.re - 2.5).abs() < 1e-15 && m.im == 0.0);
        for psi in [0.0, 0.1, 1.3] {
            assert_eq!(demeaned_coeff(&v, 2, 5, psi).unwrap().norm(), 0.0);
        }
        assert_eq!(scan_statistic(&v, 0.2).unwrap(), 0.0);
    }

    #[test]
    fn hand_summed_cosine() {
        // Σ cos²(πt/4) over t=1..8 is 4, cross terms vanish: m̂ = 0.5.
        let v: Vec<f64> = (1..=8).map(|t| (PI * t as f64 / 4.0).cos()).collect();
        let m = fourier_coeff(&v, 0, 8, PI / 4.0).unwrap();
        assert!((m.re - 0.5).abs() < 1e-15, "{m}");
        assert!(m.im.abs() < 1e-15, "{m}");
    }

    #[test]
    fn zero_frequency_gives_mean() {
        let v = [1.0, 4.0, -2.0, 7.5, 0.25];
        let m = fourier_coeff(&v, 0, 5, 0.0).unwrap();
        assert!((m.re - 2.15).abs() < 1e-15);
        assert!(demeaned_coeff(&v, 0, 5, 0.0).unwrap().norm() < 1e-15);
    }

    #[test]
    fn demeaned_window_uses_full_path_mean() {
        // X̄ = 3.5; window j = 3,4,5 holds -0.5, 0.5, 1.5.
        // e^{-iπj/2} for j = 3,4,5 is i, 1, -i:
        // sum = -0.5i + 0.5 - 1.5i = 0.5 - 2i, divided by 3.
        let v = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let r = demeaned_coeff(&v, 2, 3, PI / 2.0).unwrap();
        assert!((r.re - 0.5 / 3.0).abs() < 1e-15, "{r}");
        assert!((r.im + 2.0 / 3.0).abs() < 1e-15, "{r}");
        let b = brute(&v, 3.5, 2, 3, PI / 2.0);
        assert!((r - b).norm() < 1e-15);
    }

    #[test]
    fn window_bounds_are_checked() {
        let v = [1.0; 5];
        assert!(matches!(
            fourier_coeff(&v, 3, 3, 0.1),
            Err(Error::WindowOutOfBounds { .. })
        ));
        assert!(fourier_coeff(&v, 0, 0, 0.1).is_err());
        assert!(scan_statistic(&[1.0], 0.1).is_err());
    }

    #[test]
    fn scan_statistic_matched_and_leakage() {
        let n = 720;
        let psi0 = 0.153;
        let a = 2.0;
        let v: Vec<f64> = (1..=n).map(|t| a * (psi0 * t as f64).cos()).collect();
        let root_n = (n as f64).sqrt();
        let on = scan_statistic(&v, psi0).unwrap();
        assert!((on - root_n * a / 2.0).abs() < 0.02 * root_n * a, "{on}");
        for psi in [0.25, 0.3, 0.34] {
            let off = scan_statistic(&v, psi).unwrap();
            assert!(off < 0.05 * root_n * a, "psi={psi}: {off}");
        }
    }

    #[test]
    fn default_grid_layout() {
        let g = FrequencyGrid::default();
        assert_eq!(g.len(), 80);
        assert!((g.points[0] - PI / 720.0).abs() < 1e-16);
        assert!(*g.points.last().unwrap() < BAND_HI);
        assert!(g.points.windows(2).all(|w| w[0] < w[1]));
        assert!(FrequencyGrid::new(0.0, 0.35).is_err());
        assert!(FrequencyGrid::new(0.01, 0.5).is_err());
    }

    #[test]
    fn refine_single_harmonic() {
        let n = 1800;
        let v: Vec<f64> = (1..=n).map(|t| 0.05 * (0.153 * t as f64).cos() + 1.0).collect();
        let (psi, coeff) = refine_frequency(&v, (0.10, 0.20), RefineObjective::Demeaned).unwrap();
        assert!((psi - 0.153).abs() < 2.0 * PI / n as f64, "{psi}");
        assert!((coeff.norm() - 0.025).abs() < 1e-3);
    }

    #[test]
    fn refine_flat_objective_returns_lo() {
        let v = vec![4.0; 100];
        let (psi, coeff) = refine_frequency(&v, (0.05, 0.3), RefineObjective::Demeaned).unwrap();
        assert_eq!(psi, 0.05);
        assert_eq!(coeff.norm(), 0.0);
    }

    #[test]
    fn refine_ignores_out_of_interval_peak() {
        let n = 900;
        let v: Vec<f64> = (1..=n)
            .map(|t| {
                let t = t as f64;
                0.3 * (0.12 * t).cos() + 1.0 * (0.30 * t + 0.4).cos()
            })
            .collect();
        // Brute-force grid maximum over the interval.
        let brute_best = (0..=15000)
            .map(|k| 0.05 + k as f64 * 1e-5)
            .map(|x| (x, brute(&v, mean(&v), 0, n, x).norm()))
            .fold((0.0, -1.0), |acc, (x, f)| if f > acc.1 { (x, f) } else { acc });
        let (psi, _) = refine_frequency(&v, (0.05, 0.20), RefineObjective::Demeaned).unwrap();
        assert!((psi - brute_best.0).abs() < 2e-5, "{psi} vs {}", brute_best.0);
        assert!((psi - 0.12).abs() < 2.0 * PI / n as f64);
    }

    #[test]
    fn refine_rejects_bad_interval() {
        let v = vec![1.0, 2.0, 3.0];
        assert!(refine_frequency(&v, (0.2, 0.1), RefineObjective::Demeaned).is_err());
        assert!(refine_frequency(&v, (0.0, 0.1), RefineObjective::Demeaned).is_err());
        assert!(refine_frequency(&v, (0.1, 0.5), RefineObjective::Demeaned).is_err());
    }

    #[test]
    fn periods() {
        let p = period_of(0.062).unwrap();
        assert!((p.months - 101.34).abs() < 0.01);
        assert!((8.4..=8.5).contains(&p.years));
        let p = period_of(0.153).unwrap();
        assert!((p.months - 41.07).abs() < 0.01);
        assert!((p.years - 3.4).abs() < 0.05);
        let p = period_of(2.0 * PI / 12.0).unwrap();
        assert!((p.months - 12.0).abs() < 1e-12 && (p.years - 1.0).abs() < 1e-12);
        assert!(period_of(0.0).is_err());
        assert!(period_of(-0.1).is_err());
    }

    #[test]
    fn backout_inverts_transfer() {
        let f = ma_2x12().compose(&difference_filter(1).unwrap());
        let m = Complex64::new(0.025, -0.01);
        let filtered = f.transfer(0.153) * m;
        let back = backout_coefficient(filtered, 0.153, &f).unwrap();
        assert!((back - m).norm() < 1e-15);
        assert!(matches!(
            backout_coefficient(filtered, 2.0 * PI / 12.0, &f),
            Err(Error::SingularTransfer { .. })
        ));
        assert!((amplitude(Complex64::new(0.025, 0.0)) - 0.1).abs() < 1e-15);
    }
}

//! The three-step identification procedure: seasonal removal with the 2x12
//! moving average, polynomial-trend removal by differencing, and the
//! subsampling scan with frequency refinement and amplitude back-out.
//! Cycles are then extracted from the seasonally adjusted stage with the HP
//! filter and dated.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dating::{turning_points, Dating};
use crate::error::{Error, Result};
use crate::filter::{apply_filter, difference_filter, ma_2x12, LinearFilterSpec};
use crate::hp::{cutoff_months, hp_decompose, DEFAULT_LAMBDAS};
use crate::series::{MonthlySeries, YearMonth, PIPELINE_MIN_LEN};
use crate::spectral::{
    backout_coefficient, refine_frequency, CycleEstimate, FrequencyGrid, RefineObjective, BAND_HI,
    DEFAULT_STEP,
};
use crate::subsampling::{default_block_length, scan, SignificanceScan};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub log_transform: bool,
    /// Differencing order `p`; 0 skips the trend step.
    pub trend_order: u32,
    pub gammas: Vec<f64>,
    /// Level used for interval detection; must be one of `gammas`.
    pub scan_gamma: f64,
    pub grid_step: f64,
    pub band_hi: f64,
    pub b_override: Option<usize>,
    pub lambdas: Vec<f64>,
    pub min_phase_months: usize,
    pub refine_objective: RefineObjective,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            log_transform: true,
            trend_order: 1,
            gammas: vec![0.92, 0.95, 0.99],
            scan_gamma: 0.99,
            grid_step: DEFAULT_STEP,
            band_hi: BAND_HI,
            b_override: None,
            lambdas: DEFAULT_LAMBDAS.to_vec(),
            min_phase_months: 9,
            refine_objective: RefineObjective::Demeaned,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.gammas.is_empty() || self.gammas.iter().any(|g| !(*g > 0.0 && *g < 1.0)) {
            return Err(Error::invalid("confidence levels must lie in (0, 1)"));
        }
        if !self.gammas.iter().any(|g| (g - self.scan_gamma).abs() < 1e-12) {
            return Err(Error::invalid(format!(
                "scan level {} is not among the confidence levels",
                self.scan_gamma
            )));
        }
        if self.trend_order > 3 {
            return Err(Error::invalid("trend order must be at most 3"));
        }
        if self.min_phase_months == 0 {
            return Err(Error::invalid("minimum phase length must be at least one month"));
        }
        if self.lambdas.iter().any(|l| !(*l >= 0.0 && l.is_finite())) {
            return Err(Error::invalid("HP lambdas must be nonnegative"));
        }
        self.grid()?;
        Ok(())
    }

    pub fn grid(&self) -> Result<FrequencyGrid> {
        FrequencyGrid::new(self.grid_step, self.band_hi)
    }

    /// `L_p(B) · L_{2x12}(B)`, the single filter mapping the input to the
    /// scanned stage.
    pub fn composite_filter(&self) -> Result<LinearFilterSpec> {
        let ma = ma_2x12();
        Ok(match self.trend_order {
            0 => ma,
            p => ma.compose(&difference_filter(p)?),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub name: String,
    pub start: YearMonth,
    pub values: Vec<f64>,
}

impl Stage {
    fn of(name: &str, s: &MonthlySeries) -> Self {
        Self {
            name: name.to_string(),
            start: s.start,
            values: s.values().to_vec(),
        }
    }
}

/// The `P → Y → X` series of Steps 1–2.
#[derive(Debug, Clone)]
pub struct PreparedSeries {
    /// Input after the optional log transform.
    pub input: MonthlySeries,
    /// Seasonally adjusted.
    pub adjusted: MonthlySeries,
    /// Detrended; the series that is scanned.
    pub detrended: MonthlySeries,
    pub composite: LinearFilterSpec,
}

impl PreparedSeries {
    /// Months from the input's first observation to the scanned stage's.
    pub fn shift(&self) -> i64 {
        self.input.start.months_until(self.detrended.start)
    }
}

pub fn prepare(series: &MonthlySeries, config: &PipelineConfig) -> Result<PreparedSeries> {
    config.validate()?;
    series.require_len("the pipeline", PIPELINE_MIN_LEN)?;
    let input = if config.log_transform {
        series.ln()?
    } else {
        series.clone()
    };
    let adjusted = apply_filter(&input, &ma_2x12())?;
    let detrended = match config.trend_order {
        0 => adjusted.clone(),
        p => apply_filter(&adjusted, &difference_filter(p)?)?,
    };
    let composite = config.composite_filter()?;
    debug_assert_eq!(input.start.months_until(detrended.start), composite.lags() as i64);
    Ok(PreparedSeries {
        input,
        adjusted,
        detrended,
        composite,
    })
}

/// Maximal runs of flagged grid points at level `gamma`, each widened by
/// half a grid step on both sides and clipped to the band.
pub fn detect_intervals(scan: &SignificanceScan, gamma: f64) -> Result<Vec<(f64, f64)>> {
    let flags = scan
        .flags_at(gamma)
        .ok_or_else(|| Error::invalid(format!("level {gamma} was not scanned")))?;
    let half = scan.grid.step / 2.0;
    let mut out = Vec::new();
    let mut run_start: Option<usize> = None;
    for i in 0..=flags.len() {
        let on = i < flags.len() && flags[i];
        match (on, run_start) {
            (true, None) => run_start = Some(i),
            (false, Some(s)) => {
                let lo = (scan.points[s].psi - half).max(f64::MIN_POSITIVE);
                let hi = (scan.points[i - 1].psi + half).min(scan.grid.hi);
                out.push((lo, hi));
                run_start = None;
            }
            _ => {}
        }
    }
    Ok(out)
}

/// Scan, interval detection, refinement and back-out on a prepared series.
#[derive(Debug, Clone)]
pub struct Identification {
    pub scan: SignificanceScan,
    pub intervals: Vec<(f64, f64)>,
    pub cycles: Vec<CycleEstimate>,
}

pub fn identify(prepared: &PreparedSeries, config: &PipelineConfig) -> Result<Identification> {
    let x = prepared.detrended.values();
    let b = match config.b_override {
        Some(b) => b,
        None => default_block_length(x.len())?,
    };
    if b >= x.len() {
        return Err(Error::TooShort {
            what: "the subsampling scan",
            required: b + 1,
            actual: x.len(),
        });
    }
    let scan = scan(x, &config.grid()?, b, &config.gammas)?;
    let intervals = detect_intervals(&scan, config.scan_gamma)?;
    let shift = prepared.shift() as f64;
    let mut cycles = intervals
        .iter()
        .map(|&interval| {
            let (psi, local) = refine_frequency(x, interval, config.refine_objective)?;
            // Re-reference from the scanned stage's clock to the input's.
            let coeff_filtered = local * Complex64::from_polar(1.0, -psi * shift);
            let coeff_original = backout_coefficient(coeff_filtered, psi, &prepared.composite)?;
            CycleEstimate::new(psi, coeff_filtered, coeff_original, interval)
        })
        .collect::<Result<Vec<_>>>()?;
    cycles.sort_by(|a, b| a.psi.total_cmp(&b.psi));
    Ok(Identification {
        scan,
        intervals,
        cycles,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HpExtraction {
    pub lambda: f64,
    /// Cutoff period implied by `lambda`; `None` when `lambda <= 1/16`.
    pub cutoff_months: Option<f64>,
    pub start: YearMonth,
    pub trend: Vec<f64>,
    pub cycle: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool_version: String,
    pub config: PipelineConfig,
    /// SHA-256 over the start month, label and little-endian value bytes.
    pub input_digest: String,
    pub input_start: YearMonth,
    pub input_len: usize,
    pub block_length: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub stages: Vec<Stage>,
    pub scan: SignificanceScan,
    pub intervals: Vec<(f64, f64)>,
    pub cycles: Vec<CycleEstimate>,
    pub hp: Vec<HpExtraction>,
    pub turning_points: Option<Dating>,
    pub provenance: Provenance,
}

pub fn series_digest(series: &MonthlySeries) -> String {
    let mut h = Sha256::new();
    h.update(series.start.to_string().as_bytes());
    h.update(series.label.as_bytes());
    for v in series.values() {
        h.update(v.to_le_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

pub fn run(series: &MonthlySeries, config: &PipelineConfig) -> Result<PipelineReport> {
    let prepared = prepare(series, config)?;
    let found = identify(&prepared, config)?;

    let hp = config
        .lambdas
        .iter()
        .map(|&lambda| {
            let d = hp_decompose(&prepared.adjusted, lambda)?;
            Ok(HpExtraction {
                lambda,
                cutoff_months: cutoff_months(lambda).ok(),
                start: prepared.adjusted.start,
                trend: d.trend,
                cycle: d.cycle,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let turning = hp
        .iter()
        .min_by(|a, b| a.lambda.total_cmp(&b.lambda))
        .map(|h| turning_points(&h.cycle, h.start, config.min_phase_months));

    Ok(PipelineReport {
        stages: vec![
            Stage::of("input", &prepared.input),
            Stage::of("adjusted", &prepared.adjusted),
            Stage::of("detrended", &prepared.detrended),
        ],
        provenance: Provenance {
            tool_version: TOOL_VERSION.to_string(),
            config: config.clone(),
            input_digest: series_digest(series),
            input_start: series.start,
            input_len: series.len(),
            block_length: found.scan.b,
        },
        scan: found.scan,
        intervals: found.intervals,
        cycles: found.cycles,
        hp,
        turning_points: turning,
    })
}

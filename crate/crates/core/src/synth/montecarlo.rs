//! Monte Carlo harness for size, power, coverage and estimator accuracy of
//! the full identification procedure.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pipeline::{identify, prepare, PipelineConfig};
use crate::series::YearMonth;
use crate::spectral::scan_statistic;
use crate::subsampling::{
    confidence_interval, critical_value, default_block_length, subsample_distribution, SubsampleMode,
};
use crate::synth::{generate_stream, SyntheticSpec};

pub const MIN_REPLICATIONS: usize = 50;

/// Outcome of one replication at one target frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetDraw {
    /// Scan statistic exceeded the critical value at the target itself.
    pub rejected: bool,
    /// The confidence interval contained the true `|m_X(ψ)|`.
    pub covered: bool,
    /// Refined frequency of the detected interval containing the target.
    pub psi_hat: Option<f64>,
    /// Backed-out amplitude for that interval.
    pub amplitude: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetSummary {
    pub psi: f64,
    /// `|m_P(ψ)|` of the generator (0 when ψ is not one of its harmonics).
    pub true_modulus: f64,
    /// `|L(e^{-iψ})| |m_P(ψ)|` on the scanned stage.
    pub true_modulus_filtered: f64,
    pub rejection_rate: f64,
    pub rejection_se: f64,
    /// Fraction of replications with a detected interval containing ψ.
    pub interval_rate: f64,
    pub coverage: f64,
    pub coverage_se: f64,
    /// Median `|ψ̂ - ψ|` over replications that detected ψ.
    pub median_abs_freq_error: Option<f64>,
    /// Median `|Â - A| / A` over replications that detected ψ.
    pub median_rel_amplitude_error: Option<f64>,
    pub draws: Vec<TargetDraw>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloResult {
    pub n: usize,
    pub replications: usize,
    pub gamma: f64,
    pub block_length: usize,
    pub targets: Vec<TargetSummary>,
}

pub(crate) fn binomial_se(p: f64, reps: usize) -> f64 {
    (p * (1.0 - p) / reps as f64).sqrt()
}

fn median(mut xs: Vec<f64>) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    xs.sort_by(f64::total_cmp);
    let k = xs.len();
    Some(if k % 2 == 1 {
        xs[k / 2]
    } else {
        0.5 * (xs[k / 2 - 1] + xs[k / 2])
    })
}

/// Run `replications` independent draws of `spec` (noise stream `r` for
/// replication `r`) through the identification procedure of `config` and
/// summarize the tests at each target frequency at level `gamma`.
/// `config.log_transform` should be off unless the spec exponentiates.
pub fn monte_carlo(
    spec: &SyntheticSpec,
    n: usize,
    replications: usize,
    gamma: f64,
    targets: &[f64],
    config: &PipelineConfig,
) -> Result<MonteCarloResult> {
    if replications < MIN_REPLICATIONS {
        return Err(Error::invalid(format!(
            "at least {MIN_REPLICATIONS} replications are required, got {replications}"
        )));
    }
    let mut config = config.clone();
    if !config.gammas.iter().any(|g| (g - gamma).abs() < 1e-12) {
        config.gammas.push(gamma);
    }
    config.scan_gamma = gamma;
    config.validate()?;
    let composite = config.composite_filter()?;
    let truths: Vec<(f64, f64)> = targets
        .iter()
        .map(|&psi| {
            let m = spec
                .harmonics
                .iter()
                .filter(|h| (h.psi - psi).abs() < 1e-12)
                .map(|h| h.coefficient().norm())
                .sum::<f64>();
            (m, m * composite.transfer(psi).norm())
        })
        .collect();
    let start = YearMonth::new(2000, 1)?;

    let per_rep: Vec<(usize, Vec<TargetDraw>)> = (0..replications)
        .into_par_iter()
        .map(|r| {
            let series = generate_stream(spec, n, start, r as u64)?;
            let prepared = prepare(&series, &config)?;
            let x = prepared.detrended.values();
            let b = match config.b_override {
                Some(b) => b,
                None => default_block_length(x.len())?,
            };
            let found = identify(&prepared, &config)?;
            let draws = targets
                .iter()
                .zip(&truths)
                .map(|(&psi, &(_, truth_x))| {
                    let stat = scan_statistic(x, psi)?;
                    let dist = subsample_distribution(x, b, psi, SubsampleMode::Uncentered)?;
                    let rejected = stat > critical_value(&dist, gamma)?;
                    let covered = confidence_interval(x, b, psi, gamma)?.contains(truth_x);
                    let hit = found
                        .cycles
                        .iter()
                        .find(|c| c.interval.0 <= psi && psi <= c.interval.1);
                    Ok(TargetDraw {
                        rejected,
                        covered,
                        psi_hat: hit.map(|c| c.psi),
                        amplitude: hit.map(|c| c.amplitude),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((b, draws))
        })
        .collect::<Result<Vec<_>>>()?;

    let block_length = per_rep.first().map(|(b, _)| *b).unwrap_or(0);
    let reps = replications as f64;
    let summaries = targets
        .iter()
        .enumerate()
        .map(|(k, &psi)| {
            let draws: Vec<TargetDraw> = per_rep.iter().map(|(_, d)| d[k].clone()).collect();
            let rate = |f: fn(&TargetDraw) -> bool| draws.iter().filter(|d| f(d)).count() as f64 / reps;
            let rejection_rate = rate(|d| d.rejected);
            let coverage = rate(|d| d.covered);
            let (true_modulus, true_filtered) = truths[k];
            let true_amp = 4.0 * true_modulus;
            TargetSummary {
                psi,
                true_modulus,
                true_modulus_filtered: true_filtered,
                rejection_rate,
                rejection_se: binomial_se(rejection_rate, replications),
                interval_rate: rate(|d| d.psi_hat.is_some()),
                coverage,
                coverage_se: binomial_se(coverage, replications),
                median_abs_freq_error: median(
                    draws.iter().filter_map(|d| d.psi_hat).map(|p| (p - psi).abs()).collect(),
                ),
                median_rel_amplitude_error: if true_amp > 0.0 {
                    median(
                        draws
                            .iter()
                            .filter_map(|d| d.amplitude)
                            .map(|a| (a - true_amp).abs() / true_amp)
                            .collect(),
                    )
                } else {
                    None
                },
                draws,
            }
        })
        .collect();

    Ok(MonteCarloResult {
        n,
        replications,
        gamma,
        block_length,
        targets: summaries,
    })
}

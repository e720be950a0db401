//! Identification of business-cycle frequencies in monthly series.
//!
//! The mean of the series is modelled as a polynomial trend plus an almost
//! periodic function. After removing seasonality with the centered 2x12
//! moving average and the trend by differencing, candidate frequencies in
//! `(0, 0.35)` rad/month are tested with a subsampling procedure; flagged
//! sub-bands are refined to point estimates and their Fourier coefficients
//! are mapped back to the original series through the filter transfer
//! function. Cycles are extracted with an HP filter whose λ is tied to a
//! cutoff frequency.
//!
//! ```
//! use cyclescope::{pipeline, synth, series::YearMonth};
//!
//! let spec = synth::SyntheticSpec::fixture(7);
//! let series = synth::generate(&spec, 180, YearMonth::new(1995, 1).unwrap()).unwrap();
//! let report = pipeline::run(&series, &pipeline::PipelineConfig::default()).unwrap();
//! assert!(report.cycles.iter().all(|c| c.psi > 0.0 && c.psi < 0.35));
//! ```

pub mod dating;
pub mod error;
pub mod filter;
pub mod hp;
pub mod pipeline;
pub mod report;
pub mod series;
pub mod spectral;
pub mod subsampling;
pub mod synth;
pub mod validate;

pub use error::{Error, Result};
pub use filter::{apply_filter, difference_filter, ma_2x12, ComplexCoeff, LinearFilterSpec};
pub use hp::{cutoff_from_lambda, hp_decompose, lambda_from_cutoff, HpDecomposition};
pub use pipeline::{run, PipelineConfig, PipelineReport};
pub use series::{MonthlySeries, YearMonth};
pub use spectral::{
    backout_coefficient, demeaned_coeff, fourier_coeff, period_of, refine_frequency, scan_statistic,
    CycleEstimate, FrequencyGrid, RefineObjective,
};
pub use subsampling::{
    confidence_interval, critical_value, default_block_length, scan, subsample_distribution,
    SignificanceScan, SubsampleDistribution, SubsampleMode,
};

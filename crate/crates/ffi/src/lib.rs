//! C ABI for cyclescope.
//!
//! Every function returns a [`CsStatus`]; on failure a description is
//! available from [`cs_last_error_message`] on the same thread. Series and
//! reports are opaque handles released with their `_free` functions.
//! Strings returned through out-parameters are released with
//! [`cs_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cyclescope::pipeline::{self, PipelineConfig, PipelineReport};
use cyclescope::report::to_json;
use cyclescope::{hp, spectral, Error, MonthlySeries, YearMonth};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    TooShort = 3,
    NonFinite = 4,
    NonPositive = 5,
    OutOfRange = 6,
    Internal = 7,
    Panic = 8,
}

/// One identified cycle.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CsCycle {
    pub psi: f64,
    pub period_months: f64,
    pub period_years: f64,
    /// Peak-to-trough amplitude on the original scale.
    pub amplitude: f64,
    /// Fourier coefficient on the original scale.
    pub coeff_re: f64,
    pub coeff_im: f64,
    /// Flagged interval the estimate was refined in.
    pub interval_lo: f64,
    pub interval_hi: f64,
}

pub struct CsSeries(MonthlySeries);

pub struct CsReport(PipelineReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Fail(CsStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::TooShort { .. } => CsStatus::TooShort,
            Error::NonFinite { .. } => CsStatus::NonFinite,
            Error::NonPositive { .. } => CsStatus::NonPositive,
            Error::WindowOutOfBounds { .. } => CsStatus::OutOfRange,
            Error::Io(_) | Error::Json(_) => CsStatus::Internal,
            _ => CsStatus::InvalidArgument,
        };
        Fail(status, e.to_string())
    }
}

fn null(name: &str) -> Fail {
    Fail(CsStatus::NullPointer, format!("{name} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> CsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            CsStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".to_string());
            CsStatus::Panic
        }
    }
}

unsafe fn slice<'a>(ptr: *const f64, len: usize, name: &str) -> Result<&'a [f64], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(null(name));
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

unsafe fn write<T>(out: *mut T, value: T, name: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(name));
    }
    out.write(value);
    Ok(())
}

unsafe fn handle<'a, T>(ptr: *const T, name: &str) -> Result<&'a T, Fail> {
    ptr.as_ref().ok_or_else(|| null(name))
}

/// Message of the last failed call on this thread, or null. Valid until
/// the next call on the same thread.
#[no_mangle]
pub extern "C" fn cs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn cs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Create a monthly series starting at `start_year`-`start_month`.
///
/// # Safety
/// `values` must point to `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cs_series_new(
    start_year: i32,
    start_month: u8,
    values: *const f64,
    len: usize,
    out: *mut *mut CsSeries,
) -> CsStatus {
    guard(|| {
        let v = slice(values, len, "values")?.to_vec();
        let start = YearMonth::new(start_year, start_month)?;
        let s = MonthlySeries::new(start, v, "")?;
        write(out, Box::into_raw(Box::new(CsSeries(s))), "out")
    })
}

/// # Safety
/// `series` must be null or a handle from [`cs_series_new`], freed once.
#[no_mangle]
pub unsafe extern "C" fn cs_series_free(series: *mut CsSeries) {
    if !series.is_null() {
        drop(Box::from_raw(series));
    }
}

/// # Safety
/// `series` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cs_series_len(series: *const CsSeries, out: *mut usize) -> CsStatus {
    guard(|| write(out, handle(series, "series")?.0.len(), "out"))
}

/// HP smoothing parameter whose gain is one half at `psi` rad/month.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cs_lambda_from_cutoff(psi: f64, out: *mut f64) -> CsStatus {
    guard(|| write(out, hp::lambda_from_cutoff(psi)?, "out"))
}

/// Inverse of [`cs_lambda_from_cutoff`].
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cs_cutoff_from_lambda(lambda: f64, out: *mut f64) -> CsStatus {
    guard(|| write(out, hp::cutoff_from_lambda(lambda)?, "out"))
}

/// Period in months of frequency `psi` rad/month.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cs_period_months(psi: f64, out: *mut f64) -> CsStatus {
    guard(|| write(out, spectral::period_of(psi)?.months, "out"))
}

/// `√n |r̂_n(ψ)|` of a raw value buffer.
///
/// # Safety
/// `values` must point to `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cs_scan_statistic(
    values: *const f64,
    len: usize,
    psi: f64,
    out: *mut f64,
) -> CsStatus {
    guard(|| {
        let v = slice(values, len, "values")?;
        write(out, spectral::scan_statistic(v, psi)?, "out")
    })
}

/// HP decomposition of `len` values into caller buffers of the same length.
///
/// # Safety
/// `values` must point to `len` doubles; `trend` and `cycle` to `len`
/// writable doubles.
#[no_mangle]
pub unsafe extern "C" fn cs_hp_decompose(
    values: *const f64,
    len: usize,
    lambda: f64,
    trend: *mut f64,
    cycle: *mut f64,
) -> CsStatus {
    guard(|| {
        let v = slice(values, len, "values")?;
        if trend.is_null() || cycle.is_null() {
            return Err(null("trend/cycle"));
        }
        let d = hp::hp_decompose_values(v, lambda)?;
        ptr::copy_nonoverlapping(d.trend.as_ptr(), trend, len);
        ptr::copy_nonoverlapping(d.cycle.as_ptr(), cycle, len);
        Ok(())
    })
}

/// Run the full pipeline. `config_json` is null for defaults or a JSON
/// object whose fields override them (e.g. `{"log_transform": false}`).
///
/// # Safety
/// `series` must be a live handle; `config_json` null or NUL-terminated;
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cs_analyze(
    series: *const CsSeries,
    config_json: *const c_char,
    out: *mut *mut CsReport,
) -> CsStatus {
    guard(|| {
        let s = handle(series, "series")?;
        let config: PipelineConfig = if config_json.is_null() {
            PipelineConfig::default()
        } else {
            let text = CStr::from_ptr(config_json)
                .to_str()
                .map_err(|e| Fail(CsStatus::InvalidArgument, format!("config_json: {e}")))?;
            serde_json::from_str(text)
                .map_err(|e| Fail(CsStatus::InvalidArgument, format!("config_json: {e}")))?
        };
        let report = pipeline::run(&s.0, &config)?;
        write(out, Box::into_raw(Box::new(CsReport(report))), "out")
    })
}

/// # Safety
/// `report` must be null or a handle from [`cs_analyze`], freed once.
#[no_mangle]
pub unsafe extern "C" fn cs_report_free(report: *mut CsReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// # Safety
/// `report` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cs_report_block_length(report: *const CsReport, out: *mut usize) -> CsStatus {
    guard(|| write(out, handle(report, "report")?.0.provenance.block_length, "out"))
}

/// # Safety
/// `report` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cs_report_cycle_count(report: *const CsReport, out: *mut usize) -> CsStatus {
    guard(|| write(out, handle(report, "report")?.0.cycles.len(), "out"))
}

/// # Safety
/// `report` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cs_report_cycle(
    report: *const CsReport,
    index: usize,
    out: *mut CsCycle,
) -> CsStatus {
    guard(|| {
        let r = handle(report, "report")?;
        let c = r.0.cycles.get(index).ok_or_else(|| {
            Fail(
                CsStatus::OutOfRange,
                format!("cycle {index} of {}", r.0.cycles.len()),
            )
        })?;
        let cycle = CsCycle {
            psi: c.psi,
            period_months: c.period_months,
            period_years: c.period_years,
            amplitude: c.amplitude,
            coeff_re: c.coeff_original.re,
            coeff_im: c.coeff_original.im,
            interval_lo: c.interval.0,
            interval_hi: c.interval.1,
        };
        write(out, cycle, "out")
    })
}

/// Full report as pretty JSON; release with [`cs_string_free`].
///
/// # Safety
/// `report` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cs_report_json(report: *const CsReport, out: *mut *mut c_char) -> CsStatus {
    guard(|| {
        let json = to_json(&handle(report, "report")?.0)?;
        let c = CString::new(json).map_err(|e| Fail(CsStatus::Internal, e.to_string()))?;
        write(out, c.into_raw(), "out")
    })
}

use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use cyclescope::series::YearMonth;
use cyclescope::synth::{generate, SyntheticSpec};
use cyclescope_ffi::*;

fn last_error() -> String {
    let p = cs_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn fixture_values() -> Vec<f64> {
    let s = generate(&SyntheticSpec::fixture(7), 180, YearMonth::new(1995, 1).unwrap()).unwrap();
    s.values().to_vec()
}

#[test]
fn lambda_round_trip() {
    let mut lambda = 0.0;
    let mut psi = 0.0;
    unsafe {
        assert_eq!(cs_lambda_from_cutoff(2.0 * std::f64::consts::PI / 96.0, &mut lambda), CsStatus::Ok);
        assert_eq!(cs_cutoff_from_lambda(lambda, &mut psi), CsStatus::Ok);
    }
    assert!((psi - 2.0 * std::f64::consts::PI / 96.0).abs() < 1e-12);
    let mut months = 0.0;
    assert_eq!(unsafe { cs_period_months(0.153, &mut months) }, CsStatus::Ok);
    assert!((months - 41.07).abs() < 0.01);
}

#[test]
fn errors_carry_status_and_message() {
    let mut out = 0.0;
    assert_eq!(unsafe { cs_cutoff_from_lambda(-1.0, &mut out) }, CsStatus::InvalidArgument);
    assert!(!last_error().is_empty());
    assert_eq!(unsafe { cs_period_months(0.1, ptr::null_mut()) }, CsStatus::NullPointer);
    assert!(last_error().contains("out"));

    let bad = [1.0, f64::NAN, 2.0];
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { cs_series_new(2000, 1, bad.as_ptr(), 3, &mut s) }, CsStatus::NonFinite);
    assert!(s.is_null());
    assert_eq!(unsafe { cs_series_new(2000, 13, bad.as_ptr(), 1, &mut s) }, CsStatus::InvalidArgument);

    let short = [1.0; 20];
    assert_eq!(unsafe { cs_series_new(2000, 1, short.as_ptr(), 20, &mut s) }, CsStatus::Ok);
    let mut report = ptr::null_mut();
    assert_eq!(unsafe { cs_analyze(s, ptr::null(), &mut report) }, CsStatus::TooShort);
    let cfg = CString::new("{\"log_transform\": 3}").unwrap();
    assert_eq!(unsafe { cs_analyze(s, cfg.as_ptr(), &mut report) }, CsStatus::InvalidArgument);
    unsafe { cs_series_free(s) };
}

#[test]
fn hp_into_caller_buffers() {
    let x: Vec<f64> = (0..100).map(|t| (t as f64 * 0.3).sin() + 0.01 * t as f64).collect();
    let mut trend = vec![0.0; 100];
    let mut cycle = vec![0.0; 100];
    let st = unsafe { cs_hp_decompose(x.as_ptr(), 100, 1600.0, trend.as_mut_ptr(), cycle.as_mut_ptr()) };
    assert_eq!(st, CsStatus::Ok);
    let d = cyclescope::hp::hp_decompose_values(&x, 1600.0).unwrap();
    assert_eq!(trend, d.trend);
    assert_eq!(cycle, d.cycle);
}

#[test]
fn analyze_matches_library() {
    let values = fixture_values();
    let mut s = ptr::null_mut();
    let mut report = ptr::null_mut();
    unsafe {
        assert_eq!(cs_series_new(1995, 1, values.as_ptr(), values.len(), &mut s), CsStatus::Ok);
        let mut len = 0;
        assert_eq!(cs_series_len(s, &mut len), CsStatus::Ok);
        assert_eq!(len, 180);
        assert_eq!(cs_analyze(s, ptr::null(), &mut report), CsStatus::Ok);
    }
    let series = cyclescope::MonthlySeries::new(YearMonth::new(1995, 1).unwrap(), values, "").unwrap();
    let lib = cyclescope::run(&series, &cyclescope::PipelineConfig::default()).unwrap();

    let mut count = 0;
    let mut b = 0;
    unsafe {
        assert_eq!(cs_report_cycle_count(report, &mut count), CsStatus::Ok);
        assert_eq!(cs_report_block_length(report, &mut b), CsStatus::Ok);
    }
    assert_eq!(count, lib.cycles.len());
    assert_eq!(b, lib.provenance.block_length);
    for (k, c) in lib.cycles.iter().enumerate() {
        let mut out = CsCycle::default();
        assert_eq!(unsafe { cs_report_cycle(report, k, &mut out) }, CsStatus::Ok);
        assert_eq!(out.psi, c.psi);
        assert_eq!(out.amplitude, c.amplitude);
        assert_eq!((out.coeff_re, out.coeff_im), (c.coeff_original.re, c.coeff_original.im));
    }
    let mut out = CsCycle::default();
    assert_eq!(unsafe { cs_report_cycle(report, count, &mut out) }, CsStatus::OutOfRange);

    let mut json = ptr::null_mut();
    assert_eq!(unsafe { cs_report_json(report, &mut json) }, CsStatus::Ok);
    let text = unsafe { CStr::from_ptr(json) }.to_str().unwrap().to_owned();
    assert_eq!(text, cyclescope::report::to_json(&lib).unwrap());
    unsafe {
        cs_string_free(json);
        cs_report_free(report);
        cs_series_free(s);
    }
}

#[test]
fn version_is_package_version() {
    let v = unsafe { CStr::from_ptr(cs_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include").join("cyclescope.h")
}

#[test]
fn header_declares_api() {
    let text = std::fs::read_to_string(header()).unwrap();
    for name in [
        "cs_last_error_message",
        "cs_series_new",
        "cs_series_free",
        "cs_analyze",
        "cs_report_cycle",
        "cs_report_json",
        "cs_hp_decompose",
        "cs_lambda_from_cutoff",
        "CS_STATUS_OK",
        "typedef struct CsReport CsReport",
    ] {
        assert!(text.contains(name), "{name}");
    }
}

const C_PROGRAM: &str = r#"
#include <stdio.h>
#include "cyclescope.h"

int main(void) {
    double lambda = 0.0;
    if (cs_lambda_from_cutoff(0.0654, &lambda) != CS_STATUS_OK) return 1;
    double out;
    if (cs_cutoff_from_lambda(-1.0, &out) != CS_STATUS_INVALID_ARGUMENT) return 2;
    if (cs_last_error_message() == NULL) return 3;
    printf("%.6f\n", lambda);
    return 0;
}
"#;

#[test]
fn header_compiles_as_c() {
    let Ok(cc) = which_cc() else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let include = header().parent().unwrap().to_path_buf();
    let status = Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(&include)
        .arg(&src)
        .status()
        .unwrap();
    assert!(status.success());

    // Link and run against the static library when it sits next to the test binary.
    let exe = std::env::current_exe().unwrap();
    let lib = exe.parent().and_then(Path::parent).map(|d| d.join("libcyclescope_ffi.a"));
    let Some(lib) = lib.filter(|p| p.exists()) else {
        return;
    };
    let bin = dir.path().join("smoke");
    let status = Command::new(&cc)
        .arg("-I")
        .arg(&include)
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success());
    let run = Command::new(&bin).output().unwrap();
    assert!(run.status.success(), "{run:?}");
    let printed: f64 = String::from_utf8(run.stdout).unwrap().trim().parse().unwrap();
    let expected = cyclescope::hp::lambda_from_cutoff(0.0654).unwrap();
    assert!((printed - expected).abs() < 1e-6 * expected);
}

fn which_cc() -> Result<String, ()> {
    ["cc", "gcc", "clang"]
        .iter()
        .find(|c| Command::new(c).arg("--version").output().is_ok_and(|o| o.status.success()))
        .map(|c| c.to_string())
        .ok_or(())
}

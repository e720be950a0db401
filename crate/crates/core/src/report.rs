//! File formats: series CSV ingestion, plot/decomposition CSV exports and
//! JSON documents.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::hp::HpDecomposition;
use crate::pipeline::PipelineReport;
use crate::series::{MonthlySeries, YearMonth};
use crate::subsampling::SignificanceScan;

/// Complex numbers as `{re, im, modulus, arg}` objects.
pub mod complex {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize)]
    struct Out {
        re: f64,
        im: f64,
        modulus: f64,
        arg: f64,
    }

    #[derive(Deserialize)]
    struct In {
        re: f64,
        im: f64,
    }

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        Out {
            re: z.re,
            im: z.im,
            modulus: z.norm(),
            arg: z.arg(),
        }
        .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let v = In::deserialize(d)?;
        Ok(Complex64::new(v.re, v.im))
    }
}

/// Parse a `date,value` CSV with a header row and strictly consecutive
/// `YYYY-MM` months.
pub fn read_series_csv(text: &str, label: &str) -> Result<MonthlySeries> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = rdr.headers().map_err(|e| Error::Csv {
        line: 1,
        message: e.to_string(),
    })?;
    let cols: Vec<String> = headers.iter().map(|h| h.to_ascii_lowercase()).collect();
    if cols != ["date", "value"] {
        return Err(Error::Csv {
            line: 1,
            message: format!("expected header 'date,value', found '{}'", cols.join(",")),
        });
    }
    let mut start: Option<YearMonth> = None;
    let mut values = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Csv {
            line: e.position().map(|p| p.line() as usize).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        if rec.len() != 2 {
            return Err(Error::Csv {
                line,
                message: format!("expected 2 columns, found {}", rec.len()),
            });
        }
        let date: YearMonth = rec[0].parse().map_err(|e: Error| Error::Csv {
            line,
            message: format!("column 'date': {e}"),
        })?;
        let value: f64 = rec[1].parse().map_err(|_| Error::Csv {
            line,
            message: format!("column 'value': '{}' is not a number", &rec[1]),
        })?;
        if !value.is_finite() {
            return Err(Error::Csv {
                line,
                message: format!("column 'value': '{}' is not finite", &rec[1]),
            });
        }
        match start {
            None => start = Some(date),
            Some(s) => {
                let expected = s.offset(values.len() as i64);
                if date > expected {
                    return Err(Error::MissingMonth {
                        line,
                        expected,
                        found: date,
                    });
                }
                if date != expected {
                    return Err(Error::Csv {
                        line,
                        message: format!("month {date} is out of order; expected {expected}"),
                    });
                }
            }
        }
        values.push(value);
    }
    let start = start.ok_or_else(|| Error::Csv {
        line: 2,
        message: "no data rows".to_string(),
    })?;
    MonthlySeries::new(start, values, label)
}

pub fn read_series_file(path: &Path) -> Result<MonthlySeries> {
    let text = fs::read_to_string(path)?;
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    read_series_csv(&text, &label)
}

pub fn series_csv(series: &MonthlySeries) -> String {
    let mut out = String::from("date,value\n");
    for (j, v) in series.values().iter().enumerate() {
        let _ = writeln!(out, "{},{}", series.date_of(j + 1), v);
    }
    out
}

fn level_label(gamma: f64) -> String {
    format!("{gamma}")
}

fn lambda_label(lambda: f64) -> String {
    format!("{lambda}")
}

/// Scan curve with one critical and one flag column per level.
pub fn scan_csv(scan: &SignificanceScan) -> String {
    let mut out = String::from("psi,period_months,statistic");
    for g in &scan.gammas {
        let _ = write!(out, ",critical_{}", level_label(*g));
    }
    for g in &scan.gammas {
        let _ = write!(out, ",flag_{}", level_label(*g));
    }
    out.push('\n');
    for p in &scan.points {
        let _ = write!(out, "{},{},{}", p.psi, p.period_months, p.statistic);
        for c in &p.critical {
            let _ = write!(out, ",{c}");
        }
        for f in &p.flags {
            let _ = write!(out, ",{}", u8::from(*f));
        }
        out.push('\n');
    }
    out
}

/// `date,input,trend_λ,cycle_λ,...`; every decomposition must match the
/// input length.
pub fn decomposition_csv(input: &MonthlySeries, parts: &[HpDecomposition]) -> String {
    let mut out = String::from("date,input");
    for d in parts {
        let l = lambda_label(d.lambda);
        let _ = write!(out, ",trend_{l},cycle_{l}");
    }
    out.push('\n');
    for (j, x) in input.values().iter().enumerate() {
        let _ = write!(out, "{},{}", input.date_of(j + 1), x);
        for d in parts {
            let _ = write!(out, ",{},{}", d.trend[j], d.cycle[j]);
        }
        out.push('\n');
    }
    out
}

/// Stage traces aligned on the input calendar; blanks where a stage has no
/// observation.
pub fn stages_csv(report: &PipelineReport) -> String {
    let mut out = String::from("date");
    for s in &report.stages {
        let _ = write!(out, ",{}", s.name);
    }
    out.push('\n');
    let first = &report.stages[0];
    for j in 0..first.values.len() {
        let date = first.start.offset(j as i64);
        let _ = write!(out, "{date}");
        for s in &report.stages {
            let k = s.start.months_until(date);
            out.push(',');
            if k >= 0 && (k as usize) < s.values.len() {
                let _ = write!(out, "{}", s.values[k as usize]);
            }
        }
        out.push('\n');
    }
    out
}

/// Extracted cycles per λ on the seasonally adjusted calendar.
pub fn hp_cycles_csv(report: &PipelineReport) -> String {
    let Some(first) = report.hp.first() else {
        return String::from("date\n");
    };
    let mut out = String::from("date");
    for h in &report.hp {
        let _ = write!(out, ",cycle_{}", lambda_label(h.lambda));
    }
    out.push('\n');
    for j in 0..first.cycle.len() {
        let _ = write!(out, "{}", first.start.offset(j as i64));
        for h in &report.hp {
            let _ = write!(out, ",{}", h.cycle[j]);
        }
        out.push('\n');
    }
    out
}

pub fn to_json<T: serde::Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Write through a temporary file in the same directory, then rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_consecutive_months() {
        let s = read_series_csv("date,value\n1995-11,1.5\n1995-12,2\n1996-01,3.25\n", "x").unwrap();
        assert_eq!(s.values(), &[1.5, 2.0, 3.25]);
        assert_eq!(s.start.to_string(), "1995-11");
        assert_eq!(s.label, "x");
        assert_eq!(series_csv(&s), "date,value\n1995-11,1.5\n1995-12,2\n1996-01,3.25\n");
    }

    #[test]
    fn gap_names_first_missing_month() {
        let err = read_series_csv("date,value\n2001-01,1\n2001-02,1\n2001-04,1\n", "").unwrap_err();
        match err {
            Error::MissingMonth { line, expected, .. } => {
                assert_eq!(line, 4);
                assert_eq!(expected.to_string(), "2001-03");
            }
            other => panic!("{other:?}"),
        }
        assert!(err_text("date,value\n2001-02,1\n2001-01,1\n").contains("out of order"));
    }

    fn err_text(csv: &str) -> String {
        read_series_csv(csv, "").unwrap_err().to_string()
    }

    #[test]
    fn malformed_rows_report_line_and_column() {
        assert!(err_text("when,value\n2001-01,1\n").contains("header"));
        let e = err_text("date,value\n2001-01,1\n2001-02,abc\n");
        assert!(e.contains("line 3") && e.contains("'value'"), "{e}");
        let e = err_text("date,value\n2001-1,1\n");
        assert!(e.contains("line 2") && e.contains("'date'"), "{e}");
        let e = err_text("date,value\n2001-01,1,5\n");
        assert!(e.contains("line 2"), "{e}");
        assert!(err_text("date,value\n").contains("no data"));
        assert!(err_text("date,value\n2001-01,NaN\n").contains("finite"));
    }

    #[test]
    fn decomposition_header() {
        let s = read_series_csv("date,value\n2001-01,1\n2001-02,2\n", "").unwrap();
        let d = HpDecomposition {
            lambda: 5500.0,
            trend: vec![1.0, 2.0],
            cycle: vec![0.0, 0.0],
        };
        let text = decomposition_csv(&s, &[d]);
        assert!(text.starts_with("date,input,trend_5500,cycle_5500\n2001-01,1,1,0\n"));
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "two");
    }
}

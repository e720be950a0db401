//! Monthly series container.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Minimum length accepted by the pipeline entry points: two 2x12 edge
/// losses plus a usable interior.
pub const PIPELINE_MIN_LEN: usize = 49;

/// A calendar month.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct YearMonth {
    pub year: i32,
    /// 1..=12
    pub month: u8,
}

impl YearMonth {
    pub fn new(year: i32, month: u8) -> Result<Self> {
        if !(1..=12).contains(&month) {
            return Err(Error::invalid(format!("month {month} outside 1..12")));
        }
        Ok(Self { year, month })
    }

    fn ordinal(self) -> i64 {
        self.year as i64 * 12 + (self.month as i64 - 1)
    }

    fn from_ordinal(ord: i64) -> Self {
        Self {
            year: ord.div_euclid(12) as i32,
            month: (ord.rem_euclid(12) + 1) as u8,
        }
    }

    /// The month `k` months later (or earlier for negative `k`).
    pub fn offset(self, k: i64) -> Self {
        Self::from_ordinal(self.ordinal() + k)
    }

    pub fn months_until(self, later: YearMonth) -> i64 {
        later.ordinal() - self.ordinal()
    }
}

impl fmt::Display for YearMonth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

impl FromStr for YearMonth {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::invalid(format!("date '{s}' is not in YYYY-MM format"));
        let (y, m) = s.split_once('-').ok_or_else(bad)?;
        if y.len() != 4 || m.len() != 2 {
            return Err(bad());
        }
        let year: i32 = y.parse().map_err(|_| bad())?;
        let month: u8 = m.parse().map_err(|_| bad())?;
        YearMonth::new(year, month)
    }
}

impl Serialize for YearMonth {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for YearMonth {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Contiguous monthly observations. Position `j` (1-based) is month
/// `start + (j - 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonthlySeries {
    pub start: YearMonth,
    values: Vec<f64>,
    #[serde(default)]
    pub label: String,
}

impl MonthlySeries {
    pub fn new(start: YearMonth, values: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::TooShort {
                what: "a series",
                required: 1,
                actual: 0,
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index: i + 1 });
        }
        Ok(Self {
            start,
            values,
            label: label.into(),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Calendar month of 1-based position `j`.
    pub fn date_of(&self, j: usize) -> YearMonth {
        self.start.offset(j as i64 - 1)
    }

    pub fn end(&self) -> YearMonth {
        self.date_of(self.len())
    }

    pub fn require_len(&self, what: &'static str, required: usize) -> Result<()> {
        if self.len() < required {
            return Err(Error::TooShort {
                what,
                required,
                actual: self.len(),
            });
        }
        Ok(())
    }

    /// Natural log of every value; all values must be strictly positive.
    pub fn ln(&self) -> Result<Self> {
        if let Some((i, &v)) = self.values.iter().enumerate().find(|(_, v)| **v <= 0.0) {
            return Err(Error::NonPositive {
                index: i + 1,
                value: v,
            });
        }
        Ok(Self {
            start: self.start,
            values: self.values.iter().map(|v| v.ln()).collect(),
            label: self.label.clone(),
        })
    }

    /// Same calendar, new values. Used internally for derived series that
    /// keep finiteness by construction.
    pub(crate) fn with_values(&self, start: YearMonth, values: Vec<f64>) -> Self {
        debug_assert!(values.iter().all(|v| v.is_finite()));
        Self {
            start,
            values,
            label: self.label.clone(),
        }
    }

    pub fn mean(&self) -> f64 {
        mean(&self.values)
    }
}

pub(crate) fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn month_arithmetic_wraps_years() {
        let ym = YearMonth::new(1995, 11).unwrap();
        assert_eq!(ym.offset(2).to_string(), "1996-01");
        assert_eq!(ym.offset(-11).to_string(), "1994-12");
        assert_eq!(ym.months_until(ym.offset(37)), 37);
    }

    #[test]
    fn parse_rejects_malformed_dates() {
        assert!("1995-1".parse::<YearMonth>().is_err());
        assert!("1995-13".parse::<YearMonth>().is_err());
        assert!("95-01".parse::<YearMonth>().is_err());
        assert_eq!("2009-12".parse::<YearMonth>().unwrap(), YearMonth::new(2009, 12).unwrap());
    }

    #[test]
    fn rejects_nan_and_empty() {
        let start = YearMonth::new(2000, 1).unwrap();
        assert!(matches!(
            MonthlySeries::new(start, vec![1.0, f64::NAN], ""),
            Err(Error::NonFinite { index: 2 })
        ));
        assert!(MonthlySeries::new(start, vec![], "").is_err());
    }

    #[test]
    fn log_requires_positive_values() {
        let start = YearMonth::new(2000, 1).unwrap();
        let s = MonthlySeries::new(start, vec![1.0, 0.0], "").unwrap();
        assert!(matches!(s.ln(), Err(Error::NonPositive { index: 2, .. })));
    }
}

//! Run summaries: curve medians, slope estimates and pass/fail checks,
//! written as TOML with a format version header.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::experiment::curve;
use crate::record::write_file;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSummary {
    pub field: String,
    pub median: Vec<f64>,
    pub q25: Vec<f64>,
    pub q75: Vec<f64>,
    /// Log-log slope of the medians against `n`; absent when the medians are
    /// degenerate (see `note`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slope: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CurveSummary {
    /// `per_trial[t][i]` is the value of trial `t` at schedule entry `i`.
    pub fn new(field: &str, schedule: &[usize], per_trial: &[Vec<f64>]) -> Result<Self> {
        let stats = curve(per_trial)?;
        let median: Vec<f64> = stats.iter().map(|s| s[0]).collect();
        let ns: Vec<f64> = schedule.iter().map(|&n| n as f64).collect();
        let (slope, note) = match monolab_core::stats::log_log_slope(&ns, &median) {
            Ok(s) => (Some(s), None),
            Err(e) => (None, Some(e.to_string())),
        };
        Ok(CurveSummary {
            field: field.to_string(),
            q25: stats.iter().map(|s| s[1]).collect(),
            q75: stats.iter().map(|s| s[2]).collect(),
            median,
            slope,
            note,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub limit: f64,
}

impl Check {
    /// `value <= limit`.
    pub fn at_most(name: &str, value: f64, limit: f64) -> Check {
        Check { name: name.to_string(), passed: value <= limit, value, limit }
    }

    /// Number of steps along `medians` that fail to decrease strictly;
    /// steps between two zero medians do not count.
    pub fn inversions(name: &str, medians: &[f64], allowed: usize) -> Check {
        let count = medians.windows(2).filter(|w| w[1] >= w[0] && w[0] > 0.0).count();
        Check::at_most(name, count as f64, allowed as f64)
    }

    /// `last / first <= limit`, with `0 / 0` read as 0.
    pub fn ratio(name: &str, medians: &[f64], limit: f64) -> Check {
        let (first, last) = (medians[0], medians[medians.len() - 1]);
        let value = if first > 0.0 {
            last / first
        } else if last == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        Check::at_most(name, value, limit)
    }

    pub fn within(name: &str, value: Option<f64>, band: [f64; 2]) -> Check {
        let v = value.unwrap_or(f64::NAN);
        Check { name: name.to_string(), passed: v >= band[0] && v <= band[1], value: v, limit: band[1] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub format_version: u32,
    pub command: String,
    pub name: String,
    pub seed: u64,
    pub trials: usize,
    pub n_schedule: Vec<usize>,
    pub failed_rows: usize,
    pub curves: Vec<CurveSummary>,
    pub checks: Vec<Check>,
}

impl Summary {
    pub fn new(command: &str, name: &str, seed: u64, trials: usize, n_schedule: &[usize]) -> Self {
        Summary {
            format_version: FORMAT_VERSION,
            command: command.to_string(),
            name: name.to_string(),
            seed,
            trials,
            n_schedule: n_schedule.to_vec(),
            failed_rows: 0,
            curves: Vec::new(),
            checks: Vec::new(),
        }
    }

    pub fn curve(&self, field: &str) -> Option<&CurveSummary> {
        self.curves.iter().find(|c| c.field == field)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed_checks(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| LabError::Config(e.to_string()))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_file(path, self.to_toml()?.as_bytes())
    }

    pub fn read(path: &Path) -> Result<Summary> {
        let text = std::fs::read_to_string(path).map_err(LabError::io(path))?;
        toml::from_str(&text).map_err(|e| LabError::Config(e.to_string()))
    }

    /// `Ok` when every check passed and the row budget held.
    pub fn verdict(&self, max_failed_rows: usize) -> Result<()> {
        if self.failed_rows > max_failed_rows {
            return Err(LabError::RowBudget { failed: self.failed_rows, budget: max_failed_rows });
        }
        let failed = self.failed_checks();
        if failed.is_empty() {
            Ok(())
        } else {
            let names: Vec<String> =
                failed.iter().map(|c| format!("{} ({} > {})", c.name, c.value, c.limit)).collect();
            Err(LabError::Acceptance(names.join(", ")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checks() {
        assert!(Check::inversions("d", &[4.0, 3.0, 3.5, 1.0], 1).passed);
        assert!(!Check::inversions("d", &[4.0, 4.0, 3.5, 3.6], 1).passed);
        assert!(Check::inversions("d", &[0.0, 0.0, 0.0], 0).passed);
        assert!(Check::ratio("r", &[0.0, 0.0], 0.05).passed);
        assert!(!Check::ratio("r", &[1.0, 0.1], 0.05).passed);
        assert!(!Check::within("s", None, [-1.0, 0.0]).passed);
    }

    #[test]
    fn round_trip() {
        let mut s = Summary::new("run-lln", "q", 7, 2, &[10, 100, 1000]);
        s.curves.push(CurveSummary::new("r", &[10, 100, 1000], &[vec![1.0, 0.1, 0.01], vec![1.0, 0.1, 0.01]]).unwrap());
        s.checks.push(Check::at_most("c", 0.5, 1.0));
        assert!((s.curves[0].slope.unwrap() + 1.0).abs() < 1e-12);
        let back: Summary = toml::from_str(&s.to_toml().unwrap()).unwrap();
        assert_eq!(back, s);
    }
}

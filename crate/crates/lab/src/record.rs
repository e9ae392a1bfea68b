//! Experiment rows and their CSV form.
//!
//! Columns: `trial, n, probe_0 .. probe_{K-1}, r_distance, zero_error,
//! certificate, certificate_bound, iterations, residual, wall_time, converged, cross_check,
//! prefix_digest`. Missing values are written as `NA`. Floats use the
//! shortest representation that reads back to the same value, so files are
//! byte-stable for a given config.

use std::io::Write;
use std::path::Path;

use crate::error::{LabError, Result};

pub const NA: &str = "NA";

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRecord {
    pub trial: usize,
    pub n: usize,
    /// `‖J_{Ā_n}(x_k) - J_𝒜(x_k)‖` per probe.
    pub per_probe_error: Vec<f64>,
    pub r_distance: f64,
    /// `dist(x_n, Z(𝒜))` for zero tracking runs.
    pub zero_error: Option<f64>,
    /// `‖x_n - J_𝒜(x_n)‖` for zero tracking runs.
    pub certificate: Option<f64>,
    /// `‖J_𝒜(x_n) - J_{Ā_n}(x_n)‖ + ‖x_n - J_{Ā_n}(x_n)‖`, the triangle
    /// inequality bound on `certificate`.
    pub certificate_bound: Option<f64>,
    pub iterations: usize,
    pub residual: f64,
    pub wall_time: Option<f64>,
    pub converged: bool,
    /// Largest gap between the splitting and the closed-form mean resolvent.
    pub cross_check: Option<f64>,
    /// Hash of the draws `1..=n` of this trial.
    pub prefix_digest: u64,
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| NA.to_string(), |x| x.to_string())
}

pub fn header(probes: usize) -> Vec<String> {
    let mut h = vec!["trial".to_string(), "n".to_string()];
    h.extend((0..probes).map(|k| format!("probe_{k}")));
    for c in [
        "r_distance",
        "zero_error",
        "certificate",
        "certificate_bound",
        "iterations",
        "residual",
        "wall_time",
        "converged",
        "cross_check",
        "prefix_digest",
    ] {
        h.push(c.to_string());
    }
    h
}

impl ConvergenceRecord {
    fn fields(&self) -> Vec<String> {
        let mut f = vec![self.trial.to_string(), self.n.to_string()];
        f.extend(self.per_probe_error.iter().map(f64::to_string));
        f.push(self.r_distance.to_string());
        f.push(opt(self.zero_error));
        f.push(opt(self.certificate));
        f.push(opt(self.certificate_bound));
        f.push(self.iterations.to_string());
        f.push(self.residual.to_string());
        f.push(opt(self.wall_time));
        f.push(self.converged.to_string());
        f.push(opt(self.cross_check));
        f.push(format!("{:016x}", self.prefix_digest));
        f
    }
}

/// Writes records sorted by `(trial, n)`.
pub fn write_records(path: &Path, records: &[ConvergenceRecord]) -> Result<()> {
    let probes = records.first().map_or(0, |r| r.per_probe_error.len());
    let mut sorted: Vec<&ConvergenceRecord> = records.iter().collect();
    sorted.sort_by_key(|r| (r.trial, r.n));
    let mut out = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| LabError::MalformedCsv { path: path.to_path_buf(), reason: e.to_string() };
    out.write_record(header(probes)).map_err(csv_err)?;
    for r in sorted {
        out.write_record(r.fields()).map_err(csv_err)?;
    }
    let bytes = out.into_inner().map_err(|e| LabError::MalformedCsv {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    write_file(path, &bytes)
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir).map_err(LabError::io(dir))?;
        }
    }
    let mut f = std::fs::File::create(path).map_err(LabError::io(path))?;
    f.write_all(bytes).map_err(LabError::io(path))
}

/// A CSV read back as named numeric columns (`NA` becomes `None`).
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Table {
    pub fn read(path: &Path) -> Result<Table> {
        let malformed = |reason: String| LabError::MalformedCsv { path: path.to_path_buf(), reason };
        let bytes = std::fs::read(path).map_err(LabError::io(path))?;
        let mut reader = csv::Reader::from_reader(bytes.as_slice());
        let columns: Vec<String> = reader
            .headers()
            .map_err(|e| malformed(e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect();
        if columns.is_empty() || columns.iter().all(|c| c.is_empty()) {
            return Err(malformed("no header".into()));
        }
        for required in ["trial", "n"] {
            if !columns.iter().any(|c| c == required) {
                return Err(malformed(format!("missing column `{required}`")));
            }
        }
        let mut rows = Vec::new();
        for (i, rec) in reader.records().enumerate() {
            let rec = rec.map_err(|e| malformed(e.to_string()))?;
            let row = columns
                .iter()
                .zip(rec.iter())
                .map(|(name, v)| match v {
                    NA => Ok(None),
                    "true" => Ok(Some(1.0)),
                    "false" => Ok(Some(0.0)),
                    _ if name == "prefix_digest" => Ok(None),
                    _ => v.parse::<f64>().map(Some).map_err(|_| malformed(format!("row {}: bad value `{v}`", i + 1))),
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(malformed("no data rows".into()));
        }
        Ok(Table { columns, rows })
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }
}

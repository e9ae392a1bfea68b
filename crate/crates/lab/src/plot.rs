//! Plot-ready data files. Nothing is rendered; every curve becomes a
//! tab-separated file with `#` comment lines that gnuplot, pandas or a
//! spreadsheet can read directly.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use monolab_core::stats::{log_log_slope, median, quantile};
use monolab_core::Pl1dGraph;

use crate::error::{LabError, Result};
use crate::record::{write_file, Table};

/// Columns that describe the run rather than a convergence quantity.
const BOOKKEEPING: [&str; 10] = [
    "trial",
    "n",
    "iterations",
    "residual",
    "wall_time",
    "converged",
    "cross_check",
    "prefix_digest",
    "violation",
    "certificate_bound",
];

#[derive(Debug, Clone, PartialEq)]
pub struct CurveFile {
    pub field: String,
    pub path: PathBuf,
    pub slope: Option<f64>,
}

/// Writes one `<stem>.<column>.dat` file per curve column of `csv`, with
/// rows `n, median, q25, q75` across trials and a slope annotation.
pub fn plot_data(csv: &Path, out_dir: Option<&Path>) -> Result<Vec<CurveFile>> {
    let table = Table::read(csv)?;
    let n_col = table.column("n").expect("checked by Table::read");
    let stem = csv.file_stem().map_or_else(|| "data".to_string(), |s| s.to_string_lossy().into_owned());
    let dir = out_dir
        .map(Path::to_path_buf)
        .or_else(|| csv.parent().map(Path::to_path_buf))
        .unwrap_or_default();
    let mut files = Vec::new();
    for (c, name) in table.columns.iter().enumerate() {
        if BOOKKEEPING.contains(&name.as_str()) {
            continue;
        }
        let mut by_n: BTreeMap<u64, Vec<f64>> = BTreeMap::new();
        for row in &table.rows {
            let n = row[n_col].ok_or_else(|| LabError::MalformedCsv {
                path: csv.to_path_buf(),
                reason: "missing n".into(),
            })?;
            if let Some(v) = row[c] {
                by_n.entry(n as u64).or_default().push(v);
            }
        }
        if by_n.is_empty() {
            continue;
        }
        let mut ns = Vec::new();
        let mut body = String::from("n\tmedian\tq25\tq75\n");
        let mut medians = Vec::new();
        for (n, values) in &by_n {
            let m = median(values)?;
            body.push_str(&format!("{n}\t{m}\t{}\t{}\n", quantile(values, 0.25)?, quantile(values, 0.75)?));
            ns.push(*n as f64);
            medians.push(m);
        }
        let (slope, annotation) = match log_log_slope(&ns, &medians) {
            Ok(s) => (Some(s), format!("# slope: {s}\n")),
            Err(e) => (None, format!("# slope: NA ({e})\n")),
        };
        let path = dir.join(format!("{stem}.{name}.dat"));
        let text = format!("# field: {name}\n# source: {}\n{annotation}{body}", csv.display());
        write_file(&path, text.as_bytes())?;
        files.push(CurveFile { field: name.clone(), path, slope });
    }
    if files.is_empty() {
        return Err(LabError::MalformedCsv { path: csv.to_path_buf(), reason: "no curve columns".into() });
    }
    Ok(files)
}

/// Dumps a graph as `x, y_lo, y_hi` rows at its breakpoints, the midpoints
/// between them and one unit beyond each end.
pub fn graph_csv(graph: &Pl1dGraph) -> String {
    let bp = graph.breakpoints();
    let mut xs = Vec::with_capacity(2 * bp.len() + 2);
    if let (Some(first), Some(last)) = (bp.first(), bp.last()) {
        xs.push(first - 1.0);
        for w in bp.windows(2) {
            xs.push(w[0]);
            xs.push(0.5 * (w[0] + w[1]));
        }
        xs.push(*last);
        xs.push(last + 1.0);
    }
    let mut out = String::from("x,y_lo,y_hi\n");
    for x in xs {
        let v = graph.value_at(x);
        if !v.is_empty() {
            out.push_str(&format!("{x},{},{}\n", v.lo, v.hi));
        }
    }
    out
}

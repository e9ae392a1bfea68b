//! Order statistics and log-log slope fits for convergence curves.

use alloc::vec::Vec;

use crate::error::{Error, Result};

fn sorted(values: &[f64]) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::DegenerateData("no values".into()));
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::NonFinite);
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// Linear-interpolation quantile (the common "type 7" definition).
pub fn quantile(values: &[f64], q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::PreconditionViolated(alloc::format!("quantile level {q}")));
    }
    let v = sorted(values)?;
    let h = (v.len() - 1) as f64 * q;
    let lo = libm::floor(h) as usize;
    let hi = (lo + 1).min(v.len() - 1);
    Ok(v[lo] + (h - lo as f64) * (v[hi] - v[lo]))
}

pub fn median(values: &[f64]) -> Result<f64> {
    quantile(values, 0.5)
}

/// Least-squares slope of `log(value)` against `log(n)`.
pub fn log_log_slope(ns: &[f64], values: &[f64]) -> Result<f64> {
    if ns.len() != values.len() {
        return Err(Error::DimensionMismatch { expected: ns.len(), found: values.len() });
    }
    let mut distinct = ns.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::DegenerateData("need at least 3 distinct n values".into()));
    }
    if let Some(bad) = values.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
        return Err(Error::DegenerateData(alloc::format!("non-positive median {bad}")));
    }
    if ns.iter().any(|n| !(*n > 0.0)) {
        return Err(Error::DegenerateData("non-positive n".into()));
    }
    let xs: Vec<f64> = ns.iter().map(|n| libm::log(*n)).collect();
    let ys: Vec<f64> = values.iter().map(|v| libm::log(*v)).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantiles() {
        let v = [4.0, 1.0, 3.0, 2.0];
        assert_eq!(median(&v).unwrap(), 2.5);
        assert_eq!(quantile(&v, 0.25).unwrap(), 1.75);
        assert_eq!(quantile(&v, 1.0).unwrap(), 4.0);
        assert!(median(&[]).is_err());
    }

    #[test]
    fn slopes() {
        let ns = [10.0, 100.0, 1000.0];
        let inv: Vec<f64> = ns.iter().map(|n| 1.0 / n).collect();
        assert!((log_log_slope(&ns, &inv).unwrap() + 1.0).abs() < 1e-12);
        assert!(log_log_slope(&ns, &[3.0, 3.0, 3.0]).unwrap().abs() < 1e-12);
        assert!(matches!(log_log_slope(&ns, &[1.0, 0.0, 1.0]), Err(Error::DegenerateData(_))));
        assert!(matches!(log_log_slope(&ns[..2], &inv[..2]), Err(Error::DegenerateData(_))));
    }
}

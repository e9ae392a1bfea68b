//! Probe sets and the truncated R-distance between resolvent maps.

use alloc::vec::Vec;

use crate::error::{check_dim, Error, Result};
use crate::point::Point;
use crate::random::seed::DrawRng;

pub const DEFAULT_PROBE_COUNT: usize = 8;
pub const DEFAULT_HALF_WIDTH: f64 = 5.0;

/// Ordered probe points `x_1..x_K` with weights `2^{-k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeSet {
    points: Vec<Point>,
}

impl ProbeSet {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::PreconditionViolated("a probe set needs at least one point".into()));
        };
        let d = first.dim();
        for (i, p) in points.iter().enumerate() {
            check_dim(d, p.dim())?;
            if points[..i].iter().any(|q| q == p) {
                return Err(Error::PreconditionViolated(alloc::format!("probe {i} repeats an earlier point")));
            }
        }
        Ok(ProbeSet { points })
    }

    /// The origin followed by `count - 1` points of the additive recurrence
    /// `frac(u + j α)` with `α_i = φ_d^{-(i+1)}` (`φ_d` the positive root of
    /// `x^{d+1} = x + 1`) and a seeded uniform shift `u`, mapped to
    /// `[-half_width, half_width]^d`.
    pub fn low_discrepancy(dim: usize, count: usize, half_width: f64, seed: u64) -> Result<Self> {
        if dim == 0 || count == 0 || !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::PreconditionViolated("probe box and count must be positive".into()));
        }
        let mut phi = 2.0f64;
        for _ in 0..64 {
            phi = libm::pow(1.0 + phi, 1.0 / (dim as f64 + 1.0));
        }
        let alpha: Vec<f64> = (0..dim).map(|i| libm::pow(phi, -(i as f64 + 1.0))).collect();
        let mut rng = DrawRng::from_seed(seed);
        let shift: Vec<f64> = (0..dim).map(|_| rng.uniform()).collect();
        let mut points = alloc::vec![Point::zeros(dim)];
        for j in 1..count {
            let coords = (0..dim)
                .map(|i| {
                    let u = shift[i] + j as f64 * alpha[i];
                    half_width * (2.0 * (u - libm::floor(u)) - 1.0)
                })
                .collect();
            points.push(Point::new(coords)?);
        }
        ProbeSet::new(points)
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    /// Weight `2^{-(k+1)}` of the zero-based probe `k`.
    pub fn weight(k: usize) -> f64 {
        libm::pow(2.0, -(k as f64 + 1.0))
    }
}

/// `Σ_k 2^{-k} min(1, e_k)` over per-probe errors in probe order.
pub fn r_distance_from_errors(errors: &[f64]) -> f64 {
    errors.iter().enumerate().map(|(k, e)| ProbeSet::weight(k) * e.min(1.0)).sum()
}

/// Truncated R-distance between two resolvent maps evaluated at the probes.
pub fn r_distance<F, G>(a: F, b: G, probes: &ProbeSet) -> Result<f64>
where
    F: Fn(&Point) -> Result<Point>,
    G: Fn(&Point) -> Result<Point>,
{
    let errors = probes
        .points()
        .iter()
        .map(|x| Ok(a(x)?.distance(&b(x)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(r_distance_from_errors(&errors))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::OperatorHandle;

    #[test]
    fn distance_examples() {
        let probes = ProbeSet::new(alloc::vec![Point::from(2.0), Point::from(4.0)]).unwrap();
        let id = OperatorHandle::identity(1);
        let zero = OperatorHandle::zero(1);
        let same = r_distance(|x| id.resolvent(1.0, x), |x| id.resolvent(1.0, x), &probes).unwrap();
        assert_eq!(same, 0.0);
        let d = r_distance(|x| id.resolvent(1.0, x), |x| zero.resolvent(1.0, x), &probes).unwrap();
        assert_eq!(d, 0.75);
        assert_eq!(r_distance_from_errors(&[0.5]), 0.25);
    }

    #[test]
    fn default_probes() {
        let probes = ProbeSet::low_discrepancy(3, DEFAULT_PROBE_COUNT, DEFAULT_HALF_WIDTH, 1).unwrap();
        assert_eq!(probes.len(), 8);
        assert_eq!(probes.points()[0], Point::zeros(3));
        for p in probes.points() {
            assert!(p.as_slice().iter().all(|c| c.abs() <= 5.0));
        }
        assert_eq!(probes, ProbeSet::low_discrepancy(3, 8, 5.0, 1).unwrap());
        assert_ne!(probes, ProbeSet::low_discrepancy(3, 8, 5.0, 2).unwrap());
        assert!(ProbeSet::new(alloc::vec![Point::from(1.0), Point::from(1.0)]).is_err());
    }
}

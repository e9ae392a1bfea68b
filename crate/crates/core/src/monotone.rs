//! Sampled monotonicity and maximality diagnostics.

use crate::error::{check_dim, Error, Result};
use crate::point::Point;

/// Slack allowed on `⟨x - x', y - y'⟩ >= 0`.
pub const MONOTONICITY_TOL: f64 = 1e-12;

/// Coordinates closer than this count as the same graph pair.
const SAME_PAIR_TOL: f64 = 1e-12;

pub type GraphPair = (Point, Point);

fn check_pairs(pairs: &[GraphPair]) -> Result<usize> {
    let Some((x0, _)) = pairs.first() else {
        return Ok(0);
    };
    let d = x0.dim();
    for (x, y) in pairs {
        check_dim(d, x.dim())?;
        check_dim(d, y.dim())?;
    }
    Ok(d)
}

fn monotone_pair(a: &GraphPair, b: &GraphPair) -> bool {
    a.0.sub(&b.0).dot(&a.1.sub(&b.1)) >= -MONOTONICITY_TOL
}

/// True iff every two sampled pairs satisfy `⟨x_i - x_j, y_i - y_j⟩ >= -1e-12`.
pub fn monotonicity_check(pairs: &[GraphPair]) -> Result<bool> {
    check_pairs(pairs)?;
    for i in 0..pairs.len() {
        for j in i + 1..pairs.len() {
            if !monotone_pair(&pairs[i], &pairs[j]) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// True iff `candidate` is a new pair that keeps the sample monotone, i.e. a
/// witness that the sampled operator admits a proper monotone extension.
pub fn monotone_extension_witness(samples: &[GraphPair], candidate: &GraphPair) -> Result<bool> {
    let d = check_pairs(samples)?;
    if d > 0 {
        check_dim(d, candidate.0.dim())?;
        check_dim(d, candidate.1.dim())?;
    }
    if !monotonicity_check(samples)? {
        return Err(Error::InvalidGraph("sampled graph is not monotone".into()));
    }
    let already = samples.iter().any(|(x, y)| {
        x.distance(&candidate.0) <= SAME_PAIR_TOL && y.distance(&candidate.1) <= SAME_PAIR_TOL
    });
    if already {
        return Ok(false);
    }
    Ok(samples.iter().all(|s| monotone_pair(s, candidate)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn pair(x: f64, y: f64) -> GraphPair {
        (Point::from(x), Point::from(y))
    }

    #[test]
    fn identity_graph_is_monotone() {
        let pairs: Vec<_> = (-5..=5).map(|i| pair(i as f64, i as f64)).collect();
        assert!(monotonicity_check(&pairs).unwrap());
        assert!(!monotonicity_check(&[pair(0.0, 1.0), pair(1.0, 0.0)]).unwrap());
    }

    #[test]
    fn witness_examples() {
        let identity: Vec<_> = (-50..=50).map(|i| pair(i as f64 * 0.1, i as f64 * 0.1)).collect();
        assert!(!monotone_extension_witness(&identity, &pair(0.0, 1.0)).unwrap());

        let point_cone: Vec<_> = (-5..=5).map(|t| pair(0.0, t as f64)).collect();
        for t in -5..=5 {
            assert!(!monotone_extension_witness(&point_cone, &pair(0.0, t as f64)).unwrap());
        }

        let bad = [pair(0.0, 1.0), pair(1.0, 0.0)];
        assert!(matches!(monotone_extension_witness(&bad, &pair(5.0, 5.0)), Err(Error::InvalidGraph(_))));
    }

    #[test]
    fn planar_sum_admits_extension() {
        let samples: Vec<GraphPair> = (-10..=10)
            .map(|t| (Point::from([0.0, 0.0]), Point::from([0.0, t as f64 * 0.5])))
            .collect();
        let candidate = (Point::from([0.0, 0.0]), Point::from([1.0, 0.0]));
        assert!(monotone_extension_witness(&samples, &candidate).unwrap());
    }
}

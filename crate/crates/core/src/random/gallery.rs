//! Sampled planar graphs for a sum of maximal monotone operators that is not
//! maximal.
//!
//! `A = N_C` with `C = {(x, y) : y >= x²}` and `B = N_D` with
//! `D = {(x, y) : y <= -x²}`. Both are maximal, `dom(A + B) = {0}` and
//! `(A + B)(0)` is the vertical axis, a strict subset of `N_{0}(0) = ℝ²`.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::Result;
use crate::monotone::{monotone_extension_witness, monotonicity_check, GraphPair};
use crate::point::Point;

#[derive(Debug, Clone, PartialEq)]
pub struct GalleryEntry {
    pub name: String,
    pub description: String,
    pub maximal: bool,
    pub samples: Vec<GraphPair>,
}

impl GalleryEntry {
    pub fn is_monotone(&self) -> Result<bool> {
        monotonicity_check(&self.samples)
    }

    /// True iff `witness` extends the sampled graph monotonically.
    pub fn accepts_witness(&self, witness: &GraphPair) -> Result<bool> {
        monotone_extension_witness(&self.samples, witness)
    }
}

fn pair(x: [f64; 2], v: [f64; 2]) -> GraphPair {
    (Point::from(x), Point::from(v))
}

fn grid() -> impl Iterator<Item = f64> + Clone {
    (-8..=8).map(|i| i as f64 * 0.25)
}

const NORMAL_SCALES: [f64; 4] = [0.0, 0.5, 1.0, 2.0];
const INTERIOR_DEPTHS: [f64; 2] = [0.25, 1.0];

/// Normal cone of `{(x, y) : sign * y >= x²}` sampled on boundary and interior points.
fn parabola_cone(sign: f64) -> Vec<GraphPair> {
    let mut out = Vec::new();
    for t in grid() {
        for s in NORMAL_SCALES {
            out.push(pair([t, sign * t * t], [s * 2.0 * t, -sign * s]));
        }
        for h in INTERIOR_DEPTHS {
            out.push(pair([t, sign * (t * t + h)], [0.0, 0.0]));
        }
    }
    out
}

/// The four gallery operators `A`, `B`, `A + B`, `N_{0}`.
pub fn phelps_gallery() -> Vec<GalleryEntry> {
    let a = parabola_cone(1.0);
    let b = parabola_cone(-1.0);
    let sum = grid().map(|t| pair([0.0, 0.0], [0.0, t])).collect();
    let point_cone = grid()
        .flat_map(|u| grid().map(move |v| pair([0.0, 0.0], [u, v])))
        .collect();
    alloc::vec![
        GalleryEntry {
            name: "A".into(),
            description: "normal cone of the epigraph {y >= x^2}".into(),
            maximal: true,
            samples: a,
        },
        GalleryEntry {
            name: "B".into(),
            description: "normal cone of the hypograph {y <= -x^2}".into(),
            maximal: true,
            samples: b,
        },
        GalleryEntry {
            name: "A+B".into(),
            description: "domain {0}, values the vertical axis".into(),
            maximal: false,
            samples: sum,
        },
        GalleryEntry {
            name: "N0".into(),
            description: "normal cone of {0}, all of R^2 at the origin".into(),
            maximal: true,
            samples: point_cone,
        },
    ]
}

/// Candidate pairs tested against every gallery entry.
pub fn standard_witnesses() -> Vec<GraphPair> {
    alloc::vec![
        pair([0.0, 0.0], [1.0, 0.0]),
        pair([0.0, 0.0], [-1.0, 0.0]),
        pair([0.0, 0.0], [0.0, 1.0]),
        pair([1.0, 0.0], [0.0, 0.0]),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn witness_table() {
        let gallery = phelps_gallery();
        let witnesses = standard_witnesses();
        for entry in &gallery {
            assert!(entry.is_monotone().unwrap(), "{}", entry.name);
            let accepted: Vec<bool> = witnesses.iter().map(|w| entry.accepts_witness(w).unwrap()).collect();
            if entry.name == "A+B" {
                assert!(accepted[0]);
            } else {
                assert!(accepted.iter().all(|a| !a), "{} {:?}", entry.name, accepted);
            }
        }
    }
}

use alloc::vec::Vec;

use crate::interval::Interval;
use crate::point::Point;

/// A closed convex value set `A(x)` of one of the supported operators.
#[derive(Debug, Clone, PartialEq)]
pub enum SetDescription {
    Empty,
    Singleton(Point),
    /// Product of closed intervals, at least one of them non-degenerate.
    Box(Vec<Interval>),
}

impl SetDescription {
    /// Normalizes a product of intervals: any empty factor empties the set,
    /// all-degenerate factors collapse to a singleton.
    pub fn from_intervals(intervals: Vec<Interval>) -> SetDescription {
        if intervals.iter().any(Interval::is_empty) {
            SetDescription::Empty
        } else if intervals.iter().all(Interval::is_point) {
            SetDescription::Singleton(Point::from_raw(intervals.iter().map(|i| i.lo).collect()))
        } else {
            SetDescription::Box(intervals)
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, SetDescription::Empty)
    }

    /// Per-coordinate intervals; `None` when empty.
    pub fn intervals(&self) -> Option<Vec<Interval>> {
        match self {
            SetDescription::Empty => None,
            SetDescription::Singleton(p) => Some(p.as_slice().iter().map(|&v| Interval::point(v)).collect()),
            SetDescription::Box(b) => Some(b.clone()),
        }
    }

    /// Projection of the origin onto the set.
    pub fn least_norm(&self) -> Option<Point> {
        match self {
            SetDescription::Empty => None,
            SetDescription::Singleton(p) => Some(p.clone()),
            SetDescription::Box(b) => Some(Point::from_raw(
                b.iter().map(|i| i.project(0.0).unwrap()).collect(),
            )),
        }
    }

    /// Euclidean distance from `p` to the set, `+inf` when empty.
    pub fn distance(&self, p: &Point) -> f64 {
        match self {
            SetDescription::Empty => f64::INFINITY,
            SetDescription::Singleton(q) => p.distance(q),
            SetDescription::Box(b) => {
                let s: f64 = b.iter().zip(p.as_slice()).map(|(i, &v)| { let e = i.distance(v); e * e }).sum();
                libm::sqrt(s)
            }
        }
    }

    pub fn contains(&self, p: &Point, tol: f64) -> bool {
        self.distance(p) <= tol
    }

    pub fn translate(&self, by: &Point) -> SetDescription {
        match self.intervals() {
            None => SetDescription::Empty,
            Some(iv) => SetDescription::from_intervals(
                iv.iter().zip(by.as_slice()).map(|(i, &z)| i.shift(z)).collect(),
            ),
        }
    }

    pub fn scale(&self, factor: f64) -> SetDescription {
        match self.intervals() {
            None => SetDescription::Empty,
            Some(iv) => SetDescription::from_intervals(iv.iter().map(|i| i.scale(factor)).collect()),
        }
    }

    /// Minkowski sum `self + factor * other`.
    pub fn add_scaled(&self, factor: f64, other: &SetDescription) -> SetDescription {
        match (self.intervals(), other.intervals()) {
            (Some(a), Some(b)) => SetDescription::from_intervals(
                a.iter().zip(&b).map(|(x, y)| x.add(&y.scale(factor))).collect(),
            ),
            _ => SetDescription::Empty,
        }
    }
}

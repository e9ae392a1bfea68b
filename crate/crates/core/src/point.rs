use alloc::vec::Vec;
use core::ops::Index;

use crate::error::{Error, Result};

/// A point of R^d with finite coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Point(coords))
    }

    pub fn zeros(dim: usize) -> Self {
        Point(alloc::vec![0.0; dim])
    }

    pub fn splat(dim: usize, value: f64) -> Self {
        Point(alloc::vec![value; dim])
    }

    /// Builds a point from coordinates produced by arithmetic on finite
    /// inputs; finiteness is the caller's invariant.
    pub(crate) fn from_raw(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    pub fn dot(&self, other: &Point) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.norm_sq())
    }

    pub fn distance(&self, other: &Point) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        let s: f64 = self.0.iter().zip(&other.0).map(|(a, b)| (a - b) * (a - b)).sum();
        libm::sqrt(s)
    }

    pub fn add(&self, other: &Point) -> Point {
        debug_assert_eq!(self.dim(), other.dim());
        Point(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Point) -> Point {
        debug_assert_eq!(self.dim(), other.dim());
        Point(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, factor: f64) -> Point {
        Point(self.0.iter().map(|a| a * factor).collect())
    }

    /// `self + factor * other`
    pub fn axpy(&self, factor: f64, other: &Point) -> Point {
        debug_assert_eq!(self.dim(), other.dim());
        Point(self.0.iter().zip(&other.0).map(|(a, b)| a + factor * b).collect())
    }

    /// Concatenates equally sized blocks into one lifted point.
    pub fn concat(blocks: &[Point]) -> Point {
        let mut out = Vec::with_capacity(blocks.iter().map(Point::dim).sum());
        for b in blocks {
            out.extend_from_slice(&b.0);
        }
        Point(out)
    }

    /// Splits a lifted point into `count` consecutive blocks.
    pub fn blocks(&self, count: usize) -> Vec<Point> {
        let d = self.dim() / count;
        self.0.chunks(d).map(|c| Point(c.to_vec())).collect()
    }

    /// Repeats `self` `count` times.
    pub fn replicate(&self, count: usize) -> Point {
        let mut out = Vec::with_capacity(self.dim() * count);
        for _ in 0..count {
            out.extend_from_slice(&self.0);
        }
        Point(out)
    }
}

impl Index<usize> for Point {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Panics on non-finite or empty input; use [`Point::new`] for a fallible
/// constructor.
impl From<Vec<f64>> for Point {
    fn from(coords: Vec<f64>) -> Self {
        Point::new(coords).expect("point coordinates must be finite and non-empty")
    }
}

impl<const N: usize> From<[f64; N]> for Point {
    fn from(coords: [f64; N]) -> Self {
        Point::from(coords.to_vec())
    }
}

impl From<f64> for Point {
    fn from(x: f64) -> Self {
        Point::from(alloc::vec![x])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite() {
        assert_eq!(Point::new(alloc::vec![1.0, f64::NAN]), Err(Error::NonFinite));
        assert!(Point::new(alloc::vec![]).is_err());
    }

    #[test]
    fn blocks_round_trip() {
        let p = Point::from([1.0, 2.0, 3.0, 4.0]);
        let b = p.blocks(2);
        assert_eq!(b[1], Point::from([3.0, 4.0]));
        assert_eq!(Point::concat(&b), p);
        assert_eq!(Point::from(2.0).replicate(3), Point::from([2.0, 2.0, 2.0]));
    }
}

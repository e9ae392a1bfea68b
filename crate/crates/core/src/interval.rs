/// A closed interval of the extended real line.
///
/// The empty interval is encoded as `lo > hi` (see [`Interval::EMPTY`]).
/// Infinite endpoints saturate: `-inf + finite = -inf`. Sums of value sets of
/// monotone operators never combine `+inf` with `-inf` on the same side, so
/// no NaN can arise from [`Interval::add`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const EMPTY: Interval = Interval { lo: f64::INFINITY, hi: f64::NEG_INFINITY };
    pub const REAL_LINE: Interval = Interval { lo: f64::NEG_INFINITY, hi: f64::INFINITY };

    pub fn new(lo: f64, hi: f64) -> Interval {
        debug_assert!(lo <= hi, "interval with lo > hi: use Interval::EMPTY");
        Interval { lo, hi }
    }

    pub fn point(v: f64) -> Interval {
        Interval { lo: v, hi: v }
    }

    pub fn is_empty(&self) -> bool {
        !(self.lo <= self.hi)
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    /// Minkowski sum.
    pub fn add(&self, other: &Interval) -> Interval {
        if self.is_empty() || other.is_empty() {
            return Interval::EMPTY;
        }
        Interval { lo: self.lo + other.lo, hi: self.hi + other.hi }
    }

    pub fn shift(&self, by: f64) -> Interval {
        if self.is_empty() {
            return *self;
        }
        Interval { lo: self.lo + by, hi: self.hi + by }
    }

    /// Scales by a non-negative factor.
    pub fn scale(&self, factor: f64) -> Interval {
        debug_assert!(factor >= 0.0);
        if self.is_empty() {
            return *self;
        }
        if factor == 0.0 {
            return Interval::point(0.0);
        }
        Interval { lo: self.lo * factor, hi: self.hi * factor }
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        if lo <= hi {
            Interval { lo, hi }
        } else {
            Interval::EMPTY
        }
    }

    /// Nearest point of the interval to `v`. `None` when empty.
    pub fn project(&self, v: f64) -> Option<f64> {
        if self.is_empty() {
            None
        } else {
            Some(v.max(self.lo).min(self.hi))
        }
    }

    /// Distance from `v` to the interval; `+inf` when empty.
    pub fn distance(&self, v: f64) -> f64 {
        match self.project(v) {
            Some(p) => (v - p).abs(),
            None => f64::INFINITY,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn saturating_sum() {
        let a = Interval::new(f64::NEG_INFINITY, 1.0);
        let b = Interval::new(-2.0, 3.0);
        assert_eq!(a.add(&b), Interval::new(f64::NEG_INFINITY, 4.0));
        assert!(a.add(&Interval::EMPTY).is_empty());
        let c = Interval::new(0.0, f64::INFINITY);
        assert_eq!(a.add(&c), Interval::REAL_LINE);
    }

    #[test]
    fn projection() {
        let a = Interval::new(-1.0, 1.0);
        assert_eq!(a.project(0.0), Some(0.0));
        assert_eq!(a.project(5.0), Some(1.0));
        assert_eq!(Interval::EMPTY.project(0.0), None);
        assert_eq!(a.distance(-3.0), 2.0);
    }
}

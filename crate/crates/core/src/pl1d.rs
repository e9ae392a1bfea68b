//! Exact one-dimensional maximal monotone operators.
//!
//! A [`Pl1dGraph`] is a monotone polyline in the plane: a list of vertices
//! whose coordinates are both nondecreasing, joined by segments (vertical
//! segments encode jumps of the operator), closed off by two end rays. Along
//! such a curve `x + gamma * y` is strictly increasing for every `gamma > 0`,
//! so resolvents reduce to a one-dimensional monotone search that is exact on
//! every segment.
//!
//! Graphs with a missing ray or with disconnected pieces ("gaps") are
//! representable so that non-maximal operators can be inspected, but every
//! calculus routine here requires a maximal graph.

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use crate::error::{check_step, Error, Result};
use crate::interval::Interval;

/// Breakpoints closer than this on the x axis are merged when graphs are added.
pub const COALESCE_TOL: f64 = 1e-14;

/// Direction of an end ray, normalized to `(1, slope)` or `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ray {
    Slope(f64),
    Vertical,
}

impl Ray {
    /// Builds a ray from a direction `(dx, dy)` with nonnegative entries.
    pub fn from_direction(dx: f64, dy: f64) -> Result<Ray> {
        if !(dx >= 0.0 && dy >= 0.0) || !dx.is_finite() || !dy.is_finite() || (dx == 0.0 && dy == 0.0) {
            return Err(Error::InvalidGraph(format!("bad ray direction ({dx}, {dy})")));
        }
        if dx == 0.0 {
            Ok(Ray::Vertical)
        } else {
            Ok(Ray::Slope(dy / dx))
        }
    }

    pub fn direction(&self) -> (f64, f64) {
        match *self {
            Ray::Slope(s) => (1.0, s),
            Ray::Vertical => (0.0, 1.0),
        }
    }

    fn scaled(&self, factor: f64) -> Ray {
        match *self {
            Ray::Slope(s) => Ray::Slope(s * factor),
            Ray::Vertical => Ray::Vertical,
        }
    }
}

/// Outcome of walking the curve until `a*x + b*y >= c` first holds.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Reach {
    /// Reached continuously; the level is attained at this abscissa.
    At(f64),
    /// First satisfied at this abscissa, but only after a jump over `c`.
    Jump(f64),
    Never,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pl1dGraph {
    vertices: Vec<(f64, f64)>,
    left: Option<Ray>,
    right: Option<Ray>,
    gaps: Vec<usize>,
}

impl Pl1dGraph {
    /// A connected graph with both end rays.
    pub fn new(vertices: Vec<(f64, f64)>, left: Ray, right: Ray) -> Result<Self> {
        Self::with_gaps(vertices, Some(left), Some(right), Vec::new())
    }

    /// General constructor. `gaps` lists indices `i` for which vertices `i`
    /// and `i + 1` are not joined; `None` rays leave that end open.
    pub fn with_gaps(
        vertices: Vec<(f64, f64)>,
        left: Option<Ray>,
        right: Option<Ray>,
        mut gaps: Vec<usize>,
    ) -> Result<Self> {
        gaps.sort_unstable();
        gaps.dedup();
        let g = Pl1dGraph { vertices, left, right, gaps };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<()> {
        let v = &self.vertices;
        if v.is_empty() {
            return Err(Error::InvalidGraph("no vertices".to_string()));
        }
        if v.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::InvalidGraph("non-finite vertex".to_string()));
        }
        for (i, w) in v.windows(2).enumerate() {
            let ((x0, y0), (x1, y1)) = (w[0], w[1]);
            if x1 < x0 || y1 < y0 {
                return Err(Error::InvalidGraph(format!("vertices {i} and {} are not monotone", i + 1)));
            }
            if x1 == x0 && y1 == y0 {
                return Err(Error::InvalidGraph(format!("vertices {i} and {} coincide", i + 1)));
            }
        }
        for ray in [self.left, self.right].iter().flatten() {
            if let Ray::Slope(s) = ray {
                if !(*s >= 0.0) || !s.is_finite() {
                    return Err(Error::InvalidGraph(format!("ray slope {s} must be finite and nonnegative")));
                }
            }
        }
        if let Some(&g) = self.gaps.last() {
            if g + 1 >= v.len() {
                return Err(Error::InvalidGraph(format!("gap index {g} out of range")));
            }
        }
        Ok(())
    }

    pub fn vertices(&self) -> &[(f64, f64)] {
        &self.vertices
    }

    pub fn left_ray(&self) -> Option<Ray> {
        self.left
    }

    pub fn right_ray(&self) -> Option<Ray> {
        self.right
    }

    pub fn gaps(&self) -> &[usize] {
        &self.gaps
    }

    /// The graph of `x -> slope * x + offset`, `slope >= 0`.
    pub fn affine(slope: f64, offset: f64) -> Result<Self> {
        Self::new(alloc::vec![(0.0, offset)], Ray::Slope(slope), Ray::Slope(slope))
    }

    pub fn identity() -> Self {
        Self::affine(1.0, 0.0).expect("identity graph")
    }

    pub fn zero() -> Self {
        Self::affine(0.0, 0.0).expect("zero graph")
    }

    /// Subdifferential of `|x|`.
    pub fn abs() -> Self {
        Self::new(alloc::vec![(0.0, -1.0), (0.0, 1.0)], Ray::Slope(0.0), Ray::Slope(0.0))
            .expect("abs graph")
    }

    /// Subdifferential of `scale * |x - center|`, `scale > 0`.
    pub fn scaled_abs(scale: f64, center: f64) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::InvalidGraph(format!("scale {scale} must be positive")));
        }
        Self::new(
            alloc::vec![(center, -scale), (center, scale)],
            Ray::Slope(0.0),
            Ray::Slope(0.0),
        )
    }

    /// Normal cone of the interval `[lo, hi]`; infinite ends are allowed.
    pub fn normal_cone(lo: f64, hi: f64) -> Result<Self> {
        if !(lo <= hi) || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
            return Err(Error::InvalidGraph(format!("bad interval [{lo}, {hi}]")));
        }
        match (lo.is_finite(), hi.is_finite()) {
            (false, false) => Ok(Self::zero()),
            (true, false) => Self::new(alloc::vec![(lo, 0.0)], Ray::Vertical, Ray::Slope(0.0)),
            (false, true) => Self::new(alloc::vec![(hi, 0.0)], Ray::Slope(0.0), Ray::Vertical),
            (true, true) if lo == hi => Self::new(alloc::vec![(lo, 0.0)], Ray::Vertical, Ray::Vertical),
            (true, true) => Self::new(alloc::vec![(lo, 0.0), (hi, 0.0)], Ray::Vertical, Ray::Vertical),
        }
    }

    /// Graph of `A - z`.
    pub fn shift_values(&self, z: f64) -> Self {
        let vertices = self.vertices.iter().map(|&(x, y)| (x, y - z)).collect();
        Pl1dGraph { vertices, ..self.clone() }
    }

    /// Graph of `factor * A`, `factor > 0`.
    pub fn scale_values(&self, factor: f64) -> Result<Self> {
        check_step(factor)?;
        let vertices = self.vertices.iter().map(|&(x, y)| (x, y * factor)).collect();
        Ok(Pl1dGraph {
            vertices,
            left: self.left.map(|r| r.scaled(factor)),
            right: self.right.map(|r| r.scaled(factor)),
            gaps: self.gaps.clone(),
        })
    }

    /// Graph of `x -> A(x - c)`.
    pub fn translate(&self, c: f64) -> Self {
        let vertices = self.vertices.iter().map(|&(x, y)| (x + c, y)).collect();
        Pl1dGraph { vertices, ..self.clone() }
    }

    /// Graph of `x -> -A(-x)`, which is again monotone.
    pub fn reflect(&self) -> Self {
        let m = self.vertices.len();
        Pl1dGraph {
            vertices: self.vertices.iter().rev().map(|&(x, y)| (-x, -y)).collect(),
            left: self.right,
            right: self.left,
            gaps: self.gaps.iter().rev().map(|&g| m - 2 - g).collect(),
        }
    }

    fn is_gap(&self, i: usize) -> bool {
        self.gaps.binary_search(&i).is_ok()
    }

    /// `dom(J_G) = R`: both rays present and the curve is connected.
    pub fn is_maximal(&self) -> bool {
        self.left.is_some() && self.right.is_some() && self.gaps.is_empty()
    }

    /// Closed hull of the abscissae carrying a value.
    pub fn domain(&self) -> Interval {
        let (x0, _) = self.vertices[0];
        let (xm, _) = *self.vertices.last().unwrap();
        let lo = match self.left {
            Some(Ray::Slope(_)) => f64::NEG_INFINITY,
            _ => x0,
        };
        let hi = match self.right {
            Some(Ray::Slope(_)) => f64::INFINITY,
            _ => xm,
        };
        Interval::new(lo, hi)
    }

    /// Distinct vertex abscissae, in order.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut xs: Vec<f64> = self.vertices.iter().map(|v| v.0).collect();
        xs.dedup();
        xs
    }

    /// The value set `G(x)`. For graphs with gaps this is the hull of the
    /// values found at `x`.
    pub fn value_at(&self, x: f64) -> Interval {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut take = |v: f64| {
            lo = lo.min(v);
            hi = hi.max(v);
        };
        let v = &self.vertices;
        let m = v.len();
        let (x0, y0) = v[0];
        match self.left {
            Some(Ray::Slope(s)) if x < x0 => take(y0 - s * (x0 - x)),
            Some(Ray::Vertical) if x == x0 => take(f64::NEG_INFINITY),
            _ => {}
        }
        for i in 0..m {
            let (xi, yi) = v[i];
            if xi == x {
                take(yi);
            }
            if i + 1 < m && !self.is_gap(i) {
                let (xj, yj) = v[i + 1];
                if xi < x && x < xj {
                    take(yi + (x - xi) / (xj - xi) * (yj - yi));
                }
            }
        }
        let (xm, ym) = v[m - 1];
        match self.right {
            Some(Ray::Slope(s)) if x > xm => take(ym + s * (x - xm)),
            Some(Ray::Vertical) if x == xm => take(f64::INFINITY),
            _ => {}
        }
        if lo <= hi {
            Interval::new(lo, hi)
        } else {
            Interval::EMPTY
        }
    }

    /// Walks the curve in order and returns the first abscissa where
    /// `a*x + b*y >= c` (`a, b >= 0`, not both zero).
    fn first_reaching(&self, a: f64, b: f64, c: f64) -> Reach {
        let f = |(x, y): (f64, f64)| a * x + b * y;
        let v = &self.vertices;
        let (x0, _) = v[0];
        let f0 = f(v[0]);
        if f0 >= c {
            return match self.left {
                Some(ray) => {
                    let (dx, dy) = ray.direction();
                    let rate = a * dx + b * dy;
                    if rate > 0.0 {
                        Reach::At(x0 - dx * ((f0 - c) / rate))
                    } else {
                        // The level is constant along the whole ray.
                        let x = if dx > 0.0 { f64::NEG_INFINITY } else { x0 };
                        if f0 == c {
                            Reach::At(x)
                        } else {
                            Reach::Jump(x)
                        }
                    }
                }
                None if f0 == c => Reach::At(x0),
                None => Reach::Jump(x0),
            };
        }
        for i in 0..v.len() - 1 {
            let (p, q) = (v[i], v[i + 1]);
            let fq = f(q);
            if fq >= c {
                if fq == c {
                    return Reach::At(q.0);
                }
                if self.is_gap(i) {
                    return Reach::Jump(q.0);
                }
                let fp = f(p);
                let t = (c - fp) / (fq - fp);
                return Reach::At(p.0 + t * (q.0 - p.0));
            }
        }
        let (xm, _) = *v.last().unwrap();
        let fm = f(*v.last().unwrap());
        match self.right {
            Some(ray) => {
                let (dx, dy) = ray.direction();
                let rate = a * dx + b * dy;
                if rate > 0.0 {
                    Reach::At(xm + dx * ((c - fm) / rate))
                } else {
                    Reach::Never
                }
            }
            None => Reach::Never,
        }
    }

    /// The unique `x` with `y ∈ x + gamma * G(x)`.
    pub fn resolvent(&self, gamma: f64, y: f64) -> Result<f64> {
        check_step(gamma)?;
        if !y.is_finite() {
            return Err(Error::NonFinite);
        }
        match self.first_reaching(1.0, gamma, y) {
            Reach::At(x) => Ok(x),
            Reach::Jump(_) | Reach::Never => Err(Error::NotMaximal(y)),
        }
    }

    /// `{x : 0 ∈ G(x)}` as a closed, possibly unbounded, possibly empty interval.
    pub fn zero_set(&self) -> Interval {
        let first = match self.first_reaching(0.0, 1.0, 0.0) {
            Reach::At(x) | Reach::Jump(x) => x,
            Reach::Never => return Interval::EMPTY,
        };
        let last = match self.reflect().first_reaching(0.0, 1.0, 0.0) {
            Reach::At(x) | Reach::Jump(x) => -x,
            Reach::Never => return Interval::EMPTY,
        };
        if first <= last {
            Interval::new(first, last)
        } else {
            Interval::EMPTY
        }
    }
}

/// Result of a Minkowski combination. `maximal` reports whether the summed
/// graph passed [`Pl1dGraph::is_maximal`].
#[derive(Debug, Clone, PartialEq)]
pub struct MinkowskiMean {
    pub graph: Pl1dGraph,
    pub maximal: bool,
}

/// Compensated sum, independent of input order once the input is sorted.
fn sorted_sum(parts: &mut [f64]) -> f64 {
    parts.sort_by(f64::total_cmp);
    let mut sum = 0.0;
    let mut comp = 0.0;
    for &p in parts.iter() {
        if !p.is_finite() {
            return parts.iter().sum();
        }
        let t = sum + p;
        if sum.abs() >= p.abs() {
            comp += (sum - t) + p;
        } else {
            comp += (p - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

pub(crate) fn check_weights(weights: &[f64]) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::WeightError("no weights".to_string()));
    }
    if let Some(w) = weights.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
        return Err(Error::WeightError(format!("weight {w} is not strictly positive")));
    }
    let mut parts = weights.to_vec();
    let total = sorted_sum(&mut parts);
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::WeightError(format!("weights sum to {total}, not 1")));
    }
    Ok(())
}

/// Exact graph of `x -> Σ w_k G_k(x)` on the intersection of the domains.
///
/// Between consecutive breakpoints of the union grid every input is affine,
/// so the sum is recovered exactly from its value intervals at the grid.
/// Contributions are summed in sorted order so that permuting the inputs
/// yields a bit-identical graph.
pub fn minkowski_mean(graphs: &[Pl1dGraph], weights: &[f64]) -> Result<MinkowskiMean> {
    if graphs.len() != weights.len() {
        return Err(Error::WeightError(format!(
            "{} graphs but {} weights",
            graphs.len(),
            weights.len()
        )));
    }
    check_weights(weights)?;
    if let Some(g) = graphs.iter().find(|g| !g.is_maximal()) {
        let (x0, y0) = g.vertices[0];
        return Err(Error::NotMaximal(x0 + y0));
    }

    let dom = graphs
        .iter()
        .fold(Interval::REAL_LINE, |acc, g| acc.intersect(&g.domain()));
    if dom.is_empty() {
        return Err(Error::EmptyDomain);
    }

    let mut xs: Vec<f64> = graphs
        .iter()
        .flat_map(|g| g.vertices.iter().map(|v| v.0))
        .filter(|x| dom.contains(*x))
        .collect();
    xs.sort_by(f64::total_cmp);
    let mut grid: Vec<f64> = Vec::with_capacity(xs.len());
    for x in xs {
        match grid.last() {
            Some(&last) if x - last <= COALESCE_TOL => {}
            _ => grid.push(x),
        }
    }
    if dom.hi.is_finite() {
        if let Some(last) = grid.last_mut() {
            *last = dom.hi;
        }
    }
    debug_assert!(!grid.is_empty());

    let mut values: Vec<Interval> = Vec::with_capacity(grid.len());
    let mut lo_parts = Vec::with_capacity(graphs.len());
    let mut hi_parts = Vec::with_capacity(graphs.len());
    for &x in &grid {
        lo_parts.clear();
        hi_parts.clear();
        for (g, &w) in graphs.iter().zip(weights) {
            let val = g.value_at(x).scale(w);
            lo_parts.push(val.lo);
            hi_parts.push(val.hi);
        }
        let mut lo = sorted_sum(&mut lo_parts);
        let hi = sorted_sum(&mut hi_parts);
        if let Some(prev) = values.last() {
            // rounding noise between nearly coincident breakpoints
            lo = lo.max(prev.hi);
        }
        values.push(Interval::new(lo, hi.max(lo)));
    }

    let mut vertices = Vec::with_capacity(2 * grid.len());
    for (&x, val) in grid.iter().zip(&values) {
        match (val.lo.is_finite(), val.hi.is_finite()) {
            (false, false) => vertices.push((x, 0.0)),
            (true, false) => vertices.push((x, val.lo)),
            (false, true) => vertices.push((x, val.hi)),
            (true, true) => {
                vertices.push((x, val.lo));
                if val.hi > val.lo {
                    vertices.push((x, val.hi));
                }
            }
        }
    }

    let left = if values[0].lo == f64::NEG_INFINITY {
        Ray::Vertical
    } else {
        let mut slopes: Vec<f64> = graphs
            .iter()
            .zip(weights)
            .map(|(g, w)| match g.left {
                Some(Ray::Slope(s)) => s * w,
                _ => 0.0,
            })
            .collect();
        Ray::Slope(sorted_sum(&mut slopes))
    };
    let right = if values.last().unwrap().hi == f64::INFINITY {
        Ray::Vertical
    } else {
        let mut slopes: Vec<f64> = graphs
            .iter()
            .zip(weights)
            .map(|(g, w)| match g.right {
                Some(Ray::Slope(s)) => s * w,
                _ => 0.0,
            })
            .collect();
        Ray::Slope(sorted_sum(&mut slopes))
    };

    let graph = Pl1dGraph::new(vertices, left, right)?;
    let maximal = graph.is_maximal();
    Ok(MinkowskiMean { graph, maximal })
}

/// Aumann mean of a finite-support random graph: the probability-weighted
/// Minkowski mean of its atoms.
pub fn aumann_mean_finite(mixture: &[(Pl1dGraph, f64)]) -> Result<MinkowskiMean> {
    let graphs: Vec<Pl1dGraph> = mixture.iter().map(|(g, _)| g.clone()).collect();
    let probs: Vec<f64> = mixture.iter().map(|(_, p)| *p).collect();
    minkowski_mean(&graphs, &probs)
}

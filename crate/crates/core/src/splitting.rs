//! Davis–Yin three-operator splitting, the product-space lift that turns it
//! into a resolvent evaluator for weighted means, and the proximal point
//! zero finder.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{check_dim, check_step, Error, Result};
use crate::operator::OperatorHandle;
use crate::pl1d::check_weights;
use crate::point::Point;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    /// Splitting step; the smooth term is 1-cocoercive so it must lie in (0, 2).
    pub step: f64,
    /// Relaxation, in (0, 2 - step/2].
    pub relaxation: f64,
    /// Fixed-point residual at which the iteration stops.
    pub tol: f64,
    pub max_iter: usize,
    /// Keep every residual in [`SolveReport::residual_history`].
    pub record_history: bool,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings { step: 1.0, relaxation: 1.0, tol: 1e-9, max_iter: 100_000, record_history: false }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step < 2.0) {
            return Err(Error::PreconditionViolated(format!("step {} outside (0, 2)", self.step)));
        }
        let cap = 2.0 - self.step / 2.0;
        if !(self.relaxation > 0.0 && self.relaxation <= cap) {
            return Err(Error::PreconditionViolated(format!(
                "relaxation {} outside (0, {cap}]",
                self.relaxation
            )));
        }
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return Err(Error::PreconditionViolated(format!("tolerance {} must be positive", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::PreconditionViolated("max_iter must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub solution: Point,
    pub iterations: usize,
    pub final_residual: f64,
    pub converged: bool,
    pub residual_history: Vec<f64>,
    /// For lifted solves: largest distance of a block from the block average.
    pub block_spread: f64,
}

impl SolveReport {
    /// The solution, or `NonConvergence` when the budget ran out.
    pub fn into_solution(self) -> Result<Point> {
        if self.converged {
            Ok(self.solution)
        } else {
            Err(Error::NonConvergence { iterations: self.iterations, residual: self.final_residual })
        }
    }
}

/// Anything with a computable resolvent `y -> J_{γA}(y)`.
pub trait ResolventMap {
    fn dim(&self) -> usize;
    fn resolvent(&self, gamma: f64, y: &Point) -> Result<Point>;
}

impl ResolventMap for OperatorHandle {
    fn dim(&self) -> usize {
        OperatorHandle::dim(self)
    }

    fn resolvent(&self, gamma: f64, y: &Point) -> Result<Point> {
        OperatorHandle::resolvent(self, gamma, y)
    }
}

/// Solves `0 ∈ F(x) + A(x) + B(x)` for a 1-cocoercive `F`:
///
/// ```text
/// x_B = J_{γB}(z)
/// x_A = J_{γA}(2 x_B - z - γ F(x_B))
/// z  <- z + λ (x_A - x_B)
/// ```
///
/// The residual is `‖x_A - x_B‖ / γ`. The returned solution is `x_B`; when
/// the budget runs out the report comes back with `converged == false`.
pub fn davis_yin_solve<F, A, B>(
    smooth: F,
    a: &A,
    b: &B,
    start: Point,
    settings: &SolverSettings,
) -> Result<SolveReport>
where
    F: Fn(&Point) -> Point,
    A: ResolventMap + ?Sized,
    B: ResolventMap + ?Sized,
{
    settings.validate()?;
    check_dim(a.dim(), start.dim())?;
    check_dim(b.dim(), start.dim())?;
    let step = settings.step;
    let mut history = Vec::new();
    let mut z = start;
    let mut residual = f64::INFINITY;
    let mut x_b = z.clone();
    for it in 1..=settings.max_iter {
        x_b = b.resolvent(step, &z)?;
        let grad = smooth(&x_b);
        let reflected = x_b.scale(2.0).sub(&z).axpy(-step, &grad);
        let x_a = a.resolvent(step, &reflected)?;
        let diff = x_a.sub(&x_b);
        residual = diff.norm() / step;
        if settings.record_history {
            history.push(residual);
        }
        if !residual.is_finite() {
            return Err(Error::NonConvergence { iterations: it, residual });
        }
        if residual <= settings.tol {
            return Ok(SolveReport {
                solution: x_b,
                iterations: it,
                final_residual: residual,
                converged: true,
                residual_history: history,
                block_spread: 0.0,
            });
        }
        z = z.axpy(settings.relaxation, &diff);
    }
    Ok(SolveReport {
        solution: x_b,
        iterations: settings.max_iter,
        final_residual: residual,
        converged: false,
        residual_history: history,
        block_spread: 0.0,
    })
}

/// Normal cone of the diagonal `{(v, .., v)}` of `H^n`; its resolvent
/// replaces every block by the block average.
struct DiagonalCone {
    blocks: usize,
    block_dim: usize,
}

impl ResolventMap for DiagonalCone {
    fn dim(&self) -> usize {
        self.blocks * self.block_dim
    }

    fn resolvent(&self, _gamma: f64, y: &Point) -> Result<Point> {
        Ok(block_average(y, self.blocks).replicate(self.blocks))
    }
}

/// `w -> (c_k A_k(w_k))_k` with blockwise resolvents.
struct BlockDiagonal<'a> {
    ops: &'a [OperatorHandle],
    factors: Vec<f64>,
    block_dim: usize,
}

impl ResolventMap for BlockDiagonal<'_> {
    fn dim(&self) -> usize {
        self.ops.len() * self.block_dim
    }

    fn resolvent(&self, gamma: f64, y: &Point) -> Result<Point> {
        let blocks = y.blocks(self.ops.len());
        let solved = self
            .ops
            .iter()
            .zip(&self.factors)
            .zip(&blocks)
            .map(|((op, c), yk)| op.resolvent(gamma * c, yk))
            .collect::<Result<Vec<Point>>>()?;
        Ok(Point::concat(&solved))
    }
}

fn block_average(y: &Point, blocks: usize) -> Point {
    let d = y.dim() / blocks;
    let mut avg = alloc::vec![0.0; d];
    for chunk in y.as_slice().chunks(d) {
        for (a, v) in avg.iter_mut().zip(chunk) {
            *a += v;
        }
    }
    let inv = 1.0 / blocks as f64;
    Point::from_raw(avg.into_iter().map(|a| a * inv).collect())
}

/// Evaluates `J_{γ Σ w_k A_k}(y)` by Davis–Yin splitting on `H^n`.
///
/// With `ȳ = (y, .., y)` the lifted inclusion is
/// `0 ∈ (w - ȳ) + N_diag(w) + (γ n w_k A_k(w_k))_k`; at a diagonal solution
/// `(z, .., z)` summing the blocks gives `0 ∈ z - y + γ Σ w_k A_k(z)`. The
/// solution is the average of the returned blocks. `warm` seeds every block.
pub fn resolvent_of_mean(
    ops: &[OperatorHandle],
    weights: &[f64],
    y: &Point,
    gamma: f64,
    settings: &SolverSettings,
    warm: Option<&Point>,
) -> Result<SolveReport> {
    if ops.len() != weights.len() {
        return Err(Error::WeightError(format!("{} operators but {} weights", ops.len(), weights.len())));
    }
    check_weights(weights)?;
    check_step(gamma)?;
    let d = y.dim();
    for op in ops {
        check_dim(d, op.dim())?;
    }
    if let Some(w) = warm {
        check_dim(d, w.dim())?;
    }
    let n = ops.len();
    let y_bar = y.replicate(n);
    let cone = DiagonalCone { blocks: n, block_dim: d };
    let blocks = BlockDiagonal {
        ops,
        factors: weights.iter().map(|w| gamma * n as f64 * w).collect(),
        block_dim: d,
    };
    let start = warm.unwrap_or(y).replicate(n);
    let mut report = davis_yin_solve(|w: &Point| w.sub(&y_bar), &cone, &blocks, start, settings)?;
    let avg = block_average(&report.solution, n);
    report.block_spread = report
        .solution
        .blocks(n)
        .iter()
        .map(|b| b.distance(&avg))
        .fold(0.0, f64::max);
    report.solution = avg;
    Ok(report)
}

/// Proximal point iteration `x <- J(x)` until `‖x - J(x)‖ <= tol`.
///
/// Returns the last resolvent value. A report with `converged == false`
/// signals an empty or unreached zero set.
pub fn proximal_point_zero<R>(resolvent: R, x0: &Point, tol: f64, max_iter: usize) -> Result<SolveReport>
where
    R: Fn(&Point) -> Result<Point>,
{
    if !(tol > 0.0) || max_iter == 0 {
        return Err(Error::PreconditionViolated(format!("tol {tol} / max_iter {max_iter}")));
    }
    let mut x = x0.clone();
    let mut residual = f64::INFINITY;
    for it in 1..=max_iter {
        let next = resolvent(&x)?;
        residual = next.distance(&x);
        x = next;
        if residual <= tol {
            return Ok(SolveReport {
                solution: x,
                iterations: it,
                final_residual: residual,
                converged: true,
                residual_history: Vec::new(),
                block_spread: 0.0,
            });
        }
    }
    Ok(SolveReport {
        solution: x,
        iterations: max_iter,
        final_residual: residual,
        converged: false,
        residual_history: Vec::new(),
        block_spread: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pl1d::Pl1dGraph;

    fn p(x: f64) -> Point {
        Point::from(x)
    }

    #[test]
    fn davis_yin_examples() {
        let s = SolverSettings::default();
        let shift = |x: &Point| x.sub(&p(3.0));
        let zero = OperatorHandle::zero(1);
        let r = davis_yin_solve(shift, &zero, &zero, p(0.0), &s).unwrap();
        assert!(r.converged);
        assert!((r.solution[0] - 3.0).abs() < 1e-8);

        let id = OperatorHandle::identity(1);
        let r = davis_yin_solve(shift, &id, &id, p(0.0), &s).unwrap();
        assert!((r.solution[0] - 1.0).abs() < 1e-8);

        // 0 ∈ (x - 3) + ½·1·x + ½·3·x
        let half = OperatorHandle::scalar_affine(0.5, 0.0).unwrap();
        let three_halves = OperatorHandle::scalar_affine(1.5, 0.0).unwrap();
        let r = davis_yin_solve(shift, &half, &three_halves, p(0.0), &s).unwrap();
        assert!((r.solution[0] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn settings_guard() {
        let bad = SolverSettings { step: 2.5, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = SolverSettings { step: 1.0, relaxation: 1.6, ..Default::default() };
        assert!(bad.validate().is_err());
        let ok = SolverSettings { step: 1.0, relaxation: 1.5, ..Default::default() };
        assert!(ok.validate().is_ok());
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let s = SolverSettings { max_iter: 2, tol: 1e-15, ..Default::default() };
        let ops = [OperatorHandle::identity(1), OperatorHandle::scalar_affine(3.0, 0.0).unwrap()];
        let r = resolvent_of_mean(&ops, &[0.5, 0.5], &p(3.0), 1.0, &s, None).unwrap();
        assert!(!r.converged);
        assert!(matches!(r.into_solution(), Err(Error::NonConvergence { iterations: 2, .. })));
    }

    #[test]
    fn resolvent_of_mean_examples() {
        let s = SolverSettings::default();
        let ops = [OperatorHandle::identity(1), OperatorHandle::scalar_affine(3.0, 0.0).unwrap()];
        let r = resolvent_of_mean(&ops, &[0.5, 0.5], &p(3.0), 1.0, &s, None).unwrap();
        assert!((r.solution[0] - 1.0).abs() < 1e-8);
        assert!(r.block_spread <= 10.0 * s.tol);

        let abs = OperatorHandle::separable(alloc::vec![Pl1dGraph::abs()]).unwrap();
        let ops = [abs.clone(), OperatorHandle::identity(1)];
        let r = resolvent_of_mean(&ops, &[0.5, 0.5], &p(2.0), 1.0, &s, None).unwrap();
        assert!((r.solution[0] - 1.0).abs() < 1e-8);

        let r = resolvent_of_mean(std::slice::from_ref(&abs), &[1.0], &p(2.5), 0.5, &s, None).unwrap();
        let direct = abs.resolvent(0.5, &p(2.5)).unwrap();
        assert!(r.solution.distance(&direct) <= s.tol);
    }

    #[test]
    fn residuals_are_nonincreasing() {
        let s = SolverSettings { record_history: true, ..Default::default() };
        let ops = [
            OperatorHandle::separable(alloc::vec![Pl1dGraph::scaled_abs(2.0, 1.0).unwrap()]).unwrap(),
            OperatorHandle::scalar_affine(0.5, -1.0).unwrap(),
            OperatorHandle::separable(alloc::vec![Pl1dGraph::normal_cone(-1.0, 4.0).unwrap()]).unwrap(),
        ];
        let r = resolvent_of_mean(&ops, &[0.2, 0.5, 0.3], &p(-3.0), 1.0, &s, None).unwrap();
        assert!(r.converged);
        let h = &r.residual_history;
        for w in h.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-9) + 1e-15, "{} then {}", w[0], w[1]);
        }
    }

    #[test]
    fn proximal_point_examples() {
        let a = OperatorHandle::scalar_affine(1.0, -2.0).unwrap();
        let r = proximal_point_zero(|x| a.resolvent(1.0, x), &p(0.0), 1e-10, 1000).unwrap();
        assert!((r.solution[0] - 2.0).abs() < 1e-9);

        let kink = OperatorHandle::separable(alloc::vec![Pl1dGraph::scaled_abs(1.0, 3.0).unwrap()]).unwrap();
        let r = proximal_point_zero(|x| kink.resolvent(1.0, x), &p(0.0), 1e-10, 1000).unwrap();
        assert!((r.solution[0] - 3.0).abs() < 1e-9);

        let cone = OperatorHandle::separable(alloc::vec![Pl1dGraph::normal_cone(0.0, 1.0).unwrap()]).unwrap();
        let r = proximal_point_zero(|x| cone.resolvent(1.0, x), &p(5.0), 1e-10, 1000).unwrap();
        assert!((0.0..=1.0).contains(&r.solution[0]));

        // x -> 1 has no zero
        let none = OperatorHandle::scalar_affine(0.0, 1.0).unwrap();
        let r = proximal_point_zero(|x| none.resolvent(1.0, x), &p(0.0), 1e-10, 50).unwrap();
        assert!(!r.converged);
    }
}

//! Maximal monotone operators on R^d and their single-operator calculus.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::ToString;
use alloc::sync::Arc;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{check_dim, check_step, Error, Result};
use crate::pl1d::{check_weights, minkowski_mean, Pl1dGraph, Ray};
use crate::point::Point;
use crate::set::SetDescription;
use crate::splitting::{resolvent_of_mean, SolverSettings};

pub type Matrix = DMatrix<f64>;

/// Smallest admissible eigenvalue of `(M + M^T)/2` for an affine operator.
pub const MONOTONICITY_FLOOR: f64 = -1e-10;

/// Default tolerance for the resolvent residual `‖y - x - γa‖`.
pub const RESOLVENT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub enum OperatorKind {
    /// `x -> Mx + b`.
    Affine { matrix: Matrix, offset: Point },
    /// `x -> (G_i(x_i))_i`.
    Separable(Vec<Pl1dGraph>),
    /// `x -> inner(x) - shift`.
    Shifted { inner: OperatorHandle, shift: Point },
    /// `x -> factor * inner(x)`.
    Scaled { inner: OperatorHandle, factor: f64 },
    /// `x -> Σ w_k A_k(x)`, weights positive and summing to one.
    WeightedSum(Vec<(f64, OperatorHandle)>),
}

/// Immutable, cheaply clonable handle to a monotone operator.
#[derive(Debug, Clone)]
pub struct OperatorHandle {
    kind: Arc<OperatorKind>,
    dim: usize,
}

impl PartialEq for OperatorHandle {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.kind, &other.kind) || (self.dim == other.dim && self.kind == other.kind)
    }
}

/// Smallest eigenvalue of the symmetric part of `m`.
pub fn symmetric_part_floor(m: &Matrix) -> f64 {
    let sym = (m + m.transpose()) * 0.5;
    SymmetricEigen::new(sym).eigenvalues.min()
}

impl OperatorHandle {
    fn wrap(kind: OperatorKind, dim: usize) -> Self {
        OperatorHandle { kind: Arc::new(kind), dim }
    }

    pub fn affine(matrix: Matrix, offset: Point) -> Result<Self> {
        let d = offset.dim();
        check_dim(d, matrix.nrows())?;
        check_dim(d, matrix.ncols())?;
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let floor = symmetric_part_floor(&matrix);
        if floor < MONOTONICITY_FLOOR {
            return Err(Error::NotMonotone(floor));
        }
        Ok(Self::wrap(OperatorKind::Affine { matrix, offset }, d))
    }

    /// `x -> slope * x + offset` on the real line.
    pub fn scalar_affine(slope: f64, offset: f64) -> Result<Self> {
        Self::affine(Matrix::from_element(1, 1, slope), Point::new(alloc::vec![offset])?)
    }

    pub fn zero(dim: usize) -> Self {
        Self::wrap(OperatorKind::Affine { matrix: Matrix::zeros(dim, dim), offset: Point::zeros(dim) }, dim)
    }

    pub fn identity(dim: usize) -> Self {
        Self::wrap(OperatorKind::Affine { matrix: Matrix::identity(dim, dim), offset: Point::zeros(dim) }, dim)
    }

    pub fn separable(graphs: Vec<Pl1dGraph>) -> Result<Self> {
        if graphs.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        if let Some(g) = graphs.iter().find(|g| !g.is_maximal()) {
            let (x0, y0) = g.vertices()[0];
            return Err(Error::NotMaximal(x0 + y0));
        }
        let d = graphs.len();
        Ok(Self::wrap(OperatorKind::Separable(graphs), d))
    }

    /// `A - z`, whose resolvent satisfies `J_{γ(A-z)}(y) = J_{γA}(y + γz)`.
    pub fn shift(&self, z: &Point) -> Result<Self> {
        check_dim(self.dim, z.dim())?;
        Ok(Self::wrap(OperatorKind::Shifted { inner: self.clone(), shift: z.clone() }, self.dim))
    }

    pub fn scale(&self, factor: f64) -> Result<Self> {
        check_step(factor)?;
        Ok(Self::wrap(OperatorKind::Scaled { inner: self.clone(), factor }, self.dim))
    }

    /// Minkowski combination `Σ w_k A_k`. The result is assumed maximal.
    pub fn weighted_sum(terms: Vec<(f64, OperatorHandle)>) -> Result<Self> {
        let first = terms.first().ok_or_else(|| Error::WeightError("no terms".to_string()))?;
        let d = first.1.dim;
        for (_, op) in &terms {
            check_dim(d, op.dim)?;
        }
        let weights: Vec<f64> = terms.iter().map(|t| t.0).collect();
        check_weights(&weights)?;
        Ok(Self::wrap(OperatorKind::WeightedSum(terms), d))
    }

    /// Empirical mean `(1/n) Σ A_k`, with identical operators merged into one
    /// term carrying their combined weight (exact: value sets are convex).
    /// Terms keep their order of first appearance.
    pub fn mean_of(ops: &[OperatorHandle]) -> Result<Self> {
        let n = ops.len();
        if n == 0 {
            return Err(Error::WeightError("empty mean".to_string()));
        }
        let mut index: BTreeMap<Vec<u64>, usize> = BTreeMap::new();
        let mut groups: Vec<(usize, OperatorHandle)> = Vec::new();
        let mut key = Vec::new();
        for op in ops {
            key.clear();
            op.fingerprint(&mut key);
            match index.get(&key) {
                Some(&i) => groups[i].0 += 1,
                None => {
                    index.insert(key.clone(), groups.len());
                    groups.push((1, op.clone()));
                }
            }
        }
        let terms = groups
            .into_iter()
            .map(|(count, op)| (count as f64 / n as f64, op))
            .collect();
        Self::weighted_sum(terms)
    }

    pub fn kind(&self) -> &OperatorKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Bit-exact structural key; equal keys mean identical operators.
    pub fn fingerprint(&self, out: &mut Vec<u64>) {
        out.push(self.dim as u64);
        match &*self.kind {
            OperatorKind::Affine { matrix, offset } => {
                out.push(1);
                out.extend(matrix.iter().map(|v| v.to_bits()));
                out.extend(offset.as_slice().iter().map(|v| v.to_bits()));
            }
            OperatorKind::Separable(graphs) => {
                out.push(2);
                for g in graphs {
                    out.push(g.vertices().len() as u64);
                    for &(x, y) in g.vertices() {
                        out.push(x.to_bits());
                        out.push(y.to_bits());
                    }
                    for ray in [g.left_ray(), g.right_ray()] {
                        match ray {
                            Some(Ray::Slope(s)) => {
                                out.push(0);
                                out.push(s.to_bits());
                            }
                            Some(Ray::Vertical) => out.push(1),
                            None => out.push(2),
                        }
                    }
                    out.push(g.gaps().len() as u64);
                    out.extend(g.gaps().iter().map(|&i| i as u64));
                }
            }
            OperatorKind::Shifted { inner, shift } => {
                out.push(3);
                out.extend(shift.as_slice().iter().map(|v| v.to_bits()));
                inner.fingerprint(out);
            }
            OperatorKind::Scaled { inner, factor } => {
                out.push(4);
                out.push(factor.to_bits());
                inner.fingerprint(out);
            }
            OperatorKind::WeightedSum(terms) => {
                out.push(5);
                out.push(terms.len() as u64);
                for (w, op) in terms {
                    out.push(w.to_bits());
                    op.fingerprint(out);
                }
            }
        }
    }

    fn check_point(&self, p: &Point) -> Result<()> {
        check_dim(self.dim, p.dim())
    }

    /// `J_{γA}(y)`, using default solver settings for weighted sums.
    pub fn resolvent(&self, gamma: f64, y: &Point) -> Result<Point> {
        self.resolvent_with(gamma, y, &SolverSettings::default())
    }

    pub fn resolvent_with(&self, gamma: f64, y: &Point, settings: &SolverSettings) -> Result<Point> {
        check_step(gamma)?;
        self.check_point(y)?;
        match &*self.kind {
            OperatorKind::Affine { matrix, offset } => {
                let d = self.dim;
                let lhs = Matrix::identity(d, d) + matrix * gamma;
                let rhs = DVector::from_iterator(
                    d,
                    y.as_slice().iter().zip(offset.as_slice()).map(|(yi, bi)| yi - gamma * bi),
                );
                let x = lhs
                    .lu()
                    .solve(&rhs)
                    .ok_or_else(|| Error::PreconditionViolated("I + γM is singular".to_string()))?;
                Point::new(x.iter().copied().collect())
            }
            OperatorKind::Separable(graphs) => {
                let xs = graphs
                    .iter()
                    .zip(y.as_slice())
                    .map(|(g, &yi)| g.resolvent(gamma, yi))
                    .collect::<Result<Vec<f64>>>()?;
                Point::new(xs)
            }
            OperatorKind::Shifted { inner, shift } => inner.resolvent_with(gamma, &y.axpy(gamma, shift), settings),
            OperatorKind::Scaled { inner, factor } => inner.resolvent_with(gamma * factor, y, settings),
            OperatorKind::WeightedSum(terms) => {
                let ops: Vec<OperatorHandle> = terms.iter().map(|t| t.1.clone()).collect();
                let weights: Vec<f64> = terms.iter().map(|t| t.0).collect();
                resolvent_of_mean(&ops, &weights, y, gamma, settings, None)?.into_solution()
            }
        }
    }

    /// Yosida approximation `(x - J_{γA}(x)) / γ`.
    pub fn yosida(&self, gamma: f64, x: &Point) -> Result<Point> {
        let j = self.resolvent(gamma, x)?;
        Ok(x.sub(&j).scale(1.0 / gamma))
    }

    /// The exact value set `A(x)`.
    pub fn evaluate_set(&self, x: &Point) -> Result<SetDescription> {
        self.check_point(x)?;
        Ok(match &*self.kind {
            OperatorKind::Affine { matrix, offset } => {
                let v = matrix * DVector::from_column_slice(x.as_slice());
                SetDescription::Singleton(Point::from_raw(
                    v.iter().zip(offset.as_slice()).map(|(a, b)| a + b).collect(),
                ))
            }
            OperatorKind::Separable(graphs) => SetDescription::from_intervals(
                graphs.iter().zip(x.as_slice()).map(|(g, &xi)| g.value_at(xi)).collect(),
            ),
            OperatorKind::Shifted { inner, shift } => inner.evaluate_set(x)?.translate(&shift.scale(-1.0)),
            OperatorKind::Scaled { inner, factor } => inner.evaluate_set(x)?.scale(*factor),
            OperatorKind::WeightedSum(terms) => {
                let mut acc = SetDescription::Singleton(Point::zeros(self.dim));
                for (w, op) in terms {
                    acc = acc.add_scaled(*w, &op.evaluate_set(x)?);
                    if acc.is_empty() {
                        break;
                    }
                }
                acc
            }
        })
    }

    /// `A_0(x)`, the projection of the origin onto `A(x)`.
    pub fn least_norm_element(&self, x: &Point) -> Result<Point> {
        self.evaluate_set(x)?.least_norm().ok_or(Error::EmptyValue)
    }

    /// A graph pair `(J_{γA}(y), (y - J_{γA}(y))/γ)`; the second entry lies
    /// in `A` at the first.
    pub fn graph_pair(&self, gamma: f64, y: &Point) -> Result<(Point, Point)> {
        let x = self.resolvent(gamma, y)?;
        let a = y.sub(&x).scale(1.0 / gamma);
        Ok((x, a))
    }

    /// `min_{a ∈ A(x)} ‖y - x - γa‖`, the residual of a candidate resolvent
    /// value `x` of `y`.
    pub fn resolvent_residual(&self, gamma: f64, y: &Point, x: &Point) -> Result<f64> {
        let a = y.sub(x).scale(1.0 / gamma);
        Ok(gamma * self.evaluate_set(x)?.distance(&a))
    }

    /// An equivalent operator without weighted sums, when one can be formed
    /// exactly: sums of affine maps fuse into one affine map, sums of
    /// separable graphs (and diagonal affine maps) fuse coordinatewise by
    /// exact Minkowski means.
    pub fn closed_form(&self) -> Option<OperatorHandle> {
        match &*self.kind {
            OperatorKind::Affine { .. } | OperatorKind::Separable(_) => Some(self.clone()),
            OperatorKind::Shifted { inner, shift } => match &*inner.closed_form()?.kind {
                OperatorKind::Affine { matrix, offset } => {
                    OperatorHandle::affine(matrix.clone(), offset.sub(shift)).ok()
                }
                OperatorKind::Separable(graphs) => OperatorHandle::separable(
                    graphs.iter().zip(shift.as_slice()).map(|(g, &z)| g.shift_values(z)).collect(),
                )
                .ok(),
                _ => None,
            },
            OperatorKind::Scaled { inner, factor } => match &*inner.closed_form()?.kind {
                OperatorKind::Affine { matrix, offset } => {
                    OperatorHandle::affine(matrix * *factor, offset.scale(*factor)).ok()
                }
                OperatorKind::Separable(graphs) => OperatorHandle::separable(
                    graphs.iter().map(|g| g.scale_values(*factor)).collect::<Result<Vec<_>>>().ok()?,
                )
                .ok(),
                _ => None,
            },
            OperatorKind::WeightedSum(terms) => {
                let forms = terms
                    .iter()
                    .map(|(w, op)| op.closed_form().map(|f| (*w, f)))
                    .collect::<Option<Vec<_>>>()?;
                let all_affine = forms.iter().all(|(_, f)| matches!(&*f.kind, OperatorKind::Affine { .. }));
                if all_affine {
                    let d = self.dim;
                    let mut m = Matrix::zeros(d, d);
                    let mut b = Point::zeros(d);
                    for (w, f) in &forms {
                        if let OperatorKind::Affine { matrix, offset } = &*f.kind {
                            m += matrix * *w;
                            b = b.axpy(*w, offset);
                        }
                    }
                    return OperatorHandle::affine(m, b).ok();
                }
                let per_term: Vec<Vec<Pl1dGraph>> = forms
                    .iter()
                    .map(|(_, f)| f.coordinate_graphs())
                    .collect::<Option<Vec<_>>>()?;
                let weights: Vec<f64> = forms.iter().map(|t| t.0).collect();
                let mut graphs = Vec::with_capacity(self.dim);
                for i in 0..self.dim {
                    let column: Vec<Pl1dGraph> = per_term.iter().map(|gs| gs[i].clone()).collect();
                    graphs.push(minkowski_mean(&column, &weights).ok()?.graph);
                }
                OperatorHandle::separable(graphs).ok()
            }
        }
    }

    /// Coordinate graphs of a separable operator or of a diagonal affine map.
    fn coordinate_graphs(&self) -> Option<Vec<Pl1dGraph>> {
        match &*self.kind {
            OperatorKind::Separable(graphs) => Some(graphs.clone()),
            OperatorKind::Affine { matrix, offset } => {
                let d = self.dim;
                let diagonal = (0..d).all(|i| (0..d).all(|j| i == j || matrix[(i, j)] == 0.0));
                if !diagonal {
                    return None;
                }
                (0..d)
                    .map(|i| Pl1dGraph::affine(matrix[(i, i)], offset[i]).ok())
                    .collect()
            }
            _ => None,
        }
    }
}

/// Builds an affine operator from row-major entries.
pub fn affine_from_rows(rows: &[Vec<f64>], offset: &[f64]) -> Result<OperatorHandle> {
    let d = offset.len();
    if rows.len() != d || rows.iter().any(|r| r.len() != d) {
        return Err(Error::PreconditionViolated(format!("matrix must be {d}x{d}")));
    }
    let m = Matrix::from_row_iterator(d, d, rows.iter().flat_map(|r| r.iter().copied()));
    OperatorHandle::affine(m, Point::new(offset.to_vec())?)
}

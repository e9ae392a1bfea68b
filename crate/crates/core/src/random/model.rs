use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::operator::{symmetric_part_floor, Matrix, OperatorHandle, MONOTONICITY_FLOOR};
use crate::pl1d::{aumann_mean_finite, Pl1dGraph};
use crate::point::Point;
use crate::random::law::ScalarLaw;
use crate::random::seed::{mix64, DrawRng};
use crate::random::selection::{balanced_selection, SelectionSpec};
use crate::set::SetDescription;

/// Number of operators in the planar gallery cycle (A, B, N_{0}).
pub const GALLERY_CYCLE: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// `A(ξ)(x) = q(ξ) P x - b(ξ)`, `b` drawn independently per coordinate;
    /// `P` is a fixed PSD shape (identity when `None`).
    Quadratic { q: ScalarLaw, b: ScalarLaw, shape: Option<Matrix> },
    /// Coordinatewise `λ(ξ) ∂|x_i - c_i(ξ)|`, one scale per draw and one
    /// center per coordinate.
    ScaledL1 { scale: ScalarLaw, center: ScalarLaw },
    /// Coordinatewise graphs drawn independently from a finite table.
    Pl1dMixture { table: Vec<(Pl1dGraph, f64)> },
    /// `A(ξ)(x) = (S + K(ξ)) x - b(ξ)` with `K` skew-symmetric: each entry
    /// above the diagonal is an independent draw.
    AffineSkew { sym: Matrix, skew: ScalarLaw, b: ScalarLaw },
    /// Deterministic cycle over the planar gallery operators; these have no
    /// handle representation.
    PhelpsGallery,
}

/// One sampled operator together with the parameters it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct Draw {
    pub k: u64,
    /// Scalar parameters in draw order (family specific).
    pub values: Vec<f64>,
    /// Atom index of each value whose law has finite support.
    pub atoms: Vec<Option<usize>>,
    pub operator: Option<OperatorHandle>,
}

impl Draw {
    pub fn digest(&self) -> u64 {
        self.values.iter().fold(mix64(self.k), |h, v| mix64(h ^ v.to_bits()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomOperatorModel {
    family: Family,
    dim: usize,
    seed: u64,
}

fn check_psd(m: &Matrix, d: usize, what: &str) -> Result<()> {
    if m.nrows() != d || m.ncols() != d {
        return Err(Error::DimensionMismatch { expected: d, found: m.nrows() });
    }
    let floor = symmetric_part_floor(m);
    if floor < MONOTONICITY_FLOOR {
        return Err(Error::InvalidLaw(format!("{what} is not positive semidefinite (eigenvalue {floor:e})")));
    }
    Ok(())
}

impl RandomOperatorModel {
    pub fn new(family: Family, dim: usize, seed: u64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        match &family {
            Family::Quadratic { q, b, shape } => {
                q.validate()?;
                b.validate()?;
                if q.support_min() < 0.0 {
                    return Err(Error::InvalidLaw("q must be nonnegative".into()));
                }
                if let Some(p) = shape {
                    check_psd(p, dim, "shape")?;
                }
            }
            Family::ScaledL1 { scale, center } => {
                scale.validate()?;
                center.validate()?;
                if !(scale.support_min() > 0.0) {
                    return Err(Error::InvalidLaw("scale must be positive".into()));
                }
            }
            Family::Pl1dMixture { table } => {
                if table.is_empty() {
                    return Err(Error::InvalidLaw("empty graph table".into()));
                }
                if table.iter().any(|(g, _)| !g.is_maximal()) {
                    return Err(Error::InvalidLaw("table graphs must be maximal".into()));
                }
                ScalarLaw::Table(table.iter().enumerate().map(|(i, (_, p))| (i as f64, *p)).collect())
                    .validate()?;
            }
            Family::AffineSkew { sym, skew, b } => {
                skew.validate()?;
                b.validate()?;
                check_psd(sym, dim, "symmetric part")?;
            }
            Family::PhelpsGallery => {
                if dim != 2 {
                    return Err(Error::DimensionMismatch { expected: 2, found: dim });
                }
            }
        }
        Ok(RandomOperatorModel { family, dim, seed })
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        RandomOperatorModel { seed, ..self.clone() }
    }

    fn shape(&self, shape: &Option<Matrix>) -> Matrix {
        shape.clone().unwrap_or_else(|| Matrix::identity(self.dim, self.dim))
    }

    fn skew_pattern(&self, entries: &[f64]) -> Matrix {
        let d = self.dim;
        let mut k = Matrix::zeros(d, d);
        let mut it = entries.iter();
        for i in 0..d {
            for j in i + 1..d {
                let v = *it.next().expect("skew entry count");
                k[(i, j)] = v;
                k[(j, i)] = -v;
            }
        }
        k
    }

    /// Draw `k >= 1` of trial `trial`.
    pub fn draw(&self, trial: u64, k: u64) -> Result<Draw> {
        if k == 0 {
            return Err(Error::PreconditionViolated("draw indices start at 1".into()));
        }
        let d = self.dim;
        let mut rng = DrawRng::for_draw(self.seed, trial, k);
        let mut values = Vec::new();
        let mut atoms = Vec::new();
        let mut take = |law: &ScalarLaw, rng: &mut DrawRng| {
            let (v, a) = law.sample(rng);
            values.push(v);
            atoms.push(a);
            v
        };
        let operator = match &self.family {
            Family::Quadratic { q, b, shape } => {
                let qv = take(q, &mut rng);
                let bs: Vec<f64> = (0..d).map(|_| take(b, &mut rng)).collect();
                let m = self.shape(shape) * qv;
                Some(OperatorHandle::affine(m, Point::new(bs.iter().map(|v| -v).collect())?)?)
            }
            Family::ScaledL1 { scale, center } => {
                let lam = take(scale, &mut rng);
                let graphs = (0..d)
                    .map(|_| Pl1dGraph::scaled_abs(lam, take(center, &mut rng)))
                    .collect::<Result<Vec<_>>>()?;
                Some(OperatorHandle::separable(graphs)?)
            }
            Family::Pl1dMixture { table } => {
                let law = ScalarLaw::Table(table.iter().enumerate().map(|(i, (_, p))| (i as f64, *p)).collect());
                let graphs = (0..d)
                    .map(|_| table[take(&law, &mut rng) as usize].0.clone())
                    .collect();
                Some(OperatorHandle::separable(graphs)?)
            }
            Family::AffineSkew { sym, skew, b } => {
                let entries: Vec<f64> = (0..d * (d - 1) / 2).map(|_| take(skew, &mut rng)).collect();
                let bs: Vec<f64> = (0..d).map(|_| take(b, &mut rng)).collect();
                let m = sym + self.skew_pattern(&entries);
                Some(OperatorHandle::affine(m, Point::new(bs.iter().map(|v| -v).collect())?)?)
            }
            Family::PhelpsGallery => {
                let index = ((k - 1) as usize) % GALLERY_CYCLE;
                values.push(index as f64);
                atoms.push(Some(index));
                None
            }
        };
        Ok(Draw { k, values, atoms, operator })
    }

    /// The operator of draw `k` in trial `trial`.
    pub fn sample_in_trial(&self, trial: u64, k: u64) -> Result<OperatorHandle> {
        self.draw(trial, k)?.operator.ok_or(Error::Unrepresentable)
    }

    /// The operator of draw `k` in trial 0.
    pub fn sample(&self, k: u64) -> Result<OperatorHandle> {
        self.sample_in_trial(0, k)
    }

    fn scaled_l1_atoms(&self, scale: &ScalarLaw, center: &ScalarLaw) -> Result<Vec<(Pl1dGraph, f64)>> {
        let (Some(ls), Some(cs)) = (scale.atoms(), center.atoms()) else {
            return Err(Error::Unavailable);
        };
        let mut table = Vec::with_capacity(ls.len() * cs.len());
        for (lam, pl) in &ls {
            for (c, pc) in &cs {
                table.push((Pl1dGraph::scaled_abs(*lam, *c)?, pl * pc));
            }
        }
        Ok(table)
    }

    /// The Aumann mean `𝒜`, when it has a closed form.
    pub fn mean_operator(&self) -> Result<OperatorHandle> {
        let d = self.dim;
        match &self.family {
            Family::Quadratic { q, b, shape } => {
                let m = self.shape(shape) * q.mean();
                OperatorHandle::affine(m, Point::splat(d, -b.mean()))
            }
            Family::AffineSkew { sym, skew, b } => {
                let entries = alloc::vec![skew.mean(); d * (d - 1) / 2];
                OperatorHandle::affine(sym + self.skew_pattern(&entries), Point::splat(d, -b.mean()))
            }
            Family::ScaledL1 { scale, center } => {
                let table = self.scaled_l1_atoms(scale, center)?;
                let g = aumann_mean_finite(&table)?.graph;
                OperatorHandle::separable(alloc::vec![g; d])
            }
            Family::Pl1dMixture { table } => {
                let g = aumann_mean_finite(table)?.graph;
                OperatorHandle::separable(alloc::vec![g; d])
            }
            Family::PhelpsGallery => Err(Error::Unavailable),
        }
    }

    /// `Z(𝒜)` as a singleton or a box.
    pub fn mean_zero_set(&self) -> Result<SetDescription> {
        let mean = self.mean_operator()?;
        match mean.kind() {
            crate::operator::OperatorKind::Affine { matrix, offset } => {
                let rhs = nalgebra::DVector::from_iterator(self.dim, offset.as_slice().iter().map(|b| -b));
                let x = matrix
                    .clone()
                    .lu()
                    .solve(&rhs)
                    .ok_or_else(|| Error::PreconditionViolated("mean operator is singular".into()))?;
                Ok(SetDescription::Singleton(Point::new(x.iter().copied().collect())?))
            }
            crate::operator::OperatorKind::Separable(graphs) => {
                Ok(SetDescription::from_intervals(graphs.iter().map(Pl1dGraph::zero_set).collect()))
            }
            _ => Err(Error::Unavailable),
        }
    }

    /// An explicit centered selection of `ξ -> A(ξ)(x⋆)` for `x⋆ ∈ Z(𝒜)`.
    pub fn selection_at(&self, point: &Point) -> Result<SelectionSpec> {
        crate::error::check_dim(self.dim, point.dim())?;
        let mean = self.mean_operator()?;
        let gap = mean.evaluate_set(point)?.distance(&Point::zeros(self.dim));
        if !(gap <= 1e-9 * (1.0 + point.norm())) {
            return Err(Error::NotAZero(gap));
        }
        match &self.family {
            Family::Quadratic { .. } | Family::AffineSkew { .. } => Ok(SelectionSpec::operator_value(point.clone())),
            Family::ScaledL1 { scale, center } => {
                let table = self.scaled_l1_atoms(scale, center)?;
                let n_centers = center.atoms().map(|a| a.len()).unwrap_or(0);
                let per_coord = point
                    .as_slice()
                    .iter()
                    .map(|&x| {
                        let cells: Vec<_> = table.iter().map(|(g, p)| (g.value_at(x), *p)).collect();
                        balanced_selection(&cells)
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(SelectionSpec::scaled_l1(point.clone(), per_coord, n_centers))
            }
            Family::Pl1dMixture { table } => {
                let per_coord = point
                    .as_slice()
                    .iter()
                    .map(|&x| {
                        let cells: Vec<_> = table.iter().map(|(g, p)| (g.value_at(x), *p)).collect();
                        balanced_selection(&cells)
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(SelectionSpec::mixture(point.clone(), per_coord))
            }
            Family::PhelpsGallery => Err(Error::Unavailable),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half_half(a: f64, b: f64) -> ScalarLaw {
        ScalarLaw::Table(alloc::vec![(a, 0.5), (b, 0.5)])
    }

    #[test]
    fn quadratic_samples_and_mean() {
        let model = RandomOperatorModel::new(
            Family::Quadratic { q: half_half(1.0, 3.0), b: ScalarLaw::Dirac(0.0), shape: None },
            1,
            42,
        )
        .unwrap();
        let one = OperatorHandle::scalar_affine(1.0, 0.0).unwrap();
        let three = OperatorHandle::scalar_affine(3.0, 0.0).unwrap();
        let n = 10_000;
        let mut ones = 0usize;
        for k in 1..=n {
            let op = model.sample(k).unwrap();
            assert!(op == one || op == three);
            if op == one {
                ones += 1;
            }
        }
        let sigma = (n as f64 * 0.25).sqrt();
        assert!((ones as f64 - n as f64 / 2.0).abs() <= 3.0 * sigma, "{ones}");
        assert_eq!(model.sample(17).unwrap(), model.sample(17).unwrap());

        let model = RandomOperatorModel::new(
            Family::Quadratic { q: half_half(1.0, 3.0), b: half_half(-1.0, 1.0), shape: None },
            1,
            42,
        )
        .unwrap();
        let mean = model.mean_operator().unwrap();
        assert_eq!(mean, OperatorHandle::scalar_affine(2.0, 0.0).unwrap());
        assert_eq!(mean.resolvent(1.0, &Point::from(3.0)).unwrap(), Point::from(1.0));
    }

    #[test]
    fn skew_family_keeps_symmetric_part() {
        let model = RandomOperatorModel::new(
            Family::AffineSkew {
                sym: Matrix::identity(2, 2),
                skew: ScalarLaw::Uniform { lo: -3.0, hi: 3.0 },
                b: ScalarLaw::Dirac(0.0),
            },
            2,
            5,
        )
        .unwrap();
        for k in 1..20 {
            let op = model.sample(k).unwrap();
            if let crate::operator::OperatorKind::Affine { matrix, .. } = op.kind() {
                let sym = (matrix + matrix.transpose()) * 0.5;
                assert!((sym - Matrix::identity(2, 2)).abs().max() < 1e-15);
            } else {
                panic!("affine expected");
            }
        }
    }

    #[test]
    fn dirac_model_is_its_operator() {
        let model = RandomOperatorModel::new(
            Family::Quadratic { q: ScalarLaw::Dirac(2.0), b: ScalarLaw::Dirac(1.0), shape: None },
            1,
            0,
        )
        .unwrap();
        assert_eq!(model.mean_operator().unwrap(), model.sample(3).unwrap());
        let sel = model.selection_at(&Point::from(0.5)).unwrap();
        let draw = model.draw(0, 4).unwrap();
        assert_eq!(sel.value(&draw).unwrap(), Point::from(0.0));
    }

    #[test]
    fn scaled_l1_mean_and_selection() {
        let model = RandomOperatorModel::new(
            Family::ScaledL1 { scale: ScalarLaw::Dirac(1.0), center: ScalarLaw::Dirac(0.0) },
            1,
            0,
        )
        .unwrap();
        let mean = model.mean_operator().unwrap();
        assert_eq!(mean, OperatorHandle::separable(alloc::vec![Pl1dGraph::abs()]).unwrap());

        let model = RandomOperatorModel::new(
            Family::ScaledL1 { scale: half_half(1.0, 2.0), center: ScalarLaw::Dirac(0.0) },
            1,
            3,
        )
        .unwrap();
        let sel = model.selection_at(&Point::from(0.0)).unwrap();
        for k in 1..50 {
            assert_eq!(sel.value(&model.draw(0, k).unwrap()).unwrap(), Point::from(0.0));
        }
        let continuous = RandomOperatorModel::new(
            Family::ScaledL1 { scale: ScalarLaw::Dirac(1.0), center: ScalarLaw::Uniform { lo: -1.0, hi: 1.0 } },
            1,
            3,
        )
        .unwrap();
        assert_eq!(continuous.mean_operator(), Err(Error::Unavailable));
    }

    #[test]
    fn centered_affine_selection() {
        let model = RandomOperatorModel::new(
            Family::Quadratic { q: ScalarLaw::Dirac(1.0), b: half_half(-1.0, 1.0), shape: None },
            1,
            9,
        )
        .unwrap();
        let sel = model.selection_at(&Point::from(0.0)).unwrap();
        for k in 1..30 {
            let draw = model.draw(0, k).unwrap();
            assert_eq!(sel.value(&draw).unwrap(), Point::from(-draw.values[1]));
        }
        assert!(matches!(model.selection_at(&Point::from(0.5)), Err(Error::NotAZero(_))));
    }

    #[test]
    fn gallery_draws_cycle() {
        let model = RandomOperatorModel::new(Family::PhelpsGallery, 2, 0).unwrap();
        let idx: Vec<_> = (1..=6).map(|k| model.draw(0, k).unwrap().atoms[0].unwrap()).collect();
        assert_eq!(idx, alloc::vec![0, 1, 2, 0, 1, 2]);
        assert_eq!(model.sample(1), Err(Error::Unrepresentable));
        assert_eq!(model.mean_operator(), Err(Error::Unavailable));
    }
}

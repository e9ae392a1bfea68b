use alloc::vec::Vec;

use crate::error::{check_dim, Error, Result};
use crate::interval::Interval;
use crate::point::Point;
use crate::random::model::Draw;

/// Slack allowed when checking that the weighted cells can be centered.
const CENTERING_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
enum Selector {
    /// `φ(ξ) = A(ξ)(x⋆)` for single-valued families.
    OperatorValue,
    /// `φ(ξ)_i = tables[i][λ index * centers + c_i index]`.
    ScaledL1 { tables: Vec<Vec<f64>>, centers: usize },
    /// `φ(ξ)_i = tables[i][graph index of coordinate i]`.
    Mixture { tables: Vec<Vec<f64>> },
}

/// A centered selection `φ` of `ξ -> A(ξ)(x⋆)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionSpec {
    point: Point,
    selector: Selector,
}

impl SelectionSpec {
    pub(crate) fn operator_value(point: Point) -> Self {
        SelectionSpec { point, selector: Selector::OperatorValue }
    }

    pub(crate) fn scaled_l1(point: Point, tables: Vec<Vec<f64>>, centers: usize) -> Self {
        SelectionSpec { point, selector: Selector::ScaledL1 { tables, centers } }
    }

    pub(crate) fn mixture(point: Point, tables: Vec<Vec<f64>>) -> Self {
        SelectionSpec { point, selector: Selector::Mixture { tables } }
    }

    pub fn point(&self) -> &Point {
        &self.point
    }

    /// `φ(ξ_k)` for the given draw.
    pub fn value(&self, draw: &Draw) -> Result<Point> {
        let d = self.point.dim();
        let atom = |i: usize| draw.atoms.get(i).copied().flatten().ok_or(Error::Unavailable);
        match &self.selector {
            Selector::OperatorValue => {
                let op = draw.operator.as_ref().ok_or(Error::Unrepresentable)?;
                op.least_norm_element(&self.point)
            }
            Selector::ScaledL1 { tables, centers } => {
                check_dim(d + 1, draw.atoms.len())?;
                let lam = atom(0)?;
                let values = (0..d)
                    .map(|i| Ok(tables[i][lam * centers + atom(i + 1)?]))
                    .collect::<Result<Vec<_>>>()?;
                Point::new(values)
            }
            Selector::Mixture { tables } => {
                check_dim(d, draw.atoms.len())?;
                let values = (0..d).map(|i| Ok(tables[i][atom(i)?])).collect::<Result<Vec<_>>>()?;
                Point::new(values)
            }
        }
    }
}

/// Picks `v_j ∈ cells[j].0` with `Σ p_j v_j = 0`, starting from the
/// projection of 0 onto each cell and then moving cells in order until the
/// weighted sum vanishes.
pub fn balanced_selection(cells: &[(Interval, f64)]) -> Result<Vec<f64>> {
    let mut values = cells
        .iter()
        .map(|(cell, _)| cell.project(0.0).ok_or(Error::EmptyValue))
        .collect::<Result<Vec<_>>>()?;
    let mut excess: f64 = cells.iter().zip(&values).map(|((_, p), v)| p * v).sum();
    for (j, (cell, p)) in cells.iter().enumerate() {
        if excess == 0.0 {
            break;
        }
        // move v_j by -excess / p, clamped to the cell
        let target = values[j] - excess / p;
        let moved = target.clamp(cell.lo, cell.hi);
        excess += p * (moved - values[j]);
        values[j] = moved;
    }
    if excess.abs() > CENTERING_TOL {
        return Err(Error::NotAZero(excess.abs()));
    }
    Ok(values)
}

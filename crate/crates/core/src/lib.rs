//! Maximal monotone operators on `ℝ^d`: resolvents and Yosida maps, exact
//! piecewise-linear graphs on the line, a three-operator splitting for
//! resolvents of finite means, random operator families and the probe-based
//! distance used to measure convergence of empirical means.
//!
//! The crate is `no_std` and only needs `alloc`.

#![cfg_attr(not(test), no_std)]
// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod error;
pub mod interval;
pub mod monotone;
pub mod operator;
pub mod pl1d;
pub mod point;
pub mod probe;
pub mod random;
pub mod set;
pub mod splitting;
pub mod stats;

pub use error::{Error, Result};
pub use interval::Interval;
pub use monotone::{monotone_extension_witness, monotonicity_check, GraphPair};
pub use operator::{affine_from_rows, Matrix, OperatorHandle, OperatorKind};
pub use pl1d::{aumann_mean_finite, minkowski_mean, MinkowskiMean, Pl1dGraph, Ray};
pub use point::Point;
pub use probe::{r_distance, r_distance_from_errors, ProbeSet};
pub use random::{Family, RandomOperatorModel, ScalarLaw, SelectionSpec};
pub use set::SetDescription;
pub use splitting::{davis_yin_solve, proximal_point_zero, resolvent_of_mean, SolveReport, SolverSettings};

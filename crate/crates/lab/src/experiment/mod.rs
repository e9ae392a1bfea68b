//! Experiment drivers. Each trial is one trajectory of draws, reused as a
//! prefix along the `n` schedule; trials run on a worker pool and are merged
//! in trial order, so results do not depend on the number of workers.

pub mod lemma;
pub mod lln;
pub mod verify;
pub mod zeros;

use monolab_core::operator::OperatorKind;
use monolab_core::random::{mix64, Draw};
use monolab_core::{resolvent_of_mean, OperatorHandle, Point, RandomOperatorModel, SolveReport, SolverSettings};
use rayon::prelude::*;

use crate::error::{LabError, Result};

/// Draws of one trial, extended on demand.
pub struct Trajectory<'a> {
    model: &'a RandomOperatorModel,
    trial: u64,
    draws: Vec<Draw>,
    ops: Vec<OperatorHandle>,
    digests: Vec<u64>,
}

impl<'a> Trajectory<'a> {
    pub fn new(model: &'a RandomOperatorModel, trial: usize) -> Self {
        Trajectory { model, trial: trial as u64, draws: Vec::new(), ops: Vec::new(), digests: Vec::new() }
    }

    pub fn extend_to(&mut self, n: usize) -> Result<()> {
        while self.draws.len() < n {
            let k = self.draws.len() as u64 + 1;
            let draw = self.model.draw(self.trial, k)?;
            let op = draw.operator.clone().ok_or(monolab_core::Error::Unrepresentable)?;
            let prev = self.digests.last().copied().unwrap_or(mix64(self.trial));
            self.digests.push(mix64(prev ^ draw.digest()));
            self.draws.push(draw);
            self.ops.push(op);
        }
        Ok(())
    }

    pub fn draws(&self) -> &[Draw] {
        &self.draws
    }

    /// Hash chain over draws `1..=n`.
    pub fn digest(&self, n: usize) -> u64 {
        self.digests[n - 1]
    }

    /// The empirical mean `Ā_n` of the first `n` draws.
    pub fn mean(&self, n: usize) -> Result<OperatorHandle> {
        Ok(OperatorHandle::mean_of(&self.ops[..n])?)
    }
}

/// `J_{γĀ}(y)` by splitting when `mean` is a weighted sum, exactly otherwise.
pub fn mean_resolvent(
    mean: &OperatorHandle,
    gamma: f64,
    y: &Point,
    settings: &SolverSettings,
    warm: Option<&Point>,
) -> Result<SolveReport> {
    match mean.kind() {
        OperatorKind::WeightedSum(terms) => {
            let ops: Vec<OperatorHandle> = terms.iter().map(|t| t.1.clone()).collect();
            let weights: Vec<f64> = terms.iter().map(|t| t.0).collect();
            Ok(resolvent_of_mean(&ops, &weights, y, gamma, settings, warm)?)
        }
        _ => Ok(SolveReport {
            solution: mean.resolvent(gamma, y)?,
            iterations: 0,
            final_residual: 0.0,
            converged: true,
            residual_history: Vec::new(),
            block_spread: 0.0,
        }),
    }
}

/// The model's mean operator, or a configuration error naming the family.
pub fn mean_operator(model: &RandomOperatorModel) -> Result<OperatorHandle> {
    model.mean_operator().map_err(|e| match e {
        monolab_core::Error::Unavailable => {
            LabError::Config(format!("no closed-form mean operator for {:?}", model.family()))
        }
        other => LabError::Core(other),
    })
}

/// Runs `trial` for `0..trials` on `jobs` workers (0: one per core) and
/// returns the results in trial order.
pub fn run_trials<T, F>(trials: usize, jobs: usize, trial: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| LabError::Config(format!("worker pool: {e}")))?;
    pool.install(|| (0..trials).into_par_iter().map(&trial).collect())
}

/// Medians and quartiles of `values[t][i]` across trials `t`, per schedule
/// index `i`.
pub fn curve(values: &[Vec<f64>]) -> Result<Vec<[f64; 3]>> {
    let len = values.first().map_or(0, Vec::len);
    (0..len)
        .map(|i| {
            let column: Vec<f64> = values.iter().map(|v| v[i]).collect();
            Ok([
                monolab_core::stats::median(&column)?,
                monolab_core::stats::quantile(&column, 0.25)?,
                monolab_core::stats::quantile(&column, 0.75)?,
            ])
        })
        .collect()
}

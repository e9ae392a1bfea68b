//! The chain `‖J_{Ā_n}(x⋆) - x⋆‖ <= ‖(Ā_n)_0(x⋆)‖ <= ‖φ̄_n‖` at a zero `x⋆`
//! of the mean operator, where `φ̄_n` averages a centered selection.

use std::path::Path;

use monolab_core::Point;

use crate::config::Config;
use crate::error::{LabError, Result};
use crate::experiment::{mean_resolvent, run_trials, Trajectory};
use crate::record::write_file;
use crate::summary::{Check, CurveSummary, Summary};

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaRow {
    pub trial: usize,
    pub n: usize,
    /// `‖J_{Ā_n}(x⋆) - x⋆‖`
    pub lhs: f64,
    /// `‖(Ā_n)_0(x⋆)‖`
    pub middle: f64,
    /// `‖φ̄_n‖`
    pub rhs: f64,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
    pub prefix_digest: u64,
}

impl LemmaRow {
    /// Largest amount by which either inequality of the chain fails.
    pub fn violation(&self) -> f64 {
        (self.lhs - self.middle).max(self.middle - self.rhs).max(0.0)
    }
}

pub struct LemmaRun {
    pub rows: Vec<LemmaRow>,
    pub summary: Summary,
}

pub fn lemma_zero_check(config: &Config, jobs: usize) -> Result<LemmaRun> {
    let model = config.model()?;
    let point = config.point()?;
    let selection = model.selection_at(&point).map_err(|e| match e {
        monolab_core::Error::Unavailable => {
            LabError::Config(format!("no explicit centered selection for {:?}", model.family()))
        }
        other => LabError::Config(format!("selection at {:?}: {other}", point.as_slice())),
    })?;
    let settings = config.settings();
    let schedule = &config.experiment.n_schedule;

    let per_trial = run_trials(config.experiment.trials, jobs, |trial| {
        let mut traj = Trajectory::new(&model, trial);
        let mut phi_sum = Point::zeros(point.dim());
        let mut summed = 0;
        let mut warm: Option<Point> = None;
        let mut rows = Vec::with_capacity(schedule.len());
        for &n in schedule {
            traj.extend_to(n)?;
            for draw in &traj.draws()[summed..n] {
                phi_sum = phi_sum.add(&selection.value(draw)?);
            }
            summed = n;
            let empirical = traj.mean(n)?;
            let report = mean_resolvent(&empirical, 1.0, &point, &settings, warm.as_ref())?;
            rows.push(LemmaRow {
                trial,
                n,
                lhs: report.solution.distance(&point),
                middle: empirical.least_norm_element(&point)?.norm(),
                rhs: phi_sum.scale(1.0 / n as f64).norm(),
                iterations: report.iterations,
                residual: report.final_residual,
                converged: report.converged,
                prefix_digest: traj.digest(n),
            });
            warm = Some(report.solution);
        }
        Ok(rows)
    })?;

    let mut summary =
        Summary::new("lemma-check", &config.output_name(), model.seed(), config.experiment.trials, schedule);
    let checks = &config.checks;
    let field = |f: fn(&LemmaRow) -> f64| -> Vec<Vec<f64>> {
        per_trial.iter().map(|rows| rows.iter().map(f).collect()).collect()
    };
    let rows: Vec<LemmaRow> = per_trial.iter().flatten().cloned().collect();
    let worst = rows.iter().map(LemmaRow::violation).fold(0.0, f64::max);
    summary.checks.push(Check::at_most("lemma_max_violation", worst, checks.inequality_tol));
    for (name, f) in [("lhs", (|r: &LemmaRow| r.lhs) as fn(&LemmaRow) -> f64), ("middle", |r| r.middle), ("rhs", |r| r.rhs)] {
        let c = CurveSummary::new(name, schedule, &field(f))?;
        if name != "middle" {
            summary.checks.push(Check::ratio(&format!("{name}_decay"), &c.median, checks.decay_ratio));
        }
        summary.curves.push(c);
    }
    summary.failed_rows = rows.iter().filter(|r| !r.converged).count();
    Ok(LemmaRun { rows, summary })
}

pub fn write_lemma_rows(path: &Path, rows: &[LemmaRow]) -> Result<()> {
    let mut out = String::from("trial,n,lhs,middle,rhs,violation,iterations,residual,converged,prefix_digest\n");
    let mut sorted: Vec<&LemmaRow> = rows.iter().collect();
    sorted.sort_by_key(|r| (r.trial, r.n));
    for r in sorted {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{:016x}\n",
            r.trial,
            r.n,
            r.lhs,
            r.middle,
            r.rhs,
            r.violation(),
            r.iterations,
            r.residual,
            r.converged,
            r.prefix_digest
        ));
    }
    write_file(path, out.as_bytes())
}

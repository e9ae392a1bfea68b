//! Zero tracking: `x_n ∈ Z(Ā_n)` by the proximal point method with step
//! `zeros.step`, compared with `Z(𝒜)`.

use std::cell::Cell;
use std::time::Instant;

use monolab_core::{proximal_point_zero, r_distance_from_errors, Point};

use crate::config::Config;
use crate::error::Result;
use crate::experiment::{mean_operator, mean_resolvent, run_trials, Trajectory};
use crate::record::ConvergenceRecord;
use crate::summary::{Check, CurveSummary, Summary};

pub struct ZerosRun {
    pub records: Vec<ConvergenceRecord>,
    pub summary: Summary,
}

pub fn zero_tracking_experiment(config: &Config, jobs: usize) -> Result<ZerosRun> {
    let model = config.model()?;
    let mean = mean_operator(&model)?;
    let zero_set = model.mean_zero_set()?;
    let probes = config.probe_set()?;
    let settings = config.settings();
    let schedule = &config.experiment.n_schedule;
    let timing = config.output.timing;
    let zeros = &config.zeros;
    let targets = probes
        .points()
        .iter()
        .map(|x| mean.resolvent(1.0, x))
        .collect::<monolab_core::Result<Vec<Point>>>()?;

    let per_trial = run_trials(config.experiment.trials, jobs, |trial| {
        let mut traj = Trajectory::new(&model, trial);
        let mut start = Point::zeros(model.dim());
        let mut rows = Vec::with_capacity(schedule.len());
        for &n in schedule {
            let clock = timing.then(Instant::now);
            traj.extend_to(n)?;
            let empirical = traj.mean(n)?;
            let inner_iterations = Cell::new(0usize);
            let inner_converged = Cell::new(true);
            let inner_residual = Cell::new(0.0f64);
            let solve = |gamma: f64, x: &Point| -> monolab_core::Result<Point> {
                let report = mean_resolvent(&empirical, gamma, x, &settings, Some(x)).map_err(|e| match e {
                    crate::error::LabError::Core(c) => c,
                    other => monolab_core::Error::PreconditionViolated(other.to_string()),
                })?;
                inner_iterations.set(inner_iterations.get() + report.iterations);
                inner_converged.set(inner_converged.get() && report.converged);
                inner_residual.set(inner_residual.get().max(report.final_residual));
                Ok(report.solution)
            };
            let outer = proximal_point_zero(|x: &Point| solve(zeros.step, x), &start, zeros.tol, zeros.max_iter)?;
            let x_n = outer.solution;
            let j_emp = solve(1.0, &x_n)?;
            let j_mean = mean.resolvent(1.0, &x_n)?;

            let mut errors = Vec::with_capacity(probes.len());
            for (k, x) in probes.points().iter().enumerate() {
                errors.push(solve(1.0, x)?.distance(&targets[k]));
            }
            rows.push(ConvergenceRecord {
                trial,
                n,
                r_distance: r_distance_from_errors(&errors),
                per_probe_error: errors,
                zero_error: Some(zero_set.distance(&x_n)),
                certificate: Some(x_n.distance(&j_mean)),
                certificate_bound: Some(j_mean.distance(&j_emp) + x_n.distance(&j_emp)),
                iterations: outer.iterations + inner_iterations.get(),
                residual: outer.final_residual.max(inner_residual.get()),
                wall_time: clock.map(|c| c.elapsed().as_secs_f64()),
                converged: outer.converged && inner_converged.get(),
                cross_check: None,
                prefix_digest: traj.digest(n),
            });
            start = x_n;
        }
        Ok(rows)
    })?;

    let mut summary = Summary::new("run-zeros", &config.output_name(), model.seed(), config.experiment.trials, schedule);
    let checks = &config.checks;
    let field = |f: &dyn Fn(&ConvergenceRecord) -> f64| -> Vec<Vec<f64>> {
        per_trial.iter().map(|rows| rows.iter().map(f).collect()).collect()
    };
    let z = CurveSummary::new("zero_error", schedule, &field(&|r| r.zero_error.unwrap_or(f64::NAN)))?;
    summary.checks.push(Check::ratio("zero_error_final_ratio", &z.median, checks.final_ratio));
    summary.curves.push(z);
    summary
        .curves
        .push(CurveSummary::new("certificate", schedule, &field(&|r| r.certificate.unwrap_or(f64::NAN)))?);
    summary.curves.push(CurveSummary::new("r_distance", schedule, &field(&|r| r.r_distance))?);
    let records: Vec<ConvergenceRecord> = per_trial.into_iter().flatten().collect();
    let worst = records
        .iter()
        .map(|r| r.certificate.unwrap_or(0.0) - r.certificate_bound.unwrap_or(0.0))
        .fold(0.0, f64::max);
    summary.checks.push(Check::at_most("certificate_max_violation", worst, checks.inequality_tol));
    summary.failed_rows = records.iter().filter(|r| !r.converged).count();
    Ok(ZerosRun { records, summary })
}

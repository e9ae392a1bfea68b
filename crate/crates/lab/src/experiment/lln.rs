//! Convergence of empirical means `Ā_n` to the mean operator `𝒜` in the
//! truncated R-distance over a probe set.

use std::time::Instant;

use monolab_core::{r_distance_from_errors, Point};

use crate::config::Config;
use crate::error::Result;
use crate::experiment::{mean_operator, mean_resolvent, run_trials, Trajectory};
use crate::record::ConvergenceRecord;
use crate::summary::{Check, CurveSummary, Summary};

pub struct LlnRun {
    pub records: Vec<ConvergenceRecord>,
    pub summary: Summary,
}

pub fn lln_experiment(config: &Config, jobs: usize) -> Result<LlnRun> {
    let model = config.model()?;
    let mean = mean_operator(&model)?;
    let probes = config.probe_set()?;
    let settings = config.settings();
    let schedule = &config.experiment.n_schedule;
    let timing = config.output.timing;
    let targets = probes
        .points()
        .iter()
        .map(|x| mean.resolvent(1.0, x))
        .collect::<monolab_core::Result<Vec<Point>>>()?;

    let per_trial = run_trials(config.experiment.trials, jobs, |trial| {
        let mut traj = Trajectory::new(&model, trial);
        let mut warm: Vec<Option<Point>> = vec![None; probes.len()];
        let mut rows = Vec::with_capacity(schedule.len());
        for &n in schedule {
            let clock = timing.then(Instant::now);
            traj.extend_to(n)?;
            let empirical = traj.mean(n)?;
            let closed = empirical.closed_form();
            let mut errors = Vec::with_capacity(probes.len());
            let (mut iterations, mut residual, mut converged) = (0, 0.0f64, true);
            let mut cross: Option<f64> = None;
            for (k, x) in probes.points().iter().enumerate() {
                let report = mean_resolvent(&empirical, 1.0, x, &settings, warm[k].as_ref())?;
                iterations += report.iterations;
                residual = residual.max(report.final_residual);
                converged &= report.converged;
                if let Some(c) = &closed {
                    let gap = c.resolvent(1.0, x)?.distance(&report.solution);
                    cross = Some(cross.map_or(gap, |g| g.max(gap)));
                }
                errors.push(report.solution.distance(&targets[k]));
                warm[k] = Some(report.solution);
            }
            rows.push(ConvergenceRecord {
                trial,
                n,
                r_distance: r_distance_from_errors(&errors),
                per_probe_error: errors,
                zero_error: None,
                certificate: None,
                certificate_bound: None,
                iterations,
                residual,
                wall_time: clock.map(|c| c.elapsed().as_secs_f64()),
                converged,
                cross_check: cross,
                prefix_digest: traj.digest(n),
            });
        }
        Ok(rows)
    })?;

    let mut summary = Summary::new("run-lln", &config.output_name(), model.seed(), config.experiment.trials, schedule);
    let checks = &config.checks;
    let field = |f: &dyn Fn(&ConvergenceRecord) -> f64| -> Vec<Vec<f64>> {
        per_trial.iter().map(|rows| rows.iter().map(f).collect()).collect()
    };
    let r = CurveSummary::new("r_distance", schedule, &field(&|r| r.r_distance))?;
    summary.checks.push(Check::inversions("r_distance_decreasing", &r.median, checks.max_inversions));
    summary.checks.push(Check::ratio("r_distance_final_ratio", &r.median, checks.final_ratio));
    if let Some(band) = checks.slope_band {
        summary.checks.push(Check::within("r_distance_slope", r.slope, band));
    }
    summary.curves.push(r);
    for k in 0..probes.len() {
        summary
            .curves
            .push(CurveSummary::new(&format!("probe_{k}"), schedule, &field(&|r| r.per_probe_error[k]))?);
    }
    let records: Vec<ConvergenceRecord> = per_trial.into_iter().flatten().collect();
    let all_finite = records.iter().all(|r| r.per_probe_error.iter().all(|e| e.is_finite() && *e >= 0.0));
    summary.checks.push(Check::at_most("errors_finite", if all_finite { 0.0 } else { 1.0 }, 0.0));
    if let Some(worst) = records.iter().filter_map(|r| r.cross_check).reduce(f64::max) {
        summary.checks.push(Check::at_most("cross_check", worst, checks.cross_check_tol));
    }
    summary.failed_rows = records.iter().filter(|r| !r.converged).count();
    Ok(LlnRun { records, summary })
}

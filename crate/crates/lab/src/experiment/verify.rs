//! Invariant suite on the operators of one configured model: resolvent and
//! Yosida Lipschitz bounds, the Yosida/least-norm bound, the shift identity,
//! sampled monotonicity and, when a zero is configured, the lemma chain.

use monolab_core::{monotonicity_check, OperatorHandle, Point, ProbeSet};

use crate::config::Config;
use crate::error::Result;
use crate::experiment::lemma::lemma_zero_check;
use crate::experiment::Trajectory;
use crate::summary::{Check, Summary};

pub const SAMPLED_OPERATORS: usize = 32;
pub const STEPS: [f64; 3] = [0.1, 1.0, 10.0];
pub const CALCULUS_TOL: f64 = 1e-8;
pub const SHIFT_TOL: f64 = 1e-10;

#[derive(Debug, Default, Clone, Copy)]
struct Violations {
    nonexpansive: f64,
    yosida: f64,
    least_norm: f64,
    shift: f64,
    non_monotone: usize,
}

fn check_operator(op: &OperatorHandle, probes: &ProbeSet, v: &mut Violations) -> Result<()> {
    let pts = probes.points();
    let mut pairs = Vec::new();
    for &g in &STEPS {
        let js = pts.iter().map(|x| op.resolvent(g, x)).collect::<monolab_core::Result<Vec<Point>>>()?;
        let ys = pts.iter().map(|x| op.yosida(g, x)).collect::<monolab_core::Result<Vec<Point>>>()?;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                let d = pts[i].distance(&pts[j]);
                v.nonexpansive = v.nonexpansive.max(js[i].distance(&js[j]) - d);
                v.yosida = v.yosida.max(ys[i].distance(&ys[j]) - d / g);
            }
            // J(x) lies in the domain, where the least-norm element exists
            let x = &js[i];
            let least = op.least_norm_element(x)?.norm();
            for &h in &STEPS {
                v.least_norm = v.least_norm.max(op.yosida(h, x)?.norm() - least);
            }
            let z = &pts[(i + 1) % pts.len()];
            let lhs = op.shift(z)?.resolvent(g, &pts[i])?;
            let rhs = op.resolvent(g, &pts[i].axpy(g, z))?;
            v.shift = v.shift.max(lhs.distance(&rhs) / (1.0 + rhs.norm()));
            pairs.push(op.graph_pair(g, &pts[i])?);
        }
    }
    if !monotonicity_check(&pairs)? {
        v.non_monotone += 1;
    }
    Ok(())
}

pub fn verify(config: &Config, jobs: usize) -> Result<Summary> {
    let model = config.model()?;
    let probes = config.probe_set()?;
    let mut traj = Trajectory::new(&model, 0);
    traj.extend_to(SAMPLED_OPERATORS)?;
    let mut v = Violations::default();
    for k in 1..=SAMPLED_OPERATORS {
        check_operator(&model.sample(k as u64)?, &probes, &mut v)?;
    }
    if let Ok(mean) = model.mean_operator() {
        check_operator(&mean, &probes, &mut v)?;
    }

    let schedule = &config.experiment.n_schedule;
    let mut summary = Summary::new("verify", &config.output_name(), model.seed(), config.experiment.trials, schedule);
    summary.checks.push(Check::at_most("resolvent_nonexpansive", v.nonexpansive, CALCULUS_TOL));
    summary.checks.push(Check::at_most("yosida_lipschitz", v.yosida, CALCULUS_TOL));
    summary.checks.push(Check::at_most("yosida_below_least_norm", v.least_norm, CALCULUS_TOL));
    summary.checks.push(Check::at_most("shift_identity", v.shift, SHIFT_TOL));
    summary.checks.push(Check::at_most("non_monotone_samples", v.non_monotone as f64, 0.0));

    // lifted mean: the shift identity holds up to the splitting tolerance
    let empirical = traj.mean(SAMPLED_OPERATORS)?;
    let z = &probes.points()[probes.len() - 1];
    let settings = config.settings();
    let mut lifted: f64 = 0.0;
    for x in probes.points() {
        let a = empirical.shift(z)?.resolvent_with(1.0, x, &settings)?;
        let b = empirical.resolvent_with(1.0, &x.add(z), &settings)?;
        lifted = lifted.max(a.distance(&b));
    }
    summary.checks.push(Check::at_most("shift_identity_mean", lifted, 2.0 * settings.tol));

    if config.experiment.point.is_some() {
        let lemma = lemma_zero_check(config, jobs)?;
        summary.checks.extend(lemma.summary.checks);
        summary.curves.extend(lemma.summary.curves);
        summary.failed_rows = lemma.summary.failed_rows;
    }
    Ok(summary)
}

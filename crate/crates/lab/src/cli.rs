//! Command-line front end.
//!
//! Exit codes: 0 success, 1 an acceptance check failed, 2 configuration or
//! input error, 3 more non-converged rows than `experiment.max_failed_rows`.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use monolab_core::random::{phelps_gallery, standard_witnesses};

use crate::config::Config;
use crate::error::{LabError, Result};
use crate::experiment::lemma::{lemma_zero_check, write_lemma_rows};
use crate::experiment::lln::lln_experiment;
use crate::experiment::verify::verify;
use crate::experiment::zeros::zero_tracking_experiment;
use crate::plot::{graph_csv, plot_data};
use crate::record::{write_file, write_records};
use crate::summary::Summary;

#[derive(Debug, Parser)]
#[command(name = "monolab", version, about = "Law-of-large-numbers experiments for random monotone operators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convergence of empirical mean resolvents to the mean operator.
    RunLln(RunArgs),
    /// Zeros of empirical means against the zero set of the mean operator.
    RunZeros(RunArgs),
    /// Resolvent/least-norm/selection chain at a zero of the mean operator.
    LemmaCheck(RunArgs),
    /// Witness table for the planar non-maximal sum.
    Gallery,
    /// Invariant suite on the configured model.
    Verify(RunArgs),
    /// Median and quartile curves from an experiment CSV.
    PlotData(PlotArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Experiment config (TOML).
    pub config: PathBuf,
    #[command(flatten)]
    pub overrides: Overrides,
}

/// Flags that override config values.
#[derive(Debug, Default, Clone, Args)]
pub struct Overrides {
    /// Master seed of the model.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Splitting step.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Splitting relaxation.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Splitting residual tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Output directory (else config, else $MONOLAB_OUT, else ./monolab-out).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads; 0 uses one per core.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Record wall-clock seconds per row (makes CSVs run-dependent).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// CSV written by run-lln, run-zeros or lemma-check.
    pub csv: PathBuf,
    /// Directory for the curve files (default: next to the CSV).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Overrides {
    pub fn apply(&self, config: &mut Config) -> Result<()> {
        if let Some(s) = self.seed {
            config.model.seed = s;
        }
        if let Some(t) = self.trials {
            config.experiment.trials = t;
        }
        if let Some(g) = self.gamma {
            config.solver.gamma = g;
        }
        if let Some(l) = self.lambda {
            config.solver.lambda = l;
        }
        if let Some(t) = self.tol {
            config.solver.tol = t;
        }
        if let Some(m) = self.max_iter {
            config.solver.max_iter = m;
        }
        if let Some(o) = &self.out {
            config.output.dir = Some(o.clone());
        }
        if let Some(j) = self.jobs {
            config.experiment.jobs = j;
        }
        if self.timing {
            config.output.timing = true;
        }
        config.validate()
    }
}

fn load(args: &RunArgs) -> Result<Config> {
    let mut config = Config::load(&args.config)?;
    args.overrides.apply(&mut config)?;
    Ok(config)
}

fn output_path(config: &Config, suffix: &str) -> PathBuf {
    config.output_dir().join(format!("{}.{suffix}", config.output_name()))
}

fn report(summary: &Summary, written: &[PathBuf]) {
    for p in written {
        println!("wrote {}", p.display());
    }
    for c in &summary.checks {
        let verdict = if c.passed { "PASS" } else { "FAIL" };
        println!("{verdict} {}: {} (limit {})", c.name, c.value, c.limit);
    }
    if summary.failed_rows > 0 {
        println!("non-converged rows: {}", summary.failed_rows);
    }
}

fn finish(config: &Config, summary: Summary, mut written: Vec<PathBuf>, suffix: &str) -> Result<()> {
    let path = output_path(config, &format!("{suffix}.summary.toml"));
    summary.write(&path)?;
    written.push(path);
    report(&summary, &written);
    summary.verdict(config.experiment.max_failed_rows)
}

fn run_lln(args: &RunArgs) -> Result<()> {
    let config = load(args)?;
    let run = lln_experiment(&config, config.experiment.jobs)?;
    let csv = output_path(&config, "lln.csv");
    write_records(&csv, &run.records)?;
    let mut written = vec![csv];
    if config.model.dim == 1 {
        if let Ok(mean) = config.model()?.mean_operator() {
            if let monolab_core::OperatorKind::Separable(graphs) = mean.kind() {
                let path = output_path(&config, "mean_graph.csv");
                write_file(&path, graph_csv(&graphs[0]).as_bytes())?;
                written.push(path);
            }
        }
    }
    finish(&config, run.summary, written, "lln")
}

fn run_zeros(args: &RunArgs) -> Result<()> {
    let config = load(args)?;
    let run = zero_tracking_experiment(&config, config.experiment.jobs)?;
    let csv = output_path(&config, "zeros.csv");
    write_records(&csv, &run.records)?;
    finish(&config, run.summary, vec![csv], "zeros")
}

fn run_lemma(args: &RunArgs) -> Result<()> {
    let config = load(args)?;
    let run = lemma_zero_check(&config, config.experiment.jobs)?;
    let csv = output_path(&config, "lemma.csv");
    write_lemma_rows(&csv, &run.rows)?;
    finish(&config, run.summary, vec![csv], "lemma")
}

fn run_verify(args: &RunArgs) -> Result<()> {
    let config = load(args)?;
    let summary = verify(&config, config.experiment.jobs)?;
    finish(&config, summary, Vec::new(), "verify")
}

/// Prints the witness table; fails if any entry behaves unexpectedly.
fn run_gallery() -> Result<()> {
    let witnesses = standard_witnesses();
    println!("{:<5} {:<8} {:<44} witnesses W1..W{}", "entry", "maximal", "description", witnesses.len());
    let mut unexpected = Vec::new();
    for entry in phelps_gallery() {
        let accepted = witnesses
            .iter()
            .map(|w| entry.accepts_witness(w))
            .collect::<monolab_core::Result<Vec<bool>>>()?;
        let cells: Vec<&str> = accepted.iter().map(|a| if *a { "accepted" } else { "rejected" }).collect();
        println!("{:<5} {:<8} {:<44} {}", entry.name, entry.maximal, entry.description, cells.join(" "));
        // a maximal graph admits no proper extension
        if entry.maximal == accepted.iter().any(|a| *a) {
            unexpected.push(entry.name.clone());
        }
    }
    for (i, (x, v)) in witnesses.iter().enumerate() {
        println!("W{}: ({:?}, {:?})", i + 1, x.as_slice(), v.as_slice());
    }
    if unexpected.is_empty() {
        println!("A+B is not maximal: it extends monotonically by W1, while A, B and N0 reject every witness");
        Ok(())
    } else {
        Err(LabError::Acceptance(format!("unexpected witness outcome for {}", unexpected.join(", "))))
    }
}

fn run_plot(args: &PlotArgs) -> Result<()> {
    for f in plot_data(&args.csv, args.out.as_deref())? {
        match f.slope {
            Some(s) => println!("wrote {} (slope {s})", f.path.display()),
            None => println!("wrote {} (no slope)", f.path.display()),
        }
    }
    Ok(())
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::RunLln(a) => run_lln(a),
        Command::RunZeros(a) => run_zeros(a),
        Command::LemmaCheck(a) => run_lemma(a),
        Command::Gallery => run_gallery(),
        Command::Verify(a) => run_verify(a),
        Command::PlotData(a) => run_plot(a),
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("monolab: {e}");
            e.exit_code()
        }
    }
}

/// Path of an output file for `config`, as written by the run commands.
pub fn expected_output(config: &Config, suffix: &str) -> PathBuf {
    output_path(config, suffix)
}

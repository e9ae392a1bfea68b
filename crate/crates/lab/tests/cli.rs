use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use monolab::Summary;

const SMALL: &str = r#"
[model]
dim = 1
seed = 5

[model.family]
kind = "quadratic"
q = { table = [[1.0, 0.5], [3.0, 0.5]] }
b = { table = [[-1.0, 0.5], [1.0, 0.5]] }

[experiment]
n_schedule = [10, 100, 1000]
trials = 6
point = [0.0]

[checks]
final_ratio = 0.5
decay_ratio = 0.5
"#;

fn monolab(args: &[&str], env_out: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_monolab"));
    cmd.args(args).env_remove("MONOLAB_OUT");
    if let Some(dir) = env_out {
        cmd.env("MONOLAB_OUT", dir);
    }
    cmd.output().unwrap()
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(format!("{name}.toml"));
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn bundled(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs").join(format!("{name}.toml")).to_string_lossy().into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn missing_or_invalid_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = monolab(&["run-lln", "/nonexistent/monolab.toml"], None);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/monolab.toml"));

    let bad = write_config(dir.path(), "bad", &SMALL.replace("quadratic", "cubic"));
    assert_eq!(code(&monolab(&["run-zeros", &bad], None)), 2);
    let no_point = write_config(dir.path(), "no_point", &SMALL.replace("point = [0.0]", ""));
    assert_eq!(code(&monolab(&["lemma-check", &no_point], None)), 2);
    assert_eq!(code(&monolab(&["frobnicate"], None)), 2);
    assert_eq!(code(&monolab(&["run-lln"], None)), 2);
}

#[test]
fn non_converged_rows_over_budget_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "starved", &format!("{SMALL}\n[solver]\nmax_iter = 2\n"));
    let out_dir = dir.path().join("out");
    let out = monolab(&["run-lln", &path, "--out", out_dir.to_str().unwrap()], None);
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
    let summary = Summary::read(&out_dir.join("starved.lln.summary.toml")).unwrap();
    assert_eq!(summary.failed_rows, 18);

    let budget = write_config(
        dir.path(),
        "budget",
        &format!("{}\n[solver]\nmax_iter = 2\n", SMALL.replace("trials = 6", "trials = 6\nmax_failed_rows = 18")),
    );
    assert_ne!(code(&monolab(&["run-lln", &budget, "--out", out_dir.to_str().unwrap()], None)), 3);
}

#[test]
fn failed_check_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "strict", &SMALL.replace("final_ratio = 0.5", "final_ratio = 1e-9"));
    let out = monolab(&["run-lln", &path, "--out", dir.path().to_str().unwrap()], None);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL r_distance_final_ratio"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("r_distance_final_ratio"));
}

#[test]
fn verify_on_bundled_quadratic_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = monolab(&["verify", &bundled("quadratic_1d"), "--out", dir.path().to_str().unwrap()], None);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let summary = Summary::read(&dir.path().join("quadratic_1d.verify.summary.toml")).unwrap();
    let lemma = summary.check("lemma_max_violation").unwrap();
    assert!(lemma.passed && lemma.value <= 1e-7);
    assert!(summary.passed());
}

#[test]
fn gallery_prints_witness_table() {
    let out = monolab(&["gallery"], None);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    let row = |name: &str| text.lines().find(|l| l.split_whitespace().next() == Some(name)).unwrap().to_string();
    assert!(row("A+B").contains("false") && row("A+B").contains("accepted"));
    for name in ["A", "B", "N0"] {
        assert!(row(name).contains("true") && !row(name).contains("accepted"), "{}", row(name));
    }
}

#[test]
fn run_commands_write_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "small", SMALL);
    let out_dir = dir.path().join("out");
    for (verb, suffix) in [("run-lln", "lln"), ("run-zeros", "zeros"), ("lemma-check", "lemma")] {
        let out = monolab(&[verb, &path, "--out", out_dir.to_str().unwrap(), "--trials", "4"], None);
        assert_eq!(code(&out), 0, "{verb}: {}", String::from_utf8_lossy(&out.stderr));
        let csv = fs::read_to_string(out_dir.join(format!("small.{suffix}.csv"))).unwrap();
        assert_eq!(csv.lines().count(), 1 + 4 * 3);
        let summary = Summary::read(&out_dir.join(format!("small.{suffix}.summary.toml"))).unwrap();
        assert_eq!(summary.trials, 4);
        assert_eq!(summary.n_schedule, [10, 100, 1000]);
    }
    let graph = fs::read_to_string(out_dir.join("small.mean_graph.csv"));
    assert!(graph.is_err(), "affine means have no graph dump");

    let out = monolab(&["plot-data", out_dir.join("small.zeros.csv").to_str().unwrap()], None);
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(out_dir.join("small.zeros.zero_error.dat")).unwrap();
    assert!(text.lines().any(|l| l.starts_with("# slope: ")));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 4);
}

#[test]
fn erm_run_dumps_mean_graph() {
    let dir = tempfile::tempdir().unwrap();
    let out = monolab(&["run-lln", &bundled("erm"), "--trials", "2", "--out", dir.path().to_str().unwrap()], None);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let graph = fs::read_to_string(dir.path().join("erm.mean_graph.csv")).unwrap();
    // mean graph x - 2 + d|x|
    assert!(graph.starts_with("x,y_lo,y_hi\n-1,-4,-4\n0,-3,-1\n1,0,0\n"), "{graph}");
}

#[test]
fn plot_data_on_empty_csv_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("empty.csv");
    fs::write(&csv, "").unwrap();
    let out = monolab(&["plot-data", csv.to_str().unwrap()], None);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("malformed"));
}

#[test]
fn output_directory_falls_back_to_environment() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "env", SMALL);
    let env_dir = dir.path().join("from-env");
    let out = monolab(&["run-lln", &path, "--trials", "2"], Some(&env_dir));
    assert_eq!(code(&out), 0);
    assert!(env_dir.join("env.lln.csv").exists());
    let flag_dir = dir.path().join("from-flag");
    monolab(&["run-lln", &path, "--trials", "2", "--out", flag_dir.to_str().unwrap()], Some(&env_dir));
    assert!(flag_dir.join("env.lln.csv").exists());
}

#[test]
fn outputs_are_identical_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "det", SMALL);
    let mut files = Vec::new();
    for jobs in ["1", "3"] {
        let out_dir = dir.path().join(format!("jobs{jobs}"));
        for verb in ["run-lln", "run-zeros", "lemma-check"] {
            assert_eq!(code(&monolab(&[verb, &path, "--jobs", jobs, "--out", out_dir.to_str().unwrap()], None)), 0);
        }
        let mut names: Vec<_> = fs::read_dir(&out_dir).unwrap().map(|e| e.unwrap().path()).collect();
        names.sort();
        files.push(names.iter().map(|p| fs::read(p).unwrap()).collect::<Vec<_>>());
    }
    assert_eq!(files[0].len(), 6);
    assert_eq!(files[0], files[1]);
}

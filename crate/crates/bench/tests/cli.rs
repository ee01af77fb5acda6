use std::fs;
use std::process::{Command, Output};

use restless_bench::VerificationReport;
use restless_ucb::belief::PolicyTable;

fn bench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_restless-bench"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn run_writes_output_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = bench(&[
        "run", "--policy", "restless-ucb", "--horizon", "5000", "--reps", "3", "--seed", "1",
        "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["replications.csv", "aggregate.csv", "summary.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let agg = fs::read_to_string(out.join("aggregate.csv")).unwrap();
    assert!(agg.starts_with("t,mean_cum_reward,mean_regret,std_regret,n_reps"));
    assert!(agg.lines().last().unwrap().starts_with("5000,"));
    let reps = fs::read_to_string(out.join("replications.csv")).unwrap();
    assert!(reps.starts_with("t,rep,cum_reward,cum_regret"));
}

#[test]
fn run_is_reproducible() {
    let args = ["run", "--policy", "ts-4", "--horizon", "3000", "--reps", "4", "--seed", "9"];
    let a = bench(&args);
    let b = bench(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let mut other = args;
    other[8] = "10";
    assert_ne!(bench(&other).stdout, a.stdout);
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    fs::write(&cfg, "policy = \"fixed-0\"\nhorizon = 2000\nreps = 2\n").unwrap();
    let o = bench(&["run", "--config", cfg.to_str().unwrap(), "--horizon", "1000"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("fixed-0 on paper-1: T = 1000, 2 reps"), "{text}");
}

#[test]
fn solve_writes_a_policy_table() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p1.policy");
    let o = bench(&["solve", "--instance", "paper-1", "--tau-max", "20", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("gain 0.4"));
    let table = PolicyTable::load(&path).unwrap();
    assert_eq!(table.tau_max(), 20);
}

#[test]
fn quick_verify_passes_and_reports_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let o = bench(&["verify", "--quick", "--seed", "3", "--out", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stdout(&o));
    let report = VerificationReport::from_json(&fs::read_to_string(&path).unwrap()).unwrap();
    assert!(report.passed);
    assert!(report.check("confidence-event-frequency").is_some());
    assert!(stdout(&o).lines().any(|l| l.starts_with("PASS")));
}

#[test]
fn bench_prints_timing_csv() {
    let o = bench(&["bench", "--arms", "2,3", "--horizon", "2000", "--reps", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("arms,horizon"));
    assert_eq!(lines.count(), 2);
}

#[test]
fn bad_inputs_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "this is not an instance").unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["run", "--policy", "ucrl", "--horizon", "10"],
        vec!["run", "--oracle", "perfect", "--horizon", "10"],
        vec!["run", "--instance", "no-such-instance", "--horizon", "10"],
        vec!["run", "--instance", bad.to_str().unwrap(), "--horizon", "10"],
        vec!["run", "--reps", "0"],
        vec!["run", "--policy", "fixed-7", "--horizon", "10", "--reps", "1"],
    ];
    for args in cases {
        let o = bench(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        let err = String::from_utf8_lossy(&o.stderr);
        assert!(err.starts_with("error: "), "{args:?}: {err}");
    }
    assert_eq!(bench(&["run", "--bogus"]).status.code(), Some(2));
    assert!(!bench(&["frobnicate"]).status.success());
}

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ruinwalk")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn verify_paper_tables_pass() {
    for t in ["1", "5"] {
        let o = run(&["verify-paper", "--table", t]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
}

#[test]
fn verify_paper_table4_reports_flags() {
    let o = run(&["verify-paper", "--table", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o) + &stderr(&o);
    assert!(text.to_lowercase().contains("flagged"), "{text}");
}

#[test]
fn ultimate_row_matches_published_values() {
    let o = run(&["ultimate", "--x", "dpois:1,1", "--y", "dpois:0.9,1", "--u-max", "40", "--u", "30,40", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("T\\u,30,40"));
    assert_eq!(lines.next(), Some("inf,0.954,0.983"));
    assert!(stderr(&o).contains("case: C.s1"));
}

#[test]
fn oracle_row_agrees_on_deterministic_model() {
    let o = run(&["ultimate", "--x", "pmf:0,0,1", "--y", "pmf:0,1", "--u-max", "3", "--oracle", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let rows: Vec<_> = out.lines().skip(1).map(|l| l.split_once(',').unwrap().1.to_string()).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0], rows[1]);
}

#[test]
fn finite_grid_table() {
    let o = run(&["finite", "--x", "dpois:1,0", "--y", "dpois:2,0", "--u", "0", "--t", "1", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    // X(1) for Poisson(1)
    assert_eq!(stdout(&o).lines().nth(1), Some("1,0.736"));
}

#[test]
fn raw_output_keeps_full_precision() {
    let o = run(&["--raw", "finite", "--x", "dpois:1,0", "--y", "dpois:2,0", "--u", "0", "--t", "1", "--format", "csv"]);
    let cell: f64 = stdout(&o).lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((cell - 2.0 * (-1.0f64).exp()).abs() < 1e-15);
}

#[test]
fn classify_reports_case() {
    let o = run(&["classify", "--x", "dpois:1,0", "--y", "dpois:2,0", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("A"));
}

#[test]
fn straddling_mean_is_a_numerical_failure() {
    let o = run(&["classify", "--x", "dpois:1,1", "--y", "dpois:1,1"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn invalid_inputs_exit_with_validation_code() {
    let o = run(&["classify", "--x", "pmf:0.5,0.6", "--y", "dpois:1,0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["classify", "--x", "dpois:1,x", "--y", "dpois:1,0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("position"), "{}", stderr(&o));
    let o = run(&["conjecture", "--which", "1", "--x", "dpois:1,1", "--y", "dpois:1.9,0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn precision_env_var_is_validated() {
    let o = Command::new(env!("CARGO_BIN_EXE_ruinwalk"))
        .env("RUINWALK_PRECISION_BITS", "20")
        .args(["classify", "--x", "dpois:1,0", "--y", "dpois:1,0"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors_and_help() {
    assert_eq!(run(&["bogus"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn simulation_is_reproducible() {
    let args = ["--seed", "7", "simulate", "--x", "dpois:1,0", "--y", "dpois:2,0", "--u", "0,2", "--t", "10", "--trials", "5000"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn conjecture_trace_csv() {
    let o = run(&["conjecture", "--which", "2", "--x", "dpois:1,1", "--y", "dpois:1.9,0", "--n-max", "5", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().next(), Some("n,D_n"));
    assert_eq!(out.lines().count(), 7);
}

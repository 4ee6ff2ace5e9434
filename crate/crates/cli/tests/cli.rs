use std::process::{Command, Output};

use serde_json::Value;

fn theta13(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_theta13"))
        .args(args)
        .env_remove("THETA13_EPS")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn gen_prints_a_usable_matrix() {
    let out = theta13(&["gen", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let z = String::from_utf8(out.stdout).unwrap();
    let z = z.trim();
    assert_eq!(z.split(',').count(), 3);
    assert_eq!(theta13(&["census", "--z", z]).status.code(), Some(0));
}

#[test]
fn theta_at_the_origin_of_the_square_lattice() {
    let out = theta13(&["theta", "--z", "i,0,i", "--v", "0,0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let re = v["theta"]["value"][0].as_f64().unwrap();
    assert!((re - 1.180340599).abs() < 1e-9, "{re}");
    assert!(v["theta"]["tail_bound"].as_f64().unwrap() <= 1e-12);
}

#[test]
fn eps_comes_from_the_environment() {
    let run = |eps: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_theta13"));
        cmd.args(["theta", "--z", "i,0.1,1.2i", "--v", "0.3,0.1i"]);
        match eps {
            Some(e) => cmd.env("THETA13_EPS", e),
            None => cmd.env_remove("THETA13_EPS"),
        };
        json(&cmd.output().unwrap())
    };
    assert_eq!(run(None)["eps"].as_f64(), Some(1e-12));
    let loose = run(Some("1e-4"));
    assert_eq!(loose["eps"].as_f64(), Some(1e-4));
    assert!(loose["theta"]["tail_bound"].as_f64().unwrap() <= 1e-4);
}

#[test]
fn invalid_input_exits_with_two() {
    let cases: &[&[&str]] = &[
        &["census", "--z", "i,0,-i"],
        &["census", "--z", "i,0"],
        &["theta", "--z", "i,0,i", "--v", "0,0", "--char", "0,0,0"],
        &["theta", "--z", "i,0,i", "--v", "0,x"],
        &["product", "--tau1", "i", "--tau2", "-i"],
        &["census", "--z", "i,0,i", "--eps", "-1"],
        &["suite"],
        &["bogus"],
    ];
    for args in cases {
        assert_eq!(theta13(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn random_suite_passes_and_is_reproducible() {
    let first = theta13(&["suite", "--random", "42"]);
    assert_eq!(first.status.code(), Some(0), "{}", String::from_utf8_lossy(&first.stderr));
    let second = theta13(&["suite", "--random", "42"]);
    assert_eq!(first.stdout, second.stdout);
    let report = json(&first);
    assert_eq!(report["passed"], Value::Bool(true));
    assert_eq!(report["sections"]["census"]["details"]["on_count"], 10);
    assert_eq!(report["sections"]["oracle_comparison"]["status"], "skipped");
}

#[test]
fn product_suite_with_oracle() {
    let out = theta13(&["suite", "--z", "i,0,i", "--paranoid", "--smoothness-points", "20"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&out);
    assert_eq!(report["sections"]["product"]["status"], "pass");
    assert_eq!(report["sections"]["oracle_comparison"]["status"], "pass");
}

#[test]
fn product_command_reports_line_counts() {
    let out = theta13(&["product", "--tau1", "0.2+0.9i", "--tau2", "-0.1+1.1i"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["lines"]["v1_count"], 1);
    assert_eq!(v["lines"]["v2_count"], 3);
}

#[test]
fn a_failing_check_exits_with_one() {
    // A truncation this loose is caught by the brute-force comparison.
    let out = theta13(&["suite", "--random", "1", "--eps", "0.1", "--paranoid", "--smoothness-points", "20"]);
    assert_eq!(out.status.code(), Some(1));
    let report = json(&out);
    assert_eq!(report["passed"], Value::Bool(false));
    assert_eq!(report["sections"]["oracle_comparison"]["status"], "fail");
}

#[test]
fn negative_entries_are_accepted() {
    let out = theta13(&["census", "--z", "-0.1+0.8i,-0.2,0.1+1.1i"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let out = theta13(&["theta", "--z", "i,0,i", "--v", "-0.5,-i", "--char", "-1/2,0,1/2,0"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn trace_writes_the_header_and_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.csv");
    let out = theta13(&["trace", "--z", "i,0.2,1.3i", "-n", "30", "-o", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x1,x2,y1,y2,re_theta,im_theta,grad_norm"));
    assert_eq!(lines.count(), 30);
}

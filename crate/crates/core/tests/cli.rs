use std::process::{Command, Output};

use renyi_cf::IterationReport;
use serde_json::Value;

fn renyi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_renyi-cf"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Value of `key=` in the one-line Monte-Carlo summary.
fn summary_field(summary: &str, key: &str) -> f64 {
    let start = summary.find(&format!(" {key}=")).expect("field present") + key.len() + 2;
    summary[start..].split_whitespace().next().unwrap().parse().unwrap()
}

/// Parsing and re-serializing reaches a fixed point after one round.
fn assert_idempotent(text: &str) {
    let first: Value = serde_json::from_str(text).unwrap();
    let once = serde_json::to_string(&first).unwrap();
    let second: Value = serde_json::from_str(&once).unwrap();
    assert_eq!(first, second);
    assert_eq!(serde_json::to_string(&second).unwrap(), once);
}

#[test]
fn exit_code_matrix() {
    let cases: &[(&[&str], i32)] = &[
        (&["expand", "--N", "2", "--x", "1/2", "--n", "3"], 0),
        (&["expand", "--N", "2", "--x", "0", "--n", "2"], 0),
        (&["expand", "--N", "2", "--x", "1.5"], 2),
        (&["expand", "--N", "2", "--x=-0.25"], 2),
        (&["expand", "--N", "2", "--x", "5/0"], 2),
        (&["expand", "--N", "0", "--x", "0.1"], 2),
        (&["gk", "--N", "1"], 2),
        (&["gk", "--N", "2", "--grid", "2"], 2),
        (&["gk", "--N", "2", "--steps", "0"], 2),
        (&["gk", "--N", "2", "--initial", "/nonexistent/initial.csv"], 2),
        (&["gk", "--N", "2", "--grid", "512", "--steps", "10", "--rate-tolerance", "-0.3"], 3),
        (&["qn", "--N", "1"], 2),
        (&["qn", "--N", "2", "--precision", "0"], 2),
        (&["qn", "--table", "--check-paper"], 0),
        (&["qn"], 2),
        (&["mc", "--N", "2", "--samples", "0"], 2),
        (&["mc", "--N", "2", "--points", "1"], 2),
        (&["mc", "--N", "2", "--n", "20", "--samples", "100000", "--ks-multiplier", "0.01"], 3),
        (&["mc", "--N", "2", "--n", "5", "--samples", "1000"], 0),
        (&["nonsense"], 2),
        (&["--version"], 0),
    ];
    for (args, expected) in cases {
        let o = renyi(args);
        assert_eq!(code(&o), *expected, "{args:?}: {}", stderr(&o));
        if *expected != 0 {
            assert_eq!(stderr(&o).lines().filter(|l| l.starts_with("error")).count(), 1, "{args:?}");
        }
    }
}

#[test]
fn expand_prints_library_convergents() {
    let o = renyi(&["expand", "--N", "2", "--x", "1/2", "--n", "3", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["arithmetic"], "exact");
    assert_eq!(v["digits"], serde_json::json!([4, 2, 2]));
    let fractions: Vec<String> = v["convergents"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| format!("{}/{}", c["p"].as_str().unwrap(), c["q"].as_str().unwrap()))
        .collect();
    assert_eq!(fractions, ["3/5", "7/13", "15/29"]);

    let o = renyi(&["expand", "--N", "2", "--x", "0", "--n", "2"]);
    assert!(stdout(&o).contains("digits: 2, 2"));
    assert!(stdout(&o).contains("float arithmetic"));
}

#[test]
fn gk_report_for_n_2() {
    let o = renyi(&["gk", "--N", "2", "--grid", "4096", "--steps", "25"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = stdout(&o);
    let report: IterationReport = serde_json::from_str(&text).unwrap();
    assert_eq!(report.e_n.len(), 26);
    assert!(report.fitted_rate.unwrap() <= 0.55);
    // Parsing and re-serializing is idempotent.
    let again = serde_json::to_string_pretty(&report).unwrap();
    assert_eq!(again.trim_end(), text.trim_end());
    assert_idempotent(&text);
}

#[test]
fn gk_for_n_10_passes() {
    let o = renyi(&["gk", "--N", "10", "--steps", "15"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

#[test]
fn gk_reads_initial_csv() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("square.csv");
    let mut csv = String::from("x,F\n");
    for k in 0..=256 {
        let x = k as f64 / 256.0;
        csv.push_str(&format!("{x},{}\n", x * x));
    }
    std::fs::write(&good, &csv).unwrap();
    let out = dir.path().join("report.json");
    let o = renyi(&[
        "gk", "--N", "3", "--steps", "6", "--initial", good.to_str().unwrap(), "--output", out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report: IterationReport = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report.grid, 256);

    for (name, body) in [
        ("decreasing.csv", "x,F\n0,0\n0.25,0.5\n0.5,0.4\n0.75,0.8\n1,1\n"),
        ("ragged.csv", "x,F\n0,0\n0.25\n0.5,0.5\n0.75,0.75\n1,1\n"),
        ("uneven.csv", "x,F\n0,0\n0.1,0.1\n0.5,0.5\n0.75,0.75\n1,1\n"),
        ("text.csv", "x,F\n0,0\n0.25,a\n0.5,0.5\n0.75,0.75\n1,1\n"),
    ] {
        let path = dir.path().join(name);
        std::fs::write(&path, body).unwrap();
        let o = renyi(&["gk", "--N", "2", "--initial", path.to_str().unwrap()]);
        assert_eq!(code(&o), 2, "{name}");
    }
}

#[test]
fn qn_certificate_and_table() {
    let o = renyi(&["qn", "--N", "2"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("0.49192503685604715834"));
    assert!(text.contains("lower bound = 0.4583333333333333"));
    assert!(text.contains("upper bound = 0.55"));

    let o = renyi(&["qn", "--N", "10", "--format", "json"]);
    let text = stdout(&o);
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_idempotent(&text);
    assert_eq!(v["N"], 10);
    assert!(text.starts_with("{\n  \"N\": 10,\n  \"q\": \"0.0571882743022584949530619436"));

    let o = renyi(&["qn", "--table", "--check-paper", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let csv = stdout(&o);
    assert_eq!(csv.lines().count(), 8);
    assert!(csv.contains("10000,0.00005000500050004999,0.000050007500375056254"));
}

#[test]
fn monte_carlo_is_reproducible() {
    let args = ["mc", "--N", "2", "--n", "20", "--samples", "1000000", "--seed", "7"];
    let a = renyi(&args);
    let b = renyi(&args);
    assert_eq!(code(&a), 0, "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stderr, b.stderr);
    assert!(stdout(&a).starts_with("x,empirical,rho\n"));
    assert_eq!(stdout(&a).lines().count(), 1026);
}

#[test]
fn monte_carlo_envelopes() {
    let o = renyi(&["mc", "--N", "2", "--n", "0", "--samples", "1000000"]);
    assert_eq!(code(&o), 0);
    assert!(summary_field(&stderr(&o), "ks_uniform") <= 1.63 / 1000.0);

    let o = renyi(&["mc", "--N", "10", "--n", "10", "--samples", "1000000"]);
    assert_eq!(code(&o), 0);
    assert!(summary_field(&stderr(&o), "ks_rho") <= 0.004);
}

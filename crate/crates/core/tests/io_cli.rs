mod common;

use std::process::Command;

use common::{example_path, load_example, random_open_graph, rng, Conditions};
use proptest::prelude::*;
use qgs::cli::run;
use qgs::io::{graph_to_json, parse_graph_str, IoError};
use serde_json::Value;

fn arg(p: std::path::PathBuf) -> String {
    p.display().to_string()
}

fn results(stdout: &str) -> Value {
    serde_json::from_str::<Value>(stdout).expect("report is JSON")["results"].clone()
}

fn complex_at(v: &Value) -> (f64, f64) {
    (v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn graph_files_round_trip(seed in any::<u64>()) {
        let og = random_open_graph(&mut rng(seed), 8, 6, Conditions::Mixed);
        let text = graph_to_json(&og);
        let back = parse_graph_str(&text, "generated").unwrap();
        prop_assert_eq!(back.description(), og.description());
        let again = graph_to_json(&back);
        prop_assert_eq!(
            serde_json::from_str::<Value>(&text).unwrap(),
            serde_json::from_str::<Value>(&again).unwrap()
        );
    }

    #[test]
    fn reports_are_byte_identical_across_runs(seed in any::<u64>(), k in 0.2f64..20.0) {
        let og = random_open_graph(&mut rng(seed), 6, 4, Conditions::Mixed);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.json");
        std::fs::write(&path, graph_to_json(&og)).unwrap();
        let argv = ["qgs".to_string(), "compute-s".into(), "--graph".into(), arg(path), "--k".into(), format!("{k}")];
        let a = run(argv.clone());
        let b = run(argv);
        prop_assert_eq!(a.code, b.code);
        prop_assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn shipped_graphs_parse() {
    let star = load_example("s3_star.json");
    assert_eq!(star.lead_count(), 6);
    assert_eq!(star.graph().vertices().len(), 1);
    assert!(star.graph().edges().is_empty());
    for name in ["mcdonald_meyers_1.json", "mcdonald_meyers_2.json"] {
        let og = load_example(name);
        assert_eq!(og.graph().vertices().len(), 6);
        assert_eq!(og.graph().edges().len(), 10);
        assert_eq!(og.lead_count(), 6);
    }
}

#[test]
fn unknown_key_reports_position() {
    let text = "{\n  \"vertices\": [\n    {\"id\": \"v\", \"colour\": \"red\", \"condition\": {\"type\": \"neumann\"}}\n  ]\n}\n";
    match parse_graph_str(text, "bad.json") {
        Err(IoError::Parse(e)) => {
            assert_eq!(e.line, 3);
            assert!(e.message.contains("colour"), "{}", e.message);
        }
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn compute_s_on_the_star() {
    let out = run(["qgs", "compute-s", "--graph", &arg(example_path("s3_star.json")), "--k", "1.0"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let s = &results(&out.stdout)["s"];
    for i in 0..6 {
        for j in 0..6 {
            let (re, im) = complex_at(&s[i][j]);
            let want = 1.0 / 3.0 - f64::from(u8::from(i == j));
            assert!((re - want).abs() < 1e-12 && im.abs() < 1e-12);
        }
    }
}

#[test]
fn quotient_by_trivial_rep_of_subgroup() {
    let out = run([
        "qgs",
        "quotient",
        "--graph",
        &arg(example_path("s3_star.json")),
        "--symmetry",
        &arg(example_path("s3_sym.json")),
        "--rep",
        "1_H",
        "--k",
        "1.0",
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let s = &results(&out.stdout)["s"];
    for i in 0..3 {
        for j in 0..3 {
            let (re, im) = complex_at(&s[i][j]);
            let want = if i == j { -1.0 / 3.0 } else { 2.0 / 3.0 };
            assert!((re - want).abs() < 1e-12 && im.abs() < 1e-12);
        }
    }
}

#[test]
fn quotient_sum_of_representations() {
    let out = run([
        "qgs",
        "quotient",
        "--graph",
        &arg(example_path("s3_star.json")),
        "--symmetry",
        &arg(example_path("s3_sym.json")),
        "--rep",
        "1_G+R_2d",
        "--k",
        "2.5",
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let s = &results(&out.stdout)["s"];
    for (i, want) in [1.0, -1.0, -1.0].iter().enumerate() {
        for j in 0..3 {
            let (re, im) = complex_at(&s[i][j]);
            let w = if i == j { *want } else { 0.0 };
            assert!((re - w).abs() < 1e-12 && im.abs() < 1e-12);
        }
    }
}

#[test]
fn induced_characters_of_the_square_group() {
    let out = run([
        "qgs",
        "check-induced",
        "--symmetry",
        &arg(example_path("d4_sym.json")),
        "--left",
        "R1",
        "--right",
        "R2",
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert_eq!(results(&out.stdout)["equal"], Value::Bool(true));
}

#[test]
fn poles_as_csv() {
    let out = run([
        "qgs",
        "poles",
        "--graph",
        &arg(example_path("mcdonald_meyers_1.json")),
        "--re-min",
        "0",
        "--re-max",
        "3",
        "--im-min",
        "-1",
        "--im-max",
        "0",
        "--emit",
        "csv",
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let mut lines = out.stdout.lines();
    assert_eq!(lines.next(), Some("re,im,multiplicity,residual"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r.len() == 4 && r[1] < 0.0 && r[2] >= 1.0));
}

#[test]
fn eigenvalues_of_a_compact_interval() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("interval.json");
    std::fs::write(
        &path,
        r#"{"vertices": [{"id": "a", "condition": {"type": "dirichlet"}}, {"id": "b", "condition": {"type": "dirichlet"}}],
            "edges": [{"id": "e", "from": "a", "to": "b", "length": 1.0}]}"#,
    )
    .unwrap();
    let out = run(["qgs", "eigenvalues", "--graph", &arg(path.clone()), "--kmin", "0.5", "--kmax", "10"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let ev = results(&out.stdout)["eigenvalues"].as_array().unwrap().clone();
    assert_eq!(ev.len(), 3);
    for (n, e) in ev.iter().enumerate() {
        assert!((e["k"].as_f64().unwrap() - (n + 1) as f64 * std::f64::consts::PI).abs() < 1e-9);
    }
    let csv = run(["qgs", "eigenvalues", "--graph", &arg(path), "--kmin", "0.5", "--kmax", "10", "--emit", "csv"]);
    assert_eq!(csv.stdout.lines().count(), 4);
}

#[test]
fn exit_codes() {
    assert_eq!(run(["qgs"]).code, 2);
    assert_eq!(run(["qgs", "compute-s", "--graph"]).code, 2);
    assert_eq!(run(["qgs", "compute-s", "--graph", "/no/such/file.json", "--k", "1"]).code, 1);
    let star = arg(example_path("s3_star.json"));
    assert_eq!(run(["qgs", "compute-s", "--graph", &star, "--k", "0"]).code, 1);
    let out = run(["qgs", "compute-s", "--graph", &star, "--k", "1", "--timing"]);
    assert_eq!(out.code, 0);
    assert!(serde_json::from_str::<Value>(&out.stdout).unwrap()["wall_time"].is_number());
}

#[test]
fn binary_writes_report_to_stdout() {
    let out = Command::new(env!("CARGO_BIN_EXE_qgs"))
        .args(["compute-s", "--graph", &arg(example_path("s3_star.json")), "--k", "7.3"])
        .env("QGS_THREADS", "2")
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["command"], "compute-s");
    let none = Command::new(env!("CARGO_BIN_EXE_qgs")).output().unwrap();
    assert_eq!(none.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&none.stderr).contains("Usage"));
}

use std::fs;

use gw_monogamy::cli::{run, EXIT_INPUT, EXIT_OK, EXIT_REFUSED, EXIT_VIOLATION};

fn gw(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("gw").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

fn col(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}

#[test]
fn measure_example1_pairs() {
    let (code, out, _) = gw(&["measure", "--preset", "example1", "--pairs"]);
    assert_eq!(code, EXIT_OK);
    let (h, rows) = csv_rows(&out);
    let (qi, ai, bi, ui) = (col(&h, "quantity"), col(&h, "block_a"), col(&h, "block_b"), col(&h, "ue"));
    let ue = |q: &str, a: &str, b: &str| -> f64 {
        rows.iter().find(|r| r[qi] == q && r[ai] == a && r[bi] == b).unwrap()[ui].parse().unwrap()
    };
    assert!((ue("site_vs_rest", "0", "1 2") - 0.41).abs() < 1e-12);
    assert!((ue("site_pair", "0", "1") - 0.25).abs() < 1e-12);
    assert!((ue("site_pair", "0", "2") - 0.16).abs() < 1e-12);
}

#[test]
fn measure_uniform_w_cut_json() {
    let (code, out, _) = gw(&["measure", "--preset", "uniform-w", "6", "--cut", "4", "--format", "json"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let c2 = v[0]["concurrence_sq"].as_f64().unwrap();
    assert!((c2 - 8.0 / 9.0).abs() < 1e-12);
}

#[test]
fn malformed_state_file_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, "{\"n\": 2").unwrap();
    let (code, out, err) = gw(&["measure", "--state", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_INPUT);
    assert!(out.is_empty());
    assert!(err.contains("malformed state file"));
}

#[test]
fn unnormalized_amplitudes_rejected() {
    assert_eq!(gw(&["measure", "--amplitudes", "0.5,0.5"]).0, EXIT_INPUT);
}

#[test]
fn squared_check_example1() {
    let (code, out, _) = gw(&["check", "--theorem", "squared", "--preset", "example1", "--partition", "0|1|2"]);
    assert_eq!(code, EXIT_OK);
    let (h, rows) = csv_rows(&out);
    let margin: f64 = rows[0][col(&h, "margin")].parse().unwrap();
    assert!((margin - 0.08).abs() < 1e-12);
}

#[test]
fn tightening_factor_above_ceiling_refused() {
    let base = ["check", "--theorem", "tightened", "--preset", "example1", "--partition", "0|1|2", "--mu", "1.7", "--h", "1.56", "--alpha", "3"];
    let (code, _, err) = gw(&[&base[..], &["--p-factor", "2.7"]].concat());
    assert_eq!(code, EXIT_REFUSED);
    assert!(err.contains("tightening_factor_range"));
    assert_eq!(gw(&[&base[..], &["--p-factor", "1.5"]].concat()).0, EXIT_OK);
}

#[test]
fn upper_bound_violation_exit_code() {
    let (code, out, _) = gw(&[
        "check", "--theorem", "beta-upper", "--amplitudes", "0.1,0.7,0.5,0.5", "--site-a", "0", "--site-b", "1", "--s", "0.5",
        "--beta", "1",
    ]);
    assert_eq!(code, EXIT_VIOLATION);
    let (h, rows) = csv_rows(&out);
    let margin: f64 = rows[0][col(&h, "margin")].parse().unwrap();
    assert!(margin < -0.03);
    let (code, _, _) = gw(&["check", "--theorem", "beta-upper", "--amplitudes", "0.1,0.7,0.5,0.5", "--s", "1", "--beta", "1"]);
    assert_eq!(code, EXIT_OK);
}

#[test]
fn suite_is_deterministic() {
    let args = ["check", "--theorem", "suite", "--count", "4", "--seed", "7", "--format", "json"];
    let (c1, a, _) = gw(&args);
    let (c2, b, _) = gw(&args);
    assert_eq!(c1, c2);
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["config"]["seed"], 7);
    let (_, other, _) = gw(&["check", "--theorem", "suite", "--count", "4", "--seed", "8", "--format", "json"]);
    assert_ne!(a, other);
}

#[test]
fn reproduce_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for target in ["table1", "table2", "table3", "fig1", "fig2", "fig3", "fig4", "example1", "discrepancy"] {
        let p1 = dir.path().join(format!("{target}-1.csv"));
        let p2 = dir.path().join(format!("{target}-2.csv"));
        assert_eq!(gw(&["reproduce", target, "--out", p1.to_str().unwrap()]).0, EXIT_OK, "{target}");
        assert_eq!(gw(&["reproduce", target, "--out", p2.to_str().unwrap()]).0, EXIT_OK, "{target}");
        let a = fs::read(&p1).unwrap();
        assert!(!a.is_empty());
        assert_eq!(a, fs::read(&p2).unwrap(), "{target}");
    }
}

#[test]
fn fig1_bounds_are_ordered() {
    let (code, out, _) = gw(&["reproduce", "fig1"]);
    assert_eq!(code, EXIT_OK);
    let (h, rows) = csv_rows(&out);
    assert_eq!(rows.len(), 61);
    let idx: Vec<usize> = ["exact", "bound_p2.6", "bound_p1.8", "ref34"].iter().map(|c| col(&h, c)).collect();
    for r in &rows {
        let v: Vec<f64> = idx.iter().map(|&i| r[i].parse().unwrap()).collect();
        assert!(v.windows(2).all(|w| w[0] >= w[1] - 1e-12), "{r:?}");
    }
}

#[test]
fn table3_printed_source() {
    let (code, out, _) = gw(&["reproduce", "table3", "--format", "json"]);
    assert_eq!(code, EXIT_OK);
    assert!(serde_json::from_str::<serde_json::Value>(&out).is_ok());
}

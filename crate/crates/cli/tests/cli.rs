use std::process::{Command, Output};

use serde_json::Value;

const TREFOIL: &str = "X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_arrowkh")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid json")
}

fn cells(v: &Value) -> Vec<(i64, i64, u64)> {
    v["groups"]
        .as_array()
        .unwrap()
        .iter()
        .map(|g| (g["h"].as_i64().unwrap(), g["q"].as_i64().unwrap(), g["betti"].as_u64().unwrap()))
        .collect()
}

#[test]
fn reduced_unknot_json() {
    let out = run(&["--pd", "", "--reduced", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "{\"input\":\"\",\"theory\":{\"x\":1,\"y\":1,\"z\":1},\"reduced\":true,\"convention\":\"standard\",\"groups\":[{\"h\":0,\"q\":0,\"betti\":1,\"torsion\":[]}]}\n"
    );
}

#[test]
fn trefoil_euler_matches_jones() {
    let h = json(&["--pd", TREFOIL, "--theory", "even", "--format", "json"]);
    let j = json(&["jones", "--pd", TREFOIL, "--format", "json"]);
    let mut chi = std::collections::BTreeMap::new();
    for (hd, q, b) in cells(&h) {
        *chi.entry(q).or_insert(0i64) += if hd % 2 == 0 { b as i64 } else { -(b as i64) };
    }
    chi.retain(|_, c| *c != 0);
    let terms: std::collections::BTreeMap<i64, i64> =
        j["terms"].as_array().unwrap().iter().map(|t| (t[0].as_i64().unwrap(), t[1].as_i64().unwrap())).collect();
    assert_eq!(chi, terms);
    assert_eq!(j["jones"], "-q^-9 + q^-5 + q^-3 + q^-1");
}

#[test]
fn trefoil_torsion_is_reported() {
    let h = json(&["homology", "--pd", TREFOIL, "--format", "json"]);
    let g = h["groups"].as_array().unwrap().iter().find(|g| g["h"] == -2 && g["q"] == -7).unwrap();
    assert_eq!(g["betti"], 0);
    assert_eq!(g["torsion"], serde_json::json!([2]));
}

#[test]
fn output_is_deterministic() {
    let a = run(&["--pd", TREFOIL, "--format", "json", "--theory", "odd"]);
    let b = run(&["--pd", TREFOIL, "--format", "json", "--theory", "odd"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn inputs_agree() {
    let pd = json(&["--pd", TREFOIL, "--format", "json"]);
    let gauss = json(&["--gauss", "O1-U2-O3-U1-O2-U3-", "--format", "json"]);
    assert_eq!(cells(&pd), cells(&gauss));
    let path = std::env::temp_dir().join(format!("arrowkh-cli-{}.pd", std::process::id()));
    std::fs::write(&path, format!("PD[{TREFOIL}]\n")).unwrap();
    let file = json(&["--file", path.to_str().unwrap(), "--format", "json"]);
    std::fs::remove_file(&path).unwrap();
    assert_eq!(cells(&pd), cells(&file));
}

#[test]
fn arrow_flip_and_conventions() {
    let normal = json(&["--pd", TREFOIL, "--format", "json", "--arrows", "normal"]);
    let flipped = json(&["--pd", TREFOIL, "--format", "json", "--arrows", "flipped"]);
    assert_eq!(normal["groups"], flipped["groups"]);
    let paper = json(&["--pd", TREFOIL, "--format", "json", "--grading-convention", "paper"]);
    assert_eq!(paper["convention"], "paper");
    let mut negated: Vec<_> = cells(&normal).into_iter().map(|(h, q, b)| (h, -q, b)).collect();
    negated.sort();
    assert_eq!(cells(&paper), negated);
}

#[test]
fn custom_theory() {
    let v = json(&["--pd", TREFOIL, "--theory", "custom", "--x", "-1", "--y", "1", "--z", "-1", "--format", "json"]);
    assert_eq!(v["theory"], serde_json::json!({"x": -1, "y": 1, "z": -1}));
    assert_eq!(run(&["--pd", TREFOIL, "--theory", "custom", "--x", "1"]).status.code(), Some(1));
    assert_eq!(run(&["--pd", TREFOIL, "--theory", "custom", "--x", "2", "--y", "1", "--z", "1"]).status.code(), Some(1));
}

#[test]
fn exit_codes() {
    let out = run(&["--pd", "X[1,2,3]"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());
    assert_eq!(run(&["--pd", "X[1,4,2,3] X[2,3,1,4]"]).status.code(), Some(1));
    assert_eq!(run(&["--pd", "", "--gauss", "O1-U1-"]).status.code(), Some(1));
    assert_eq!(run(&[]).status.code(), Some(1));
    let big: String = (0..17).map(|i| format!("X[{a},{a},{b},{b}] ", a = 2 * i + 1, b = 2 * i + 2)).collect();
    let out = run(&["--pd", &big]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(run(&["verify", "--suite", "nope"]).status.code(), Some(1));
}

#[test]
fn table_output() {
    let out = run(&["--pd", ""]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "unreduced homology, theory (1,1,1), standard grading\nq\\h  0\n  1  Z\n -1  Z\n");
}

#[test]
fn verify_suites() {
    for suite in ["commuting-square", "euler", "rm-invariance", "unknot"] {
        let out = run(&["verify", "--suite", suite]);
        let text = String::from_utf8_lossy(&out.stdout);
        assert_eq!(out.status.code(), Some(0), "{suite}: {text}");
        assert!(text.lines().all(|l| !l.starts_with("[FAIL]")));
    }
}

#[test]
fn verify_exit_code_tracks_report() {
    let out = run(&["verify", "--suite", "rm-invariance", "--reduced", "--format", "json"]);
    let checks: Vec<Value> = serde_json::from_slice(&out.stdout).unwrap();
    assert!(checks.iter().any(|c| c["name"].as_str().unwrap().ends_with("reduced")));
    let all_pass = checks.iter().all(|c| c["passed"] == true);
    assert_eq!(out.status.code(), Some(if all_pass { 0 } else { 3 }));
}

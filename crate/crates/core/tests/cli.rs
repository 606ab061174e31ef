use std::path::Path;
use std::process::Command;

use serde_json::Value;
use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_toeplitz-roots");
const R_PLUS_R2: &str = r#"{"terms":[{"c":1,"a":1,"b":0},{"c":1,"a":2,"b":0}]}"#;

fn run(args: &[&str]) -> (i32, Value) {
    let out = Command::new(BIN).args(args).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    let v = serde_json::from_str(&text).unwrap_or_else(|e| panic!("{e}: {text}"));
    (out.status.code().unwrap(), v)
}

fn file(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn prefix(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).display().to_string()
}

#[test]
fn root_writes_json_and_csv() {
    let dir = TempDir::new().unwrap();
    let input = file(&dir, "s.json", R_PLUS_R2);
    let out = prefix(&dir, "root");
    let (code, v) = run(&["root", "--p", "2", "--input", &input, "--out", &out]);
    assert_eq!(code, 0, "{v}");
    assert!(v["max_residual"].as_f64().unwrap() <= 1e-6);
    let csv = std::fs::read_to_string(format!("{out}.csv")).unwrap();
    assert!(csv.starts_with("r,re_psi,im_psi\n"));
    assert_eq!(csv.lines().count(), 257);
    assert!(Path::new(&format!("{out}.json")).exists());
}

#[test]
fn degree_one_samples_the_symbol() {
    let dir = TempDir::new().unwrap();
    let input = file(&dir, "s.json", R_PLUS_R2);
    let out = prefix(&dir, "one");
    let (code, _) = run(&["root", "--p", "1", "--input", &input, "--out", &out]);
    assert_eq!(code, 0);
    let csv = std::fs::read_to_string(format!("{out}.csv")).unwrap();
    for line in csv.lines().skip(1) {
        let f: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        let want = f[0] + f[0] * f[0];
        assert!((f[1] - want).abs() <= 1e-15 * want && f[2] == 0.0);
    }
}

#[test]
fn reports_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let input = file(&dir, "s.json", r#"{"p":3,"terms":[{"c":1,"a":2,"b":0}]}"#);
    let (a, b) = (prefix(&dir, "a"), prefix(&dir, "b"));
    run(&["root", "--input", &input, "--out", &a]);
    run(&["root", "--input", &input, "--out", &b]);
    for ext in ["json", "csv"] {
        let x = std::fs::read(format!("{a}.{ext}")).unwrap();
        let y = std::fs::read(format!("{b}.{ext}")).unwrap();
        assert_eq!(x, y, "{ext}");
    }
}

#[test]
fn verify_flags_a_corrupted_root() {
    let dir = TempDir::new().unwrap();
    let input = file(&dir, "s.json", R_PLUS_R2);
    let out = prefix(&dir, "root");
    run(&["root", "--p", "2", "--input", &input, "--out", &out]);
    let good = format!("{out}.json");
    let (code, v) = run(&["verify", "--p", "2", "--input", &input, "--psi", &good]);
    assert_eq!(code, 0, "{v}");

    let mut data: Value = serde_json::from_str(&std::fs::read_to_string(&good).unwrap()).unwrap();
    let x = data["psi"]["values_re"][150].as_f64().unwrap();
    data["psi"]["values_re"][150] = (x * 1.01).into();
    let bad = file(&dir, "bad.json", &data.to_string());
    let (code, v) = run(&["verify", "--p", "2", "--input", &input, "--psi", &bad]);
    assert_eq!(code, 1);
    assert!(!v["report"]["failures"].as_array().unwrap().is_empty());
}

#[test]
fn mellin_agrees_both_ways() {
    let dir = TempDir::new().unwrap();
    let input = file(&dir, "s.json", r#"{"rational":{"constant":2,"num_roots":[1.5],"den_roots":[1,2]}}"#);
    let (code, v) = run(&["mellin", "--input", &input, "--z", "3,4.5"]);
    assert_eq!(code, 0, "{v}");
    let vals = v["values"].as_array().unwrap();
    assert_eq!(vals.len(), 2);
    assert!((vals[0]["closed"].as_f64().unwrap() - 0.45).abs() < 1e-15);
}

#[test]
fn convolve_and_envelope_checks() {
    let dir = TempDir::new().unwrap();
    let input = file(&dir, "f.json", r#"{"factors":[{"a":1,"b":1},{"a":1,"b":1}]}"#);
    let out = prefix(&dir, "h");
    let (code, v) = run(&["convolve", "--input", &input, "--out", &out]);
    assert_eq!(code, 0, "{v}");
    let csv = std::fs::read_to_string(format!("{out}.csv")).unwrap();
    let line: Vec<f64> = csv.lines().nth(128).unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert!((line[1] + line[0] * line[0].ln()).abs() < 1e-12);

    let (code, v) = run(&["lemma-a", "--input", &input]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["envelope"]["log_power"], 1);
    let (code, v) = run(&["lemma-b", "--input", &input, "--k", "2", "--out", &out]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["envelope"]["alpha"], -1.0);
}

#[test]
fn errors_are_categorized() {
    let dir = TempDir::new().unwrap();
    let cases = [
        (r#"{"p":2,"rational":{"constant":1,"num_roots":[1],"den_roots":[2]}}"#, "properness"),
        (
            r#"{"p":2,"terms":[{"c":1,"a":0,"b":0},{"c":-1,"a":1,"b":0},{"c":1,"a":2,"b":0}]}"#,
            "unsupported-symbol",
        ),
        (r#"{"p":2,"rational":{"constant":1,"num_roots":[-5],"den_roots":[0,1]}}"#, "positivity"),
        (r#"{"p":2,"terms":[{"c":1,"a":-0.5,"b":0}]}"#, "range"),
        (r#"{"p":2,"terms":[]}"#, "input"),
        (r#"{"p":2}"#, "input"),
    ];
    for (i, (text, category)) in cases.iter().enumerate() {
        let input = file(&dir, &format!("e{i}.json"), text);
        let (code, v) = run(&["root", "--input", &input]);
        assert_eq!(code, 1);
        assert_eq!(v["error"]["category"], *category, "{text}: {v}");
    }
    let input = file(&dir, "s.json", R_PLUS_R2);
    let (code, v) = run(&["root", "--p", "2", "--branch", "2", "--input", &input]);
    assert_eq!((code, v["error"]["category"].as_str()), (1, Some("range")));
    let (code, v) = run(&["root", "--p", "2", "--tol=-1", "--input", &input]);
    assert_eq!((code, v["error"]["category"].as_str()), (1, Some("input")));
}

#[test]
fn bad_arguments_are_input_errors() {
    let (code, v) = run(&["root", "--grid", "many"]);
    assert_eq!((code, v["error"]["category"].as_str()), (1, Some("input")));
    let (code, v) = run(&["root", "--pairing", "sideways"]);
    assert_eq!((code, v["error"]["category"].as_str()), (1, Some("input")));
}

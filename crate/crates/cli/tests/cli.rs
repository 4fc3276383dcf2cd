//! End-to-end tests of the `diwt` binary: outputs, exit codes, manifests
//! and kernel-table files.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use diwt::specfun::{bessel_k0, whittaker_w_mb, WhittakerOrder};
use serde_json::Value;

struct Sandbox {
    dir: tempfile::TempDir,
}

impl Sandbox {
    fn new() -> Self {
        Sandbox {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn write(&self, name: &str, text: &str) -> PathBuf {
        let p = self.path(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    fn run(&self, args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_diwt"))
            .args(args)
            .current_dir(self.dir.path())
            .env("DIWT_CACHE_DIR", self.path("cache"))
            .output()
            .unwrap()
    }
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Data rows of a CSV document as fields.
fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn num(field: &str) -> f64 {
    field.parse().unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn read(p: &Path) -> Vec<u8> {
    std::fs::read(p).unwrap()
}

#[test]
fn eval_whittaker_reduces_to_bessel() {
    let s = Sandbox::new();
    let o = s.run(&["eval", "W", "--mu", "0", "--tau", "0", "--x", "2"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.starts_with("mu,tau,x,value,error_estimate,status\n"));
    let r = &rows(&out)[0];
    let expected = (2.0 / PI).sqrt() * bessel_k0(1.0).unwrap();
    assert!((num(&r[3]) - expected).abs() < 1e-10 * expected);
    assert!(num(&r[4]) < 1e-10);
    assert_eq!(r[5], "ok");
}

#[test]
fn eval_closed_forms() {
    let s = Sandbox::new();
    let o = s.run(&["eval", "erfc", "--x", "0"]);
    assert_eq!(num(&rows(&stdout(&o))[0][1]), 1.0);
    let o = s.run(&["eval", "D", "--nu", "-1", "--x", "0"]);
    assert_eq!(code(&o), 0);
    let v = num(&rows(&stdout(&o))[0][2]);
    assert!((v - (PI / 2.0).sqrt()).abs() < 1e-14);
}

#[test]
fn eval_numbers_have_seventeen_digits() {
    let s = Sandbox::new();
    let o = s.run(&["eval", "K", "--tau", "1.5", "--x", "0.3,2"]);
    for r in rows(&stdout(&o)) {
        for field in &r[..4] {
            let mantissa = field.split('e').next().unwrap();
            assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17, "{field}");
        }
    }
}

#[test]
fn eval_partial_failure_exits_3() {
    let s = Sandbox::new();
    let o = s.run(&["eval", "J", "--n", "1", "--x", "1,-1,2"]);
    assert_eq!(code(&o), 3);
    let r = rows(&stdout(&o));
    assert_eq!(r.len(), 3);
    assert_eq!(r[0].last().unwrap(), "ok");
    // the status of a failed row is quoted, so it spans several naive fields
    assert!(r[1][2].starts_with("NaN") && r[1].join(",").contains("\"failed: "));
    assert_eq!(r[2].last().unwrap(), "ok");
}

#[test]
fn usage_errors_exit_2() {
    let s = Sandbox::new();
    assert_eq!(code(&s.run(&["eval", "Q", "--x", "1"])), 2);
    assert_eq!(code(&s.run(&["eval", "W", "--x", "1"])), 2);
    assert_eq!(code(&s.run(&["eval", "W", "--bogus"])), 2);
    assert_eq!(code(&s.run(&["frobnicate"])), 2);
    let cfg = s.write("bad.json", r#"{"mu": 0, "sequence": [1], "colour": "red"}"#);
    assert_eq!(code(&s.run(&["--config", cfg.to_str().unwrap(), "forward"])), 2);
    let cfg = s.write("mu.json", r#"{"mu": 0.5, "sequence": [1]}"#);
    assert_eq!(code(&s.run(&["--config", cfg.to_str().unwrap(), "invert"])), 2);
    let cfg = s.write("none.json", r#"{"mu": 0}"#);
    assert_eq!(code(&s.run(&["--config", cfg.to_str().unwrap(), "invert"])), 2);
    assert_eq!(code(&s.run(&["--config", "missing.json", "forward"])), 2);
}

#[test]
fn precision_cap_exits_4() {
    let s = Sandbox::new();
    let cfg = s.write("cap.json", r#"{"mu": 0, "sequence": [1], "n_range": [9, 9]}"#);
    let cfg = cfg.to_str().unwrap();
    assert_eq!(code(&s.run(&["--config", cfg, "invert"])), 4);
    assert_eq!(code(&s.run(&["--config", cfg, "roundtrip"])), 4);
    let cfg = s.write("cap16.json", r#"{"mu": 0, "sequence": [1], "n_range": [17, 17]}"#);
    let o = s.run(&["--config", cfg.to_str().unwrap(), "--precision", "extended", "invert"]);
    assert_eq!(code(&o), 4);
}

#[test]
fn forward_single_term() {
    let s = Sandbox::new();
    let cfg = s.write("f.json", r#"{"mu": "0.25", "sequence": [1], "x_grid": [1]}"#);
    let o = s.run(&["--config", cfg.to_str().unwrap(), "forward"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.starts_with("x,f,status\n"));
    let r = &rows(&out)[0];
    let expected = (-0.5f64).exp() * whittaker_w_mb(WhittakerOrder::new(0.25, 1.0), 1.0).unwrap();
    assert!((num(&r[1]) - expected).abs() < 1e-12 * expected.abs());
}

#[test]
fn coeff_of_sine_matches_closed_form() {
    let s = Sandbox::new();
    let cfg = s.write("c.json", r#"{"mu": 0.25, "psi": {"sine_coeffs": [1]}, "n_range": [1, 1]}"#);
    let o = s.run(&["--config", cfg.to_str().unwrap(), "coeff"]);
    assert_eq!(code(&o), 0);
    let v = num(&rows(&stdout(&o))[0][1]);
    let expected = 4f64.powf(0.75) * PI * PI / PI.sinh();
    assert!((v - expected).abs() < 1e-8 * expected);
}

#[test]
fn roundtrip_theorem1_passes() {
    let s = Sandbox::new();
    let cfg = s.write("r.json", r#"{"mu": 0.25, "sequence": [1, 0.5, -0.25]}"#);
    let o = s.run(&["--config", cfg.to_str().unwrap(), "roundtrip", "--theorem", "1"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report = json(&o);
    assert_eq!(report["pass"], Value::Bool(true));
    let rows = report["coefficients"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    for (row, want) in rows.iter().zip([1.0, 0.5, -0.25]) {
        assert_eq!(row["input"].as_f64().unwrap(), want);
        assert!(row["error"].as_f64().unwrap() <= row["bound"].as_f64().unwrap());
    }
}

#[test]
fn roundtrip_theorem2_passes() {
    let s = Sandbox::new();
    let cfg = s.write("r.json", r#"{"mu": 0, "psi": {"sine_coeffs": [1]}}"#);
    let o = s.run(&["--config", cfg.to_str().unwrap(), "roundtrip", "--theorem", "2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report = json(&o);
    assert_eq!(report["pass"], Value::Bool(true));
    assert_eq!(report["values"].as_array().unwrap().len(), 5);
    assert_eq!(report["coefficients"].as_array().unwrap().len(), 4);
}

#[test]
fn roundtrip_empty_sequence_is_trivial() {
    let s = Sandbox::new();
    let cfg = s.write("r.json", r#"{"mu": 0, "sequence": []}"#);
    let o = s.run(&["--config", cfg.to_str().unwrap(), "roundtrip"]);
    assert_eq!(code(&o), 0);
    let report = json(&o);
    assert_eq!(report["pass"], Value::Bool(true));
    assert!(report["coefficients"].as_array().unwrap().is_empty());
}

#[test]
fn identity_random_is_deterministic() {
    let s = Sandbox::new();
    let args = ["identity", "--check", "eq1.12", "--seed", "7", "--trials", "3"];
    let a = s.run(&args);
    let b = s.run(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let reports = json(&a);
    let reports = reports.as_array().unwrap();
    assert_eq!(reports.len(), 3);
    assert!(reports.iter().all(|r| r["pass"] == Value::Bool(true) && r["check_id"] == "eq1.12"));
    let c = s.run(&["identity", "--check", "eq1.12", "--seed", "8", "--trials", "3"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn identity_selection_edge_cases() {
    let s = Sandbox::new();
    let o = s.run(&["identity"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o), Value::Array(Vec::new()));
    assert_eq!(code(&s.run(&["identity", "--check", "eq1.12,nope"])), 2);
}

#[test]
fn identity_full_suite_passes() {
    let s = Sandbox::new();
    let o = s.run(&["identity", "--all"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let reports = json(&o);
    assert_eq!(reports.as_array().unwrap().len(), 43);
}

#[test]
fn kernel_table_round_trip() {
    let s = Sandbox::new();
    let cfg = s.write("k.json", r#"{"kernel": {"kind": "phi0", "indices": [1, 2], "grid": [1, 2]}}"#);
    let cfg = cfg.to_str().unwrap();
    let o = s.run(&["--config", cfg, "kernel-table", "build", "--out", "table.csv"]);
    assert_eq!(code(&o), 0);
    let built = read(&s.path("table.csv"));
    let text = String::from_utf8(built.clone()).unwrap();
    for key in ["# kind: phi0", "# mu: ", "# quad: ", "# version: ", "# sha256: "] {
        assert!(text.contains(key), "{key}");
    }
    assert_eq!(rows(&text).len(), 4);
    let o = s.run(&["--config", cfg, "kernel-table", "load", "table.csv", "--out", "loaded.csv"]);
    assert_eq!(code(&o), 0);
    assert_eq!(read(&s.path("loaded.csv")), built);
    let o = s.run(&["kernel-table", "load", "table.csv"]);
    assert_eq!(o.stdout, built);
}

#[test]
fn kernel_table_defaults_to_cache_dir() {
    let s = Sandbox::new();
    let cfg = s.write("k.json", r#"{"kernel": {"kind": "psi", "mu": 0.25, "indices": [1], "grid": [1]}}"#);
    let o = s.run(&["--config", cfg.to_str().unwrap(), "kernel-table", "build"]);
    assert_eq!(code(&o), 0);
    let files: Vec<_> = std::fs::read_dir(s.path("cache"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    assert!(files.iter().any(|f| f.starts_with("psi-") && f.ends_with(".csv")), "{files:?}");
}

#[test]
fn kernel_table_failed_entry_is_flagged() {
    let s = Sandbox::new();
    let cfg = s.write("k.json", r#"{"kernel": {"kind": "psi", "indices": [1, 0.5], "grid": [1]}}"#);
    let o = s.run(&["--config", cfg.to_str().unwrap(), "kernel-table", "build", "--out", "t.csv"]);
    assert_eq!(code(&o), 3);
    let text = String::from_utf8(read(&s.path("t.csv"))).unwrap();
    let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body.len(), 3);
    assert!(body[1].ends_with(",ok"));
    assert!(body[2].contains("failed"));
    assert_eq!(code(&s.run(&["kernel-table", "load", "t.csv"])), 0);
}

#[test]
fn kernel_table_tampering_exits_5() {
    let s = Sandbox::new();
    let cfg = s.write("k.json", r#"{"kernel": {"kind": "phi0", "indices": [1], "grid": [1, 2]}}"#);
    let cfg = cfg.to_str().unwrap();
    s.run(&["--config", cfg, "kernel-table", "build", "--out", "t.csv"]);
    let text = String::from_utf8(read(&s.path("t.csv"))).unwrap();
    s.write("header.csv", &text.replace("# kind: phi0", "# kind: psi"));
    assert_eq!(code(&s.run(&["kernel-table", "load", "header.csv"])), 5);
    s.write("columns.csv", &text.replace("value_re", "value"));
    assert_eq!(code(&s.run(&["kernel-table", "load", "columns.csv"])), 5);
    s.write("truncated.csv", &text[..text.len() - 20]);
    assert_eq!(code(&s.run(&["kernel-table", "load", "truncated.csv"])), 5);
    assert_eq!(code(&s.run(&["kernel-table", "load", "absent.csv"])), 5);
    let other = s.write("other.json", r#"{"kernel": {"kind": "phi0", "indices": [2], "grid": [1, 2]}}"#);
    let o = s.run(&["--config", other.to_str().unwrap(), "kernel-table", "load", "t.csv"]);
    assert_eq!(code(&o), 5);
}

/// Runs a command with --out, then replays its manifest into a second
/// file and compares bytes.
fn assert_replays(s: &Sandbox, args: &[&str], name: &str) {
    let mut full: Vec<&str> = args.to_vec();
    full.extend(["--out", name]);
    let first = s.run(&full);
    assert!(matches!(code(&first), 0 | 3), "{}", String::from_utf8_lossy(&first.stderr));
    let manifest_path = format!("{name}.manifest.json");
    let manifest: Value = serde_json::from_slice(&read(&s.path(&manifest_path))).unwrap();
    for key in ["command", "config", "tool_version", "quad", "wall_time_seconds", "outputs"] {
        assert!(manifest.get(key).is_some(), "{key}");
    }
    let replayed = format!("replayed-{name}");
    let o = s.run(&["replay", &manifest_path, "--out", &replayed]);
    assert_eq!(code(&o), code(&first), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(read(&s.path(name)), read(&s.path(&replayed)));
}

#[test]
fn manifests_replay_byte_identically() {
    let s = Sandbox::new();
    assert_replays(&s, &["eval", "W", "--mu", "-0.5", "--tau", "2", "--x", "0.5,3"], "w.csv");
    assert_replays(&s, &["eval", "J", "--n", "1", "--x", "1,-1"], "j.csv");
    let cfg = s.write("f.json", r#"{"mu": -0.25, "sequence": [1, -0.5], "x_grid": [0.5, 1, 4]}"#);
    assert_replays(&s, &["--config", cfg.to_str().unwrap(), "forward"], "f.csv");
    let cfg = s.write("c.json", r#"{"mu": 0, "psi": {"sine_coeffs": [0, 1]}, "n_range": [1, 3]}"#);
    assert_replays(&s, &["--config", cfg.to_str().unwrap(), "coeff"], "c.csv");
    let cfg = s.write("s.json", r#"{"mu": 0.25, "psi": {"sine_coeffs": [1]}, "x_grid": [1, 2]}"#);
    assert_replays(&s, &["--config", cfg.to_str().unwrap(), "synthesize"], "s.csv");
    assert_replays(&s, &["identity", "--check", "bound1.8,kl-reduction", "--trials", "2", "--seed", "3"], "i.json");
    let cfg = s.write("k.json", r#"{"kernel": {"kind": "phi", "mu": 0.1, "indices": [1, {"re": 0.5, "im": -0.5}], "grid": [1]}}"#);
    assert_replays(&s, &["--config", cfg.to_str().unwrap(), "kernel-table", "build"], "k.csv");
}

#[test]
fn replay_detects_digest_mismatch() {
    let s = Sandbox::new();
    s.run(&["eval", "erfc", "--x", "0.5", "--out", "e.csv"]);
    let text = String::from_utf8(read(&s.path("e.csv.manifest.json"))).unwrap();
    let manifest: Value = serde_json::from_str(&text).unwrap();
    let digest = manifest["outputs"][0]["sha256"].as_str().unwrap();
    s.write("bad.json", &text.replace(digest, &"0".repeat(64)));
    assert_eq!(code(&s.run(&["replay", "bad.json", "--out", "again.csv"])), 5);
    s.write("garbled.json", "{\"command\": 1}");
    assert_eq!(code(&s.run(&["replay", "garbled.json"])), 5);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let s = Sandbox::new();
    let cfg = s.write("i.json", r#"{"mu": 0.1, "sequence": [1, 0.5], "n_range": [1, 1]}"#);
    let cfg = cfg.to_str().unwrap();
    let a = s.run(&["--config", cfg, "invert"]);
    let b = s.run(&["--config", cfg, "invert"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

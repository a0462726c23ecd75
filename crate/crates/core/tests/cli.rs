use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::Command;

fn run(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_pointwave")).args(args).output().unwrap();
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stderr).into_owned())
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

fn csv_rows(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

const ZERO: &str = r#"{"points": [[0,0,0]], "field": {"type": "zero"},
  "initial": {"zeta0": [0.0]}, "integrate": {"step": 0.01, "t_max": 0.5}}"#;

const DECAY: &str = r#"{"points": [[0,0,0]], "field": {"type": "diagonal", "alpha": [0.5]},
  "initial": {"zeta0": [1.0], "free_wave": "zero"}, "integrate": {"step": 0.001, "t_max": 1.0}}"#;

#[test]
fn simulate_zero_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "zero.json", ZERO);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(run(&["simulate", "--config", &cfg, "--out", a.to_str().unwrap()]).0, 0);
    assert_eq!(run(&["simulate", "--config", &cfg, "--out", b.to_str().unwrap()]).0, 0);
    let (header, rows) = csv_rows(&a.join("charges.csv"));
    assert_eq!(header[..3], ["t", "zeta_0_re", "zeta_0_im"]);
    for r in &rows {
        assert!(r[1..].iter().all(|v| v.parse::<f64>().unwrap() == 0.0));
    }
    assert_eq!(fs::read(a.join("charges.csv")).unwrap(), fs::read(b.join("charges.csv")).unwrap());
    let strip = |p: &Path| {
        let mut v: serde_json::Value = serde_json::from_slice(&fs::read(p).unwrap()).unwrap();
        v.as_object_mut().unwrap().remove("timestamp");
        v
    };
    assert_eq!(strip(&a.join("report.json")), strip(&b.join("report.json")));
    let report = strip(&a.join("report.json"));
    assert_eq!(report["status"], "completed");
    let sha = report["config_sha256"].as_str().unwrap().to_string();
    assert!(fs::read_to_string(a.join("charges.csv")).unwrap().starts_with(&format!("# config_sha256={sha}")));
}

#[test]
fn simulate_linear_decay() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "decay.json", DECAY);
    let out = dir.path().join("o");
    assert_eq!(run(&["simulate", "--config", &cfg, "--out", out.to_str().unwrap()]).0, 0);
    let (_, rows) = csv_rows(&out.join("charges.csv"));
    for r in rows {
        let t: f64 = r[0].parse().unwrap();
        let z: f64 = r[1].parse().unwrap();
        assert!((z - (-4.0 * PI * 0.5 * t).exp()).abs() <= 1e-8);
    }
}

#[test]
fn malformed_configs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = ZERO.replace("[[0,0,0]]", "[[0,0,0],[0,0,0]]").replace("[0.0]", "[0.0, 0.0]");
    let cfg = write_config(dir.path(), "bad.json", &bad);
    let (code, msg) = run(&["simulate", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(msg.contains("coincide"), "{msg}");
    let unknown = write_config(dir.path(), "unknown.json", &ZERO.replace("\"points\"", "\"extra\": 1, \"points\""));
    assert_eq!(run(&["simulate", "--config", &unknown, "--out", dir.path().to_str().unwrap()]).0, 2);
    let missing = dir.path().join("nope.json");
    assert_eq!(run(&["simulate", "--config", missing.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]).0, 1);
}

#[test]
fn analyze_blowup_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let trapped = r#"{"points": [[0,0,0]], "field": {"type": "power_law", "gamma": [1.0], "sigma": [1.0]},
      "initial": {"zeta0": [0.5], "zetadot0": [12.566370614359172], "profile": {"kind": "coulomb"}, "free_wave": "kirchhoff_unchecked"},
      "integrate": {"step": 0.001, "t_max": 1.0}}"#;
    let cfg = write_config(dir.path(), "trapped.json", trapped);
    let out = dir.path().join("t");
    assert_eq!(run(&["analyze-blowup", "--config", &cfg, "--out", out.to_str().unwrap()]).0, 0);
    let v: serde_json::Value = serde_json::from_slice(&fs::read(out.join("blowup.json")).unwrap()).unwrap();
    assert_eq!(v["report"]["verdict"], "GlobalEvidence");
    assert!((v["k_estimate"]["value"].as_f64().unwrap() - 1.0).abs() < 1e-12);

    let quad = r#"{"points": [[0,0,0]], "field": {"type": "polynomial", "coefficients": [[0, 0, -1]]},
      "initial": {"zeta0": [1.0], "free_wave": "zero"}, "integrate": {"step": 0.001, "t_max": 0.2}}"#;
    let cfg = write_config(dir.path(), "quad.json", quad);
    let out = dir.path().join("q");
    assert_eq!(run(&["analyze-blowup", "--config", &cfg, "--out", out.to_str().unwrap()]).0, 0);
    let v: serde_json::Value = serde_json::from_slice(&fs::read(out.join("blowup.json")).unwrap()).unwrap();
    assert!((v["t_upper_normalized"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert_eq!(v["simulation"]["status"], "escaped");
    assert!((v["simulation"]["lifespan_normalized"].as_f64().unwrap() - 1.0).abs() < 1e-3);

    let two = ZERO.replace("[[0,0,0]]", "[[0,0,0],[1,0,0]]").replace("[0.0]", "[0.0, 0.0]");
    let cfg = write_config(dir.path(), "two.json", &two);
    assert_eq!(run(&["analyze-blowup", "--config", &cfg, "--out", dir.path().to_str().unwrap()]).0, 4);
}

#[test]
fn field_slice_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "zero.json", ZERO);
    let out = dir.path().join("z");
    let args = ["field-slice", "--config", &cfg, "--t", "0.3", "--from", "0.5,0,0", "--to", "2,0,0", "--samples", "7", "--out", out.to_str().unwrap()];
    assert_eq!(run(&args).0, 0);
    let (header, rows) = csv_rows(&out.join("field.csv"));
    assert_eq!(header, ["x1", "x2", "x3", "phi_re", "phi_im", "region"]);
    assert!(rows.iter().all(|r| r[3].parse::<f64>().unwrap() == 0.0));
    assert!(fs::read_to_string(out.join("plot_field.py")).unwrap().contains("field.csv"));

    let two = r#"{"points": [[0,0,0],[1,0,0]], "field": {"type": "zero"},
      "initial": {"zeta0": [1.0, 0.0], "profile": {"kind": "coulomb"}, "free_wave": "kirchhoff_unchecked"},
      "integrate": {"step": 0.01, "t_max": 2.5, "quad_order": 4}}"#;
    let cfg = write_config(dir.path(), "two.json", two);
    let out = dir.path().join("w");
    let args = ["field-slice", "--config", &cfg, "--t", "2", "--from", "1.5,0,0", "--to", "1.5,0,1", "--samples", "2", "--out", out.to_str().unwrap()];
    assert_eq!(run(&args).0, 0);
    let (_, rows) = csv_rows(&out.join("field.csv"));
    let phi: f64 = rows[0][3].parse().unwrap();
    // ζ_2(1.5) = 1.5 at distance 0.5, plus ζ_1(0.5)/(4π·1.5) with ζ_1 = 1 before t = 2.
    assert!((phi - 0.238_732_414_637_843 - 1.0 / (4.0 * PI * 1.5)).abs() < 1e-9, "{phi}");
    assert_eq!(rows[0][5], "inside");

    let args = ["field-slice", "--config", &cfg, "--t", "4", "--from", "1.5,0,0", "--to", "1.5,0,1", "--samples", "2", "--out", out.to_str().unwrap()];
    assert_eq!(run(&args).0, 5);
}

#[test]
fn energy_audit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let coupled = r#"{"points": [[0,0,0]], "field": {"type": "linear", "theta": [[[1.0, 1.0]]]},
      "initial": {"zeta0": [1.0], "free_wave": "zero"}, "integrate": {"step": 0.01, "t_max": 0.5}}"#;
    let cfg = write_config(dir.path(), "ng.json", coupled);
    assert_eq!(run(&["energy-audit", "--config", &cfg, "--times", "0,0.5", "--out", dir.path().to_str().unwrap()]).0, 6);

    let grad = r#"{"points": [[0,0,0]], "field": {"type": "linear", "theta": [[0.5]], "hermitian": true},
      "initial": {"gaussians_value": [{"amplitude": 1.0, "center": [0,0,0], "width": 0.5}]},
      "integrate": {"step": 0.01, "t_max": 1.0, "quad_order": 12},
      "analysis": {"energy": {"radius": 6.0, "shells": 100, "angular_order": 4, "kirchhoff_order": 8}}}"#;
    let cfg = write_config(dir.path(), "g.json", grad);
    let out = dir.path().join("e");
    let (code, msg) = run(&["energy-audit", "--config", &cfg, "--times", "0,1", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{msg}");
    let (header, rows) = csv_rows(&out.join("energy.csv"));
    assert_eq!(header, ["t", "kinetic", "elastic", "matrix_term", "potential", "total", "trunc_est"]);
    let e0: f64 = rows[0][5].parse().unwrap();
    let e1: f64 = rows[1][5].parse().unwrap();
    assert!((e1 - e0).abs() / e0.abs() <= 0.02);
}

#[test]
fn resolvent_check_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"points": [[0,0,0]], "field": {"type": "zero"},
      "initial": {"zeta0": [0.0], "free_wave": "zero"}, "integrate": {"step": 0.01, "t_max": 0.1},
      "analysis": {"resolvent": {"probe": [{"amplitude": 1.0, "center": [0.3, 0.1, 0.0], "width": 0.7}]}}}"#;
    let cfg = write_config(dir.path(), "r.json", cfg);
    let out = dir.path().join("r");
    assert_eq!(run(&["resolvent-check", "--config", &cfg, "--z", "1", "--w", "1", "--out", out.to_str().unwrap()]).0, 0);
    let v: serde_json::Value = serde_json::from_slice(&fs::read(out.join("resolvent.json")).unwrap()).unwrap();
    assert_eq!(v["standard_form_residual"].as_f64().unwrap(), 0.0);
    assert_eq!(v["printed_form_residual"].as_f64().unwrap(), 0.0);
    assert_eq!(run(&["resolvent-check", "--config", &cfg, "--z", "1", "--w", "2", "--out", out.to_str().unwrap()]).0, 0);
    let v: serde_json::Value = serde_json::from_slice(&fs::read(out.join("resolvent.json")).unwrap()).unwrap();
    assert!(v["standard_form_residual"].as_f64().unwrap() <= 1e-6);
    assert_eq!(v["config_sha256"].as_str().unwrap().len(), 64);
}

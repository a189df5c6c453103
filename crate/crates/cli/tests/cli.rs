//! End-to-end tests of the `schlicht` binary: exit-code contract, file
//! formats, and the closed-form cases with known outputs.

use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_schlicht"))
}

fn write(dir: &Path, name: &str, content: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Data rows of a CSV output (comments and header skipped).
fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let text = std::fs::read_to_string(path).unwrap();
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn check_identity_passes_with_zero_margin() {
    let dir = tempfile::tempdir().unwrap();
    let map = write(dir.path(), "map.json", r#"{"h": "z"}"#);
    let out = dir.path().join("report.json");
    let status = bin()
        .args(["check", "--map"])
        .arg(&map)
        .args(["--criterion", "becker", "--k", "0.5", "--grid", "32x64", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let report = read_json(&out);
    assert_eq!(report["k_hat"], 0.0);
    assert_eq!(report["pass"], true);
    assert_eq!(report["config"]["command"], "check");
}

#[test]
fn check_teichmuller_affine_passes_tiny_target() {
    let dir = tempfile::tempdir().unwrap();
    let map = write(
        dir.path(),
        "map.json",
        r#"{"h": "z", "form": "teichmuller", "alpha": [0.3, 0]}"#,
    );
    let out = dir.path().join("report.json");
    let status = bin()
        .args(["check", "--map"])
        .arg(&map)
        .args([
            "--criterion",
            "teichmuller",
            "--weight",
            r#"{"kind":"becker"}"#,
            "--k",
            "0.01",
            "--grid",
            "32x64",
            "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let report = read_json(&out);
    assert!(report["k_hat"].as_f64().unwrap() < 1e-12);
}

#[test]
fn check_exploding_margin_fails_with_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let map = write(dir.path(), "map.json", r#"{"h": "z + 0.6*z^2"}"#);
    let out = dir.path().join("report.json");
    let status = bin()
        .args(["check", "--map"])
        .arg(&map)
        .args(["--criterion", "becker", "--k", "0.1", "--grid", "32x64", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    let report = read_json(&out);
    assert!(report["k_hat"].as_f64().unwrap() > 0.1);
    assert_eq!(report["pass"], false);
}

#[test]
fn missing_input_gives_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let status = bin()
        .args(["check", "--map"])
        .arg(dir.path().join("nope.json"))
        .args(["--criterion", "becker", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
    // unknown criterion tags are input errors too
    let map = write(dir.path(), "map.json", r#"{"h": "z"}"#);
    let status = bin()
        .args(["check", "--map"])
        .arg(&map)
        .args(["--criterion", "unknown_tag", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
}

#[test]
fn extend_identity_reproduces_the_plane() {
    let dir = tempfile::tempdir().unwrap();
    let map = write(dir.path(), "map.json", r#"{"h": "z"}"#);
    let out = dir.path().join("grid.csv");
    let status = bin()
        .args(["extend", "--map"])
        .arg(&map)
        .args(["--tag", "ahlfors_weill", "--grid", "16x16", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let rows = csv_rows(&out);
    assert!(!rows.is_empty());
    for row in rows {
        let z_re: f64 = row[0].parse().unwrap();
        let z_im: f64 = row[1].parse().unwrap();
        let f_re: f64 = row[2].parse().unwrap();
        let f_im: f64 = row[3].parse().unwrap();
        assert!(((f_re - z_re).powi(2) + (f_im - z_im).powi(2)).sqrt() < 1e-12);
        assert!(row[4] == "interior" || row[4] == "exterior");
    }
}

#[test]
fn extend_affine_teichmuller_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let map = write(
        dir.path(),
        "map.json",
        r#"{"h": "z", "form": "teichmuller", "alpha": [0.3, 0]}"#,
    );
    let out = dir.path().join("grid.csv");
    let status = bin()
        .args(["extend", "--map"])
        .arg(&map)
        .args(["--tag", "teichmuller", "--weight", r#"{"kind":"becker"}"#])
        .args(["--grid", "16x16", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    for row in csv_rows(&out) {
        let z_re: f64 = row[0].parse().unwrap();
        let z_im: f64 = row[1].parse().unwrap();
        let f_re: f64 = row[2].parse().unwrap();
        let f_im: f64 = row[3].parse().unwrap();
        // z + 0.3·conj(z)
        let e_re = z_re + 0.3 * z_re;
        let e_im = z_im - 0.3 * z_im;
        assert!(((f_re - e_re).powi(2) + (f_im - e_im).powi(2)).sqrt() < 1e-12);
    }
}

#[test]
fn lambda_zero_extend_matches_analytic_rows_bitwise() {
    let dir = tempfile::tempdir().unwrap();
    let harmonic = write(
        dir.path(),
        "hm.json",
        r#"{"h": "z + 0.15*z^2", "g": "0.1*z^2", "lambda": [0, 0]}"#,
    );
    let analytic = write(dir.path(), "an.json", r#"{"h": "z + 0.15*z^2"}"#);
    let out_h = dir.path().join("h.csv");
    let out_a = dir.path().join("a.csv");
    let status = bin()
        .args(["extend", "--map"])
        .arg(&harmonic)
        .args(["--tag", "harmonic_lambda", "--weight", r#"{"kind":"becker"}"#])
        .args(["--grid", "16x16", "--out"])
        .arg(&out_h)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let status = bin()
        .args(["extend", "--map"])
        .arg(&analytic)
        .args(["--tag", "ahlfors", "--weight", r#"{"kind":"becker"}"#])
        .args(["--grid", "16x16", "--out"])
        .arg(&out_a)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert_eq!(csv_rows(&out_h), csv_rows(&out_a));
}

#[test]
fn beltrami_identity_certifies_at_zero() {
    let dir = tempfile::tempdir().unwrap();
    let map = write(dir.path(), "map.json", r#"{"h": "z"}"#);
    let out = dir.path().join("mu.csv");
    let status = bin()
        .args(["beltrami", "--map"])
        .arg(&map)
        .args(["--tag", "ahlfors_weill", "--grid", "16x16", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let cert = read_json(&dir.path().join("mu.cert.json"));
    assert!(cert["sup_mu_interior"].as_f64().unwrap() < 1e-9);
    assert!(cert["sup_mu_exterior"].as_f64().unwrap() < 1e-9);
    assert_eq!(cert["certified"], true);
}

#[test]
fn beltrami_affine_certifies_against_explicit_k() {
    let dir = tempfile::tempdir().unwrap();
    let map = write(
        dir.path(),
        "map.json",
        r#"{"h": "z", "form": "teichmuller", "alpha": [0.3, 0]}"#,
    );
    let out = dir.path().join("mu.csv");
    let status = bin()
        .args(["beltrami", "--map"])
        .arg(&map)
        .args(["--tag", "teichmuller", "--weight", r#"{"kind":"becker"}"#])
        .args(["--grid", "16x16", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let cert = read_json(&dir.path().join("mu.cert.json"));
    let sup = cert["sup_mu_exterior"].as_f64().unwrap();
    assert!((sup - 0.3).abs() < 1e-9);
    assert!((cert["K"].as_f64().unwrap() - 1.3 / 0.7).abs() < 1e-9);
    assert_eq!(cert["certified"], true);
}

#[test]
fn render_emits_deterministic_svg_with_certification_stamp() {
    let dir = tempfile::tempdir().unwrap();
    let map = write(
        dir.path(),
        "map.json",
        r#"{"h": "z", "form": "teichmuller", "alpha": [0.3, 0]}"#,
    );
    let out = dir.path().join("fig.svg");
    let run = || {
        bin()
            .args(["render", "--map"])
            .arg(&map)
            .args(["--tag", "teichmuller", "--weight", r#"{"kind":"becker"}"#])
            .args(["--circles", "4", "--samples", "64", "--out"])
            .arg(&out)
            .status()
            .unwrap()
    };
    assert_eq!(run().code(), Some(0));
    let first = std::fs::read(&out).unwrap();
    assert_eq!(run().code(), Some(0));
    let second = std::fs::read(&out).unwrap();
    assert_eq!(first, second);
    let text = String::from_utf8(first).unwrap();
    assert!(text.contains(r#"<desc id="certification">certified</desc>"#));
    assert!(text.contains("<path"));
}

#[test]
fn render_stamps_non_certified_builds() {
    let dir = tempfile::tempdir().unwrap();
    let map = write(dir.path(), "map.json", r#"{"h": "z + 0.6*z^2"}"#);
    let out = dir.path().join("fig.svg");
    let status = bin()
        .args(["render", "--map"])
        .arg(&map)
        .args(["--tag", "ahlfors", "--weight", r#"{"kind":"becker"}"#])
        .args(["--circles", "3", "--samples", "32", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains(r#"<desc id="certification">non-certified</desc>"#));
}

#[test]
fn non_sense_preserving_map_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    // |g'| = 2|z| exceeds |h'| = 1 well inside the disk
    let map = write(dir.path(), "map.json", r#"{"h": "z", "g": "z^2"}"#);
    let out = dir.path().join("report.json");
    let status = bin()
        .args(["check", "--map"])
        .arg(&map)
        .args(["--criterion", "hm_harmonic", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
}

#[test]
fn weight_file_and_inline_weight_agree() {
    let dir = tempfile::tempdir().unwrap();
    let map = write(dir.path(), "map.json", r#"{"h": "z + 0.15*z^2", "g": "0.1*z^2"}"#);
    let weight_file = write(dir.path(), "w.json", r#"{"kind":"becker"}"#);
    let out_a = dir.path().join("a.json");
    let out_b = dir.path().join("b.json");
    let run = |weight: &str, out: &Path| {
        bin()
            .args(["check", "--map"])
            .arg(&map)
            .args(["--criterion", "main_harmonic_sigma", "--weight", weight])
            .args(["--k", "0.9", "--grid", "32x64", "--out"])
            .arg(out)
            .status()
            .unwrap()
    };
    assert_eq!(run(weight_file.to_str().unwrap(), &out_a).code(), Some(0));
    assert_eq!(run(r#"{"kind":"becker"}"#, &out_b).code(), Some(0));
    let a = read_json(&out_a);
    let b = read_json(&out_b);
    assert_eq!(a["k_hat"], b["k_hat"]);
    assert_eq!(a["witness"], b["witness"]);
}

#[test]
fn trace_output_has_shrinking_gap_column() {
    let dir = tempfile::tempdir().unwrap();
    let map = write(
        dir.path(),
        "map.json",
        r#"{"h": "z", "form": "teichmuller", "alpha": [0.3, 0]}"#,
    );
    let out = dir.path().join("grid.csv");
    let trace = dir.path().join("trace.csv");
    let status = bin()
        .args(["extend", "--map"])
        .arg(&map)
        .args(["--tag", "teichmuller", "--weight", r#"{"kind":"becker"}"#])
        .args(["--grid", "16x16", "--out"])
        .arg(&out)
        .arg("--trace-out")
        .arg(&trace)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let rows = csv_rows(&trace);
    assert_eq!(rows.len(), 1024);
    for row in rows {
        assert_eq!(row.len(), 6);
        let gap: f64 = row[5].parse().unwrap();
        // |F(1+ε) − F(1−ε)| for z + 0.3z̄ is at most 2ε(1+0.3)
        assert!(gap <= 2.0 * 5e-3 * 1.3 + 1e-12);
    }
}

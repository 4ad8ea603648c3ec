use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn run(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_anisoreg"))
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is a JSON report")
}

fn error_record(o: &Output) -> Value {
    serde_json::from_slice(&o.stderr).expect("stderr is a JSON error record")
}

fn column(path: &Path, name: &str) -> Vec<f64> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let k = r.headers().unwrap().iter().position(|h| h == name).expect("column present");
    r.records().map(|row| row.unwrap()[k].parse().unwrap()).collect()
}

#[test]
fn conjugate_of_cubic_power() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["conjugate", "--A", "power:p=3"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let t = column(&dir.path().join("conjugate.csv"), "t");
    let conj = column(&dir.path().join("conjugate.csv"), "A_conj");
    let k = t.iter().position(|x| *x == 1.0).expect("t = 1 on the table");
    assert!((conj[k] - 2.0 / 3.0).abs() < 1e-12, "{}", conj[k]);
    let rep = report(&o);
    assert_eq!(rep["verdict"], "pass");
    assert_eq!(rep["report"]["audit"]["young_violations"], 0);
    assert!(dir.path().join("conjugate.json").exists());
}

#[test]
fn symmetrized_poisson_disk() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        &["symmetrize-solve", "--phi", "power:p=2", "--n", "2", "--f", "const:1", "--omega", "pi"],
    );
    assert_eq!(o.status.code(), Some(0));
    let v0 = report(&o)["report"]["v0"].as_f64().unwrap();
    assert!((v0 - 0.25).abs() < 1e-12, "{v0}");
    let r = column(&dir.path().join("radial.csv"), "r");
    let v = column(&dir.path().join("radial.csv"), "v");
    for (r, v) in r.iter().zip(&v) {
        assert!((v - (1.0 - r * r) / 4.0).abs() < 1e-10);
    }
}

#[test]
fn plap_example_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["verify-example", "plap", "--p", "2", "--n", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let rep = report(&o);
    assert_eq!(rep["verdict"], "pass");
    let checks = rep["report"]["verification"]["checks"].as_array().unwrap();
    let slope = checks
        .iter()
        .find(|c| c["quantity"] == "vartheta" && c["kind"] == "power")
        .unwrap()["computed"]
        .as_f64()
        .unwrap();
    assert!((slope - 3.0).abs() <= 0.06, "{slope}");
}

#[test]
fn unknown_command_is_an_operational_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(error_record(&o)["kind"], "usage");
}

#[test]
fn module_errors_carry_their_kind() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["conjugate", "--A", "power:p=0.5"]);
    assert_eq!(o.status.code(), Some(1));
    let rec = error_record(&o);
    assert_eq!(rec["command"], "conjugate");
    assert_eq!(rec["kind"], "invalid_input");
    let o = run(dir.path(), &["verify-example", "plap", "--regime", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(error_record(&o)["kind"], "malformed_config");
}

#[test]
fn config_fills_unset_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"A": "power:p=3", "per-decade": 2}"#).unwrap();
    let o = run(dir.path(), &["--config", cfg.to_str().unwrap(), "conjugate"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(column(&dir.path().join("conjugate.csv"), "t").len(), 13);
    // the command line wins over the config
    let o = run(dir.path(), &["--config", cfg.to_str().unwrap(), "conjugate", "--A", "power:p=2"]);
    assert_eq!(o.status.code(), Some(0));
    let conj = column(&dir.path().join("conjugate.csv"), "A_conj");
    let t = column(&dir.path().join("conjugate.csv"), "t");
    let k = t.iter().position(|x| *x == 1.0).unwrap();
    assert!((conj[k] - 0.5).abs() < 1e-12, "{}", conj[k]);
}

#[test]
fn malformed_config_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    for text in [r#"{"A": "power:p=3", "bogus": 1}"#, "[1, 2]", "{not json"] {
        std::fs::write(&cfg, text).unwrap();
        let o = run(dir.path(), &["--config", cfg.to_str().unwrap(), "conjugate"]);
        assert_eq!(o.status.code(), Some(1), "{text}");
        assert_eq!(error_record(&o)["kind"], "malformed_config", "{text}");
    }
}

#[test]
fn failed_bound_exits_with_verdict_code() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["regularity-report", "--phi", "power:p=2", "--nodes", "17", "--slack=-0.5"]);
    assert_eq!(o.status.code(), Some(2));
    let rep = report(&o);
    assert_eq!(rep["verdict"], "fail");
    assert_eq!(rep["report"]["comparison"]["pass"], false);
}

#[test]
fn quiet_suppresses_stdout_but_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["--quiet", "grid-solve", "--phi", "power:p=2", "--nodes", "17"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let u = column(&dir.path().join("field.csv"), "u");
    assert_eq!(u.len(), 17 * 17);
    assert!(u.iter().all(|v| *v >= -1e-12));
}

#[test]
fn monte_carlo_outputs_are_seed_deterministic() {
    let phi = "split:power:p=2;power:p=2;power:p=3;power:p=4";
    let args = ["phicirc", "--phi", phi, "--levels", "4", "--level-min", "1", "--level-max", "1e3"];
    let csv = |seed: &str| {
        let dir = tempfile::tempdir().unwrap();
        let mut a = vec!["--quiet", "--seed", seed];
        a.extend_from_slice(&args);
        let o = run(dir.path(), &a);
        assert_eq!(o.status.code(), Some(0));
        std::fs::read(dir.path().join("phi_circ.csv")).unwrap()
    };
    assert_eq!(csv("11"), csv("11"));
    assert_ne!(csv("11"), csv("12"));
}

#[test]
fn admissibility_of_power_datum() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["admissibility", "--phi", "power:p=2,c=1", "--n", "2", "--f", "power:a=0.5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(report(&o)["report"]["admissible"], true);
    let m = column(&dir.path().join("modular.csv"), "modular");
    assert!(m.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn point_mass_sequence_reports_log_profile() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["approx-seq", "--phi", "power:p=2", "--f", "point:mass=1", "--nodes", "65", "--top", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let rep = report(&o);
    let slope = rep["report"]["diagonal_log_fit"]["slope"].as_f64().unwrap();
    assert!((slope + 1.0 / (2.0 * std::f64::consts::PI)).abs() < 0.1 / (2.0 * std::f64::consts::PI), "{slope}");
    assert_eq!(rep["report"]["vartheta_quasinorm"]["kind"], "finite");
}

#[test]
fn embedding_table_has_power_slopes() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["embedding", "--phi", "power:p=2,c=1", "--n", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let s = &report(&o)["report"]["top_decade_slopes"];
    assert!((s["Phi_n"].as_f64().unwrap() - 6.0).abs() < 0.12);
    assert!((s["vartheta_n"].as_f64().unwrap() - 3.0).abs() < 0.06);
    assert!((s["varrho_n"].as_f64().unwrap() - 0.75).abs() < 0.015);
    assert_eq!(column(&dir.path().join("embedding.csv"), "ln_t").len(), 256);
}

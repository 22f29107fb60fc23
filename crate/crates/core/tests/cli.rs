use serde_json::Value;
use std::process::{Command, Output};

fn su11(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_su11"))
        .args(args)
        .output()
        .expect("run su11")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let o = su11(args);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    serde_json::from_str(&stdout(&o)).unwrap()
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

#[test]
fn state_undisplaced() {
    let v = json(&["state", "--k", "1", "--n", "0", "--tau", "0"]);
    let amps = v["amplitudes"].as_array().unwrap();
    assert_eq!(amps.len(), 1);
    assert_eq!(
        (amps[0]["n"].as_u64(), f(&amps[0]["re"]), f(&amps[0]["im"])),
        (Some(0), 1.0, 0.0)
    );
    assert_eq!(f(&v["meta"]["tail_mass"]), 0.0);
}

#[test]
fn state_coherent_amplitudes() {
    let v = json(&["state", "--k", "1", "--n", "0", "--tau", "1", "--phi", "0"]);
    let z = -(0.5f64).tanh();
    assert_eq!(f(&v["meta"]["zeta_re"]), z);
    for a in v["amplitudes"].as_array().unwrap().iter().take(12) {
        let s = a["n"].as_u64().unwrap() as i32;
        let want = (1.0 - z * z) * ((s + 1) as f64).sqrt() * z.powi(s);
        assert!((f(&a["re"]) - want).abs() < 1e-13);
    }
}

#[test]
fn state_csv_and_file_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("state.csv");
    let o = su11(&[
        "state",
        "--n",
        "2",
        "--tau",
        "0.9",
        "--phi",
        "1.1",
        "--format",
        "csv",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("# n_source=2\n"));
    let mut rows = text.lines().filter(|l| !l.starts_with('#'));
    assert_eq!(rows.next(), Some("n,re,im,abs2"));
    let norm: f64 = rows
        .map(|l| l.split(',').nth(3).unwrap().parse::<f64>().unwrap())
        .sum();
    assert!((norm - 1.0).abs() < 1e-10);
}

#[test]
fn output_is_deterministic() {
    let args = [
        "state", "--k", "1.5", "--n", "3", "--tau", "0.7", "--phi", "0.2",
    ];
    assert_eq!(su11(&args).stdout, su11(&args).stdout);
}

#[test]
fn spectrum_uncoupled() {
    let o = su11(&[
        "spectrum", "--omega", "1", "--chi", "0", "--m", "0", "--n-max", "3", "--format", "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,m,omega,chi,energy"));
    let e: Vec<f64> = lines
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(e, vec![0.0, 2.0, 4.0, 6.0]);
}

#[test]
fn spectrum_coupled() {
    let v = json(&[
        "spectrum", "--omega", "1", "--chi", "0.6", "--m", "2", "--n-max", "2",
    ]);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 6);
    assert!((f(&rows[1]["energy"]) - 3.0).abs() < 1e-14);
    assert_eq!(f(&rows[4]["chi"]), 0.0);
}

#[test]
fn spectrum_above_threshold() {
    let o = su11(&["spectrum", "--omega", "1", "--chi", "1.2"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("above threshold"));
}

#[test]
fn wavefunction_grid() {
    let v = json(&[
        "wavefunction",
        "--n",
        "2",
        "--m",
        "1",
        "--tau",
        "0",
        "--radial-points",
        "9",
        "--angular-points",
        "3",
    ]);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 27);
    assert!(rows
        .iter()
        .all(|r| f(&r["difference"]) == 0.0 && r["flag"] == "ok"));
}

#[test]
fn wavefunction_audit_flags() {
    let o = su11(&[
        "wavefunction",
        "--n",
        "2",
        "--m",
        "1",
        "--tau",
        "0.8",
        "--phi",
        "0.4",
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    let diff = header.iter().position(|h| *h == "difference").unwrap();
    let corrected = header
        .iter()
        .position(|h| *h == "corrected_difference")
        .unwrap();
    let rows: Vec<Vec<&str>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').collect())
        .collect();
    assert_eq!(rows.len(), 40 * 8);
    for r in &rows {
        let d: f64 = r[diff].parse().unwrap();
        assert!(d < 1e-8 || *r.last().unwrap() == "mismatch");
        assert!(r[corrected].parse::<f64>().unwrap() < 1e-10);
    }
}

#[test]
fn wavefunction_singular_sigma() {
    let tau = format!("{}", 2.0 * 0.5f64.atanh());
    let v = json(&[
        "wavefunction",
        "--n",
        "1",
        "--m",
        "0",
        "--tau",
        &tau,
        "--phi",
        "0",
        "--radial-points",
        "4",
        "--angular-points",
        "2",
    ]);
    assert!(v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .all(|r| r["flag"] == "singular" && r["closed_re"].is_null()));
}

#[test]
fn evolve_trace() {
    let v = json(&[
        "evolve", "--k", "1", "--n", "0", "--omega", "1", "--chi", "0.5", "--t", "1", "--steps",
        "2",
    ]);
    assert!((f(&v["meta"]["omega_eff"]) - 3f64.sqrt()).abs() < 1e-15);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(
        (f(&rows[0]["phase"]), f(&rows[0]["overlap_modulus"])),
        (0.0, 1.0)
    );
    assert!((f(&rows[2]["phase"]) + 1.7320508).abs() < 1e-7);
    for r in rows {
        assert!((f(&r["overlap_modulus"]) - 1.0).abs() < 1e-12);
        assert!(f(&r["difference"]).abs() < 1e-8);
    }
}

#[test]
fn evolve_above_threshold() {
    assert_eq!(
        su11(&["evolve", "--omega", "1", "--chi", "1"])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn invalid_arguments() {
    assert_eq!(su11(&["state", "--k", "-1"]).status.code(), Some(2));
    assert_eq!(
        su11(&["state", "--n", "40", "--dim", "16"]).status.code(),
        Some(2)
    );
    assert_eq!(su11(&["state", "--tau", "nan"]).status.code(), Some(2));
    assert_eq!(su11(&["state", "--tol", "0"]).status.code(), Some(2));
    assert_eq!(su11(&["state", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(su11(&["transmogrify"]).status.code(), Some(2));
    assert_eq!(su11(&["spectrum", "--omega", "-1"]).status.code(), Some(2));
}

fn verify_report(extra: &[&str]) -> (Option<i32>, Value) {
    let mut args = vec!["verify"];
    args.extend_from_slice(extra);
    let o = su11(&args);
    (o.status.code(), serde_json::from_str(&stdout(&o)).unwrap())
}

#[test]
fn verify_small_dim_warns() {
    let (code, report) = verify_report(&["--dim", "16"]);
    let checks = report["checks"].as_array().unwrap();
    assert!(checks.iter().any(|c| c["status"] == "warn"));
    // dim-insensitive checks still decide the exit code
    let hard_fail = checks.iter().any(|c| c["status"] == "fail");
    assert_eq!(code, Some(if hard_fail { 1 } else { 0 }));
    assert_eq!(report["passed"].as_bool(), Some(!hard_fail));
}

#[test]
fn verify_tight_tolerance_fails() {
    let (code, report) = verify_report(&["--tol", "1e-15"]);
    assert_eq!(code, Some(1));
    let checks = report["checks"].as_array().unwrap();
    assert!(checks.iter().filter(|c| c["status"] == "fail").count() > 5);
    for c in checks {
        assert!(c["max_residual"].is_number() || c["max_residual"].is_null());
        if c["status"] == "fail" {
            assert!(f(&c["tolerance"]) == 1e-15);
        }
    }
}

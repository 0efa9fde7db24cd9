use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn phgen(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phgen")).args(args).output().expect("run phgen")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: stdout={} stderr={}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

fn sample_at_zero(report: &Value) -> &Value {
    report["samples"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["x"].as_f64().unwrap().abs() < 1e-12)
        .expect("grid has a node at 0")
}

#[test]
fn derive_scarf_potential_at_origin() {
    let out = phgen(&["derive", "--model", "scarf2", "--param", "A=2", "--a", "-5", "--b", "5", "--N", "201"]);
    assert_eq!(code(&out), 0);
    let r = json(&out);
    assert!((sample_at_zero(&r)["V"].as_f64().unwrap() + 1.75).abs() < 1e-12);
    assert_eq!(r["status"], "PASS");
    assert_eq!(r["config"]["model"], "scarf2");
    assert_eq!(r["samples"].as_array().unwrap().len(), 201);
}

#[test]
fn derive_inline_morse() {
    let out = phgen(&[
        "derive", "--W", "-xi*exp(-x)", "--antideriv", "xi*exp(-x)", "--param", "xi=1", "--alpha", "0", "--beta", "-0.25",
    ]);
    assert_eq!(code(&out), 0);
    let r = json(&out);
    assert!((sample_at_zero(&r)["V"].as_f64().unwrap() + 0.25).abs() < 1e-12);
    assert_eq!(r["status"], "NONE");
}

#[test]
fn derive_inline_numeric_antiderivative() {
    // ∫ cosh = sinh + 1 anchored at 0 with value 1, so G never vanishes
    let out = phgen(&["derive", "--W", "cosh(x)", "--anchor", "0", "--anchor-value", "1", "--N", "21", "--a", "-1", "--b", "1"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    for s in r["samples"].as_array().unwrap() {
        let x = s["x"].as_f64().unwrap();
        assert!((s["G"].as_f64().unwrap() + 0.5 * (x.sinh() + 1.0)).abs() < 1e-9);
    }
}

#[test]
fn error_exit_codes() {
    let zero = phgen(&["derive", "--W", "0"]);
    assert_eq!(code(&zero), 3);
    assert!(String::from_utf8_lossy(&zero.stderr).contains("G vanishes"));
    assert_eq!(code(&phgen(&["derive", "--W", "sin(x"])), 2);
    assert_eq!(code(&phgen(&["derive", "--W", "foo(x)"])), 2);
    assert_eq!(code(&phgen(&["derive", "--model", "harmonic"])), 2);
    assert_eq!(code(&phgen(&["derive", "--model", "scarf2"])), 2);
    assert_eq!(code(&phgen(&["derive", "--model", "morse", "--W", "x", "--param", "xi=1"])), 2);
    assert_eq!(code(&phgen(&["derive"])), 2);
    assert_eq!(code(&phgen(&["derive", "--model", "periodic", "--a", "1", "--b", "0"])), 2);
    // the closed form's pole lies on the grid
    assert_eq!(
        code(&phgen(&["derive", "--model", "constant_w", "--param", "W0=1", "--param", "C0=0", "--a", "-1", "--b", "1", "--N", "3"])),
        3
    );
}

#[test]
fn derive_csv_embeds_config() {
    let out = phgen(&["derive", "--model", "morse", "--param", "xi=1", "--N", "10", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let first = lines.next().unwrap();
    assert!(first.starts_with("# config: {"));
    assert_eq!(lines.next().unwrap(), "x,G,Q,V,W,re_Veff,im_Veff");
    assert_eq!(lines.count(), 10);
}

#[test]
fn verify_reports_three_residuals() {
    let out = phgen(&["verify", "--model", "scarf2", "--param", "A=2", "--N", "300"]);
    let r = json(&out);
    for key in ["intertwining_residual", "eta_hermiticity_residual", "etaH_hermiticity_residual"] {
        assert!(r[key].as_f64().unwrap() >= 0.0, "{key}");
    }
    assert_eq!(r["eta_hermiticity_residual"].as_f64().unwrap(), 0.0);
    let pass = r["checks"].as_array().unwrap().iter().all(|c| c["pass"].as_bool().unwrap());
    assert_eq!(code(&out), if pass { 0 } else { 1 });

    let strict = phgen(&["verify", "--model", "scarf2", "--param", "A=2", "--N", "300", "--tol-intertwine", "1e-12"]);
    assert_eq!(code(&strict), 1);
    assert_eq!(json(&strict)["status"], "FAIL");
}

#[test]
fn verify_logs_both_morse_ground_states() {
    let out = phgen(&["verify", "--model", "morse", "--param", "xi=1", "--N", "400"]);
    let r = json(&out);
    let states = r["eigenfunction_residuals"].as_array().unwrap();
    assert_eq!(states.len(), 2);
    let derived = states[0]["residual"].as_f64().unwrap();
    let printed = states[1]["residual"].as_f64().unwrap();
    assert!(derived < 5e-2 && printed > 0.1, "{derived} {printed}");
}

#[test]
fn verify_external_matrices() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let model = phgen(&["verify", "--model", "scarf2", "--param", "A=2", "--N", "40", "--dump-matrices", d]);
    let from_model = json(&model)["intertwining_residual"].as_f64().unwrap();
    let h = dir.path().join("H.csv");
    let eta = dir.path().join("eta.csv");
    let out = phgen(&["verify", "--h-csv", h.to_str().unwrap(), "--eta-csv", eta.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let r = json(&out);
    assert_eq!(r["status"], "NONE");
    assert!(r["checks"].as_array().unwrap().is_empty());
    assert_eq!(r["intertwining_residual"].as_f64().unwrap(), from_model);

    let small = dir.path().join("small.csv");
    std::fs::write(&small, "1,0,0,0\n0,0,1,0\n").unwrap();
    let mismatch = phgen(&["verify", "--h-csv", h.to_str().unwrap(), "--eta-csv", small.to_str().unwrap()]);
    assert_eq!(code(&mismatch), 2);
}

#[test]
fn spectrum_scarf_single_level() {
    let out = phgen(&["spectrum", "--model", "scarf2", "--param", "A=1", "--N", "300"]);
    let r = json(&out);
    assert_eq!(code(&out), 0, "{r}");
    let eigs = r["spectrum"]["eigenvalues"].as_array().unwrap();
    assert_eq!(eigs.len(), 1);
    assert!((eigs[0][0].as_f64().unwrap() + 0.25).abs() < 1e-3);
    assert_eq!(r["total_eigenvalues"], 300);
    assert_eq!(r["spectrum"]["matches"][0]["matched"], true);
}

#[test]
fn spectrum_periodic_low_levels() {
    let out = phgen(&["spectrum", "--model", "periodic", "--N", "300"]);
    let r = json(&out);
    assert!(r.get("v_inf").is_none());
    let matches = r["spectrum"]["matches"].as_array().unwrap();
    for level in [0.25, 2.25] {
        let m = matches.iter().find(|m| m["level"].as_f64() == Some(level)).unwrap();
        assert!(m["distance"].as_f64().unwrap() < 1e-2, "{m}");
    }
}

fn run_to_file(args: &[&str], path: &Path) -> i32 {
    let mut full: Vec<&str> = args.to_vec();
    full.extend(["--out", path.to_str().unwrap()]);
    code(&phgen(&full))
}

#[test]
fn embedded_config_reproduces_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let first = run_to_file(&["spectrum", "--model", "scarf2", "--param", "A=3", "--N", "200"], &path);
    let original = std::fs::read(&path).unwrap();
    let again = phgen(&["spectrum", "--config", path.to_str().unwrap()]);
    assert_eq!(code(&again), first);
    assert_eq!(std::fs::read(&path).unwrap(), original);
    // conflicting options are rejected
    assert_eq!(code(&phgen(&["spectrum", "--config", path.to_str().unwrap(), "--tol-level", "1"])), 2);
    assert_eq!(code(&phgen(&["verify", "--config", path.to_str().unwrap()])), 2);
}

#[test]
fn csv_report_reproduces_itself() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.csv");
    assert_eq!(run_to_file(&["derive", "--model", "morse", "--param", "xi=1", "--N", "15", "--format", "csv"], &path), 0);
    let original = std::fs::read(&path).unwrap();
    assert_eq!(code(&phgen(&["derive", "--config", path.to_str().unwrap()])), 0);
    assert_eq!(std::fs::read(&path).unwrap(), original);
}

#[test]
fn sweep_keeps_input_order() {
    let out = phgen(&["spectrum", "--model", "scarf2", "--sweep", "A=3,1,2.5", "--N", "150"]);
    let r = json(&out);
    let values: Vec<f64> = r["runs"].as_array().unwrap().iter().map(|x| x["value"].as_f64().unwrap()).collect();
    assert_eq!(values, vec![3.0, 1.0, 2.5]);
    assert_eq!(r["config"]["sweep"]["param"], "A");
}

#[test]
fn catalog_listing() {
    let list = json(&phgen(&["catalog", "list"]));
    let names: Vec<&str> = list.as_array().unwrap().iter().map(|e| e["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["scarf2", "periodic", "morse", "constant_w"]);
    let show = phgen(&["catalog", "show", "scarf2", "--param", "A=4"]);
    assert_eq!(code(&show), 0);
    let e = json(&show);
    assert_eq!(e["analytic_levels"], serde_json::json!([-2.25, -0.25]));
    assert_eq!(e["scarf_s_t"], serde_json::json!([1.0, 3.0]));
    assert_eq!(e["spec"]["antiderivative"], "A / cosh(x)");
    assert_eq!(code(&phgen(&["catalog", "show", "scarf2"])), 2);
    let periodic = json(&phgen(&["catalog", "show", "periodic"]));
    assert_eq!(periodic["eigenfunction_formulas"].as_array().unwrap().len(), 7);
}

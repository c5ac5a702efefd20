use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hybrid_ep::cli::{load, ExperimentSpec};
use hybrid_ep::schemes::Trace;
use serde_json::Value;
use tempfile::TempDir;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hybrid-ep"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_spec(sub: &str, spec: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![sub, "--spec", spec.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    cli(&args)
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).expect("stderr is JSON")
}

/// Writes `spec` with `edit` applied into `dir` and returns its path.
fn edited(name: &str, dir: &Path, edit: impl FnOnce(&mut Value)) -> PathBuf {
    let mut spec: Value = serde_json::from_str(&fs::read_to_string(fixture(name)).unwrap()).unwrap();
    edit(&mut spec);
    let path = dir.join(format!("edited_{name}"));
    fs::write(&path, spec.to_string()).unwrap();
    path
}

#[test]
fn run_identity_stops_after_one_step() {
    let dir = TempDir::new().unwrap();
    let out = run_spec("run", &fixture("identity.json"), dir.path(), &[]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["iterations"], 1);
    let csv = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
}

#[test]
fn run_rotation_converges() {
    let dir = TempDir::new().unwrap();
    let out = run_spec("run", &fixture("rotation.json"), dir.path(), &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("trace_report.json")).unwrap()).unwrap();
    assert_eq!(report["verdict"], true);
    assert_eq!(
        report["certified_property"],
        "norm convergence (finite-dimensional specialization)"
    );
}

#[test]
fn trace_csv_layout() {
    let dir = TempDir::new().unwrap();
    run_spec("run", &fixture("rotation.json"), dir.path(), &[]);
    let csv = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    assert_eq!(
        header,
        "n,x_1,x_2,u_1,u_2,y_1,y_2,alpha_n,beta_n,r_n,res_x_Su,res_y_x,res_x_u,res_u_Su,dist_q"
    );
    let first: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(first.len(), 15);
    assert_eq!(first[0], "1");
    // 17 significant digits: one leading digit and sixteen decimals
    assert_eq!(first[1], "1.0000000000000000e0");
}

#[test]
fn trace_csv_round_trips_against_json() {
    let dir = TempDir::new().unwrap();
    run_spec("run", &fixture("rotation.json"), dir.path(), &[]);
    let trace: Trace = load(&dir.path().join("trace.json")).unwrap();
    let csv = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    for (line, rec) in csv.lines().skip(1).zip(&trace.records) {
        let cols: Vec<f64> = line.split(',').skip(1).take(14).map(|c| c.parse().unwrap()).collect();
        let x = rec.x.as_ref().unwrap();
        let u = rec.u.as_ref().unwrap();
        let y = rec.y.as_ref().unwrap();
        let expected: Vec<f64> = x
            .as_slice()
            .iter()
            .chain(u.as_slice())
            .chain(y.as_slice())
            .copied()
            .chain([rec.alpha, rec.beta, rec.r])
            .chain(rec.residuals.as_array())
            .chain(rec.dist_q)
            .collect();
        assert_eq!(cols, expected);
    }
}

#[test]
fn run_rejects_degenerate_beta() {
    let dir = TempDir::new().unwrap();
    let out = run_spec("run", &fixture("beta_one.json"), dir.path(), &[]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr_json(&out);
    assert_eq!(err["error"], "schedule_violation");
    assert_eq!(err["condition"], "beta_box");
    assert!(err["message"].as_str().unwrap().contains("liminf"));
    assert!(!dir.path().join("trace.csv").exists());
}

#[test]
fn run_hits_iteration_cap() {
    let dir = TempDir::new().unwrap();
    let out = run_spec("run", &fixture("rotation.json"), dir.path(), &["--max-iter", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stdout_json(&out)["status"], "MaxIter");
}

#[test]
fn run_reports_inner_solver_failure() {
    let dir = TempDir::new().unwrap();
    let spec = edited("affine_1d.json", dir.path(), |s| {
        s["problem"]["strategy"] = serde_json::json!({"kind": "projected_fixed_point", "max_iter": 1, "tol": 1e-14});
    });
    let out = run_spec("run", &spec, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stdout_json(&out)["status"], "InnerSolverFailure");
}

#[test]
fn spec_errors_exit_one() {
    let dir = TempDir::new().unwrap();
    let missing = run_spec("run", &dir.path().join("nope.json"), dir.path(), &[]);
    assert_eq!(missing.status.code(), Some(1));
    assert_eq!(stderr_json(&missing)["error"], "invalid_parameter");

    let unknown = edited("identity.json", dir.path(), |s| s["bogus"] = Value::Bool(true));
    assert_eq!(run_spec("run", &unknown, dir.path(), &[]).status.code(), Some(1));

    let bad_dim = edited("identity.json", dir.path(), |s| s["x1"] = serde_json::json!([]));
    assert_eq!(run_spec("run", &bad_dim, dir.path(), &[]).status.code(), Some(1));

    let cor32 = edited("affine_1d.json", dir.path(), |s| s["scheme"] = Value::from("cor32"));
    let out = run_spec("run", &cor32, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"], "scheme_not_applicable");

    assert_eq!(cli(&["run"]).status.code(), Some(1));
    assert_eq!(cli(&["--help"]).status.code(), Some(0));
}

#[test]
fn check_mapping_exit_codes() {
    let dir = TempDir::new().unwrap();
    for (name, code) in [
        ("mapping_rotation.json", 0),
        ("mapping_projection.json", 0),
        ("mapping_expanding.json", 4),
    ] {
        let out = run_spec("check-mapping", &fixture(name), dir.path(), &[]);
        assert_eq!(out.status.code(), Some(code), "{name}");
    }
    let out = run_spec("check-mapping", &fixture("mapping_expanding.json"), dir.path(), &[]);
    let report = &stdout_json(&out)[0];
    assert_eq!(report["verdict"]["status"], "violated");
    let x = report["verdict"]["x"].as_array().unwrap();
    let y = report["verdict"]["y"].as_array().unwrap();
    assert_ne!(x, y);
    // |2x - 2y|^2 - |x - y|^2 = 3|x - y|^2 for the doubling map
    let d2: f64 = x.iter().zip(y).map(|(a, b)| (a.as_f64().unwrap() - b.as_f64().unwrap()).powi(2)).sum();
    assert!((report["worst_residual"].as_f64().unwrap() - 3.0 * d2).abs() < 1e-12);
    assert!(dir.path().join("mapping_check.json").exists());
}

#[test]
fn check_mapping_quasi_nonexpansive_needs_point() {
    let dir = TempDir::new().unwrap();
    let spec = edited("mapping_rotation.json", dir.path(), |s| {
        s["classes"] = serde_json::json!([{"name": "quasi-nonexpansive"}]);
    });
    let out = run_spec("check-mapping", &spec, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"], "needs_fixed_point");
    let with_point = edited("mapping_rotation.json", dir.path(), |s| {
        s["classes"] = serde_json::json!([{"name": "quasi-nonexpansive"}]);
        s["fixed_point"] = serde_json::json!([0.0, 0.0]);
    });
    assert_eq!(run_spec("check-mapping", &with_point, dir.path(), &[]).status.code(), Some(0));
}

#[test]
fn check_bifunction_exit_codes() {
    let dir = TempDir::new().unwrap();
    for (name, code) in [
        ("bifunction_zero.json", 0),
        ("bifunction_psd.json", 0),
        ("bifunction_negative.json", 4),
    ] {
        let out = run_spec("check-bifunction", &fixture(name), dir.path(), &[]);
        assert_eq!(out.status.code(), Some(code), "{name}");
    }
    let out = run_spec("check-bifunction", &fixture("bifunction_negative.json"), dir.path(), &[]);
    let a2 = &stdout_json(&out)["checks"][1];
    assert_eq!(a2["axiom"], "A2");
    assert_eq!(a2["passed"], false);
    assert!(a2["witness"].is_array());
}

fn resolvent_z(name: &str, extra: &[&str]) -> (Option<i32>, Vec<f64>) {
    let dir = TempDir::new().unwrap();
    let out = run_spec("resolvent", &fixture(name), dir.path(), extra);
    if out.status.code() != Some(0) {
        return (out.status.code(), vec![]);
    }
    let z = stdout_json(&out)["z"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    (out.status.code(), z)
}

#[test]
fn resolvent_examples() {
    let (code, z) = resolvent_z("resolvent_ball.json", &[]);
    assert_eq!(code, Some(0));
    assert!((z[0] - 0.6).abs() < 1e-15 && (z[1] - 0.8).abs() < 1e-15);

    let (_, z) = resolvent_z("resolvent_affine_1d.json", &[]);
    assert!((z[0] - 0.6).abs() < 1e-9);

    let (_, z) = resolvent_z("resolvent_affine_2d.json", &[]);
    assert_eq!(z, vec![1.0, -1.0]);

    // flags override the file values: (I + I) z = (-1, 2) with r = 1
    let (_, z) = resolvent_z("resolvent_affine_2d.json", &["--r", "1", "--x=-1,2"]);
    assert_eq!(z, vec![-0.5, 1.0]);
}

#[test]
fn resolvent_solver_failure_exits_three() {
    let dir = TempDir::new().unwrap();
    let spec = edited("resolvent_affine_1d.json", dir.path(), |s| {
        s["strategy"] = serde_json::json!({"kind": "projected_fixed_point", "max_iter": 2, "tol": 1e-14});
    });
    let out = run_spec("resolvent", &spec, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stderr_json(&out)["error"], "inner_solver_failure");
}

fn comparison(name: &str) -> Vec<Vec<String>> {
    let dir = TempDir::new().unwrap();
    let out = run_spec("compare", &fixture(name), dir.path(), &[]);
    assert_eq!(out.status.code(), Some(0));
    fs::read_to_string(dir.path().join("comparison.csv"))
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

#[test]
fn compare_identity_all_schemes() {
    let rows = comparison("identity_compare.json");
    assert_eq!(rows.len(), 6);
    for row in rows {
        assert_eq!(row[1], "Converged", "{row:?}");
        assert_eq!(row[2], "1");
    }
}

#[test]
fn compare_rotation_full_step() {
    let rows = comparison("rotation_compare.json");
    assert_eq!(rows[0][0], "thm31");
    assert_eq!(rows[1][0], "cor33");
    assert_eq!(rows[0][2], rows[1][2]);
    assert_eq!(rows[0][3..], rows[1][3..]);
}

#[test]
fn compare_affine_reaches_solution() {
    let rows = comparison("affine_1d.json");
    assert_eq!(rows.len(), 2);
    for row in rows {
        let x: f64 = row[8].parse().unwrap();
        assert!((x - 0.3).abs() <= 1e-5, "{row:?}");
    }
}

#[test]
fn certify_saved_trace() {
    let dir = TempDir::new().unwrap();
    run_spec("run", &fixture("rotation.json"), dir.path(), &[]);
    let trace_path = dir.path().join("trace.json");
    let args = |trace: &Path| {
        cli(&[
            "certify",
            "--spec",
            fixture("rotation.json").to_str().unwrap(),
            "--trace",
            trace.to_str().unwrap(),
        ])
    };
    let out = args(&trace_path);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["verdict"], true);

    // push the third iterate away from the solution
    let mut trace: Value = serde_json::from_str(&fs::read_to_string(&trace_path).unwrap()).unwrap();
    trace["records"][2]["x"] = serde_json::json!([0.9, 0.0]);
    let tampered = dir.path().join("tampered.json");
    fs::write(&tampered, trace.to_string()).unwrap();
    let out = args(&tampered);
    assert_eq!(out.status.code(), Some(4));
    let fejer = stdout_json(&out)["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "fejer_monotone")
        .cloned()
        .unwrap();
    assert_eq!(fejer["passed"], false);
    assert_eq!(fejer["worst_index"], 2);
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn repeated_runs_are_byte_identical() {
    for (sub, name) in [
        ("run", "rotation.json"),
        ("run", "affine_1d.json"),
        ("compare", "rotation.json"),
        ("check-mapping", "mapping_projection.json"),
        ("check-bifunction", "bifunction_psd.json"),
        ("resolvent", "resolvent_affine_1d.json"),
    ] {
        let a = TempDir::new().unwrap();
        let b = TempDir::new().unwrap();
        let out_a = run_spec(sub, &fixture(name), a.path(), &[]);
        let out_b = run_spec(sub, &fixture(name), b.path(), &[]);
        assert_eq!(out_a.stdout, out_b.stdout, "{sub} {name}");
        assert_eq!(snapshot(a.path()), snapshot(b.path()), "{sub} {name}");
    }
}

#[test]
fn experiment_specs_round_trip() {
    for name in ["identity.json", "rotation.json", "affine_1d.json", "rotation_compare.json"] {
        let spec: ExperimentSpec = load(&fixture(name)).unwrap();
        let text = serde_json::to_string(&spec).unwrap();
        let back: ExperimentSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, spec, "{name}");
    }
}

#[test]
fn format_flag_selects_trace_file() {
    let dir = TempDir::new().unwrap();
    let out = run_spec("run", &fixture("identity.json"), dir.path(), &["--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("trace.json").exists());
    assert!(!dir.path().join("trace.csv").exists());
}

//! End-to-end command tests: artifact schemas, exit codes and
//! byte-level reproducibility of every emitted file.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_stripeplan")
}

fn scenario_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/default.toml")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(bin())
        .arg("--scenario")
        .arg(scenario_path())
        .arg("--out")
        .arg(dir)
        .args(args)
        .output()
        .expect("spawn stripeplan")
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name))
        .unwrap_or_else(|e| panic!("missing artifact {name}: {e}"))
}

#[test]
fn nearfield_schema_and_determinism() {
    let tmp = tempfile::tempdir().unwrap();
    let args = ["nearfield", "--lengths", "0.5,1,1.5", "--freq", "10e9"];
    let out = run_in(tmp.path(), &args);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let csv = read(tmp.path(), "nearfield.csv");
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "x_value,array_kind,N,D_m,fresnel_m,fraunhofer_m"
    );
    // Three lengths, two array kinds each.
    assert_eq!(lines.count(), 6);

    let tmp2 = tempfile::tempdir().unwrap();
    let out2 = run_in(tmp2.path(), &args);
    assert!(out2.status.success());
    assert_eq!(csv, read(tmp2.path(), "nearfield.csv"));
    assert_eq!(
        read(tmp.path(), "manifest_nearfield.json"),
        read(tmp2.path(), "manifest_nearfield.json")
    );
}

#[test]
fn optimize_writes_deployment_trace_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_in(
        tmp.path(),
        &["optimize", "--shape", "polygon", "--n", "8", "--dump-gp"],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let doc: serde_json::Value =
        serde_json::from_str(&read(tmp.path(), "deployment_polygon.json")).unwrap();
    assert_eq!(doc["shape_tag"], "polygon");
    assert_eq!(doc["n"], 8);
    assert_eq!(doc["elements"].as_array().unwrap().len(), 8);
    assert_eq!(doc["powers"].as_array().unwrap().len(), 7);
    assert!(doc["objective_watts"].as_f64().unwrap() > 0.0);
    assert!(doc["kappa"].as_f64().unwrap() > 0.0);

    let trace = read(tmp.path(), "trace_polygon.csv");
    assert!(trace.starts_with("iteration,t_w,center_x,center_y,status\n"));
    assert!(trace.lines().count() >= 2);
    assert!(trace.lines().last().unwrap().ends_with("optimal"));

    let manifest: serde_json::Value =
        serde_json::from_str(&read(tmp.path(), "manifest_optimize_polygon.json")).unwrap();
    assert_eq!(manifest["command"], "optimize");
    assert_eq!(manifest["seed"], 42);
    assert_eq!(manifest["args"]["shape"], "polygon");

    let dump = read(tmp.path(), "gp_initial_polygon.txt");
    assert!(dump.starts_with("gp num_vars="));
    assert!(dump.contains("subject_to rx_power[0]:"));
    assert!(dump.contains("subject_to power_budget:"));
}

#[test]
fn optimize_evaluate_round_trip_is_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let opt = run_in(tmp.path(), &["optimize", "--shape", "polygon", "--n", "8"]);
    assert!(opt.status.success());
    let opt2 = run_in(
        tmp.path(),
        &["optimize", "--shape", "center-fd", "--n", "8"],
    );
    assert!(opt2.status.success());

    let dep_a = tmp.path().join("deployment_polygon.json");
    let dep_b = tmp.path().join("deployment_center_fd.json");
    let eval_args = |out_dir: &Path| {
        let mut cmd = Command::new(bin());
        cmd.arg("--scenario")
            .arg(scenario_path())
            .arg("--out")
            .arg(out_dir)
            .args(["--trials", "10", "evaluate", "--deployment"])
            .arg(&dep_a)
            .arg("--deployment")
            .arg(&dep_b);
        cmd
    };
    let e1 = eval_args(tmp.path()).output().unwrap();
    assert!(
        e1.status.success(),
        "{}",
        String::from_utf8_lossy(&e1.stderr)
    );
    let summary1 = read(tmp.path(), "eval_summary.csv");
    let trials1 = read(tmp.path(), "eval_trials.csv");

    assert!(summary1.starts_with(
        "deployment,avg_min_power_w,avg_min_power_dbm,trials,seed,policy,excluded_trials\n"
    ));
    assert_eq!(summary1.lines().count(), 3);
    assert!(trials1.starts_with("trial,deployment,min_power_w\n"));
    assert_eq!(trials1.lines().count(), 1 + 2 * 10);

    // Re-running the exact command reproduces every byte.
    let e2 = eval_args(tmp.path()).output().unwrap();
    assert!(e2.status.success());
    assert_eq!(summary1, read(tmp.path(), "eval_summary.csv"));
    assert_eq!(trials1, read(tmp.path(), "eval_trials.csv"));

    // Re-running optimize reproduces the deployment JSON bytes too.
    let before = std::fs::read(&dep_a).unwrap();
    let opt3 = run_in(tmp.path(), &["optimize", "--shape", "polygon", "--n", "8"]);
    assert!(opt3.status.success());
    assert_eq!(before, std::fs::read(&dep_a).unwrap());
    println!("criterion 9: PASS — reruns emit byte-identical CSV/JSON artifacts");
}

#[test]
fn sweep_length_schema() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_in(
        tmp.path(),
        &[
            "--trials",
            "5",
            "sweep-length",
            "--lengths",
            "0.2,0.3",
            "--kinds",
            "polygon,center-fd",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = read(tmp.path(), "sweep_length.csv");
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "sweep_value,N,deployment,avg_min_power_w,avg_min_power_dbm,trials,seed"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 4);
    // N column follows the endpoint-inclusive count.
    assert!(rows[0].starts_with("0.2,14,polygon,"));
    assert!(rows[2].starts_with("0.3,21,polygon,"));
}

#[test]
fn oracle_schema() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_in(
        tmp.path(),
        &[
            "--zeta",
            "2",
            "oracle",
            "--shape",
            "line",
            "--n",
            "9",
            "--grid-step",
            "1.0",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let doc: serde_json::Value =
        serde_json::from_str(&read(tmp.path(), "oracle_line.json")).unwrap();
    assert_eq!(doc["shape"], "line");
    assert!(doc["angle"].as_f64().is_some());
    assert!(doc["objective_watts"].as_f64().unwrap() > 0.0);
    assert!(doc["evaluated"].as_u64().unwrap() > 0);
}

#[test]
fn config_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();

    // Hotspot outside the room.
    let bad = scenario_text().replace("x = 1.5", "x = 15.0");
    let bad_path = tmp.path().join("bad.toml");
    std::fs::write(&bad_path, bad).unwrap();
    let out = Command::new(bin())
        .arg("--scenario")
        .arg(&bad_path)
        .arg("--out")
        .arg(tmp.path())
        .args(["nearfield", "--lengths", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("hotspots"));

    // Bad override range.
    let out = run_in(
        tmp.path(),
        &["--omega", "0.9", "nearfield", "--lengths", "1"],
    );
    assert_eq!(out.status.code(), Some(2));

    // Missing size argument.
    let out = run_in(tmp.path(), &["optimize", "--shape", "polygon"]);
    assert_eq!(out.status.code(), Some(2));

    // Nonexistent scenario file.
    let out = Command::new(bin())
        .arg("--scenario")
        .arg(tmp.path().join("missing.toml"))
        .args(["nearfield", "--lengths", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn optimizer_failure_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    // A polygon with fewer than 3 elements cannot be materialized.
    let out = run_in(tmp.path(), &["optimize", "--shape", "polygon", "--n", "2"]);
    assert_eq!(out.status.code(), Some(3));

    // A center-square stripe too large for the room.
    let out = run_in(
        tmp.path(),
        &["optimize", "--shape", "center-square", "--n", "3000"],
    );
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn evaluation_failure_exits_4() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_in(
        tmp.path(),
        &["evaluate", "--deployment", "does_not_exist.json"],
    );
    // Unreadable deployment input is a config problem.
    assert_eq!(out.status.code(), Some(2));

    // A syntactically valid deployment with a zero-gain geometry trips the
    // evaluation stage.
    let dep = tmp.path().join("dep.json");
    std::fs::write(
        &dep,
        r#"{"shape_tag":"line","n":1,"kappa":0.015,"elements":[[4.0,4.0,0.5]],"powers":[1.0],"objective_watts":1.0}"#,
    )
    .unwrap();
    let out = run_in(
        tmp.path(),
        &["evaluate", "--deployment", dep.to_str().unwrap()],
    );
    assert_eq!(
        out.status.code(),
        Some(4),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn default_scenario_matches_bundled_defaults() {
    let text = scenario_text();
    assert!(text.contains("width = 8.0"));
    let count = text.matches("[[hotspots]]").count();
    assert_eq!(count, 7);
}

fn scenario_text() -> String {
    std::fs::read_to_string(scenario_path()).unwrap()
}

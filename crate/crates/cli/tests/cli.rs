//! End-to-end checks of the command-line surface: exit codes, artifact
//! emission, and the bundled scenario.

use std::path::PathBuf;
use std::process::Command;

fn descc() -> Command {
    Command::new(env!("CARGO_BIN_EXE_descc"))
}

fn multirobot() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures/multirobot.json")
}

fn tmpdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("descc-cli-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

#[test]
fn validate_accepts_the_bundled_scenario() {
    let out = descc().arg("validate").arg(multirobot()).output().unwrap();
    assert!(out.status.success(), "{out:?}");
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("scenario ok: 3 subsystem(s)"));
}

#[test]
fn validate_rejects_garbage_with_exit_one() {
    let dir = tmpdir("garbage");
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{\"format\": \"descc/1\"").unwrap();
    let out = descc().arg("validate").arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn run_reports_coordinated_with_exit_zero() {
    let dir = tmpdir("run");
    let out = descc()
        .arg("run")
        .arg(multirobot())
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("verdict: coordinated"));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["format"], "descc/1");
    assert_eq!(report["verdict"], "coordinated");
    assert_eq!(report["iterations"], 1);
}

#[test]
fn run_without_faults_reports_nominal_ok() {
    let out = descc()
        .arg("run")
        .arg(multirobot())
        .arg("--no-faults")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("verdict: nominal-ok"));
}

#[test]
fn tolerance_reports_per_subsystem() {
    let out = descc().arg("tolerance").arg(multirobot()).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("subsystem 3: tolerant"));
}

#[test]
fn diagnose_emits_the_diagnoser_artifact() {
    let dir = tmpdir("diag");
    let out = descc()
        .arg("diagnose")
        .arg(multirobot())
        .arg("--subsystem")
        .arg("2")
        .arg("--out")
        .arg(&dir)
        .arg("--dot")
        .output()
        .unwrap();
    assert!(out.status.success(), "{out:?}");
    assert!(dir.join("diagnoser.json").exists());
    assert!(dir.join("diagnoser.dot").exists());
}

#[test]
fn coordinate_prints_counterexamples_and_exits_by_verdict() {
    let out = descc().arg("coordinate").arg(multirobot()).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("counterexample:"));
    assert!(stdout.contains("coordination verdict: coordinated"));
}

#[test]
fn compose_and_project_round_trip_through_files() {
    let dir = tmpdir("plumb");
    std::fs::create_dir_all(&dir).unwrap();
    let a = r#"{
        "format": "descc/1",
        "alphabet": [
            {"name": "x", "controllable": true, "observable": true},
            {"name": "y", "controllable": false, "observable": true}
        ],
        "states": ["0", "1"],
        "initial": "0",
        "transitions": [["0", "x", "1"], ["1", "y", "1"]]
    }"#;
    let b = r#"{
        "format": "descc/1",
        "alphabet": [{"name": "y", "controllable": false, "observable": true}],
        "states": ["p"],
        "initial": "p",
        "transitions": [["p", "y", "p"]]
    }"#;
    std::fs::write(dir.join("a.json"), a).unwrap();
    std::fs::write(dir.join("b.json"), b).unwrap();
    let out = descc()
        .arg("compose")
        .arg(dir.join("a.json"))
        .arg(dir.join("b.json"))
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{out:?}");
    let out = descc()
        .arg("project")
        .arg(dir.join("composed.json"))
        .arg("--keep")
        .arg("x")
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{out:?}");
    let projected = std::fs::read_to_string(dir.join("projected.json")).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&projected).unwrap();
    assert_eq!(doc["alphabet"].as_array().unwrap().len(), 1);
}

#[test]
fn synth_writes_supervisor_and_closed_loop() {
    let dir = tmpdir("synth");
    std::fs::create_dir_all(&dir).unwrap();
    let plant = r#"{
        "format": "descc/1",
        "alphabet": [
            {"name": "go", "controllable": true, "observable": true},
            {"name": "crash", "controllable": false, "observable": true}
        ],
        "states": ["0", "1", "2"],
        "initial": "0",
        "transitions": [["0", "go", "1"], ["1", "crash", "2"]]
    }"#;
    let spec = r#"{
        "format": "descc/1",
        "alphabet": [
            {"name": "go", "controllable": true, "observable": true},
            {"name": "crash", "controllable": false, "observable": true}
        ],
        "states": ["0"],
        "initial": "0",
        "transitions": []
    }"#;
    std::fs::write(dir.join("plant.json"), plant).unwrap();
    std::fs::write(dir.join("spec.json"), spec).unwrap();
    let out = descc()
        .arg("synth")
        .arg("--plant")
        .arg(dir.join("plant.json"))
        .arg("--spec")
        .arg(dir.join("spec.json"))
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{out:?}");
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("trivial supervisor"));
    assert!(dir.join("supervisor.json").exists());
    assert!(dir.join("closed_loop.json").exists());
}

#[test]
fn check_sf_safe_reports_the_verdict() {
    let out = descc()
        .arg("check-sf-safe")
        .arg(multirobot())
        .arg("--subsystem")
        .arg("2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("SF-safe controllable: yes"));
}

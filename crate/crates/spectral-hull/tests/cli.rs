use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::{json, Value};
use spectral_hull::cli::{run, CommandResult};

fn fixture(rel: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(rel)
        .to_string_lossy()
        .into_owned()
}

fn cli(args: &[&str]) -> CommandResult {
    run(std::iter::once("spectral-hull").chain(args.iter().copied()))
}

fn stdout_json(r: &CommandResult) -> Value {
    serde_json::from_str(&r.stdout).unwrap_or_else(|e| panic!("{e}: {:?}", r.stdout))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p: PathBuf = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn member_inside_segment() {
    let r = cli(&[
        "member",
        "--system",
        "reorder:2",
        "--set",
        &fixture("two_pt/set.json"),
        "--point",
        &fixture("two_pt/point_inside.json"),
    ]);
    assert_eq!(r.exit_code, 0, "{}", r.stderr);
    let v = stdout_json(&r);
    assert_eq!(v["verdict"], json!(true));
    assert_eq!(v["closedness_certified"], json!(true));
    let w: f64 = v["weights"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).sum();
    assert!((w - 1.0).abs() < 1e-9);
}

#[test]
fn gap_point_depends_on_test() {
    let base = [
        "member",
        "--system",
        "reorder:2",
        "--set",
        &fixture("conv_order/set.json"),
        "--point",
        &fixture("conv_order/point_gap.json"),
    ];
    let hull = cli(&base);
    assert_eq!(hull.exit_code, 0);
    let v = stdout_json(&hull);
    assert_eq!(v["verdict"], json!(false));
    assert!(v["separator"].is_array());

    let mut args = base.to_vec();
    args.push("--via-convC");
    let via = cli(&args);
    assert_eq!(via.exit_code, 0);
    assert_eq!(stdout_json(&via)["verdict"], json!(true));

    let mut args = base.to_vec();
    args.push("--closed");
    assert_eq!(stdout_json(&cli(&args))["verdict"], json!(false));
}

#[test]
fn sup_values() {
    let dir = tempfile::tempdir().unwrap();
    let set = fixture("two_pt/set.json");
    let r = cli(&[
        "sup",
        "--system",
        "reorder:2",
        "--set",
        &set,
        "--direction",
        &fixture("two_pt/direction.json"),
    ]);
    assert_eq!(r.exit_code, 0);
    let v = stdout_json(&r);
    assert!((v["value"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert_eq!(v["status"], json!("optimal"));

    let zero = write(dir.path(), "zero.json", "[0, 0]");
    let v = stdout_json(&cli(&["sup", "--system", "reorder:2", "--set", &set, "--direction", &zero]));
    assert!(v["value"].as_f64().unwrap().abs() < 1e-12);

    let halfplane = write(dir.path(), "h.json", r#"{"variant":"hpoly","A":[[-1,0]],"b":[0]}"#);
    let r = cli(&[
        "sup",
        "--system",
        "reorder:2",
        "--set",
        &halfplane,
        "--direction",
        &fixture("two_pt/direction.json"),
    ]);
    assert_eq!(r.exit_code, 0);
    assert_eq!(stdout_json(&r)["status"], json!("unbounded"));
}

#[test]
fn matrix_point_as_rows() {
    let r = cli(&[
        "member",
        "--system",
        "singval:4x4",
        "--set",
        &fixture("sparse_ellipsoid/set.json"),
        "--point",
        &fixture("sparse_ellipsoid/point_inside.json"),
    ]);
    assert_eq!(r.exit_code, 0, "{}", r.stderr);
    assert_eq!(stdout_json(&r)["verdict"], json!(true));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let point = fixture("two_pt/point_inside.json");
    let member = |set: &str, system: &str, point: &str| {
        cli(&["member", "--system", system, "--set", set, "--point", point]).exit_code
    };

    let bad = write(dir.path(), "bad.json", "{ not json");
    assert_eq!(member(&bad, "reorder:2", &point), 2);
    let missing = dir.path().join("missing.json");
    assert_eq!(member(&missing.to_string_lossy(), "reorder:2", &point), 2);
    assert_eq!(member(&fixture("two_pt/set.json"), "reorder:3", &point), 2);
    assert_eq!(member(&fixture("two_pt/set.json"), "bogus:2", &point), 2);

    let empty_cap = write(dir.path(), "inf.json", r#"{"variant":"hpoly","A":[[1,-1]],"b":[-1]}"#);
    assert_eq!(member(&empty_cap, "reorder:2", &point), 3);

    let ellipsoid = write(
        dir.path(),
        "se.json",
        r#"{"variant":"sparse_ellipsoid","A":[[2,0],[0,1]],"k":1}"#,
    );
    assert_eq!(member(&ellipsoid, "reorder:2", &point), 4);

    assert_eq!(cli(&["check", "--suite", "nope"]).exit_code, 2);
    assert_eq!(cli(&["reproduce", "nope"]).exit_code, 2);
    assert_eq!(cli(&["frobnicate"]).exit_code, 2);
    assert_eq!(cli(&["--help"]).exit_code, 0);
}

#[test]
fn check_and_reproduce() {
    let r = cli(&["check", "--suite", "p1", "--trials", "20", "--seed", "3"]);
    assert_eq!(r.exit_code, 0, "{}", r.stderr);
    let v = stdout_json(&r);
    assert_eq!(v["suite_name"], json!("p1"));
    assert_eq!(v["trials"], json!(20));
    assert_eq!(v["failures"], json!([]));

    for id in ["two_pt", "conv_order", "cl_nec"] {
        let r = cli(&["reproduce", id]);
        assert_eq!(r.exit_code, 0, "{id}: {}", r.stderr);
        assert_eq!(stdout_json(&r)["failures"], json!([]));
    }
}

#[test]
fn relax_matches_golden_and_validates() {
    let r = cli(&["relax", "--input", &fixture("relax/two_pt.problem.json")]);
    assert_eq!(r.exit_code, 0, "{}", r.stderr);
    let golden: Value =
        serde_json::from_str(&std::fs::read_to_string(fixture("relax/two_pt.relaxation.json")).unwrap())
            .unwrap();
    assert_eq!(stdout_json(&r), golden);

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p.json");
    let r = cli(&[
        "relax",
        "--input",
        &fixture("relax/abs_hpoly_domain.problem.json"),
        "--out",
        &out.to_string_lossy(),
        "--validate",
        "--samples",
        "40",
    ]);
    assert_eq!(r.exit_code, 0, "{}", r.stderr);
    assert_eq!(stdout_json(&r)["disagreements"], json!(0));
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(!written["rows"].as_array().unwrap().is_empty());
}

#[test]
fn binary_end_to_end() {
    let out = Command::new(env!("CARGO_BIN_EXE_spectral-hull"))
        .args([
            "member",
            "--system",
            "reorder:2",
            "--set",
            &fixture("two_pt/set.json"),
            "--point",
            &fixture("two_pt/point_gap.json"),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["verdict"], json!(false));

    let out = Command::new(env!("CARGO_BIN_EXE_spectral-hull"))
        .args(["check", "--suite", "missing"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing"));
}

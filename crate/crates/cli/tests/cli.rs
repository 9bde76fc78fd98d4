use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::Instant;

use serde_json::Value;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_tropibary"));
    cmd.env_remove("TROPIBARY_SEED");
    cmd
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

const INSTANCE: &str = r#"{"kind": "finite", "space": {"n": 3},
  "lambda": {"atoms": [{"at": 0, "w": 0}, {"at": 1, "w": "-1"}]},
  "beta": {"atoms": [{"at": 1, "w": 0}, {"at": 2, "w": "-1/2"}]},
  "params": {"t": "-1/4", "p": "0"}}"#;

/// `combine` of the instance above.
const IMAGE: &str = r#"{"atoms": [{"at": 0, "w": "-1/4"}, {"at": 1, "w": 0}, {"at": 2, "w": "-1/2"}]}"#;

#[test]
fn barycenter_of_the_y_measure() {
    let out = run(&["barycenter", data("y_measure.json").to_str().unwrap(), "--in-polytope", data("y_polytope.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = json(&out);
    assert_eq!(r["version"], 1);
    assert_eq!(r["outputs"]["point"], serde_json::json!(["-1", "-1"]));
    assert_eq!(r["outputs"]["in_polytope"], true);
    assert!(r["exactness"].as_object().unwrap().values().all(|v| v == true));
}

#[test]
fn lift_with_image_target_is_the_identity() {
    let out = run(&["lift", "s", "--instance", INSTANCE, "--target", IMAGE, "--oracle"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = json(&out);
    assert_eq!(r["outputs"]["identity"], true);
    assert_eq!(r["outputs"]["exactness"], true);
    assert_eq!(r["outputs"]["distance"], 0.0);
    assert_eq!(r["outputs"]["oracle"]["exists"], true);
    assert_eq!(r["exactness"]["target_reproduced"], true);
}

#[test]
fn perturbed_target_is_hit_exactly() {
    let target = r#"{"atoms": [{"at": 0, "w": "-3"}, {"at": 1, "w": 0}, {"at": 2, "w": "-1/2"}]}"#;
    let out = run(&["lift", "s", "--instance", INSTANCE, "--target", target]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = json(&out);
    assert_eq!(r["outputs"]["identity"], false);
    assert_eq!(r["exactness"]["target_reproduced"], true);
    assert!(!r["outputs"]["case_tags"].as_array().unwrap().is_empty());
}

#[test]
fn refusal_exits_with_two() {
    let instance = r#"{"kind": "interval", "x": "-1", "y": "-1/2", "params": {"t": "0", "p": "-1/4"}, "bounds": ["-2", "0"]}"#;
    let out = run(&["lift", "s", "--instance", instance, "--target", "\"0\""]);
    assert_eq!(out.status.code(), Some(2));
    let r = json(&out);
    assert!(r["outputs"]["refused"]["constraint"].as_str().unwrap().contains("outside"));

    let ok = run(&["lift", "s", "--instance", instance, "--target", "\"-3/4\""]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(json(&ok)["exactness"]["params_unchanged"], true);
}

#[test]
fn malformed_input_exits_with_one() {
    let out = run(&["eval", "--measure", r#"{"space": {"n": 2}, "atoms": [{"at": 0, "w": "-1/2"}]}"#, "--phi", "[1, 2]"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("max weight is -1/2, expected 0"), "{}", stderr(&out));

    let out = run(&["eval", "--measure", r#"{"space": {"n": 2}, "atoms": [{"at": 0, "w": "zero"}]}"#, "--phi", "[1, 2]"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("atoms[0].w"), "{}", stderr(&out));

    let out = run(&["member", "--polytope", r#"{"version": 2, "generators": [[0, 0]]}"#, "--point", "[0, 0]"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("version"));

    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["lift", "s", "--instance", INSTANCE]).status.code(), Some(1));
}

#[test]
fn renormalize_opts_in() {
    let m = r#"{"space": {"n": 2}, "atoms": [{"at": 0, "w": "-1/2"}, {"at": 1, "w": "-1"}]}"#;
    let out = run(&["eval", "--measure", m, "--phi", "[0, 0]", "--renormalize"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(json(&out)["outputs"]["value"], "0");
}

#[test]
fn combine_and_pushforward() {
    let out = run(&[
        "combine",
        "--lambda",
        r#"{"space": {"labels": ["x", "y"]}, "atoms": [{"at": "x", "w": 0}]}"#,
        "--beta",
        r#"{"atoms": [{"at": "y", "w": 0}]}"#,
        "--params",
        r#"{"t": "-1", "p": "0"}"#,
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = json(&out);
    assert_eq!(r["outputs"]["measure"]["atoms"], serde_json::json!([{"at": "x", "w": "-1"}, {"at": "y", "w": "0"}]));

    let out = run(&["pushforward", "--measure", r#"{"space": {"n": 3}, "atoms": [{"at": 0, "w": 0}, {"at": 2, "w": "-1"}]}"#, "--map", "[0, 1, 1]"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["exactness"]["fiberwise_max"], true);
}

#[test]
fn reports_are_byte_identical_and_seed_env_wins() {
    let args = ["counterexample", "y-beta", "--i", "2", "--samples", "200", "--seed", "5"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["seed"], 5);

    let env = bin().args(args).env("TROPIBARY_SEED", "11").output().unwrap();
    assert_eq!(json(&env)["seed"], 11);
    assert_eq!(json(&env)["outputs"]["certificate"]["seed"], 11);
}

#[test]
fn certificates_replay_from_disk() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["counterexample", "id-oplus", "--i", "4", "--samples", "500"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = json(&out);
    assert_eq!(r["exactness"]["holds"], true);
    assert_eq!(r["exactness"]["replays"], true);

    let path = dir.path().join("cert.json");
    std::fs::write(&path, serde_json::to_string(&r["outputs"]["certificate"]).unwrap()).unwrap();
    let replayed = run(&["counterexample", "replay", path.to_str().unwrap()]);
    assert_eq!(replayed.status.code(), Some(0));
    assert_eq!(json(&replayed)["exactness"]["replays"], true);

    let mut cert = r["outputs"]["certificate"].clone();
    cert["sample_digest"] = Value::String("0".repeat(64));
    std::fs::write(&path, cert.to_string()).unwrap();
    let tampered = run(&["counterexample", "replay", path.to_str().unwrap()]);
    assert_eq!(tampered.status.code(), Some(3));
    assert_eq!(json(&tampered)["outputs"]["replay"]["digest_matches"], false);
}

#[test]
fn extremal_points_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("y.svg");
    let out = run(&["ext", "--polytope", data("y_polytope.json").to_str().unwrap(), "--svg", svg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(json(&out)["outputs"]["extremal"], serde_json::json!([["-2", "-1"], ["-1", "-2"], ["0", "0"]]));
    assert!(std::fs::read_to_string(svg).unwrap().starts_with("<svg"));
}

#[test]
fn approximation_and_sweep() {
    let m = r#"{"atoms": [{"at": ["-2", "-1"], "w": 0}, {"at": ["-1", "-2"], "w": 0}, {"at": ["-1/2", "-3/2"], "w": "-1/4"}]}"#;
    let cover = r#"{"elements": [
        {"kind": "polytope", "generators": [["-2", "-2"], ["-2", "0"], ["-1", "-2"], ["-1", "0"]]},
        {"kind": "polytope", "generators": [["-1", "-2"], ["0", "-2"], ["0", "0"]]}]}"#;
    let out = run(&["approx", "--measure", m, "--cover", cover]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = json(&out);
    assert_eq!(r["outputs"]["beta_preserved"], true);

    let out = run(&["approx", "sweep", "--measure", m, "--dyadic", "3", "--lo", "-2", "--hi", "0"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("cover_index,dist"));
    let last = lines.last().unwrap();
    assert_eq!(last.split(',').nth(1), Some("0.0"));
}

#[test]
fn tiny_verification_passes_quickly() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("rows.csv");
    let start = Instant::now();
    let out = run(&["verify", "--suite", "all", "--seed", "7", "--scale", "tiny", "--csv", csv.to_str().unwrap()]);
    assert!(start.elapsed().as_secs_f64() < 10.0);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let rows = std::fs::read_to_string(csv).unwrap();
    assert!(rows.starts_with("suite,case,verdict,detail"));
    assert!(!rows.contains(",FAIL,"));
}

#[test]
fn tampered_combine_fails_affinity() {
    let out = run(&["verify", "--suite", "affinity", "--scale", "tiny", "--fault", "tamper-combine", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(3));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("affinity,") && l.contains(",FAIL,")), "{text}");
}

#[test]
fn schemas_are_versioned_json() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schema");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let schema: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert!(schema["$schema"].is_string(), "{}", path.display());
        seen += 1;
    }
    assert!(seen >= 8);
}

//! The `gerbelab` binary: exit codes, flag overrides and reproducibility.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn gerbelab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gerbelab"))
        .args(args)
        .env_remove("GERBELAB_THREADS")
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON report on stdout")
}

fn check<'a>(r: &'a Value, name: &str) -> &'a Value {
    r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == name)
        .unwrap_or_else(|| panic!("no check {name}"))
}

#[test]
fn winding_su2_passes() {
    let out = gerbelab(&["winding", "--group", "su2", "--nodes", "24"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["config"]["nodes"], 24);
    let v = check(&r, "winding")["value"].as_f64().unwrap();
    assert!((v.abs() - 1.0).abs() < 1e-3);
    assert_eq!(r["pass"], true);
}

#[test]
fn car_cocycle_passes() {
    let out = gerbelab(&["car-cocycle", "--m", "1", "--n", "-1", "--cutoff", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["config"]["n"], -1);
    assert!(check(&r, "trace_minus_loop")["value"].as_f64().unwrap() < 1e-12);
}

#[test]
fn empty_config_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.toml");
    std::fs::write(&path, "").unwrap();
    let out = gerbelab(&["winding", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_configs_and_flags_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    for (body, what) in [
        ("nodez = 3", "unknown key"),
        ("experiment = \"monopole\"", "wrong experiment"),
        ("nodes = \"many\"", "wrong type"),
        ("nodes = 1", "out of range"),
    ] {
        let path = dir.path().join("c.toml");
        std::fs::write(&path, body).unwrap();
        let out = gerbelab(&["winding", "--config", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "{what}");
    }
    assert_eq!(
        gerbelab(&["winding", "--nodes", "many"]).status.code(),
        Some(2)
    );
    assert_eq!(gerbelab(&["no-such-experiment"]).status.code(), Some(2));
    assert_eq!(
        gerbelab(&["implementer", "--config", "/nonexistent.toml"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn failing_check_exits_one_and_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("strict.toml");
    std::fs::write(
        &path,
        "experiment = \"monopole\"\ncharges = [5]\nintegral_tolerance = -1.0\n",
    )
    .unwrap();
    let out = gerbelab(&["monopole", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("equator_integral_k5"), "{stderr}");
    assert!(!stderr.contains("residual_k5"), "{stderr}");
    assert_eq!(report(&out)["pass"], false);
}

fn without_wall_time(path: &Path) -> Value {
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    v.as_object_mut().unwrap().remove("wall_time_s");
    v
}

#[test]
fn same_seed_gives_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    for sub in ["spectral-flow", "implementer", "gamma-assoc"] {
        let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
        for p in [&a, &b] {
            let out = gerbelab(&[sub, "--seed", "17", "--out", p.to_str().unwrap()]);
            assert_eq!(out.status.code(), Some(0), "{sub}");
        }
        let strip = |p: &Path| {
            let text = std::fs::read_to_string(p).unwrap();
            text.lines()
                .filter(|l| !l.contains("\"wall_time_s\""))
                .collect::<Vec<_>>()
                .join("\n")
        };
        assert_eq!(strip(&a), strip(&b), "{sub}");
        assert_eq!(without_wall_time(&a), without_wall_time(&b));
    }
}

#[test]
fn thread_count_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let mut bodies = Vec::new();
    for threads in ["1", "3"] {
        let p = dir.path().join(format!("r{threads}.json"));
        let status = Command::new(env!("CARGO_BIN_EXE_gerbelab"))
            .args(["winding", "--nodes", "12", "--out", p.to_str().unwrap()])
            .env("GERBELAB_THREADS", threads)
            .status()
            .unwrap();
        assert!(status.success());
        bodies.push(without_wall_time(&p));
    }
    assert_eq!(bodies[0], bodies[1]);
}

#[test]
fn spectral_flow_writes_tracks() {
    let dir = tempfile::tempdir().unwrap();
    let tracks = dir.path().join("tracks.csv");
    let out = gerbelab(&["spectral-flow", "--tracks", tracks.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(&tracks).unwrap();
    assert!(csv.starts_with("step,"));
    assert_eq!(csv.lines().count(), 202);
}

#[test]
fn defaults_cover_every_subcommand() {
    let out = gerbelab(&["defaults"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: toml::Table = String::from_utf8(out.stdout).unwrap().parse().unwrap();
    assert_eq!(doc.len(), 13);
    for e in gerbelab::experiments::Experiment::ALL {
        assert!(doc.contains_key(e.name()), "{}", e.name());
    }
}

use std::fs;
use std::process::Command;

use hardy_lab::experiment::{run_experiment, ExperimentConfig, ExperimentError, Task};

const SQUARE: &str = r#"{
  "domain": { "kind": "polygon", "vertices": [[0, 0], [1, 0], [1, 1], [0, 1]] },
  "j_max": [5, 6],
  "seed": 3
}"#;

fn config(text: &str) -> ExperimentConfig {
    serde_json::from_str(text).unwrap()
}

#[test]
fn whitney_on_square_has_no_violations() {
    let dir = tempfile::tempdir().unwrap();
    let summary = run_experiment(Task::Whitney, &config(SQUARE), dir.path()).unwrap();
    assert_eq!(summary.status, "ok");
    let csv = fs::read_to_string(dir.path().join("whitney.csv")).unwrap();
    assert!(csv.starts_with("level,index_x,index_y,dist_center\n"));
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(json["config_hash"].as_str().unwrap().len(), 64);
    assert_eq!(json["results"]["covers"][1]["report"]["violations"], 0);
}

#[test]
fn reruns_are_byte_identical() {
    let cfg = config(r#"{ "domain": { "kind": "koch", "level": 3 }, "scales": [0.25, 0.125], "samples": 16 }"#);
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run_experiment(Task::Porosity, &cfg, a.path()).unwrap();
    let one_thread = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    one_thread.install(|| run_experiment(Task::Porosity, &cfg, b.path())).unwrap();
    assert_eq!(fs::read(a.path().join("porosity.csv")).unwrap(), fs::read(b.path().join("porosity.csv")).unwrap());
    let c = tempfile::tempdir().unwrap();
    run_experiment(Task::Whitney, &config(SQUARE), c.path()).unwrap();
    let d = tempfile::tempdir().unwrap();
    run_experiment(Task::Whitney, &config(SQUARE), d.path()).unwrap();
    assert_eq!(fs::read(c.path().join("whitney.csv")).unwrap(), fs::read(d.path().join("whitney.csv")).unwrap());
}

#[test]
fn config_hash_tracks_content() {
    let a = config(SQUARE);
    let mut b = a.clone();
    b.seed += 1;
    assert_ne!(a.hash(), b.hash());
    assert_eq!(a.hash(), config(SQUARE).hash());
}

#[test]
fn configuration_errors() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(SQUARE);
    cfg.s = vec![1.5];
    cfg.p = vec![2.0];
    let err = run_experiment(Task::HardySweep, &cfg, dir.path()).unwrap_err();
    assert_eq!(err.exit_code(), 1);
    cfg.task = Some(Task::Whitney);
    assert!(matches!(run_experiment(Task::Chains, &cfg, dir.path()), Err(ExperimentError::Config(_))));
    assert!(serde_json::from_str::<ExperimentConfig>(r#"{ "domain": { "kind": "koch", "level": 2 }, "bogus": 1 }"#).is_err());
    assert_eq!(ExperimentError::from(hardy_lab::Error::Resolution("x".into())).exit_code(), 2);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_hardy-lab");
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("square.json");
    fs::write(&cfg, SQUARE).unwrap();
    let out = dir.path().join("out");
    let run = |task: &str, cfg: &std::path::Path| {
        Command::new(bin).args([task, "--config"]).arg(cfg).arg("--out").arg(&out).args(["--jobs", "1"]).output().unwrap()
    };
    let ok = run("whitney", &cfg);
    assert_eq!(ok.status.code(), Some(0));
    assert!(out.join("summary.json").exists());
    let unknown = run("nonsense", &cfg);
    assert_eq!(unknown.status.code(), Some(1));
    assert_eq!(String::from_utf8_lossy(&unknown.stderr).lines().count(), 1);
    let missing = run("whitney", &dir.path().join("absent.json"));
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn sample_configs_parse() {
    for entry in fs::read_dir(concat!(env!("CARGO_MANIFEST_DIR"), "/configs")).unwrap() {
        let path = entry.unwrap().path();
        let cfg: ExperimentConfig = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
        assert!(cfg.task.is_some(), "{}", path.display());
    }
}

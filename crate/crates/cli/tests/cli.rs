use quasi2d_cli::table::data_lines;
use quasi2d_cli::{run, RunManifest, RunOptions, ScenarioConfig};
use serde_json::json;
use std::collections::BTreeSet;
use std::path::Path;
use std::process::Command;

fn small_classical() -> ScenarioConfig {
    ScenarioConfig::from_value(json!({
        "name": "small",
        "mode": "classical3d",
        "n_particles": 300,
        "t_init": [1.1e-5, 1.1e-5, 8.0e-6],
        "replicas": 2,
        "seed": 5,
        "dsmc": { "samples": 12, "duration_factor": 2.0 }
    }))
    .unwrap()
}

fn run_into(cfg: &ScenarioConfig, dir: &Path, workers: usize) -> RunManifest {
    run(
        cfg,
        &RunOptions {
            out_dir: dir.to_path_buf(),
            workers: Some(workers),
        },
    )
    .unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn repeated_runs_are_byte_identical() {
    let cfg = small_classical();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let ma = run_into(&cfg, a.path(), 1);
    let mb = run_into(&cfg, b.path(), 4);
    assert_eq!(ma.outputs, mb.outputs);
    for name in ma.outputs.iter().filter(|n| n.ends_with(".csv")) {
        assert_eq!(read(a.path(), name), read(b.path(), name), "{name} differs");
    }
    assert_eq!(ma.config_hash, mb.config_hash);
    assert_eq!(ma.seeds, vec![5, 6]);
    assert_eq!(ma.points, mb.points);
}

#[test]
fn manifest_lists_every_file_written() {
    let cfg = small_classical();
    let dir = tempfile::tempdir().unwrap();
    let m = run_into(&cfg, dir.path(), 2);
    let on_disk: BTreeSet<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    let listed: BTreeSet<String> = m.outputs.iter().cloned().collect();
    assert_eq!(on_disk, listed);
    let from_disk: RunManifest = serde_json::from_str(&read(dir.path(), "manifest.json")).unwrap();
    assert_eq!(from_disk, m);
    assert!(m.finished_unix >= m.started_unix);
    for f in &m.points[0].files {
        assert!(listed.contains(f));
    }
    let replica = read(dir.path(), "point000_replica001.csv");
    assert!(replica.contains(&format!("# config_hash: {}", m.config_hash)));
    assert!(replica.contains("# seed: 6"));
    assert!(replica.contains("# units: t=s vx_rms=m/s"));
}

#[test]
fn sweep_points_match_single_runs() {
    let mut swept = small_classical();
    swept.replicas = 1;
    swept.sweep = Some(
        [(
            "t_init".to_string(),
            vec![json!([1.1e-5, 1.1e-5, 8.0e-6]), json!([2.2e-5, 2.2e-5, 1.6e-5])],
        )]
        .into(),
    );
    let single = swept
        .with_override("sweep", serde_json::Value::Null)
        .unwrap()
        .with_override("t_init", json!([2.2e-5, 2.2e-5, 1.6e-5]))
        .unwrap();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_into(&swept, a.path(), 2);
    run_into(&single, b.path(), 1);
    let from_sweep = read(a.path(), "point001_replica000.csv");
    let alone = read(b.path(), "point000_replica000.csv");
    assert_eq!(data_lines(&from_sweep), data_lines(&alone));
}

#[test]
fn output_column_selection() {
    let mut cfg = small_classical();
    cfg.replicas = 1;
    cfg.outputs = vec!["vz_rms".into(), "vx_rms".into()];
    let dir = tempfile::tempdir().unwrap();
    run_into(&cfg, dir.path(), 1);
    let text = read(dir.path(), "point000_replica000.csv");
    assert_eq!(data_lines(&text)[0], "t,vx_rms,vz_rms");
    let agg = read(dir.path(), "point000_aggregate.csv");
    assert_eq!(data_lines(&agg)[0], "t,vx_rms_mean,vz_rms_mean,vx_rms_se,vz_rms_se");
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_quasi2d"))
}

fn write_scenario(dir: &Path, v: serde_json::Value) -> std::path::PathBuf {
    let p = dir.join("scenario.json");
    std::fs::write(&p, v.to_string()).unwrap();
    p
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let empty_sweep = write_scenario(
        dir.path(),
        json!({"name": "x", "mode": "analytic_only", "t_init": [1e-5, 1e-5, 1e-5], "sweep": {"t_init": []}}),
    );
    let out = bin().arg("validate").arg(&empty_sweep).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sweep.t_init"));

    // no coupling and no heating: every level is stationary
    let frozen = write_scenario(
        dir.path(),
        json!({"name": "x", "mode": "sideband_rate_model", "t_init": [1e-5, 1e-5, 1e-5],
               "sideband": {"omega_r_hz": 0.0}}),
    );
    let out = bin()
        .arg("run")
        .arg(&frozen)
        .arg("--out-dir")
        .arg(dir.path().join("o"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(!dir.path().join("o").exists(), "failed run must not write files");

    let ok = write_scenario(
        dir.path(),
        json!({"name": "x", "mode": "analytic_only", "t_init": [1e-5, 1e-5, 1e-5]}),
    );
    let out = bin().arg("validate").arg(&ok).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let cfg = ScenarioConfig::from_value(json!({"name": "x", "mode": "analytic_only", "t_init": [1e-5, 1e-5, 1e-5]})).unwrap();
    assert!(String::from_utf8_lossy(&out.stdout).contains(&cfg.config_hash()));
}

#[test]
fn oracle_verb() {
    let out = bin()
        .args(["oracle", "detuned_excited_population", "--args", "delta_hz=12e3"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["p3_1"].as_f64().unwrap() - 0.005625).abs() < 1e-12);
    let out = bin().args(["oracle", "nonexistent"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["oracle", "list"]).output().unwrap();
    assert!(String::from_utf8_lossy(&out.stdout).contains("analytic_t_therm_classical"));
}

#[test]
fn preset_print_round_trips() {
    let out = bin()
        .args(["preset", "two_step_cooling", "--print", "--override", "seed=9"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let cfg = ScenarioConfig::from_json(&String::from_utf8_lossy(&out.stdout)).unwrap();
    assert_eq!(cfg.seed, 9);
    let direct = quasi2d_cli::presets::preset("two_step_cooling", &["seed=9".to_string()]).unwrap();
    assert_eq!(cfg.config_hash(), direct.config_hash());
}

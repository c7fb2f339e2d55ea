use parkrelay::config::RunConfig;
use parkrelay::parking::SYNTHETIC_TABLE_TOML;
use std::path::Path;
use std::process::{Command, Output};

fn parkrelay(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_parkrelay")).args(args).output().expect("run binary")
}

fn quick_config(dir: &Path) -> std::path::PathBuf {
    let mut cfg = RunConfig::default();
    cfg.trials = 5_000;
    cfg.scenario.replications = 10;
    cfg.fig2.thresholds_db = vec![0.0, 10.0, 20.0];
    let path = dir.join("run.toml");
    std::fs::write(&path, cfg.to_toml_string()).unwrap();
    path
}

#[test]
fn default_config_round_trips() {
    let out = parkrelay(&["print-default-config"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(RunConfig::from_toml_str(&text).unwrap(), RunConfig::default());
}

#[test]
fn fig2_writes_documented_columns() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = quick_config(dir.path());
    let out = parkrelay(&["--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap(), "fig2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("fig2.csv")).unwrap();
    let body: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body[0], "threshold_db,k,p_out_analytical,p_out_simulated,ci_halfwidth");
    assert_eq!(body.len(), 1 + 3 * 3);
    assert!(csv.contains("# trials=5000\n"));
}

#[test]
fn seed_flag_changes_output_and_is_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = quick_config(dir.path());
    let mut files = Vec::new();
    for seed in ["1", "2"] {
        let out_dir = dir.path().join(seed);
        let out = parkrelay(&["--config", cfg.to_str().unwrap(), "--seed", seed, "--out", out_dir.to_str().unwrap(), "fig3"]);
        assert!(out.status.success());
        files.push(std::fs::read_to_string(out_dir.join("fig3.csv")).unwrap());
    }
    assert!(files[0].contains("# seed=1\n"));
    assert_ne!(files[0], files[1]);
}

#[test]
fn tampered_parking_table_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let table = SYNTHETIC_TABLE_TOML.replacen("d2 = 0.25", "d2 = 0.35", 1);
    assert_ne!(table, SYNTHETIC_TABLE_TOML);
    std::fs::write(dir.path().join("table.toml"), table).unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "parking_table = \"table.toml\"\n").unwrap();
    let out = parkrelay(&["--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap(), "fig5"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("table.toml"), "{err}");
}

#[test]
fn malformed_config_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "seed = 1\n[radio]\nn0 = -1.0\n").unwrap();
    let out = parkrelay(&["--config", cfg.to_str().unwrap(), "fig6"]);
    assert_eq!(out.status.code(), Some(2));
    let missing = parkrelay(&["--config", "/nonexistent/run.toml", "fig6"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn unknown_subcommand_is_rejected() {
    assert_eq!(parkrelay(&["fig9"]).status.code(), Some(2));
}

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use twocomp::geometry::Kernel;
use twocomp::harness::{ExperimentConfig, Mode};
use twocomp::ModelSpec;

fn twocomp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twocomp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn small(dir: &Path) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::widom_rowlinson_sweep();
    cfg.output_dir = dir.join("out");
    cfg.grid = 64;
    cfg.density_grid = 4;
    cfg.replicas = 4;
    cfg.scaling = vec![2, 8];
    cfg.t_end = 0.5;
    cfg.t_eval = 0.5;
    cfg.bootstrap_resamples = 20;
    cfg
}

fn write_config(dir: &Path, name: &str, cfg: &ExperimentConfig) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, cfg.to_json_pretty()).unwrap();
    p
}

#[test]
fn no_arguments_prints_usage() {
    let o = twocomp(&[]);
    assert_eq!(code(&o), 64);
    assert!(stderr(&o).contains("Usage"));
}

#[test]
fn help_exits_zero() {
    assert_eq!(code(&twocomp(&["--help"])), 0);
    assert_eq!(code(&twocomp(&["sweep", "--help"])), 0);
}

#[test]
fn unknown_subcommand_and_flag_are_usage_errors() {
    assert_eq!(code(&twocomp(&["frobnicate"])), 64);
    assert_eq!(code(&twocomp(&["selftest", "--bogus"])), 64);
    assert_eq!(code(&twocomp(&["simulate"])), 64);
    assert_eq!(code(&twocomp(&["simulate", "--config", "x.json", "--format", "xml"])), 64);
}

#[test]
fn selftest_passes() {
    let o = twocomp(&["selftest"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = String::from_utf8(o.stdout).unwrap();
    assert_eq!(out.lines().filter(|l| l.starts_with("PASS")).count(), 3);
}

#[test]
fn validate_exit_codes_follow_the_bound() {
    let tmp = tempfile::tempdir().unwrap();
    let psi = Kernel::tophat(std::f64::consts::LN_2, 1.0);
    for (z, expect) in [(0.3, 0), (0.4, 2)] {
        let mut cfg = small(tmp.path());
        cfg.model = ModelSpec::widom_rowlinson(z, z, psi, psi);
        let p = write_config(tmp.path(), "v.json", &cfg);
        let o = twocomp(&["validate", "--config", p.to_str().unwrap(), "--quiet"]);
        assert_eq!(code(&o), expect, "z = {z}: {}", stderr(&o));
        let report: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(cfg.output_dir.join("conditions.json")).unwrap()).unwrap();
        assert_eq!(report["pass"], expect == 0);
    }
}

#[test]
fn malformed_config_names_the_field() {
    let tmp = tempfile::tempdir().unwrap();
    let mut v = serde_json::to_value(small(tmp.path())).unwrap();
    v["replicas"] = 0.into();
    let p = tmp.path().join("bad.json");
    std::fs::write(&p, v.to_string()).unwrap();
    let o = twocomp(&["sweep", "--config", p.to_str().unwrap()]);
    assert_eq!(code(&o), 65);
    assert!(stderr(&o).contains("`replicas`"), "{}", stderr(&o));

    v["replicas"] = 4.into();
    v["model"]["activity_minus"] = "lots".into();
    std::fs::write(&p, v.to_string()).unwrap();
    let o = twocomp(&["sweep", "--config", p.to_str().unwrap()]);
    assert_eq!(code(&o), 65);
    assert!(stderr(&o).contains("activity_minus"), "{}", stderr(&o));
}

#[test]
fn missing_config_is_io_error() {
    let o = twocomp(&["kinetic", "--config", "/nonexistent/cfg.json"]);
    assert_eq!(code(&o), 74);
}

#[test]
fn kinetic_without_activity_decays() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = small(tmp.path());
    cfg.model = ModelSpec::widom_rowlinson(0.0, 0.0, Kernel::tophat(0.5, 1.0), Kernel::tophat(0.5, 1.0));
    cfg.t_end = 1.5;
    let p = write_config(tmp.path(), "k.json", &cfg);
    let o = twocomp(&["kinetic", "--config", p.to_str().unwrap(), "--quiet"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = std::fs::read_to_string(cfg.output_dir.join("kinetic.csv")).unwrap();
    let expect = 0.2 * (-1.5f64).exp();
    let finals: Vec<&str> = text.lines().filter(|l| l.starts_with("1.5,")).collect();
    assert_eq!(finals.len(), 64);
    for line in finals {
        let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert!((cols[3] - expect).abs() < 1e-8 && (cols[4] - expect).abs() < 1e-8);
    }
}

#[test]
fn sweep_writes_table_and_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small(tmp.path());
    let p = write_config(tmp.path(), "s.json", &cfg);
    let run = |out: &str| {
        let dir = tmp.path().join(out);
        let o = twocomp(&["sweep", "--config", p.to_str().unwrap(), "--out", dir.to_str().unwrap(), "--seed", "7"]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        let stdout = String::from_utf8(o.stdout).unwrap();
        assert!(stdout.starts_with("n,replicas,t_eval,err_minus,err_plus,se_minus,se_plus,wall_s\n"));
        dir
    };
    let (a, b) = (run("a"), run("b"));
    let table = std::fs::read_to_string(a.join("convergence.csv")).unwrap();
    assert_eq!(table.lines().count(), 3);
    for name in ["convergence.csv", "sweep_replicas.csv", "kinetic_reference.csv"] {
        assert_eq!(std::fs::read(a.join(name)).unwrap(), std::fs::read(b.join(name)).unwrap(), "{name}");
    }
    let echoed = ExperimentConfig::from_json(&std::fs::read_to_string(a.join("config.json")).unwrap()).unwrap();
    assert_eq!(echoed.seed, 7);
    assert_eq!(echoed.mode, Mode::Sweep);
}

#[test]
fn json_format_override() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = small(tmp.path());
    cfg.replicas = 2;
    let p = write_config(tmp.path(), "j.json", &cfg);
    let o = twocomp(&["simulate", "--config", p.to_str().unwrap(), "--format", "json", "--quiet"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(cfg.output_dir.join("trajectory_mean.json").exists());
    assert!(cfg.output_dir.join("replica_0001_trajectory.json").exists());
    assert!(o.stdout.is_empty());
}

#[test]
fn shipped_config_is_the_default_sweep() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/wr_sweep.json");
    let cfg = ExperimentConfig::from_json(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(cfg, ExperimentConfig::widom_rowlinson_sweep());
}

use std::path::Path;
use std::process::Command;

use elastolbm::scenario::{periodic_smoke, run_scenario, ProbeSeries, RunOptions, ScenarioConfig, Snapshot};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_elastolbm"))
}

fn scenarios() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios"))
}

#[test]
fn shipped_scenarios_load() {
    for name in ScenarioConfig::BUILTINS {
        let c = ScenarioConfig::load(scenarios().join(format!("{name}.toml"))).unwrap();
        assert_eq!(c.name, name);
    }
}

#[test]
fn smoke_run_outputs_parse_back() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = periodic_smoke();
    c.run.end_time = 0.5;
    let art = run_scenario(&c, &RunOptions::to_dir(dir.path())).unwrap();

    let text = std::fs::read_to_string(dir.path().join("probe_center.csv")).unwrap();
    let series = ProbeSeries::from_csv("center", c.probes[0].position, &text).unwrap();
    assert_eq!(&series, art.probe("center").unwrap());

    let last = art
        .summary
        .files
        .iter()
        .filter(|f| f.extension().is_some_and(|e| e == "vtk"))
        .next_back()
        .unwrap();
    let snap = Snapshot::read(last).unwrap();
    assert_eq!((snap.nx, snap.ny), (32, 32));
    let mass: f64 = snap.rho.iter().sum();
    assert!((mass / 1024.0 - 1.0).abs() < 1e-3);
}

#[test]
fn cli_run_is_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = scenarios().join("periodic_smoke.toml");
    for d in [&a, &b] {
        let st = bin().arg("run").arg(&cfg).arg("--out").arg(d.path()).output().unwrap().status;
        assert!(st.success());
    }
    let read = |d: &tempfile::TempDir| std::fs::read(d.path().join("probe_center.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    let text = std::fs::read_to_string(scenarios().join("periodic_smoke.toml"))
        .unwrap()
        .replace("tau_ratio = 0.55", "tau_ratio = 0.4");
    std::fs::write(&bad, text).unwrap();
    let out = bin().arg("run").arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("lattice.tau_ratio"));

    let missing = bin().arg("run").arg(dir.path().join("none.toml")).output().unwrap().status;
    assert_eq!(missing.code(), Some(4));

    let blocked = dir.path().join("file");
    std::fs::write(&blocked, "").unwrap();
    let io = bin()
        .args(["run", "periodic_smoke", "--out"])
        .arg(blocked.join("sub"))
        .output()
        .unwrap()
        .status;
    assert_eq!(io.code(), Some(4));

    let verify = bin().arg("verify").output().unwrap();
    assert_eq!(verify.status.code(), Some(0));
    let report = String::from_utf8_lossy(&verify.stdout);
    assert!(report.lines().all(|l| l.starts_with("PASS ")));
}

#[test]
fn cli_dry_run_echoes_a_loadable_config() {
    let out = bin()
        .args(["run", "crack_mode1", "--dry-run", "--tau-ratio", "0.6"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let c = ScenarioConfig::from_toml(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(c.lattice.tau_ratio, 0.6);
}

#[test]
fn cli_oracle_table() {
    let out = bin()
        .args(["oracle", "--from", "0.5", "--to", "1.2", "--step", "0.7"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][2], "");
    let k1: f64 = rows[1][2].parse().unwrap();
    assert!((k1 - 0.953_625_236_248).abs() < 1e-5);
}

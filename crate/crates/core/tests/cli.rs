use std::path::Path;

use biphoton::cli::{execute, main_with_args, Command, RunConfig};
use biphoton::export::Format;
use serde_json::Value;

/// Preset with a coarse grid.
fn small_config(dir: &Path) -> std::path::PathBuf {
    let p = dir.join("run.json");
    std::fs::write(
        &p,
        r#"{
  "defaults": "paper",
  "grid": { "points": 2049, "zeros": 64 },
  "tau": { "start": -400.0, "stop": 400.0, "step": 0.2 },
  "wavelengths": { "start": 660.0, "stop": 750.0, "step": 5.0 },
  "counting": { "duration_s": 0.01, "pair_rate": 50000.0 }
}"#,
    )
    .unwrap();
    p
}

fn run(args: &[&str]) -> i32 {
    main_with_args(std::iter::once("biphoton").chain(args.iter().copied()))
}

#[test]
fn every_command_writes_versioned_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let out = dir.path().join("out");
    for cmd in ["indices", "pm-angle", "spectrum", "g1", "g2", "michelson", "hom", "tuning", "pair-window", "mca-sim"] {
        let code = run(&["--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), cmd]);
        assert_eq!(code, 0, "{cmd}");
    }
    let mut jsons = 0;
    for entry in std::fs::read_dir(&out).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "json") {
            let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
            assert_eq!(v["schema_version"], 1, "{}", path.display());
            jsons += 1;
        }
    }
    assert!(jsons >= 10);
}

#[test]
fn csv_bodies_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig::load(Some(&small_config(dir.path())), false).unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for cmd in [Command::G1, Command::Hom, Command::McaSim, Command::Tuning] {
        let pa = execute(cmd, &cfg, &a, Format::Csv).unwrap();
        let pb = execute(cmd, &cfg, &b, Format::Csv).unwrap();
        for (x, y) in pa.iter().zip(&pb) {
            if x.extension().is_some_and(|e| e == "csv") {
                assert_eq!(std::fs::read(x).unwrap(), std::fs::read(y).unwrap(), "{}", x.display());
            }
        }
    }
}

#[test]
fn type2_hom_reports_half_delay() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig::paper();
    let paths = execute(Command::Hom, &cfg, dir.path(), Format::Json).unwrap();
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&paths[0]).unwrap()).unwrap();
    let w = v["fwhm_fs"].as_f64().unwrap();
    assert!((w - 247.0).abs() < 0.05 * 247.0, "{w}");
    assert!((v["visibility"].as_f64().unwrap() - 1.0).abs() < 1e-6);
}

#[test]
fn svg_format_writes_a_plot() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig::load(Some(&small_config(dir.path())), false).unwrap();
    let paths = execute(Command::G1, &cfg, dir.path(), Format::Svg).unwrap();
    assert!(paths.iter().any(|p| p.extension().is_some_and(|e| e == "svg")));
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    let out = dir.path().join("out");

    std::fs::write(&p, r#"{"defaults": "paper", "crystal": {"sellmeier_o": "/nowhere/bbo_o.json"}}"#).unwrap();
    let err = RunConfig::load(Some(&p), false).unwrap().crystal().unwrap_err();
    assert!(err.to_string().contains("/nowhere/bbo_o.json"), "{err}");
    assert_eq!(run(&["--config", p.to_str().unwrap(), "--out", out.to_str().unwrap(), "g1"]), 2);

    std::fs::write(&p, r#"{"defaults": "paper", "grid": {"pointz": 3}}"#).unwrap();
    assert_eq!(run(&["--config", p.to_str().unwrap(), "g1"]), 2);

    std::fs::write(&p, r#"{"defaults": "paper", "grid": {"points": 1024}}"#).unwrap();
    assert_eq!(run(&["--config", p.to_str().unwrap(), "--out", out.to_str().unwrap(), "g1"]), 2);

    assert_eq!(run(&["--config", dir.path().join("missing.json").to_str().unwrap(), "g1"]), 2);
    assert_eq!(run(&["no-such-command"]), 2);
}

#[test]
fn numerical_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("far.json");
    // delays beyond the resolvable range of a coarse grid
    std::fs::write(
        &p,
        r#"{"defaults": "paper", "grid": {"points": 257, "zeros": 64}, "tau": {"start": -3000, "stop": 3000, "step": 1}}"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    assert_eq!(run(&["--config", p.to_str().unwrap(), "--out", out.to_str().unwrap(), "g1"]), 3);
}

#[test]
fn binary_exit_status() {
    let dir = tempfile::tempdir().unwrap();
    let status = std::process::Command::new(env!("CARGO_BIN_EXE_biphoton"))
        .args(["--out", dir.path().to_str().unwrap(), "pm-angle"])
        .status()
        .unwrap();
    assert!(status.success());
    assert!(dir.path().join("pm_angle.csv").exists());
    let status = std::process::Command::new(env!("CARGO_BIN_EXE_biphoton"))
        .env("SPDC_DATA_DIR", dir.path().join("empty"))
        .args(["--out", dir.path().to_str().unwrap(), "pm-angle"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn filtered_type1_config_parses() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("t1.json");
    std::fs::write(
        &p,
        r#"{
  "defaults": "paper",
  "pm_type": "I",
  "filters": { "signal": { "center_nm": 702.2, "fwhm_nm": 20.0, "shape": "gaussian" }, "idler": null },
  "tau": { "start": -200.0, "stop": 200.0, "step": 0.5 }
}"#,
    )
    .unwrap();
    let cfg = RunConfig::load(Some(&p), false).unwrap();
    let b = cfg.amplitude(&cfg.crystal().unwrap()).unwrap();
    assert!(b.amplitude.description.contains("filter") || b.amplitude.power_integral() > 0.0);
}

//! The `cdt` binary: subcommands, exit codes and written files.

use std::path::{Path, PathBuf};
use std::process::Command;

fn cdt() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cdt"))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

#[test]
fn shipped_configs_validate() {
    for name in [
        "lipschitz_triangle.toml",
        "glb_linucb.toml",
        "grid_linucb.toml",
        "sgdts_logistic.toml",
        "csv_dataset.toml",
    ] {
        let out = cdt().args(["validate-config", "--config"]).arg(config(name)).output().unwrap();
        assert!(out.status.success(), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(String::from_utf8_lossy(&out.stdout).contains("horizon"));
    }
}

#[test]
fn bad_input_fails_with_nonzero_exit() {
    let missing = cdt().args(["validate-config", "--config", "/nonexistent/cfg.toml"]).output().unwrap();
    assert!(!missing.status.success());

    let bad_override = cdt()
        .args(["validate-config", "--config"])
        .arg(config("glb_linucb.toml"))
        .args(["--override", "environment.nope=1"])
        .output()
        .unwrap();
    assert!(!bad_override.status.success());

    // the subcommand must match the config kind
    let mismatch = cdt()
        .args(["lipschitz-bench", "--config"])
        .arg(config("glb_linucb.toml"))
        .output()
        .unwrap();
    assert!(!mismatch.status.success());
    assert!(String::from_utf8_lossy(&mismatch.stderr).contains("kind"));
}

#[test]
fn small_runs_write_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let run = |sub: &str, cfg: &str, out: &Path, extra: &[&str]| {
        let status = cdt()
            .args([sub, "--config"])
            .arg(config(cfg))
            .args(["--reps", "2", "--seed", "11", "--out"])
            .arg(out)
            .args(extra)
            .output()
            .unwrap();
        assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
        String::from_utf8(status.stdout).unwrap()
    };
    for (sub, cfg, extra) in [
        ("glb-bench", "glb_linucb.toml", vec!["--override", "horizon=300"]),
        ("lipschitz-bench", "lipschitz_triangle.toml", vec!["--override", "horizon=600"]),
        ("grid-sweep", "grid_linucb.toml", vec!["--override", "horizon=200", "--override", "grid.values=[0.1, 2.0]"]),
    ] {
        let a = dir.path().join(format!("{sub}_a.csv"));
        let b = dir.path().join(format!("{sub}_b.csv"));
        let stdout = run(sub, cfg, &a, &extra);
        run(sub, cfg, &b, &extra);
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap(), "{sub}");
        assert!(!stdout.is_empty());
        if sub == "grid-sweep" {
            assert!(stdout.contains("argmin"));
            assert!(dir.path().join(format!("{sub}_a.csv.grid.csv")).exists());
        }
    }
}

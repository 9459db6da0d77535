use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;
use sublil::plot::PLOT_FILES;
use sublil::{emit_plot_data, run, RunOptions};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sublil"))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("configs")
        .join(name)
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

const SIGMA: &str = r#"{
  "version": 1,
  "experiment": {"kind": "sigma", "expected": [1, 9]},
  "family": {"members": [
    {"kind": "rademacher", "magnitude": 1},
    {"kind": "rademacher", "magnitude": 3}
  ]}
}"#;

#[test]
fn malformed_config_exits_2_without_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "bad.json",
        &SIGMA.replace("\"version\": 1,", "\"version\": 1,\n  \"horizn\": 5,"),
    );
    let out = dir.path().join("out");
    let res = bin()
        .arg("run")
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(res.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&res.stderr);
    assert!(msg.contains("bad.json:3:"), "{msg}");
    assert!(!out.exists());
}

#[test]
fn failed_assertion_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", &SIGMA.replace("[1, 9]", "[1, 8]"));
    let out = dir.path().join("out");
    let res = bin()
        .arg("run")
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(res.status.code(), Some(3));
    let summary: Value =
        serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["pass"], false);
}

#[test]
fn missing_run_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let res = bin()
        .arg("plot")
        .arg(dir.path().join("nothing"))
        .output()
        .unwrap();
    assert_eq!(res.status.code(), Some(4));
}

#[test]
fn schema_is_json() {
    let res = bin().arg("schema").output().unwrap();
    assert!(res.status.success());
    let v: Value = serde_json::from_slice(&res.stdout).unwrap();
    assert_eq!(v["properties"]["version"]["const"], 1);
}

#[test]
fn successful_run_exits_0() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", SIGMA);
    let res = bin()
        .arg("run")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("o"))
        .output()
        .unwrap();
    assert!(
        res.status.success(),
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );
}

#[test]
fn manifest_digests_match_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &config("selfnorm_greedy.json"),
        &RunOptions {
            out: Some(dir.path().into()),
            ..Default::default()
        },
    )
    .unwrap();
    assert!(o.passed());
    assert!(sublil::runner::verify_digests(dir.path())
        .unwrap()
        .is_empty());
    let manifest: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["files"].as_array().unwrap().len(), 5);
    assert_eq!(manifest["seeds"].as_array().unwrap().len(), 4);
    fs::write(dir.path().join("summary.json"), "{}").unwrap();
    assert_eq!(
        sublil::runner::verify_digests(dir.path()).unwrap(),
        vec!["summary.json".to_string()]
    );
}

#[test]
fn seed_override_changes_paths() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let cfg = config("cluster_mixture.json");
    run(
        &cfg,
        &RunOptions {
            seed: Some(5),
            out: Some(a.path().into()),
            ..Default::default()
        },
    )
    .unwrap();
    run(
        &cfg,
        &RunOptions {
            seed: Some(6),
            out: Some(b.path().into()),
            ..Default::default()
        },
    )
    .unwrap();
    let read = |d: &Path| fs::read(d.join("checkpoints/run_0000.csv")).unwrap();
    assert_ne!(read(a.path()), read(b.path()));
}

#[test]
fn plot_rows_match_checkpoints() {
    let dir = tempfile::tempdir().unwrap();
    run(
        &config("selfnorm_greedy.json"),
        &RunOptions {
            out: Some(dir.path().into()),
            ..Default::default()
        },
    )
    .unwrap();
    let files = emit_plot_data(dir.path(), None).unwrap();
    assert_eq!(files.len(), 4);
    let checkpoint_rows: usize = (0..4)
        .map(|k| {
            fs::read_to_string(dir.path().join(format!("checkpoints/run_{k:04}.csv")))
                .unwrap()
                .lines()
                .count()
                - 1
        })
        .sum();
    for name in &PLOT_FILES[..3] {
        let rows = fs::read_to_string(dir.path().join("plot").join(name))
            .unwrap()
            .lines()
            .count()
            - 1;
        assert_eq!(rows, checkpoint_rows, "{name}");
    }
    let hist = fs::read_to_string(dir.path().join("plot/cluster_hist.csv")).unwrap();
    assert!(hist.starts_with("bin_lo,bin_hi,count\n"));
    assert!(hist.lines().count() > 1);
}

#[test]
fn plot_without_trajectories_writes_headers() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", SIGMA);
    let out = dir.path().join("o");
    run(
        &cfg,
        &RunOptions {
            out: Some(out.clone()),
            ..Default::default()
        },
    )
    .unwrap();
    emit_plot_data(&out, None).unwrap();
    assert_eq!(
        fs::read_to_string(out.join("plot/r_n.csv")).unwrap(),
        "run,n,R\n"
    );
    assert_eq!(
        fs::read_to_string(out.join("plot/t_n.csv")).unwrap(),
        "run,n,T\n"
    );
}

#[test]
fn shipped_configs_parse() {
    for e in fs::read_dir(Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")).unwrap() {
        let p = e.unwrap().path();
        sublil::load(&p).unwrap_or_else(|err| panic!("{}: {err}", p.display()));
    }
}

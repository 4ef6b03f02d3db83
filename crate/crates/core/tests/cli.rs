use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fluxion::config::{Experiment, RunConfig};
use fluxion::table::{config_from_metadata, parse_csv};

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn fluxion(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fluxion"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_into(experiment: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        experiment,
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    fluxion(&args)
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let p = dir.join("run.toml");
    fs::write(&p, body).unwrap();
    p
}

fn listing(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    v.sort();
    v
}

#[test]
fn every_shipped_config_runs() {
    let tmp = tempfile::tempdir().unwrap();
    for e in Experiment::ALL {
        let cfg = configs_dir().join(format!("{}.toml", e.name()));
        let out = run_into(e.name(), &cfg, tmp.path(), &["--threads", "2"]);
        assert!(
            out.status.success(),
            "{e}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let csv = fs::read_to_string(tmp.path().join(format!("{}.csv", e.name()))).unwrap();
        let table = parse_csv(&csv).unwrap();
        assert!(!table.columns.is_empty() && !table.rows.is_empty(), "{e}");
        assert!(tmp.path().join(format!("{}.meta.toml", e.name())).exists());
    }
}

#[test]
fn output_is_deterministic_for_a_seed() {
    let cfg_dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        cfg_dir.path(),
        "experiment = \"transfer-disorder\"\nseed = 7\n[parameters]\nn = 21\neta = 0.6\nsigma = 0.08\ntrials = 16\njt = { start = 5.0, stop = 25.0, step = 0.1 }\n",
    );
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let c = tempfile::tempdir().unwrap();
    assert!(
        run_into("transfer-disorder", &cfg, a.path(), &["--threads", "1"])
            .status
            .success()
    );
    assert!(
        run_into("transfer-disorder", &cfg, b.path(), &["--threads", "3"])
            .status
            .success()
    );
    assert!(
        run_into("transfer-disorder", &cfg, c.path(), &["--seed", "8"])
            .status
            .success()
    );
    for name in ["transfer-disorder.csv", "transfer-disorder_trials.csv"] {
        let x = fs::read(a.path().join(name)).unwrap();
        let y = fs::read(b.path().join(name)).unwrap();
        let z = fs::read(c.path().join(name)).unwrap();
        assert_eq!(x, y, "{name} differs between runs");
        assert_ne!(x, z, "{name} ignores the seed");
    }
}

#[test]
fn metadata_reproduces_the_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = configs_dir().join("series-check.toml");
    assert!(
        run_into("series-check", &cfg, tmp.path(), &["--seed", "99"])
            .status
            .success()
    );
    let meta = fs::read_to_string(tmp.path().join("series-check.meta.toml")).unwrap();
    let t: toml::Table = toml::from_str(&meta).unwrap();
    for key in [
        "fluxion_version",
        "experiment",
        "seed",
        "wall_time_s",
        "files",
        "config",
        "summary",
    ] {
        assert!(t.contains_key(key), "missing {key}");
    }
    let back = config_from_metadata(&meta).unwrap();
    let original = RunConfig::parse(&fs::read_to_string(&cfg).unwrap(), None).unwrap();
    assert_eq!(back.seed, 99);
    assert_eq!(back.experiment, Experiment::SeriesCheck);
    assert_eq!(back.parameters, original.parameters);

    // Rerunning from the sidecar gives the same data.
    let again = tempfile::tempdir().unwrap();
    let cfg2 = write_config(again.path(), &back.to_toml());
    assert!(run_into("series-check", &cfg2, again.path(), &[])
        .status
        .success());
    assert_eq!(
        fs::read(tmp.path().join("series-check.csv")).unwrap(),
        fs::read(again.path().join("series-check.csv")).unwrap()
    );
}

#[test]
fn csv_has_header_and_full_precision() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = configs_dir().join("transfer-single.toml");
    assert!(run_into("transfer-single", &cfg, tmp.path(), &[])
        .status
        .success());
    let text = fs::read_to_string(tmp.path().join("transfer-single.csv")).unwrap();
    let t = parse_csv(&text).unwrap();
    assert_eq!(t.columns[0], "jt");
    let jt: f64 = t.rows[1][0].parse().unwrap();
    assert!((jt - 0.01).abs() < 1e-15);
    for cell in &t.rows[137] {
        if let Some((mantissa, _)) = cell.split_once('e') {
            let digits = mantissa.chars().filter(|ch| ch.is_ascii_digit()).count();
            assert!(digits >= 12, "{cell}");
        }
    }
}

#[test]
fn config_errors_exit_2_and_name_the_field() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "experiment = \"transfer-single\"\n[parameters]\nn = 1\njt = { start = 0.0, stop = 1.0, step = -0.5 }\n",
    );
    let out = run_into("transfer-single", &cfg, tmp.path(), &[]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("parameters.n"), "{err}");
    assert!(err.contains("parameters.jt"), "{err}");

    let out = run_into("uqcm-chain", &cfg, tmp.path(), &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("experiment"));

    let cfg = write_config(
        tmp.path(),
        "experiment = \"open-flux\"\n[parameters]\nn = 2\ngamma = 1.0\nbogus = 3\n",
    );
    let out = run_into("open-flux", &cfg, tmp.path(), &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus"));

    let out = fluxion(&["no-such-experiment", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = run_into(
        "open-flux",
        &tmp.path().join("missing.toml"),
        tmp.path(),
        &[],
    );
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(listing(tmp.path()), vec!["run.toml"]);
}

#[test]
fn runtime_errors_exit_1_without_partial_output() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("out");
    fs::create_dir(&out_dir).unwrap();
    // Order 3 cannot reach the series tolerance at Jt = 30.
    let cfg = write_config(
        tmp.path(),
        "experiment = \"series-check\"\n[parameters]\nn = 5\neta = 0.7\norder = 3\njt = [0.5, 30.0]\n",
    );
    let out = run_into("series-check", &cfg, &out_dir, &[]);
    assert_eq!(
        out.status.code(),
        Some(1),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(listing(&out_dir).is_empty());

    // A directory squatting on the data file's name makes the final rename fail.
    let cfg = configs_dir().join("transfer-single.toml");
    fs::create_dir(out_dir.join("transfer-single.csv")).unwrap();
    fs::write(out_dir.join("transfer-single.csv").join("keep"), "x").unwrap();
    let out = run_into("transfer-single", &cfg, &out_dir, &[]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(listing(&out_dir), vec!["transfer-single.csv"]);
}

use std::fs;
use std::path::Path;
use std::process::Command;

use relloc_cli::output::{RunRecord, RunResults};

fn relloc(dir: &Path, args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_relloc"))
        .args(args)
        .env("RELLOC_OUT_DIR", dir)
        .output()
        .expect("binary runs")
}

fn record(dir: &Path) -> RunRecord {
    RunRecord::read(&dir.join("run.json")).unwrap()
}

/// Data rows of a CSV written by the CLI, parsed as numbers where possible.
fn rows(path: &Path) -> Vec<Vec<f64>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap_or(f64::NAN)).collect())
        .collect()
}

#[test]
fn simulate1d_writes_normalised_two_peak_densities() {
    let dir = tempfile::tempdir().unwrap();
    let out = relloc(dir.path(), &["simulate1d", "--photons", "150", "--d", "1", "--seed", "7"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["position_density.csv", "momentum_density.csv", "events.csv", "run.json"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let pos = rows(&dir.path().join("position_density.csv"));
    let dx = pos[1][0] - pos[0][0];
    let mass: f64 = pos.iter().map(|r| r[1]).sum::<f64>() * dx;
    assert!((mass - 1.0).abs() < 1e-6);
    let mom = rows(&dir.path().join("momentum_density.csv"));
    let dp = mom[1][0] - mom[0][0];
    for col in [1, 2] {
        let m: f64 = mom.iter().map(|r| r[col]).sum::<f64>() * dp;
        assert!((m - 1.0).abs() < 1e-6);
    }
    let RunResults::Simulate1d { two_peaks, events, .. } = record(dir.path()).results else {
        panic!("wrong record kind")
    };
    assert!(two_peaks);
    assert_eq!(events.len(), 150);
}

#[test]
fn zero_photons_leave_the_density_flat() {
    let dir = tempfile::tempdir().unwrap();
    assert!(relloc(dir.path(), &["simulate1d", "--photons", "0", "--seed", "1"]).status.success());
    let pos = rows(&dir.path().join("position_density.csv"));
    assert!(pos.iter().all(|r| (r[1] - 0.5).abs() < 1e-12));

    let dir3 = tempfile::tempdir().unwrap();
    let out = relloc(dir3.path(), &["simulate3d", "--photons", "0", "--grid", "8", "--seed", "1"]);
    assert!(out.status.success());
    for r in rows(&dir3.path().join("marginals.csv")) {
        for v in &r[1..] {
            assert!((v - 0.5).abs() < 1e-12);
        }
    }
}

#[test]
fn validation_errors_exit_with_status_one() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["simulate1d", "--d", "-1"][..],
        &["simulate3d", "--grid", "1"],
        &["simulate1d", "--source", "laser:3"],
        &["simulate1d", "--source", "blackbody:0"],
        &["discriminate", "--runs", "0", "--experiments", "1"],
        &["discriminate", "--dp", "-0.5", "--experiments", "1", "--runs", "1"],
        &["tof", "--mass", "-87"],
        &["simulate1d", "--no-such-flag"],
    ] {
        let out = relloc(dir.path(), args);
        assert_eq!(out.status.code(), Some(1), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(relloc(dir.path(), &["--help"]).status.code(), Some(0));
}

#[test]
fn simulate3d_gives_two_inversion_symmetric_clouds() {
    let dir = tempfile::tempdir().unwrap();
    let out = relloc(dir.path(), &["simulate3d", "--photons", "150", "--grid", "64", "--seed", "3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let RunResults::Simulate3d { bimodal, inversion_asymmetry, marginals, .. } = record(dir.path()).results
    else {
        panic!("wrong record kind")
    };
    assert!(bimodal);
    assert_eq!(inversion_asymmetry, 0.0);
    for m in &marginals {
        let n = m.len();
        for i in 0..n {
            assert!((m[i] - m[n - 1 - i]).abs() < 1e-12);
        }
    }
    assert_eq!(rows(&dir.path().join("cloud.csv")).len(), 20_000);
}

#[test]
fn single_experiment_trace_starts_at_the_prior() {
    let dir = tempfile::tempdir().unwrap();
    let out = relloc(
        dir.path(),
        &["discriminate", "--experiments", "1", "--runs", "40", "--dp", "0", "--seed", "11", "--grid", "1024"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let curve = rows(&dir.path().join("posterior.csv"));
    assert_eq!(curve.len(), 41);
    assert_eq!(curve[0][1], 0.5);
    assert!(curve.iter().all(|r| (0.0..=1.0).contains(&r[1])));
}

#[test]
fn localised_truth_drives_the_posterior_down() {
    let dir = tempfile::tempdir().unwrap();
    let out = relloc(
        dir.path(),
        &["discriminate", "--experiments", "40", "--runs", "20", "--dp", "0", "--truth", "localised", "--seed", "5"],
    );
    assert!(out.status.success());
    let curve = rows(&dir.path().join("posterior.csv"));
    assert!(curve[20][1] < 0.2, "mean P_nl = {}", curve[20][1]);
}

#[test]
fn tof_reports_the_rubidium_requirement() {
    let dir = tempfile::tempdir().unwrap();
    let out = relloc(dir.path(), &["tof"]);
    assert!(out.status.success());
    let RunResults::Tof(report) = record(dir.path()).results else { panic!("wrong record kind") };
    assert!((20e-6..=35e-6).contains(&report.spatial_resolution));
    let out = relloc(dir.path(), &["tof", "--dp", "0"]);
    assert!(out.status.success());
    let RunResults::Tof(report) = record(dir.path()).results else { panic!("wrong record kind") };
    assert_eq!(report.spatial_resolution, 0.0);
}

#[test]
fn runs_are_reproducible_and_replayable() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["simulate1d", "--photons", "60", "--grid", "512", "--source", "blackbody:3000", "--seed", "42"];
    assert!(relloc(a.path(), &args).status.success());
    assert!(relloc(b.path(), &args).status.success());
    for f in ["position_density.csv", "momentum_density.csv", "events.csv", "run.json"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    let c = tempfile::tempdir().unwrap();
    let record = a.path().join("run.json");
    let out = relloc(c.path(), &["replay", record.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(fs::read(a.path().join("events.csv")).unwrap(), fs::read(c.path().join("events.csv")).unwrap());
}

#[test]
fn a_tampered_record_fails_replay() {
    let a = tempfile::tempdir().unwrap();
    assert!(relloc(a.path(), &["simulate1d", "--photons", "5", "--grid", "128", "--seed", "2"]).status.success());
    let path = a.path().join("run.json");
    let text = fs::read_to_string(&path).unwrap().replacen("\"seed\": 2", "\"seed\": 3", 1);
    fs::write(&path, text).unwrap();
    let out = relloc(a.path(), &["replay", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn omitted_seed_is_recorded() {
    let dir = tempfile::tempdir().unwrap();
    assert!(relloc(dir.path(), &["simulate1d", "--photons", "3", "--grid", "64"]).status.success());
    let rec = record(dir.path());
    let seed = rec.config.seed().unwrap();
    let again = tempfile::tempdir().unwrap();
    let seed_text = seed.to_string();
    let args = ["simulate1d", "--photons", "3", "--grid", "64", "--seed", seed_text.as_str()];
    assert!(relloc(again.path(), &args).status.success());
    assert_eq!(record(again.path()).results, rec.results);
}

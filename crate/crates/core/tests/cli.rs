use std::path::PathBuf;
use std::process::{Command, Output};

use zenosim::output::{read_json_record, CSV_HEADER};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_zenosim"))
}

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn zeno_csv_to_stdout() {
    let o = run(&["zeno", "--events", "100", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(CSV_HEADER));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[0], "zeno");
    assert_eq!(row[1], "100");
    let survival: f64 = row[3].parse().unwrap();
    assert!((survival - 0.9759210393988909).abs() < 1e-12);
    assert!(lines.next().is_none());
}

#[test]
fn single_event_empties_the_subspace() {
    let o = run(&["zeno", "--events", "1", "--format", "csv"]);
    let text = stdout(&o);
    let survival: f64 = text.lines().nth(1).unwrap().split(',').nth(3).unwrap().parse().unwrap();
    assert!(survival.abs() < 1e-10);
}

#[test]
fn config_errors_exit_with_two() {
    for args in [
        vec!["zeno", "--events", "0"],
        vec!["branch", "--terminals", "0", "--probability", "0.5"],
        vec!["branch", "--terminals", "2", "--probability", "1.5"],
        vec!["zeno", "--events", "10", "--mode", "sampled"],
        vec!["run", "--config", "/nonexistent/config.json"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
    }
}

#[test]
fn unknown_config_field_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"scenario": "calcium", "ions": {}}"#).unwrap();
    let o = run(&["run", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("ions"));
}

#[test]
fn runtime_errors_exit_with_three() {
    let o = run(&["calcium", "--out", "/nonexistent/dir/out.csv"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/nonexistent/dir/out.csv"));

    // Imposing Yes on a subspace with zero weight.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("degenerate.json");
    std::fs::write(
        &path,
        r#"{"scenario": "custom-pipeline",
            "hamiltonian": {"preset": "rabi", "omega": 1.0},
            "projector": {"kind": "basis", "indices": [1]},
            "initial_state": {"kind": "basis", "index": 0},
            "pipeline": [{"op": "answer", "value": "yes"}]}"#,
    )
    .unwrap();
    let o = run(&["run", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn sampled_runs_are_byte_identical() {
    // The output path is echoed in the record, so both runs share it.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    let outputs: Vec<Vec<u8>> = (0..2)
        .map(|_| {
            let o = run(&[
                "zeno",
                "--events",
                "50",
                "--mode",
                "sampled",
                "--trajectories",
                "2000",
                "--seed",
                "11",
                "--record-events",
                "--out",
                path.to_str().unwrap(),
            ]);
            assert_eq!(o.status.code(), Some(0));
            assert!(o.stdout.is_empty());
            std::fs::read(&path).unwrap()
        })
        .collect();
    assert!(outputs[0] == outputs[1], "reruns differ");

    let record = read_json_record(&path).unwrap();
    assert_eq!(record.points[0].seed, Some(11));
    assert_eq!(record.trajectories.as_ref().unwrap().len(), 2000);
    assert_eq!(record.event_yes_counts.as_ref().unwrap().len(), 50);
}

#[test]
fn seed_override_changes_sampled_output() {
    let base = run(&[
        "run",
        "--config",
        scenario("zeno_sampled.json").to_str().unwrap(),
        "--format",
        "csv",
    ]);
    let other = run(&[
        "run",
        "--config",
        scenario("zeno_sampled.json").to_str().unwrap(),
        "--format",
        "csv",
        "--seed",
        "2",
    ]);
    assert_eq!(base.status.code(), Some(0));
    assert!(stdout(&base).lines().nth(1).unwrap().ends_with(",1"));
    assert!(stdout(&other).lines().nth(1).unwrap().ends_with(",2"));
}

#[test]
fn calcium_scenario_values() {
    let o = run(&["run", "--config", scenario("calcium.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let value = |name: &str| -> f64 {
        let line = text.lines().find(|l| l.starts_with(&format!("{name},"))).unwrap();
        line.split(',').nth(1).unwrap().parse().unwrap()
    };
    assert!((value("velocity_ratio") - 277.194).abs() < 1e-3);
    assert!((value("spread_at_trigger") - 1.8038e-10).abs() < 1e-13);
    assert!((value("spread_to_ion_size") - 0.9019).abs() < 1e-4);
}

#[test]
fn branch_scenario_quarters() {
    let o = run(&["run", "--config", scenario("branch.json").to_str().unwrap()]);
    let text = stdout(&o);
    let weights: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert_eq!(weights, vec![0.25; 4]);
}

#[test]
fn sweep_json_round_trips_bit_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.json");
    let o = run(&["sweep", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let record = read_json_record(&path).unwrap();
    let sweep = record.sweep.unwrap();
    assert!((-1.05..=-0.95).contains(&sweep.slope));
    let expected = 0.5 + 0.5 * (std::f64::consts::PI / 100.0).cos().powi(100);
    assert!((record.points[0].survival - expected).abs() < 1e-12);

    let text = std::fs::read_to_string(&path).unwrap();
    let again = zenosim::output::to_json_string(&read_json_record(&path).unwrap()).unwrap();
    assert_eq!(text, again);
}

#[test]
fn every_bundled_scenario_runs() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("json") {
            continue;
        }
        let o = run(&["run", "--config", path.to_str().unwrap()]);
        assert_eq!(
            o.status.code(),
            Some(0),
            "{}: {}",
            path.display(),
            String::from_utf8_lossy(&o.stderr)
        );
        seen += 1;
    }
    assert!(seen >= 5);
}

use std::path::Path;
use std::process::{Command, Output};

use zeno_cli::{
    cmd_simulate, estimate, simulate, sweep_points, Backend, CrossCheck, EstimateInputs, Range, SimulateConfig,
    Status, SweepConfig,
};
use zeno_core::Classification;

fn zeno(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zeno")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Header comment, config comment, column row, then data rows.
fn parse_csv(text: &str) -> (String, Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let meta = lines.next().unwrap().to_string();
    assert!(lines.next().unwrap().starts_with("# config={"));
    let columns = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (meta, columns, rows)
}

fn col(columns: &[String], name: &str) -> usize {
    columns.iter().position(|c| c == name).unwrap_or_else(|| panic!("no column {name}"))
}

#[test]
fn sweep_output_is_byte_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<_> = (0..3).map(|k| dir.path().join(format!("s{k}.csv"))).collect();
    let args = ["sweep", "--gamma-steps", "31", "--omega-steps", "41", "--cross-check", "--cross-check-periods", "200"];
    for (k, p) in paths.iter().enumerate() {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_zeno"));
        cmd.args(args).args(["--out", p.to_str().unwrap()]);
        if k == 2 {
            cmd.env("ZF_THREADS", "1");
        }
        assert!(cmd.status().unwrap().success());
    }
    let first = std::fs::read(&paths[0]).unwrap();
    assert!(!first.contains(&b'\r'));
    for p in &paths[1..] {
        assert_eq!(first, std::fs::read(p).unwrap());
    }
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(zeno(&["sweep", "--gamma-min", "2", "--gamma-max", "1"]).status.code(), Some(2));
    assert_eq!(zeno(&["sweep", "--omega-steps", "1"]).status.code(), Some(2));
    assert_eq!(zeno(&["sweep", "--gamma-min", "-0.5"]).status.code(), Some(2));
    assert_eq!(zeno(&["sweep", "--no-such-flag"]).status.code(), Some(2));
    assert_eq!(zeno(&["estimate", "--intensity", "0"]).status.code(), Some(2));
    assert_eq!(zeno(&["estimate", "--chi2", "-1"]).status.code(), Some(2));
    assert_eq!(zeno(&["simulate", "--modes", "3"]).status.code(), Some(2));
    assert_eq!(zeno(&["simulate", "--initial", "{\"number\": [1, 0]}"]).status.code(), Some(2));
    assert_eq!(zeno(&["simulate", "--config", "/nonexistent/config.json"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"gamma_tau1": {"min": 0, "max": 1}}"#).unwrap();
    assert_eq!(zeno(&["sweep", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
    std::fs::write(&bad, r#"{"unknown_field": 1}"#).unwrap();
    assert_eq!(zeno(&["estimate", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn divergence_trips_guard_with_marked_partial_output() {
    let o = zeno(&["simulate", "--gamma-tau1", "1.0", "--periods", "100"]);
    assert_eq!(o.status.code(), Some(1));
    let (meta, _, rows) = parse_csv(&stdout(&o));
    assert!(meta.contains("status=diverged"), "{meta}");
    assert!(rows.len() < 101);
}

#[test]
fn truncation_trips_guard_with_marked_output() {
    let o = zeno(&["simulate", "--gamma-tau1", "0.3", "--periods", "10", "--backend", "fock", "--cutoff", "8"]);
    assert_eq!(o.status.code(), Some(1));
    let (meta, columns, rows) = parse_csv(&stdout(&o));
    assert!(meta.contains("status=truncation_unsafe"), "{meta}");
    let safe = col(&columns, "truncation_safe");
    assert_eq!(rows[0][safe], "true");
    assert_eq!(rows.last().unwrap()[safe], "false");
}

#[test]
fn gamma_zero_line_is_never_unstable() {
    let config = SweepConfig {
        gamma_tau1: Range { min: 0.0, max: 0.5, steps: 2 },
        omega_tau2: Range { min: 0.0, max: std::f64::consts::PI, steps: 201 },
        ..Default::default()
    };
    let points = sweep_points(&config).unwrap();
    for p in points.iter().filter(|p| p.gamma_tau1 == 0.0) {
        assert_ne!(p.classification, Classification::Unstable, "{p:?}");
    }
}

#[test]
fn strong_squeezing_with_weak_coupling_is_unstable() {
    let o = zeno(&["sweep", "--gamma-min", "0.5", "--gamma-max", "1", "--gamma-steps", "2", "--omega-min", "0.1", "--omega-max", "1", "--omega-steps", "2"]);
    assert!(o.status.success());
    let (_, columns, rows) = parse_csv(&stdout(&o));
    let row = &rows[0];
    assert_eq!(row[col(&columns, "gamma_tau1")].parse::<f64>().unwrap(), 0.5);
    assert_eq!(row[col(&columns, "omega_tau2")].parse::<f64>().unwrap(), 0.1);
    assert_eq!(row[col(&columns, "classification")], "unstable");
    assert!(row[col(&columns, "floquet_exponent")].parse::<f64>().unwrap() > 0.0);
}

#[test]
fn vertical_line_crosses_where_cosh_meets_secant() {
    let crossing = (1.0 / 1.0f64.cos()).acosh();
    assert!((crossing - 1.226191170883517).abs() < 1e-12);
    let steps = 1501;
    let config = SweepConfig {
        gamma_tau1: Range { min: 0.0, max: 1.5, steps },
        omega_tau2: Range { min: 1.0, max: 2.0, steps: 2 },
        ..Default::default()
    };
    let line: Vec<_> = sweep_points(&config).unwrap().into_iter().filter(|p| p.omega_tau2 == 1.0).collect();
    assert_eq!(line.len(), steps);
    for p in &line {
        let expected = if p.gamma_tau1 < crossing { Classification::Stable } else { Classification::Unstable };
        assert_eq!(p.classification, expected, "{p:?}");
    }
}

#[test]
fn cross_check_never_contradicts_classification_on_default_grid() {
    let config = SweepConfig { cross_check: Some(CrossCheck::default()), ..Default::default() };
    let points = sweep_points(&config).unwrap();
    assert_eq!(points.len(), 151 * 151);
    let flagged: Vec<_> = points.iter().filter(|p| p.disagreement).collect();
    assert!(flagged.is_empty(), "{flagged:?}");
    // outside the marginal band the simulator agrees outright
    for p in points.iter().filter(|p| (p.half_trace - 1.0).abs() > 1e-3) {
        assert_eq!(p.bounded, Some(p.classification == Classification::Stable));
    }
}

#[test]
fn vacuum_without_squeezing_stays_empty() {
    let record = simulate(SimulateConfig { omega: 1.3, periods: 25, ..Default::default() }).unwrap();
    assert_eq!(record.samples.len(), 26);
    for s in &record.samples {
        assert!(s.gaussian.as_ref().unwrap().iter().all(|n| n.abs() < 1e-14));
    }
}

#[test]
fn pure_squeezing_series_follows_sinh_squared() {
    let o = zeno(&["simulate", "--gamma-tau1", "0.1", "--omega-tau2", "0", "--periods", "10", "--backend", "both", "--cutoff", "40"]);
    assert!(o.status.success());
    let (meta, columns, rows) = parse_csv(&stdout(&o));
    assert!(meta.contains("status=completed"));
    assert_eq!(rows.len(), 11);
    let (g, f) = (col(&columns, "gaussian_n_a"), col(&columns, "fock_n_a"));
    let d = col(&columns, "discrepancy");
    for (n, row) in rows.iter().enumerate() {
        let exact = (0.1 * n as f64).sinh().powi(2);
        let tol = 1e-9 * exact.max(1e-300);
        assert!((row[g].parse::<f64>().unwrap() - exact).abs() <= tol, "period {n}");
        assert!((row[f].parse::<f64>().unwrap() - exact).abs() <= 1e-7 * exact.max(1e-300), "period {n}");
        assert!(row[d].parse::<f64>().unwrap() < 1e-6);
    }
}

#[test]
fn stable_point_oscillates_within_bound() {
    let config = SimulateConfig { gamma: 0.2, omega: 2.0, periods: 1000, ..Default::default() };
    let record = simulate(config.clone()).unwrap();
    assert_eq!(record.status, Status::Completed);
    assert_eq!(record.classification, Classification::Stable);
    assert_eq!(record.samples.len(), 1001);
    let schedule = config.schedule().unwrap();
    let vacuum = zeno_core::gaussian::GaussianState::vacuum(2).unwrap();
    let bound = zeno_core::gaussian::stable_photon_bound(&vacuum, &schedule).unwrap();
    let peak = record.peak_total();
    assert!(peak > 0.0 && peak <= bound, "peak {peak}, bound {bound}");
    let report = cmd_simulate(config).unwrap();
    assert!(report.to_csv().lines().next().unwrap().contains("peak_total="));
}

#[test]
fn single_mode_runs_drop_second_mode_columns() {
    let o = zeno(&["simulate", "--modes", "1", "--gamma-tau1", "0.1", "--omega-tau2", "0.5", "--periods", "5", "--backend", "both"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (_, columns, rows) = parse_csv(&stdout(&o));
    assert!(columns.iter().all(|c| !c.ends_with("n_b")));
    assert_eq!(rows.len(), 6);
}

#[test]
fn config_file_with_flag_override_and_json_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sim.json");
    std::fs::write(
        &cfg,
        r#"{"gamma": 0.1, "omega": 1.0, "periods": 4, "initial": {"coherent": [[0.5, 0.0], [0.0, 0.2]]}}"#,
    )
    .unwrap();
    let out = dir.path().join("run.json");
    let run = |extra: &[&str]| {
        let mut args = vec!["simulate", "--config", cfg.to_str().unwrap(), "--format", "json", "--out", out.to_str().unwrap()];
        args.extend_from_slice(extra);
        assert!(zeno(&args).status.success());
        serde_json::from_str::<serde_json::Value>(&std::fs::read_to_string(&out).unwrap()).unwrap()
    };
    let base = run(&[]);
    assert_eq!(base["meta"]["config"]["periods"], 4);
    assert_eq!(base["rows"].as_array().unwrap().len(), 5);
    assert_eq!(base["meta"]["version"], env!("CARGO_PKG_VERSION"));

    let overridden = run(&["--periods", "6"]);
    assert_eq!(overridden["rows"].as_array().unwrap().len(), 7);
    assert_ne!(base["meta"]["config_hash"], overridden["meta"]["config_hash"]);
    assert_eq!(overridden["meta"]["config"]["omega"], 1.0);
    // row keys mirror the CSV header
    let keys: Vec<_> = overridden["rows"][0].as_object().unwrap().keys().cloned().collect();
    assert_eq!(keys[..3], ["period", "time", "n_a"]);
}

#[test]
fn fock_backend_resolves_cutoff_into_config() {
    let record = simulate(SimulateConfig { gamma: 0.1, periods: 3, backend: Backend::Fock, ..Default::default() }).unwrap();
    assert_eq!(record.config.cutoff, Some(20));
    assert!(record.samples.iter().all(|s| s.gaussian.is_none() && s.fock.is_some()));
}

#[test]
fn estimate_matches_hand_evaluation_and_scales_with_pump() {
    let inputs = EstimateInputs::default();
    let e = estimate(&inputs).unwrap();
    let hand = (220f64.powi(3) / 2.0 * 4e-46 * 9e30 * 1e5).sqrt();
    assert!((e.gamma_c / hand - 1.0).abs() < 1e-12);
    assert!((e.gamma_tau1 - hand * 1e-2).abs() < 1e-15);

    let doubled = estimate(&EstimateInputs { intensity: 2e5, ..inputs }).unwrap();
    assert!((doubled.gamma_c / e.gamma_c - 2f64.sqrt()).abs() < 1e-12);

    let o = zeno(&["estimate"]);
    let (_, columns, rows) = parse_csv(&stdout(&o));
    assert_eq!(columns, ["gamma_c", "gamma_tau1"]);
    assert_eq!(rows[0][0].parse::<f64>().unwrap(), e.gamma_c);
}

#[test]
fn written_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("e.csv");
    let to_file = zeno(&["estimate", "--length", "0.02", "--out", path.to_str().unwrap()]);
    assert!(to_file.status.success() && to_file.stdout.is_empty());
    let piped = zeno(&["estimate", "--length", "0.02"]);
    assert_eq!(std::fs::read(Path::new(&path)).unwrap(), piped.stdout);
}

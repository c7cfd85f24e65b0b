use serde_json::Value;

use zeno_core::fock::{self, FockState, PeriodObservation};
use zeno_core::gaussian::{self, GaussianState, TrajectoryStatus};
use zeno_core::{floquet, Classification};

use crate::config::{config_hash, SimulateConfig};
use crate::report::{Cell, Report, Status};
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub period: usize,
    pub time: f64,
    /// `<n>` per mode from the Gaussian backend.
    pub gaussian: Option<Vec<f64>>,
    pub fock: Option<PeriodObservation>,
}

impl Sample {
    /// Largest per-mode difference between the backends.
    pub fn discrepancy(&self) -> Option<f64> {
        let (g, f) = (self.gaussian.as_ref()?, self.fock.as_ref()?);
        Some(g.iter().zip(&f.photons).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    }
}

/// One simulation: the resolved configuration, the period's stability data
/// and one sample per completed period (`periods + 1` unless a guard tripped).
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub config: SimulateConfig,
    pub config_hash: String,
    pub half_trace: f64,
    pub classification: Classification,
    pub samples: Vec<Sample>,
    pub status: Status,
}

impl RunRecord {
    /// Largest total photon number over the recorded samples.
    pub fn peak_total(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| match (&s.gaussian, &s.fock) {
                (Some(g), _) => g.iter().sum(),
                (None, Some(f)) => f.total,
                (None, None) => 0.0,
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

pub fn simulate(config: SimulateConfig) -> Result<RunRecord, CliError> {
    let config = config.resolve()?;
    let schedule = config.schedule()?;
    let monodromy = match config.modes {
        1 => gaussian::single_mode_period_transfer(&schedule),
        _ => floquet::monodromy(&schedule),
    };
    let report = floquet::classify(&monodromy, schedule.period(), config.epsilon)?;
    let initial = config.initial.to_initial();

    let mut status = Status::Completed;
    let gaussian_series = if config.backend.uses_gaussian() {
        let state = GaussianState::from_initial(&initial, config.modes)?;
        let (series, st) = gaussian::photon_series(&state, &schedule)?;
        if let TrajectoryStatus::Diverged { sample } = st {
            status = Status::Diverged { period: sample };
        }
        Some(series)
    } else {
        None
    };
    let fock_run = match config.cutoff {
        Some(cutoff) => {
            let state = FockState::from_initial(&initial, config.modes, cutoff)?;
            let run = fock::propagate(&state, &schedule)?;
            if let (Status::Completed, Some(period)) = (status, run.first_unsafe_period) {
                status = Status::TruncationUnsafe { period };
            }
            Some(run)
        }
        None => None,
    };

    let len = gaussian_series.as_ref().map_or(schedule.periods() + 1, Vec::len);
    let samples = (0..len)
        .map(|k| Sample {
            period: k,
            time: k as f64 * schedule.period(),
            gaussian: gaussian_series.as_ref().map(|s| s[k].per_mode.clone()),
            fock: fock_run.as_ref().map(|r| r.observations[k].clone()),
        })
        .collect();
    Ok(RunRecord {
        config_hash: config_hash(&config),
        config,
        half_trace: report.half_trace,
        classification: report.classification,
        samples,
        status,
    })
}

fn photon_columns(prefix: &str, modes: usize) -> Vec<&'static str> {
    let names: &[&'static str] = match (prefix, modes) {
        ("", 1) => &["n_a", "n_total"],
        ("", _) => &["n_a", "n_b", "n_total"],
        ("gaussian", 1) => &["gaussian_n_a", "gaussian_n_total"],
        ("gaussian", _) => &["gaussian_n_a", "gaussian_n_b", "gaussian_n_total"],
        (_, 1) => &["fock_n_a", "fock_n_total"],
        _ => &["fock_n_a", "fock_n_b", "fock_n_total"],
    };
    names.to_vec()
}

fn photon_cells(per_mode: &[f64], row: &mut Vec<Cell>) {
    row.extend(per_mode.iter().map(|&v| Cell::Float(v)));
    row.push(Cell::Float(per_mode.iter().sum()));
}

impl RunRecord {
    pub fn to_report(&self) -> Report {
        let modes = self.config.modes;
        let both = self.config.backend.uses_gaussian() && self.config.backend.uses_fock();
        let mut columns = vec!["period", "time"];
        match (self.config.backend.uses_gaussian(), both) {
            (_, true) => {
                columns.extend(photon_columns("gaussian", modes));
                columns.extend(photon_columns("fock", modes));
                columns.push("discrepancy");
            }
            _ => columns.extend(photon_columns("", modes)),
        }
        if self.config.backend.uses_fock() {
            columns.extend(["norm_drift", "leakage", "truncation_safe"]);
        }
        columns.extend(["half_trace", "classification"]);

        let rows = self
            .samples
            .iter()
            .map(|s| {
                let mut row = vec![Cell::Int(s.period as u64), Cell::Float(s.time)];
                if let Some(g) = &s.gaussian {
                    photon_cells(g, &mut row);
                }
                if let Some(f) = &s.fock {
                    photon_cells(&f.photons, &mut row);
                    if let Some(d) = s.discrepancy() {
                        row.push(Cell::Float(d));
                    }
                    row.extend([Cell::Float(f.norm_drift), Cell::Float(f.leakage), Cell::Bool(f.truncation_safe)]);
                }
                row.extend([Cell::Float(self.half_trace), Cell::Text(self.classification.as_str())]);
                row
            })
            .collect();

        let mut extras = vec![("samples", Value::from(self.samples.len())), ("peak_total", Value::from(self.peak_total()))];
        if both {
            let worst = self.samples.iter().filter_map(Sample::discrepancy).fold(0.0, f64::max);
            extras.push(("max_discrepancy", Value::from(worst)));
        }
        Report {
            command: "simulate",
            config: serde_json::to_value(&self.config).expect("config serializes"),
            config_hash: self.config_hash.clone(),
            status: self.status,
            extras,
            columns,
            rows,
        }
    }
}

pub fn cmd_simulate(config: SimulateConfig) -> Result<Report, CliError> {
    Ok(simulate(config)?.to_report())
}

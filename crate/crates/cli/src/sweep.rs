use rayon::prelude::*;
use serde_json::Value;

use zeno_core::floquet;
use zeno_core::gaussian::{self, GaussianState, TrajectoryStatus};
use zeno_core::{Classification, DriveSchedule};

use crate::config::{config_hash, SweepConfig};
use crate::report::{Cell, Report, Status};
use crate::CliError;

/// Points with `|half_trace - 1|` inside this band are never flagged by the
/// cross-check: growth there is too slow to resolve in a finite run.
pub const CROSS_CHECK_BAND: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub gamma_tau1: f64,
    pub omega_tau2: f64,
    pub half_trace: f64,
    pub classification: Classification,
    /// Per unit period.
    pub floquet_exponent: f64,
    /// `Some(true)` when the Gaussian run from vacuum stayed below the guard.
    pub bounded: Option<bool>,
    pub disagreement: bool,
}

fn evaluate(gt: f64, ot: f64, config: &SweepConfig) -> Result<SweepPoint, CliError> {
    let schedule = DriveSchedule::from_products(gt, ot, 1)?;
    let (_, report) = floquet::analyze(&schedule, config.epsilon)?;
    let mut point = SweepPoint {
        gamma_tau1: gt,
        omega_tau2: ot,
        half_trace: report.half_trace,
        classification: report.classification,
        floquet_exponent: report.floquet_exponent,
        bounded: None,
        disagreement: false,
    };
    if let Some(cc) = config.cross_check {
        let run = schedule.with_periods(cc.periods)?;
        let (_, status) = gaussian::max_total_photons(&GaussianState::vacuum(2)?, &run)?;
        let bounded = status == TrajectoryStatus::Completed;
        let outside_band = (report.half_trace - 1.0).abs() > CROSS_CHECK_BAND;
        point.bounded = Some(bounded);
        point.disagreement = outside_band && bounded != (report.classification == Classification::Stable);
    }
    Ok(point)
}

/// Worker count from `ZF_THREADS`, if set.
fn thread_cap() -> Result<Option<usize>, CliError> {
    match std::env::var("ZF_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::usage(format!("ZF_THREADS must be a positive integer, got {v:?}"))),
        },
        Err(_) => Ok(None),
    }
}

/// Classifies every grid point, `gamma_tau1`-major. Points are evaluated in
/// parallel; the order of the result never depends on scheduling.
pub fn sweep_points(config: &SweepConfig) -> Result<Vec<SweepPoint>, CliError> {
    config.validate()?;
    let gammas = config.gamma_tau1.values();
    let omegas = config.omega_tau2.values();
    let grid: Vec<(f64, f64)> = gammas.iter().flat_map(|&g| omegas.iter().map(move |&o| (g, o))).collect();
    let run = || grid.par_iter().map(|&(g, o)| evaluate(g, o, config)).collect::<Result<Vec<_>, _>>();
    match thread_cap()? {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::usage(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    }
}

pub fn cmd_sweep(config: &SweepConfig) -> Result<Report, CliError> {
    let points = sweep_points(config)?;
    let mut columns = vec!["gamma_tau1", "omega_tau2", "half_trace", "classification", "floquet_exponent"];
    let checked = config.cross_check.is_some();
    if checked {
        columns.extend(["cross_check", "disagreement"]);
    }
    let rows = points
        .iter()
        .map(|p| {
            let mut row = vec![
                Cell::Float(p.gamma_tau1),
                Cell::Float(p.omega_tau2),
                Cell::Float(p.half_trace),
                Cell::Text(p.classification.as_str()),
                Cell::Float(p.floquet_exponent),
            ];
            if let Some(bounded) = p.bounded {
                row.push(Cell::Text(if bounded { "bounded" } else { "diverged" }));
                row.push(Cell::Bool(p.disagreement));
            }
            row
        })
        .collect();
    let mut extras = vec![("points", Value::from(points.len()))];
    if checked {
        extras.push(("disagreements", Value::from(points.iter().filter(|p| p.disagreement).count())));
    }
    Ok(Report {
        command: "sweep",
        config: serde_json::to_value(config).expect("config serializes"),
        config_hash: config_hash(config),
        status: Status::Completed,
        extras,
        columns,
        rows,
    })
}

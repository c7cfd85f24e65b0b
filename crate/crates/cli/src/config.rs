//! Command configurations. Each is read from JSON, patched by flags, then
//! validated; the validated value is what gets hashed into the output.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;

use zeno_core::floquet::DEFAULT_EPSILON;
use zeno_core::{DriveSchedule, InitialState};

use crate::CliError;

/// Evenly spaced values from `min` to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Range {
    pub fn validate(&self, name: &str) -> Result<(), CliError> {
        if !(self.min.is_finite() && self.max.is_finite()) || self.min < 0.0 {
            return Err(CliError::usage(format!("{name}: bounds must be finite and non-negative")));
        }
        if self.min >= self.max {
            return Err(CliError::usage(format!("{name}: min must be below max")));
        }
        if self.steps < 2 {
            return Err(CliError::usage(format!("{name}: steps must be at least 2")));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let last = self.steps - 1;
        let span = self.max - self.min;
        (0..self.steps)
            .map(|k| if k == last { self.max } else { self.min + span * k as f64 / last as f64 })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrossCheck {
    /// Periods of Gaussian evolution from vacuum per grid point.
    pub periods: usize,
}

impl Default for CrossCheck {
    fn default() -> Self {
        Self { periods: 1000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub gamma_tau1: Range,
    pub omega_tau2: Range,
    pub epsilon: f64,
    pub cross_check: Option<CrossCheck>,
}

impl Default for SweepConfig {
    /// The stability-chart window: `Γτ₁ ∈ [0, 1.5]`, `Ωτ₂ ∈ [0, π]`, 151 × 151.
    fn default() -> Self {
        Self {
            gamma_tau1: Range { min: 0.0, max: 1.5, steps: 151 },
            omega_tau2: Range { min: 0.0, max: std::f64::consts::PI, steps: 151 },
            epsilon: DEFAULT_EPSILON,
            cross_check: None,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        self.gamma_tau1.validate("gamma_tau1")?;
        self.omega_tau2.validate("omega_tau2")?;
        validate_epsilon(self.epsilon)?;
        if let Some(cc) = &self.cross_check {
            if cc.periods == 0 {
                return Err(CliError::usage("cross_check.periods must be positive"));
            }
        }
        Ok(())
    }
}

/// JSON form of an initial state: `"vacuum"`, `{"coherent": [[re, im], ...]}`,
/// `{"squeezed": [[r, phi], ...]}` or `{"number": [n_a, n_b]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialSpec {
    Vacuum,
    Coherent(Vec<[f64; 2]>),
    Squeezed(Vec<[f64; 2]>),
    Number(Vec<usize>),
}

impl InitialSpec {
    /// Accepts JSON, or a bare `vacuum`.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let text = text.trim();
        let json = if text.starts_with('{') || text.starts_with('"') { text.to_string() } else { format!("\"{text}\"") };
        serde_json::from_str(&json).map_err(|e| CliError::usage(format!("initial state: {e}")))
    }

    pub fn to_initial(&self) -> InitialState {
        match self {
            InitialSpec::Vacuum => InitialState::Vacuum,
            InitialSpec::Coherent(v) => InitialState::Coherent(v.iter().map(|&[re, im]| Complex64::new(re, im)).collect()),
            InitialSpec::Squeezed(v) => InitialState::Squeezed(v.iter().map(|&[r, phi]| (r, phi)).collect()),
            InitialSpec::Number(v) => InitialState::Number(v.clone()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Gaussian,
    Fock,
    Both,
}

impl Backend {
    pub fn uses_fock(self) -> bool {
        matches!(self, Backend::Fock | Backend::Both)
    }

    pub fn uses_gaussian(self) -> bool {
        matches!(self, Backend::Gaussian | Backend::Both)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateConfig {
    pub gamma: f64,
    pub tau1: f64,
    pub omega: f64,
    pub tau2: f64,
    pub periods: usize,
    /// 2 for the down-converter pair, 1 for the degenerate single mode.
    pub modes: usize,
    pub initial: InitialSpec,
    pub backend: Backend,
    /// Per-mode Fock cutoff; chosen from the schedule when absent.
    pub cutoff: Option<usize>,
    pub epsilon: f64,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            gamma: 0.0,
            tau1: 0.5,
            omega: 0.0,
            tau2: 0.5,
            periods: 10,
            modes: 2,
            initial: InitialSpec::Vacuum,
            backend: Backend::Gaussian,
            cutoff: None,
            epsilon: DEFAULT_EPSILON,
        }
    }
}

impl SimulateConfig {
    pub fn schedule(&self) -> Result<DriveSchedule, CliError> {
        DriveSchedule::new(self.gamma, self.tau1, self.omega, self.tau2, self.periods).map_err(CliError::from)
    }

    /// Checks the configuration and fills in the Fock cutoff when needed.
    pub fn resolve(mut self) -> Result<Self, CliError> {
        let schedule = self.schedule()?;
        if schedule.period() <= 0.0 {
            return Err(CliError::usage("tau1 + tau2 must be positive"));
        }
        validate_epsilon(self.epsilon)?;
        if !(self.modes == 1 || self.modes == 2) {
            return Err(CliError::usage("modes must be 1 or 2"));
        }
        if let Some(n) = self.initial.to_initial().mode_count() {
            if n != self.modes {
                return Err(CliError::usage(format!("initial state has {n} modes, run has {}", self.modes)));
            }
        }
        if self.backend.uses_gaussian() {
            if let InitialSpec::Number(n) = &self.initial {
                if n.iter().any(|&k| k > 0) {
                    return Err(CliError::usage("number states need the fock backend"));
                }
            }
        }
        if self.backend.uses_fock() {
            let cutoff = self.cutoff.unwrap_or_else(|| zeno_core::fock::default_cutoff(&schedule));
            if cutoff == 0 {
                return Err(CliError::usage("cutoff must be positive"));
            }
            self.cutoff = Some(cutoff);
        } else {
            self.cutoff = None;
        }
        Ok(self)
    }
}

/// Inputs of the classical coupling formula, all MKS.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimateInputs {
    /// Impedance of the medium, Ω.
    pub eta: f64,
    /// Second-order susceptibility, C·V⁻².
    pub chi2: f64,
    /// Angular frequencies of the two modes, s⁻¹.
    pub omega_a: f64,
    pub omega_b: f64,
    /// Pump intensity, W·m⁻².
    pub intensity: f64,
    /// Crystal length, m.
    pub length: f64,
}

impl Default for EstimateInputs {
    /// Typical values for a KTP-like crystal.
    fn default() -> Self {
        Self { eta: 220.0, chi2: 2e-23, omega_a: 3e15, omega_b: 3e15, intensity: 1e5, length: 1e-2 }
    }
}

impl EstimateInputs {
    pub fn validate(&self) -> Result<(), CliError> {
        let fields = [
            ("eta", self.eta),
            ("chi2", self.chi2),
            ("omega_a", self.omega_a),
            ("omega_b", self.omega_b),
            ("intensity", self.intensity),
            ("length", self.length),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(CliError::usage(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(())
    }
}

fn validate_epsilon(epsilon: f64) -> Result<(), CliError> {
    if !(epsilon.is_finite() && epsilon >= 0.0) {
        return Err(CliError::usage("epsilon must be finite and non-negative"));
    }
    Ok(())
}

/// Reads a config file; missing fields take their defaults.
pub fn load<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

/// SHA-256 of the compact JSON form, hex encoded.
pub fn config_hash<T: Serialize>(config: &T) -> String {
    let json = serde_json::to_string(config).expect("config serializes");
    hex::encode(Sha256::digest(json.as_bytes()))
}

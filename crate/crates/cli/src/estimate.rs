use crate::config::{config_hash, EstimateInputs};
use crate::report::{Cell, Report, Status};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    /// Nonlinear coupling per unit length, m⁻¹.
    pub gamma_c: f64,
    /// `Γ_c · l`, dimensionless: propagation length plays the role of time.
    pub gamma_tau1: f64,
}

/// `Γ_c = sqrt(η³/2 · χ² · ω_a · ω_b · I_p)` and `Γτ₁ = Γ_c · l`.
pub fn estimate(inputs: &EstimateInputs) -> Result<Estimate, CliError> {
    inputs.validate()?;
    let EstimateInputs { eta, chi2, omega_a, omega_b, intensity, length } = *inputs;
    let gamma_c = (eta.powi(3) / 2.0 * chi2 * chi2 * omega_a * omega_b * intensity).sqrt();
    Ok(Estimate { gamma_c, gamma_tau1: gamma_c * length })
}

pub fn cmd_estimate(inputs: &EstimateInputs) -> Result<Report, CliError> {
    let e = estimate(inputs)?;
    Ok(Report {
        command: "estimate",
        config: serde_json::to_value(inputs).expect("inputs serialize"),
        config_hash: config_hash(inputs),
        status: Status::Completed,
        extras: Vec::new(),
        columns: vec!["gamma_c", "gamma_tau1"],
        rows: vec![vec![Cell::Float(e.gamma_c), Cell::Float(e.gamma_tau1)]],
    })
}

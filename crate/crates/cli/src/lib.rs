//! Front end for stability sweeps, simulation runs and coupling estimates.
//!
//! Exit codes: 0 success, 1 numerical guard tripped (divergence or Fock
//! truncation; output is still written and marked), 2 usage or config error.

pub mod config;
pub mod estimate;
pub mod report;
pub mod simulate;
pub mod sweep;

pub use config::{Backend, CrossCheck, EstimateInputs, InitialSpec, Range, SimulateConfig, SweepConfig};
pub use estimate::{cmd_estimate, estimate, Estimate};
pub use report::{Format, Report, Status};
pub use simulate::{cmd_simulate, simulate, RunRecord};
pub use sweep::{cmd_sweep, sweep_points, SweepPoint};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Core(#[from] zeno_core::Error),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        use zeno_core::Error as E;
        match self {
            CliError::Core(E::InconsistentMatrix { .. } | E::Numeric { .. }) => 1,
            _ => 2,
        }
    }
}

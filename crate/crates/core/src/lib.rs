//! Switched down-conversion / linear-coupling dynamics.
//!
//! * [`floquet`]: segment transfer matrices, monodromy and trace-based stability.
//! * [`gaussian`]: symplectic evolution of one- and two-mode Gaussian states.
//! * [`fock`]: exact truncated number-basis propagation, used as an oracle.

pub mod error;
pub mod fock;
pub mod floquet;
pub mod gaussian;
pub mod initial;

pub use error::{Error, Result};
pub use floquet::{Classification, DriveSchedule, StabilityReport, TransferMatrix2};
pub use initial::InitialState;

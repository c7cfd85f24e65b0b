use num_complex::Complex64;

/// Initial state shared by the Gaussian and Fock backends.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    Vacuum,
    /// One coherent amplitude per mode.
    Coherent(Vec<Complex64>),
    /// One `(r, phi)` squeeze per mode, `xi = r e^{i phi}`.
    Squeezed(Vec<(f64, f64)>),
    /// Number state `|n_1[, n_2]>`. Not Gaussian unless all zero.
    Number(Vec<usize>),
}

impl InitialState {
    /// Number of modes the state pins down, if any.
    pub fn mode_count(&self) -> Option<usize> {
        match self {
            InitialState::Vacuum => None,
            InitialState::Coherent(v) => Some(v.len()),
            InitialState::Squeezed(v) => Some(v.len()),
            InitialState::Number(v) => Some(v.len()),
        }
    }
}

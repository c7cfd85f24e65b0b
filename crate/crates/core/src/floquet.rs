//! Two-segment Floquet analysis of the switched drive.
//!
//! One period consists of a down-conversion segment (hyperbolic flow of the
//! `(x+, p+)` quadrature pair, duration `tau1`) followed by a linear-coupling
//! segment (rotation, duration `tau2`). The one-period map is the monodromy
//! `A = A_s * A_u`, and the motion is bounded iff `|Tr A| < 2`.
//!
//! Every closed form below is evaluated on the dimensionless products
//! `gamma * tau1` and `omega * tau2`, never on the rates alone.

use std::fmt;
use std::ops::Mul;

use crate::error::{Error, Result};

/// Default width of the marginal band around `|Tr A| / 2 = 1`.
pub const DEFAULT_EPSILON: f64 = 1e-9;

/// Determinant tolerance accepted by [`classify`].
pub const DET_TOLERANCE: f64 = 1e-9;

fn check_finite(name: &str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be finite, got {value}")))
    }
}

fn check_non_negative(name: &str, value: f64) -> Result<()> {
    check_finite(name, value)?;
    if value < 0.0 {
        return Err(Error::InvalidParameter(format!("{name} must be non-negative, got {value}")));
    }
    Ok(())
}

/// Parameters of one switched-drive run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveSchedule {
    gamma: f64,
    tau1: f64,
    omega: f64,
    tau2: f64,
    periods: usize,
}

impl DriveSchedule {
    /// `gamma` and `omega` are rates (1/s), `tau1` and `tau2` durations (s).
    pub fn new(gamma: f64, tau1: f64, omega: f64, tau2: f64, periods: usize) -> Result<Self> {
        check_non_negative("gamma", gamma)?;
        check_non_negative("tau1", tau1)?;
        check_non_negative("omega", omega)?;
        check_non_negative("tau2", tau2)?;
        let period = tau1 + tau2;
        if periods > 0 && period <= 0.0 {
            return Err(Error::InvalidParameter(
                "period tau1 + tau2 must be positive when periods > 0".into(),
            ));
        }
        Ok(Self { gamma, tau1, omega, tau2, periods })
    }

    /// Schedule with a unit period (`tau1 = tau2 = 1/2`) realising the given
    /// products. Floquet exponents of such a schedule are per period.
    pub fn from_products(gamma_tau1: f64, omega_tau2: f64, periods: usize) -> Result<Self> {
        check_non_negative("gamma_tau1", gamma_tau1)?;
        check_non_negative("omega_tau2", omega_tau2)?;
        Self::new(2.0 * gamma_tau1, 0.5, 2.0 * omega_tau2, 0.5, periods)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn tau1(&self) -> f64 {
        self.tau1
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn tau2(&self) -> f64 {
        self.tau2
    }

    pub fn periods(&self) -> usize {
        self.periods
    }

    pub fn period(&self) -> f64 {
        self.tau1 + self.tau2
    }

    pub fn gamma_tau1(&self) -> f64 {
        self.gamma * self.tau1
    }

    pub fn omega_tau2(&self) -> f64 {
        self.omega * self.tau2
    }

    pub fn with_periods(&self, periods: usize) -> Result<Self> {
        Self::new(self.gamma, self.tau1, self.omega, self.tau2, periods)
    }
}

/// Real 2x2 matrix acting on an `(x, p)` quadrature pair. Row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix2 {
    pub entries: [[f64; 2]; 2],
}

impl TransferMatrix2 {
    pub const IDENTITY: Self = Self { entries: [[1.0, 0.0], [0.0, 1.0]] };

    pub fn new(entries: [[f64; 2]; 2]) -> Self {
        Self { entries }
    }

    /// `[[cosh s, sinh s], [sinh s, cosh s]]`.
    pub fn hyperbolic(product: f64) -> Self {
        let (c, s) = (product.cosh(), product.sinh());
        Self::new([[c, s], [s, c]])
    }

    /// `[[cos s, sin s], [-sin s, cos s]]` (clockwise in the `(x, p)` plane).
    pub fn rotation(product: f64) -> Self {
        let (s, c) = product.sin_cos();
        Self::new([[c, s], [-s, c]])
    }

    pub fn det(&self) -> f64 {
        let [[a, b], [c, d]] = self.entries;
        a * d - b * c
    }

    pub fn trace(&self) -> f64 {
        self.entries[0][0] + self.entries[1][1]
    }

    pub fn half_trace(&self) -> f64 {
        self.trace().abs() / 2.0
    }

    pub fn transpose(&self) -> Self {
        let [[a, b], [c, d]] = self.entries;
        Self::new([[a, c], [b, d]])
    }

    /// Inverse of a unit-determinant matrix (the adjugate).
    pub fn symplectic_inverse(&self) -> Self {
        let [[a, b], [c, d]] = self.entries;
        Self::new([[d, -b], [-c, a]])
    }

    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        let [[a, b], [c, d]] = self.entries;
        [a * v[0] + b * v[1], c * v[0] + d * v[1]]
    }

    pub fn pow(&self, n: usize) -> Self {
        let mut result = Self::IDENTITY;
        let mut base = *self;
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                result = result * base;
            }
            base = base * base;
            k >>= 1;
        }
        result
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                m = m.max((self.entries[i][j] - other.entries[i][j]).abs());
            }
        }
        m
    }

    /// Uniform bound on the spectral norm of `A^n` over all `n >= 0`.
    ///
    /// For `|Tr A| < 2` and `det A = 1` the quadratic form
    /// `Q = J (A - A^-1)` is definite and invariant (`A^T Q A = Q`), so
    /// `|A^n| <= sqrt(cond(Q))`. Returns `None` when powers may grow.
    pub fn power_norm_bound(&self) -> Option<f64> {
        if self.max_abs_diff(&Self::IDENTITY) == 0.0 {
            return Some(1.0);
        }
        let minus_identity = Self::new([[-1.0, 0.0], [0.0, -1.0]]);
        if self.max_abs_diff(&minus_identity) == 0.0 {
            return Some(1.0);
        }
        if self.trace().abs() >= 2.0 {
            return None;
        }
        let [[a, b], [c, d]] = self.entries;
        // J (A - A^-1) with J = [[0, 1], [-1, 0]]
        let (q11, q12, q22) = (2.0 * c, d - a, -2.0 * b);
        let mid = 0.5 * (q11 + q22);
        let rad = (0.25 * (q11 - q22).powi(2) + q12 * q12).sqrt();
        let (l1, l2) = ((mid + rad).abs(), (mid - rad).abs());
        let (lo, hi) = if l1 < l2 { (l1, l2) } else { (l2, l1) };
        if lo <= 0.0 || !hi.is_finite() {
            return None;
        }
        Some((hi / lo).sqrt())
    }
}

impl Mul for TransferMatrix2 {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        let l = self.entries;
        let r = rhs.entries;
        let mut out = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = l[i][0] * r[0][j] + l[i][1] * r[1][j];
            }
        }
        Self::new(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    Stable,
    Marginal,
    Unstable,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::Stable => "stable",
            Classification::Marginal => "marginal",
            Classification::Unstable => "unstable",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityReport {
    /// `|Tr A| / 2`
    pub half_trace: f64,
    pub classification: Classification,
    /// Growth rate per unit time, zero unless unstable.
    pub floquet_exponent: f64,
    pub period: f64,
}

impl StabilityReport {
    /// Distance of the half-trace from the stability boundary.
    pub fn margin(&self) -> f64 {
        (self.half_trace - 1.0).abs()
    }
}

/// Transfer matrix of the down-conversion segment.
pub fn unstable_segment_matrix(gamma: f64, tau1: f64) -> Result<TransferMatrix2> {
    check_finite("gamma", gamma)?;
    check_finite("tau1", tau1)?;
    let product = gamma * tau1;
    check_finite("gamma * tau1", product)?;
    Ok(TransferMatrix2::hyperbolic(product))
}

/// Transfer matrix of the linear-coupling segment.
pub fn stable_segment_matrix(omega: f64, tau2: f64) -> Result<TransferMatrix2> {
    check_finite("omega", omega)?;
    check_finite("tau2", tau2)?;
    let product = omega * tau2;
    check_finite("omega * tau2", product)?;
    Ok(TransferMatrix2::rotation(product))
}

/// One-period map of `(x+, p+)`: the unstable segment first, then the stable one.
pub fn monodromy(schedule: &DriveSchedule) -> TransferMatrix2 {
    TransferMatrix2::rotation(schedule.omega_tau2()) * TransferMatrix2::hyperbolic(schedule.gamma_tau1())
}

/// One-period map of `(x-, p-)`, whose flow is the time reverse of the plus mode.
pub fn minus_mode_monodromy(schedule: &DriveSchedule) -> TransferMatrix2 {
    TransferMatrix2::rotation(-schedule.omega_tau2()) * TransferMatrix2::hyperbolic(-schedule.gamma_tau1())
}

pub fn classify(monodromy: &TransferMatrix2, period: f64, epsilon: f64) -> Result<StabilityReport> {
    let det = monodromy.det();
    if !det.is_finite() || (det - 1.0).abs() > DET_TOLERANCE {
        return Err(Error::InconsistentMatrix { det });
    }
    if !(period.is_finite() && period > 0.0) {
        return Err(Error::InvalidParameter(format!("period must be positive, got {period}")));
    }
    if !(epsilon.is_finite() && epsilon >= 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon must be non-negative, got {epsilon}")));
    }
    let half_trace = monodromy.half_trace();
    let classification = if half_trace < 1.0 - epsilon {
        Classification::Stable
    } else if half_trace > 1.0 + epsilon {
        Classification::Unstable
    } else {
        Classification::Marginal
    };
    let floquet_exponent = match classification {
        Classification::Unstable => (half_trace + (half_trace * half_trace - 1.0).sqrt()).ln() / period,
        _ => 0.0,
    };
    Ok(StabilityReport { half_trace, classification, floquet_exponent, period })
}

/// Monodromy plus its classification in one call.
pub fn analyze(schedule: &DriveSchedule, epsilon: f64) -> Result<(TransferMatrix2, StabilityReport)> {
    let a = monodromy(schedule);
    let period = schedule.period();
    let report = classify(&a, if period > 0.0 { period } else { 1.0 }, epsilon)?;
    Ok((a, report))
}

/// Leading-order stability predicate `omega * tau2 > gamma * tau1`.
pub fn small_tau_predicate(schedule: &DriveSchedule) -> bool {
    schedule.omega_tau2() > schedule.gamma_tau1()
}

/// Quadratic approximation `1 - (omega_tau2^2 - gamma_tau1^2) / 2` of the half-trace.
pub fn small_tau_half_trace(gamma_tau1: f64, omega_tau2: f64) -> f64 {
    1.0 - (omega_tau2 * omega_tau2 - gamma_tau1 * gamma_tau1) / 2.0
}

/// `(x+, p+)` sampled after every complete period; entry 0 is the input.
pub fn propagate_plus_mode(schedule: &DriveSchedule, x0: f64, p0: f64) -> Vec<[f64; 2]> {
    let a = monodromy(schedule);
    let mut out = Vec::with_capacity(schedule.periods() + 1);
    let mut v = [x0, p0];
    out.push(v);
    for _ in 0..schedule.periods() {
        v = a.apply(v);
        out.push(v);
    }
    out
}

/// Inverted pendulum with a vertically oscillating pivot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalPendulumParams {
    k1: f64,
    k2: f64,
    tau: f64,
}

impl ClassicalPendulumParams {
    pub fn new(k1: f64, k2: f64, tau: f64) -> Result<Self> {
        check_finite("k1", k1)?;
        check_finite("k2", k2)?;
        check_finite("tau", tau)?;
        if !(k1 > k2 && k2 > 0.0) {
            return Err(Error::InvalidParameter(format!("need k1 > k2 > 0, got k1 = {k1}, k2 = {k2}")));
        }
        if tau <= 0.0 {
            return Err(Error::InvalidParameter(format!("tau must be positive, got {tau}")));
        }
        Ok(Self { k1, k2, tau })
    }

    pub fn k1(&self) -> f64 {
        self.k1
    }

    pub fn k2(&self) -> f64 {
        self.k2
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }
}

/// `A_cl = A_2 A_1`; the report uses the full cycle `2 tau` as its period.
pub fn classical_pendulum_monodromy(
    params: &ClassicalPendulumParams,
    epsilon: f64,
) -> Result<(TransferMatrix2, StabilityReport)> {
    let (k1, k2, tau) = (params.k1, params.k2, params.tau);
    let (ch, sh) = ((k1 * tau).cosh(), (k1 * tau).sinh());
    let (s, c) = (k2 * tau).sin_cos();
    let a1 = TransferMatrix2::new([[ch, sh / k1], [k1 * sh, ch]]);
    let a2 = TransferMatrix2::new([[c, s / k2], [-k2 * s, c]]);
    let a = a2 * a1;
    let report = classify(&a, 2.0 * tau, epsilon)?;
    Ok((a, report))
}

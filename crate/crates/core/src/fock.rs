//! Truncated number-basis oracle.
//!
//! States live in `span{|n_a, n_b> : n_a, n_b <= D}` (or `|n>` for one
//! mode), ordered lexicographically: index `n_a (D + 1) + n_b`. Ladder
//! operators are truncated so that creation out of level `D` gives zero.
//!
//! Both segment Hamiltonians conserve a quantum number (`n_a + n_b` or
//! `n_a - n_b` for two modes, parity for one), so their matrices are block
//! diagonal. Unitaries are formed by Hermitian eigendecomposition of each
//! connected block, which is exact and keeps the cost per block small.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::floquet::{self, DriveSchedule};
use crate::initial::InitialState;

/// Population allowed in the top 10% of levels before a state is
/// considered truncation-unsafe.
pub const LEAKAGE_THRESHOLD: f64 = 1e-8;

/// Upper limit applied by [`default_cutoff`].
pub const MAX_DEFAULT_CUTOFF: usize = 400;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn check_modes(modes: usize) -> Result<()> {
    if modes == 1 || modes == 2 {
        Ok(())
    } else {
        Err(Error::InvalidState(format!("mode count must be 1 or 2, got {modes}")))
    }
}

fn check_cutoff(cutoff: usize) -> Result<()> {
    if cutoff >= 1 {
        Ok(())
    } else {
        Err(Error::InvalidCutoff { cutoff, reason: "cutoff must be at least 1".into() })
    }
}

fn basis_dim(modes: usize, cutoff: usize) -> usize {
    (cutoff + 1).pow(modes as u32)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    modes: usize,
    cutoff: usize,
    amplitudes: DVector<Complex64>,
}

impl FockState {
    /// Normalizes the given amplitudes; fails on a zero or non-finite vector.
    pub fn from_amplitudes(modes: usize, cutoff: usize, amplitudes: DVector<Complex64>) -> Result<Self> {
        check_modes(modes)?;
        check_cutoff(cutoff)?;
        let dim = basis_dim(modes, cutoff);
        if amplitudes.len() != dim {
            return Err(Error::InvalidState(format!("expected {dim} amplitudes, got {}", amplitudes.len())));
        }
        let norm = amplitudes.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidState(format!("cannot normalize amplitudes with norm {norm}")));
        }
        Ok(Self { modes, cutoff, amplitudes: amplitudes / Complex64::new(norm, 0.0) })
    }

    pub fn vacuum(modes: usize, cutoff: usize) -> Result<Self> {
        Self::number(&vec![0; modes], cutoff)
    }

    pub fn number(occupations: &[usize], cutoff: usize) -> Result<Self> {
        let modes = occupations.len();
        check_modes(modes)?;
        check_cutoff(cutoff)?;
        if let Some(&n) = occupations.iter().find(|&&n| n > cutoff) {
            return Err(Error::InvalidCutoff { cutoff, reason: format!("cannot host occupation {n}") });
        }
        let mut amplitudes = DVector::from_element(basis_dim(modes, cutoff), ZERO);
        amplitudes[index_of(occupations, cutoff)] = Complex64::new(1.0, 0.0);
        Ok(Self { modes, cutoff, amplitudes })
    }

    /// Product of coherent states, truncated at the cutoff and renormalized.
    pub fn coherent(alphas: &[Complex64], cutoff: usize) -> Result<Self> {
        let factors: Vec<Vec<Complex64>> = alphas
            .iter()
            .map(|&alpha| {
                let mut c = Vec::with_capacity(cutoff + 1);
                c.push(Complex64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0));
                for n in 0..cutoff {
                    let next = c[n] * alpha / ((n + 1) as f64).sqrt();
                    c.push(next);
                }
                c
            })
            .collect();
        Self::product(&factors, cutoff)
    }

    /// Product of squeezed vacua `S(r e^{i phi})|0>`, truncated and renormalized.
    pub fn squeezed_vacuum(squeezes: &[(f64, f64)], cutoff: usize) -> Result<Self> {
        let factors: Vec<Vec<Complex64>> = squeezes
            .iter()
            .map(|&(r, phi)| {
                let ratio = -Complex64::from_polar(r.tanh(), phi);
                let mut c = vec![ZERO; cutoff + 1];
                c[0] = Complex64::new(1.0 / r.cosh().sqrt(), 0.0);
                let mut m = 0;
                while 2 * m + 2 <= cutoff {
                    let k = 2 * m;
                    c[k + 2] = c[k] * ratio * (((k + 1) * (k + 2)) as f64).sqrt() / (2.0 * (m + 1) as f64);
                    m += 1;
                }
                c
            })
            .collect();
        Self::product(&factors, cutoff)
    }

    fn product(factors: &[Vec<Complex64>], cutoff: usize) -> Result<Self> {
        let modes = factors.len();
        check_modes(modes)?;
        check_cutoff(cutoff)?;
        let amplitudes = match factors {
            [a] => DVector::from_column_slice(a),
            [a, b] => DVector::from_iterator(
                basis_dim(2, cutoff),
                a.iter().flat_map(|&x| b.iter().map(move |&y| x * y)),
            ),
            _ => unreachable!(),
        };
        Self::from_amplitudes(modes, cutoff, amplitudes)
    }

    pub fn from_initial(initial: &InitialState, modes: usize, cutoff: usize) -> Result<Self> {
        if let Some(m) = initial.mode_count() {
            if m != modes {
                return Err(Error::InvalidState(format!("initial state has {m} modes, expected {modes}")));
            }
        }
        match initial {
            InitialState::Vacuum => Self::vacuum(modes, cutoff),
            InitialState::Coherent(alphas) => Self::coherent(alphas, cutoff),
            InitialState::Squeezed(sq) => Self::squeezed_vacuum(sq, cutoff),
            InitialState::Number(ns) => Self::number(ns, cutoff),
        }
    }

    pub fn mode_count(&self) -> usize {
        self.modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn index(&self, occupations: &[usize]) -> Result<usize> {
        if occupations.len() != self.modes {
            return Err(Error::InvalidState(format!("expected {} occupations", self.modes)));
        }
        if let Some(&n) = occupations.iter().find(|&&n| n > self.cutoff) {
            return Err(Error::IndexOutOfRange { index: n, dim: self.cutoff + 1 });
        }
        Ok(index_of(occupations, self.cutoff))
    }

    pub fn amplitude(&self, occupations: &[usize]) -> Result<Complex64> {
        Ok(self.amplitudes[self.index(occupations)?])
    }

    /// Population with any occupation above `0.9 D`.
    pub fn leakage(&self) -> f64 {
        let limit = 0.9 * self.cutoff as f64;
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| occupations_of(*i, self.modes, self.cutoff).iter().any(|&n| n as f64 > limit))
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    pub fn is_truncation_safe(&self) -> bool {
        self.leakage() < LEAKAGE_THRESHOLD
    }
}

fn index_of(occupations: &[usize], cutoff: usize) -> usize {
    occupations.iter().fold(0, |acc, &n| acc * (cutoff + 1) + n)
}

/// Inverse of the lexicographic index; always two entries, the second zero
/// for a single mode.
fn occupations_of(index: usize, modes: usize, cutoff: usize) -> [usize; 2] {
    if modes == 1 {
        [index, 0]
    } else {
        [index / (cutoff + 1), index % (cutoff + 1)]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    Na,
    Nb,
    Ntotal,
    ProjectionOnto(usize),
}

pub fn expectation(state: &FockState, observable: Observable) -> Result<f64> {
    let weighted = |f: &dyn Fn([usize; 2]) -> usize| -> f64 {
        state
            .amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| a.norm_sqr() * f(occupations_of(i, state.modes, state.cutoff)) as f64)
            .sum()
    };
    match observable {
        Observable::Na => Ok(weighted(&|n| n[0])),
        Observable::Nb if state.modes == 1 => Err(Error::InvalidState("single-mode state has no b mode".into())),
        Observable::Nb => Ok(weighted(&|n| n[1])),
        Observable::Ntotal => Ok(weighted(&|n| n[0] + n[1])),
        Observable::ProjectionOnto(index) => state
            .amplitudes
            .get(index)
            .map(|a| a.norm_sqr())
            .ok_or(Error::IndexOutOfRange { index, dim: state.dim() }),
    }
}

fn photon_numbers(state: &FockState) -> Vec<f64> {
    let mut per_mode = vec![0.0; state.modes];
    for (i, a) in state.amplitudes.iter().enumerate() {
        let p = a.norm_sqr();
        let occ = occupations_of(i, state.modes, state.cutoff);
        for (k, n) in per_mode.iter_mut().enumerate() {
            *n += p * occ[k] as f64;
        }
    }
    per_mode
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HamiltonianLabel {
    /// `Γ(a†b† + ab)`
    TwoModeUnstable,
    /// `Ω(a†b + ab†)`
    TwoModeStable,
    /// `(Γ/2)(a†² + a²)`
    SingleModeUnstable,
    /// `(Ω/2)(a†a + aa†)`
    SingleModeStable,
}

impl HamiltonianLabel {
    pub fn mode_count(&self) -> usize {
        match self {
            HamiltonianLabel::TwoModeUnstable | HamiltonianLabel::TwoModeStable => 2,
            _ => 1,
        }
    }
}

/// Hermitian matrix over the truncated basis, stored as its nonzero
/// entries (both triangles, sorted by row then column).
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianMatrix {
    label: HamiltonianLabel,
    coupling: f64,
    cutoff: usize,
    dim: usize,
    entries: Vec<(usize, usize, Complex64)>,
}

pub fn build_hamiltonian(label: HamiltonianLabel, coupling: f64, cutoff: usize) -> Result<HamiltonianMatrix> {
    check_cutoff(cutoff)?;
    if !(coupling.is_finite() && coupling >= 0.0) {
        return Err(Error::InvalidParameter(format!("coupling must be finite and non-negative, got {coupling}")));
    }
    let d = cutoff;
    let modes = label.mode_count();
    let dim = basis_dim(modes, d);
    let mut entries = Vec::new();
    let mut push_pair = |i: usize, j: usize, v: f64| {
        if v != 0.0 {
            entries.push((i, j, Complex64::new(v, 0.0)));
            entries.push((j, i, Complex64::new(v, 0.0)));
        }
    };
    match label {
        HamiltonianLabel::TwoModeUnstable => {
            // a†b† |n_a, n_b> = sqrt((n_a + 1)(n_b + 1)) |n_a + 1, n_b + 1>
            for na in 0..d {
                for nb in 0..d {
                    let v = coupling * (((na + 1) * (nb + 1)) as f64).sqrt();
                    push_pair(index_of(&[na + 1, nb + 1], d), index_of(&[na, nb], d), v);
                }
            }
        }
        HamiltonianLabel::TwoModeStable => {
            // a†b |n_a, n_b> = sqrt((n_a + 1) n_b) |n_a + 1, n_b - 1>
            for na in 0..d {
                for nb in 1..=d {
                    let v = coupling * (((na + 1) * nb) as f64).sqrt();
                    push_pair(index_of(&[na + 1, nb - 1], d), index_of(&[na, nb], d), v);
                }
            }
        }
        HamiltonianLabel::SingleModeUnstable => {
            for n in 0..d.saturating_sub(1) {
                let v = 0.5 * coupling * (((n + 1) * (n + 2)) as f64).sqrt();
                push_pair(n + 2, n, v);
            }
        }
        HamiltonianLabel::SingleModeStable => {
            // a†a + aa† = 2n + 1 below the cutoff; a a† |D> = 0 after truncation
            for n in 0..=d {
                let aa_dag = if n < d { n + 1 } else { 0 };
                let v = 0.5 * coupling * (n + aa_dag) as f64;
                if v != 0.0 {
                    entries.push((n, n, Complex64::new(v, 0.0)));
                }
            }
        }
    }
    entries.sort_by_key(|&(i, j, _)| (i, j));
    Ok(HamiltonianMatrix { label, coupling, cutoff, dim, entries })
}

impl HamiltonianMatrix {
    pub fn label(&self) -> HamiltonianLabel {
        self.label
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(usize, usize, Complex64)] {
        &self.entries
    }

    pub fn element(&self, row: usize, col: usize) -> Complex64 {
        match self.entries.binary_search_by_key(&(row, col), |&(i, j, _)| (i, j)) {
            Ok(k) => self.entries[k].2,
            Err(_) => ZERO,
        }
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::from_element(self.dim, self.dim, ZERO);
        for &(i, j, v) in &self.entries {
            m[(i, j)] += v;
        }
        m
    }

    /// `max |H_ij - conj(H_ji)|`
    pub fn hermiticity_error(&self) -> f64 {
        self.entries.iter().fold(0.0, |acc, &(i, j, v)| acc.max((v - self.element(j, i).conj()).norm()))
    }

    /// `max |[H, n_a + n_b]_ij| = max |H_ij (N_j - N_i)|`.
    pub fn total_number_commutator_error(&self) -> f64 {
        let modes = self.label.mode_count();
        let total = |i: usize| {
            let o = occupations_of(i, modes, self.cutoff);
            (o[0] + o[1]) as f64
        };
        self.entries.iter().fold(0.0, |acc, &(i, j, v)| acc.max(v.norm() * (total(j) - total(i)).abs()))
    }

    /// Connected components of the sparsity graph, each sorted ascending.
    fn blocks(&self) -> Vec<Vec<usize>> {
        let mut parent: Vec<usize> = (0..self.dim).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for &(i, j, _) in &self.entries {
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            if ri != rj {
                parent[ri.max(rj)] = ri.min(rj);
            }
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut slot = vec![usize::MAX; self.dim];
        for i in 0..self.dim {
            let r = find(&mut parent, i);
            if slot[r] == usize::MAX {
                slot[r] = groups.len();
                groups.push(Vec::new());
            }
            groups[slot[r]].push(i);
        }
        groups
    }
}

#[derive(Debug, Clone, PartialEq)]
struct UnitaryBlock {
    indices: Vec<usize>,
    matrix: DMatrix<Complex64>,
}

/// Block-diagonal unitary over the truncated basis.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentUnitary {
    dim: usize,
    blocks: Vec<UnitaryBlock>,
}

impl SegmentUnitary {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn apply(&self, v: &DVector<Complex64>) -> DVector<Complex64> {
        let mut out = DVector::from_element(self.dim, ZERO);
        for b in &self.blocks {
            if let [i] = b.indices[..] {
                out[i] = b.matrix[(0, 0)] * v[i];
                continue;
            }
            let local = DVector::from_iterator(b.indices.len(), b.indices.iter().map(|&i| v[i]));
            let mapped = &b.matrix * local;
            for (k, &i) in b.indices.iter().enumerate() {
                out[i] = mapped[k];
            }
        }
        out
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::from_element(self.dim, self.dim, ZERO);
        for b in &self.blocks {
            for (r, &i) in b.indices.iter().enumerate() {
                for (c, &j) in b.indices.iter().enumerate() {
                    m[(i, j)] = b.matrix[(r, c)];
                }
            }
        }
        m
    }

    /// `max |U†U - I|`, evaluated block by block.
    pub fn unitarity_error(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| {
                let n = b.indices.len();
                let g = b.matrix.adjoint() * &b.matrix - DMatrix::<Complex64>::identity(n, n);
                g.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
            })
            .fold(0.0, f64::max)
    }
}

/// `U = exp(-i H t)` from the eigendecomposition of each block of `H`.
pub fn segment_unitary(h: &HamiltonianMatrix, duration: f64) -> Result<SegmentUnitary> {
    if !duration.is_finite() {
        return Err(Error::InvalidParameter(format!("duration must be finite, got {duration}")));
    }
    let mut blocks = Vec::new();
    for indices in h.blocks() {
        let n = indices.len();
        let mut local = DMatrix::from_element(n, n, ZERO);
        for (r, &i) in indices.iter().enumerate() {
            for (c, &j) in indices.iter().enumerate() {
                local[(r, c)] = h.element(i, j);
            }
        }
        let norm = local.iter().fold(0.0, |acc: f64, z| acc.max(z.norm()));
        let matrix = if n == 1 {
            let phase = -local[(0, 0)].re * duration;
            DMatrix::from_element(1, 1, Complex64::from_polar(1.0, phase))
        } else if local.iter().all(|z| z.im == 0.0) {
            // real symmetric block: cheaper decomposition, same unitary
            let real = local.map(|z| z.re);
            let eig = SymmetricEigen::try_new(real, 1e-15, 100_000).ok_or(Error::Numeric { dim: n, norm })?;
            let v = eig.eigenvectors.map(|x| Complex64::new(x, 0.0));
            let phases = eig.eigenvalues.map(|l| Complex64::from_polar(1.0, -l * duration));
            &v * DMatrix::from_diagonal(&phases) * v.transpose()
        } else {
            let eig = SymmetricEigen::try_new(local, 1e-15, 100_000).ok_or(Error::Numeric { dim: n, norm })?;
            let phases = eig.eigenvalues.map(|l| Complex64::from_polar(1.0, -l * duration));
            &eig.eigenvectors * DMatrix::from_diagonal(&phases) * eig.eigenvectors.adjoint()
        };
        blocks.push(UnitaryBlock { indices, matrix });
    }
    Ok(SegmentUnitary { dim: h.dim(), blocks })
}

/// Segment unitaries of one schedule, built once and reused every period.
#[derive(Debug, Clone)]
pub struct Propagator {
    modes: usize,
    cutoff: usize,
    unstable: SegmentUnitary,
    stable: SegmentUnitary,
}

impl Propagator {
    pub fn new(schedule: &DriveSchedule, modes: usize, cutoff: usize) -> Result<Self> {
        check_modes(modes)?;
        let (u_label, s_label) = if modes == 2 {
            (HamiltonianLabel::TwoModeUnstable, HamiltonianLabel::TwoModeStable)
        } else {
            (HamiltonianLabel::SingleModeUnstable, HamiltonianLabel::SingleModeStable)
        };
        let hu = build_hamiltonian(u_label, schedule.gamma(), cutoff)?;
        let hs = build_hamiltonian(s_label, schedule.omega(), cutoff)?;
        Ok(Self {
            modes,
            cutoff,
            unstable: segment_unitary(&hu, schedule.tau1())?,
            stable: segment_unitary(&hs, schedule.tau2())?,
        })
    }

    pub fn unstable(&self) -> &SegmentUnitary {
        &self.unstable
    }

    pub fn stable(&self) -> &SegmentUnitary {
        &self.stable
    }

    /// One full period, unstable segment first. Returns the norm before
    /// renormalization.
    fn step(&self, amplitudes: &mut DVector<Complex64>) -> f64 {
        let next = self.stable.apply(&self.unstable.apply(amplitudes));
        let norm = next.norm();
        *amplitudes = next / Complex64::new(norm, 0.0);
        norm
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodObservation {
    pub period: usize,
    /// `<n>` per mode.
    pub photons: Vec<f64>,
    pub total: f64,
    /// `| |psi| - 1 |` before renormalization.
    pub norm_drift: f64,
    pub leakage: f64,
    pub truncation_safe: bool,
}

#[derive(Debug, Clone)]
pub struct FockRun {
    pub states: Vec<FockState>,
    pub observations: Vec<PeriodObservation>,
    pub first_unsafe_period: Option<usize>,
}

impl FockRun {
    pub fn truncation_safe(&self) -> bool {
        self.first_unsafe_period.is_none()
    }
}

fn observe(state: &FockState, period: usize, norm_drift: f64) -> PeriodObservation {
    let photons = photon_numbers(state);
    let leakage = state.leakage();
    PeriodObservation {
        period,
        total: photons.iter().sum(),
        photons,
        norm_drift,
        leakage,
        truncation_safe: leakage < LEAKAGE_THRESHOLD,
    }
}

fn check_initial(state: &FockState) -> Result<()> {
    let leakage = state.leakage();
    if leakage >= LEAKAGE_THRESHOLD {
        return Err(Error::InvalidCutoff {
            cutoff: state.cutoff,
            reason: format!("initial state already has leakage {leakage:e}"),
        });
    }
    Ok(())
}

/// Alternates `U_u(τ₁)`, `U_s(τ₂)` for every period of the schedule,
/// recording observables at each period boundary (entry 0 is the input).
/// A run whose leakage exceeds [`LEAKAGE_THRESHOLD`] is completed but marked.
pub fn propagate(state: &FockState, schedule: &DriveSchedule) -> Result<FockRun> {
    check_initial(state)?;
    let propagator = Propagator::new(schedule, state.modes, state.cutoff)?;
    propagate_with(&propagator, state, schedule.periods())
}

pub fn propagate_with(propagator: &Propagator, state: &FockState, periods: usize) -> Result<FockRun> {
    if propagator.modes != state.modes || propagator.cutoff != state.cutoff {
        return Err(Error::InvalidState("propagator and state disagree on modes or cutoff".into()));
    }
    let mut current = state.clone();
    let mut states = Vec::with_capacity(periods + 1);
    let mut observations = Vec::with_capacity(periods + 1);
    let mut first_unsafe_period = None;
    let first = observe(&current, 0, (current.norm() - 1.0).abs());
    if !first.truncation_safe {
        first_unsafe_period = Some(0);
    }
    observations.push(first);
    states.push(current.clone());
    for period in 1..=periods {
        let norm = propagator.step(&mut current.amplitudes);
        let obs = observe(&current, period, (norm - 1.0).abs());
        if !obs.truncation_safe && first_unsafe_period.is_none() {
            first_unsafe_period = Some(period);
        }
        observations.push(obs);
        states.push(current.clone());
    }
    Ok(FockRun { states, observations, first_unsafe_period })
}

/// `max(20, ceil(10 sinh²(N Γτ₁) + 10))`, capped at [`MAX_DEFAULT_CUTOFF`].
pub fn default_cutoff(schedule: &DriveSchedule) -> usize {
    let growth = (schedule.periods() as f64 * schedule.gamma_tau1()).sinh().powi(2);
    let heuristic = (10.0 * growth + 10.0).ceil();
    if !heuristic.is_finite() || heuristic >= MAX_DEFAULT_CUTOFF as f64 {
        MAX_DEFAULT_CUTOFF
    } else {
        (heuristic as usize).max(20)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZenoVerdict {
    Growth,
    Bounded,
    /// Truncation became unsafe before growth was established.
    Indeterminate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZenoScanOptions {
    pub periods: usize,
    /// Cutoff of the first attempt at each point.
    pub cutoff: usize,
    /// A point whose leakage trips is retried at twice the cutoff, up to this.
    pub max_cutoff: usize,
    pub modes: usize,
    /// Growth is declared once `<n_total>` exceeds
    /// `growth_factor * max(initial <n_total>, 1)`.
    pub growth_factor: f64,
}

impl Default for ZenoScanOptions {
    fn default() -> Self {
        Self { periods: 100, cutoff: 40, max_cutoff: 100, modes: 2, growth_factor: 3.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZenoPoint {
    pub omega_tau2: f64,
    /// `|cos(Ωτ₂) cosh(Γτ₁)|` for reference.
    pub half_trace: f64,
    pub initial_total: f64,
    pub peak_total: f64,
    pub periods_run: usize,
    /// Cutoff of the attempt that produced the verdict.
    pub cutoff: usize,
    pub verdict: ZenoVerdict,
}

fn zeno_point(schedule: &DriveSchedule, modes: usize, cutoff: usize, growth_factor: f64) -> Result<ZenoPoint> {
    let propagator = Propagator::new(schedule, modes, cutoff)?;
    let mut state = FockState::vacuum(modes, cutoff)?;
    let initial_total: f64 = photon_numbers(&state).iter().sum();
    let threshold = growth_factor * initial_total.max(1.0);
    let mut peak_total = initial_total;
    let mut verdict = ZenoVerdict::Bounded;
    let mut periods_run = 0;
    for period in 1..=schedule.periods() {
        propagator.step(&mut state.amplitudes);
        periods_run = period;
        if !state.is_truncation_safe() {
            verdict = ZenoVerdict::Indeterminate;
            break;
        }
        let total: f64 = photon_numbers(&state).iter().sum();
        peak_total = peak_total.max(total);
        if total > threshold {
            verdict = ZenoVerdict::Growth;
            break;
        }
    }
    Ok(ZenoPoint {
        omega_tau2: schedule.omega_tau2(),
        half_trace: floquet::monodromy(schedule).half_trace(),
        initial_total,
        peak_total,
        periods_run,
        cutoff,
        verdict,
    })
}

/// Scans `Ωτ₂` at fixed `Γτ₁` with the Fock oracle, starting from vacuum,
/// and reports which points show photon growth.
///
/// A point is `Growth` as soon as a truncation-safe period exceeds the
/// growth threshold and `Bounded` if all periods stay below it. When the
/// leakage monitor trips first the point is retried with a doubled cutoff;
/// once `max_cutoff` is exhausted it is `Indeterminate`.
pub fn zeno_threshold_scan(
    gamma_tau1: f64,
    omega_tau2_grid: &[f64],
    options: &ZenoScanOptions,
) -> Result<Vec<ZenoPoint>> {
    if !(options.growth_factor.is_finite() && options.growth_factor > 1.0) {
        return Err(Error::InvalidParameter("growth factor must exceed 1".into()));
    }
    if options.max_cutoff < options.cutoff {
        return Err(Error::InvalidCutoff { cutoff: options.max_cutoff, reason: "max_cutoff below cutoff".into() });
    }
    omega_tau2_grid
        .iter()
        .map(|&omega_tau2| {
            if !(0.0..=std::f64::consts::PI).contains(&omega_tau2) {
                return Err(Error::InvalidParameter(format!("omega_tau2 {omega_tau2} outside [0, pi]")));
            }
            let schedule = DriveSchedule::from_products(gamma_tau1, omega_tau2, options.periods)?;
            let mut cutoff = options.cutoff;
            loop {
                let point = zeno_point(&schedule, options.modes, cutoff, options.growth_factor)?;
                if point.verdict != ZenoVerdict::Indeterminate || cutoff >= options.max_cutoff {
                    return Ok(point);
                }
                cutoff = (2 * cutoff).min(options.max_cutoff);
            }
        })
        .collect()
}

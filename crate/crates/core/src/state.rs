//! Dense statevector simulation of the graph-state circuits.
//!
//! Bit convention: qubit `k` is bit `k` of the basis index (little-endian).
//! Bitstrings are rendered qubit-0-first, so index `0b0001` on four qubits
//! prints as `"1000"`. Global phases are dropped everywhere.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::FRAC_PI_2;
use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{BipartiteGraph, VertexId};
use crate::params::QubitParams;
use crate::rng::ShotStreams;

/// Register size above which gate kernels split work across threads.
const PARALLEL_QUBITS: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StateError {
    #[error("control and target are both qubit {0}")]
    SameQubit(usize),
    #[error("qubit {qubit} out of range for a {n}-qubit register")]
    QubitOutOfRange { qubit: usize, n: usize },
    #[error("graph has {graph} vertices but {params} qubit parameters were given")]
    SizeMismatch { graph: usize, params: usize },
    #[error("a Pauli string needs at least one non-identity factor")]
    EmptyPauliString,
    #[error("parity support is empty")]
    EmptySupport,
    #[error("shot count must be positive")]
    ZeroShots,
    #[error("a register needs between 1 and 30 qubits, got {0}")]
    BadRegisterSize(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    /// Gate that rotates this Pauli's eigenbasis onto the computational basis:
    /// `G† Z G = σ`. Measuring `Z` after `G` therefore samples `σ`.
    ///
    /// `X` uses `RY(-π/2)` and `Y` uses `RX(π/2)`. `RY(+π/2)` would measure `-X`.
    pub fn basis_change(self) -> Option<Gate> {
        match self {
            Pauli::X => Some(Gate::Ry(-FRAC_PI_2)),
            Pauli::Y => Some(Gate::Rx(FRAC_PI_2)),
            Pauli::Z => None,
        }
    }

    fn matrix(self) -> [[Complex64; 2]; 2] {
        let (o, l, i) = (
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::i(),
        );
        match self {
            Pauli::X => [[o, l], [l, o]],
            Pauli::Y => [[o, -i], [i, o]],
            Pauli::Z => [[l, o], [o, -l]],
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pauli::X => "X",
            Pauli::Y => "Y",
            Pauli::Z => "Z",
        })
    }
}

/// Single-qubit gates used by the circuits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Gate {
    Pauli(Pauli),
    /// `exp(-iθX/2)`
    Rx(f64),
    /// `exp(-iθY/2)`
    Ry(f64),
    /// `exp(-iθZ/2)`
    Rz(f64),
    /// `diag(1, e^{iφ})`, equal to `Rz(φ)` up to global phase.
    Phase(f64),
}

impl Gate {
    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        match self {
            Gate::Pauli(p) => p.matrix(),
            Gate::Rx(t) => {
                let (s, co) = (t / 2.0).sin_cos();
                [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]]
            }
            Gate::Ry(t) => {
                let (s, co) = (t / 2.0).sin_cos();
                [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]
            }
            Gate::Rz(t) => [
                [Complex64::from_polar(1.0, -t / 2.0), c(0.0, 0.0)],
                [c(0.0, 0.0), Complex64::from_polar(1.0, t / 2.0)],
            ],
            Gate::Phase(p) => [
                [c(1.0, 0.0), c(0.0, 0.0)],
                [c(0.0, 0.0), Complex64::from_polar(1.0, p)],
            ],
        }
    }
}

/// Tensor product of single-qubit Paulis, identity on unlisted qubits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PauliString {
    ops: BTreeMap<VertexId, Pauli>,
}

impl PauliString {
    pub fn new(ops: impl IntoIterator<Item = (VertexId, Pauli)>) -> Result<Self, StateError> {
        let ops: BTreeMap<_, _> = ops.into_iter().collect();
        if ops.is_empty() {
            return Err(StateError::EmptyPauliString);
        }
        Ok(PauliString { ops })
    }

    pub fn single(q: VertexId, p: Pauli) -> Self {
        PauliString {
            ops: BTreeMap::from([(q, p)]),
        }
    }

    /// The same Pauli on every listed qubit.
    pub fn uniform(
        qubits: impl IntoIterator<Item = VertexId>,
        p: Pauli,
    ) -> Result<Self, StateError> {
        Self::new(qubits.into_iter().map(|q| (q, p)))
    }

    pub fn ops(&self) -> &BTreeMap<VertexId, Pauli> {
        &self.ops
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (q, p)) in self.ops.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{p}{q}")?;
        }
        Ok(())
    }
}

/// Normalized amplitudes over `2^n` basis states.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|00…0⟩`
    pub fn zero(n_qubits: usize) -> Result<Self, StateError> {
        if n_qubits == 0 || n_qubits > 30 {
            return Err(StateError::BadRegisterSize(n_qubits));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n_qubits, amps })
    }

    /// Wraps raw amplitudes. The caller is responsible for normalization.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, StateError> {
        let n = amps.len().trailing_zeros() as usize;
        if amps.len() != 1 << n || n == 0 {
            return Err(StateError::BadRegisterSize(n));
        }
        Ok(StateVector { n_qubits: n, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(Complex64::norm_sqr).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(Complex64::norm_sqr).collect()
    }

    fn check(&self, q: usize) -> Result<(), StateError> {
        if q < self.n_qubits {
            Ok(())
        } else {
            Err(StateError::QubitOutOfRange {
                qubit: q,
                n: self.n_qubits,
            })
        }
    }

    pub fn apply(&mut self, q: VertexId, gate: Gate) -> Result<(), StateError> {
        self.check(q.0)?;
        self.apply_matrix(q.0, gate.matrix());
        Ok(())
    }

    fn apply_matrix(&mut self, q: usize, m: [[Complex64; 2]; 2]) {
        let half = 1usize << q;
        let kernel = |chunk: &mut [Complex64]| {
            let (lo, hi) = chunk.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = m[0][0] * x + m[0][1] * y;
                *b = m[1][0] * x + m[1][1] * y;
            }
        };
        if self.n_qubits >= PARALLEL_QUBITS {
            self.amps.par_chunks_mut(half << 1).for_each(kernel);
        } else {
            self.amps.chunks_mut(half << 1).for_each(kernel);
        }
    }

    /// Flips `target` on every basis state whose `control` bit is set.
    pub fn apply_cnot(&mut self, control: VertexId, target: VertexId) -> Result<(), StateError> {
        let (c, t) = (control.0, target.0);
        self.check(c)?;
        self.check(t)?;
        if c == t {
            return Err(StateError::SameQubit(c));
        }
        let high = c.max(t);
        let half = 1usize << high;
        let (cbit, tbit) = (1usize << c, 1usize << t);
        let kernel = |chunk: &mut [Complex64]| {
            let (lo, hi) = chunk.split_at_mut(half);
            if t == high {
                // lo has target 0, hi has target 1
                for (j, (a, b)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
                    if j & cbit != 0 {
                        std::mem::swap(a, b);
                    }
                }
            } else {
                // hi holds every control-set index
                for j in 0..half {
                    if j & tbit == 0 {
                        hi.swap(j, j | tbit);
                    }
                }
            }
        };
        if self.n_qubits >= PARALLEL_QUBITS {
            self.amps.par_chunks_mut(half << 1).for_each(kernel);
        } else {
            self.amps.chunks_mut(half << 1).for_each(kernel);
        }
        Ok(())
    }

    /// `⟨ψ|P|ψ⟩`, real for Hermitian `P`.
    pub fn pauli_expectation(&self, p: &PauliString) -> Result<f64, StateError> {
        let (mut xmask, mut zmask, mut n_y) = (0usize, 0usize, 0u32);
        for (&q, &op) in p.ops() {
            self.check(q.0)?;
            let bit = 1usize << q.0;
            match op {
                Pauli::X => xmask |= bit,
                Pauli::Y => {
                    xmask |= bit;
                    zmask |= bit;
                    n_y += 1;
                }
                Pauli::Z => zmask |= bit,
            }
        }
        // P|i⟩ = i^{n_y} (-1)^{|i ∧ zmask|} |i ⊕ xmask⟩
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, &a) in self.amps.iter().enumerate() {
            let term = self.amps[i ^ xmask].conj() * a;
            if (i & zmask).count_ones() % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        let value = acc * Complex64::i().powu(n_y);
        debug_assert!(value.im.abs() < 1e-10, "non-real expectation {value}");
        Ok(value.re)
    }

    /// Samples computational-basis outcomes after the given basis rotations.
    pub fn sample(
        &self,
        pre_rotations: &[(VertexId, Gate)],
        shots: u64,
        seed: u64,
    ) -> Result<ShotRecord, StateError> {
        if shots == 0 {
            return Err(StateError::ZeroShots);
        }
        let mut rotated = self.clone();
        for &(q, g) in pre_rotations {
            rotated.apply(q, g)?;
        }
        let cdf = rotated.cumulative();
        let streams = ShotStreams::new(seed);
        let outcomes = (0..shots)
            .into_par_iter()
            .map(|shot| draw_outcome(&cdf, &mut streams.measurement(shot)));
        Ok(ShotRecord::from_outcomes(
            self.n_qubits,
            shots,
            seed,
            outcomes,
        ))
    }

    /// Running sum of outcome probabilities, for inverse-CDF sampling.
    pub fn cumulative(&self) -> Vec<f64> {
        let mut total = 0.0;
        self.amps
            .iter()
            .map(|a| {
                total += a.norm_sqr();
                total
            })
            .collect()
    }
}

/// Inverse-CDF draw of one basis index.
pub(crate) fn draw_outcome(cdf: &[f64], rng: &mut impl Rng) -> usize {
    let total = *cdf.last().expect("non-empty cdf");
    let u: f64 = rng.gen::<f64>() * total;
    cdf.partition_point(|&c| c <= u).min(cdf.len() - 1)
}

/// The product state with qubit `k` in `cos(θ_k/2)|0⟩ + e^{iφ_k} sin(θ_k/2)|1⟩`,
/// prepared by `RY(θ_k)` followed by a phase gate on each qubit.
pub fn prepare_initial(params: &QubitParams) -> Result<StateVector, StateError> {
    let mut state = StateVector::zero(params.len())?;
    for k in 0..params.len() {
        let q = VertexId(k);
        state.apply(q, Gate::Ry(params.theta(q)))?;
        state.apply(q, Gate::Phase(params.phi(q)))?;
    }
    Ok(state)
}

/// Applies one CNOT per edge, control in `U` and target in `V`, in edge-list order.
pub fn build_graph_state(
    g: &BipartiteGraph,
    params: &QubitParams,
) -> Result<StateVector, StateError> {
    if params.len() != g.vertex_count() {
        return Err(StateError::SizeMismatch {
            graph: g.vertex_count(),
            params: params.len(),
        });
    }
    let mut state = prepare_initial(params)?;
    for &(u, v) in g.edges() {
        state.apply_cnot(u, v)?;
    }
    Ok(state)
}

/// Outcome histogram of a sampling run.
///
/// Keys are basis indices (qubit `k` = bit `k`); [`ShotRecord::bitstring_counts`]
/// renders them qubit-0-first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShotRecord {
    pub n_qubits: usize,
    pub shots: u64,
    pub seed: u64,
    pub counts: BTreeMap<usize, u64>,
}

impl ShotRecord {
    pub(crate) fn from_outcomes(
        n_qubits: usize,
        shots: u64,
        seed: u64,
        outcomes: impl ParallelIterator<Item = usize>,
    ) -> Self {
        let counts = outcomes
            .fold(BTreeMap::new, |mut m, idx| {
                *m.entry(idx).or_insert(0u64) += 1;
                m
            })
            .reduce(BTreeMap::new, |mut a, b| {
                for (k, c) in b {
                    *a.entry(k).or_insert(0) += c;
                }
                a
            });
        ShotRecord {
            n_qubits,
            shots,
            seed,
            counts,
        }
    }

    /// Builds a record from qubit-0-first bitstrings.
    pub fn from_bitstrings<'a>(
        counts: impl IntoIterator<Item = (&'a str, u64)>,
        seed: u64,
    ) -> Result<Self, String> {
        let mut map = BTreeMap::new();
        let mut n_qubits = None;
        for (bits, c) in counts {
            if *n_qubits.get_or_insert(bits.len()) != bits.len() {
                return Err(format!("bitstring {bits:?} has inconsistent length"));
            }
            let mut idx = 0usize;
            for (k, ch) in bits.chars().enumerate() {
                match ch {
                    '0' => {}
                    '1' => idx |= 1 << k,
                    _ => return Err(format!("bad bitstring {bits:?}")),
                }
            }
            *map.entry(idx).or_insert(0) += c;
        }
        let n_qubits = n_qubits.ok_or("no outcomes")?;
        let shots = map.values().sum();
        Ok(ShotRecord {
            n_qubits,
            shots,
            seed,
            counts: map,
        })
    }

    pub fn bitstring(&self, index: usize) -> String {
        (0..self.n_qubits)
            .map(|k| if index >> k & 1 == 1 { '1' } else { '0' })
            .collect()
    }

    pub fn bitstring_counts(&self) -> BTreeMap<String, u64> {
        self.counts
            .iter()
            .map(|(&i, &c)| (self.bitstring(i), c))
            .collect()
    }

    /// Mean of `(-1)^{parity of the outcome restricted to support}`, the shot
    /// estimator of `⟨Π_{q ∈ support} Z_q⟩` in the measured basis.
    pub fn parity_estimate(&self, support: &BTreeSet<VertexId>) -> Result<f64, StateError> {
        if support.is_empty() {
            return Err(StateError::EmptySupport);
        }
        let mut mask = 0usize;
        for q in support {
            if q.0 >= self.n_qubits {
                return Err(StateError::QubitOutOfRange {
                    qubit: q.0,
                    n: self.n_qubits,
                });
            }
            mask |= 1 << q.0;
        }
        let signed: i64 = self
            .counts
            .iter()
            .map(|(&i, &c)| {
                if (i & mask).count_ones().is_multiple_of(2) {
                    c as i64
                } else {
                    -(c as i64)
                }
            })
            .sum();
        Ok(signed as f64 / self.shots as f64)
    }
}

//! Measurement protocols and the degree-parity inversion.
//!
//! *Entanglement distance.* The graph-state circuit runs three times, once
//! per Pauli axis. The basis change from [`Pauli::basis_change`] rotates the
//! measured qubit first. The three sampled means combine into
//! `E = 1 - (mx² + my² + mz²)`.
//!
//! *Parity correlators.* Two circuits are run. Every qubit is measured in the
//! X basis in one and in the computational basis in the other. Bit parities
//! over the relevant support estimate
//! `⟨Π_{U∪V} X⟩`, `⟨Π_U X⟩`, `⟨Π_{U∪V} Z⟩` and `⟨Π_V Z⟩`.
//!
//! *Inversion.* With uniform per-side angles, set `b = cosφ sinθ` and
//! `c = cosθ`. Then
//!
//! ```text
//! ⟨Π_U X⟩     = b_U^|U| · b_V^|V_odd|    ⟨Π_V Z⟩     = c_V^|V| · c_U^|U_odd|
//! ⟨Π_{U∪V} X⟩ = b_U^|U| · b_V^|V_even|   ⟨Π_{U∪V} Z⟩ = c_V^|V| · c_U^|U_even|
//! ```
//!
//! so `|V_odd| = (ln⟨Π_U X⟩ - |U| ln b_U) / ln b_V`, and likewise for the
//! other three counts. Every base must lie in `(0, 1)` and every correlator
//! must be positive. Otherwise the logarithms are undefined and the call fails
//! rather than extrapolating.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::analytic::{self, AnalyticError, Correlator};
use crate::graph::{BipartiteGraph, VertexId};
use crate::noise::{noisy_sample, NoiseError, NoiseModel};
use crate::params::{QubitParams, SideAngles};
use crate::rng::derive_seed;
use crate::state::{build_graph_state, Gate, Pauli, PauliString, ShotRecord, StateError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProtocolError {
    #[error("{base} = {value} lies outside (0, 1); the counts cannot be resolved at these angles")]
    NonInvertibleParameters { base: &'static str, value: f64 },
    #[error(
        "measured {correlator} = {value} is not positive; the estimate left the invertible domain"
    )]
    NonPositiveCorrelator {
        correlator: &'static str,
        value: f64,
    },
    #[error("parity inversion needs uniform angles on each side")]
    NonUniformParameters,
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Noise(#[from] NoiseError),
}

/// How a quantity was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Analytic,
    ExactStatevector,
    SampledIdeal,
    SampledNoisy,
}

/// Evaluation backend for a protocol.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Execution {
    /// Closed-form formulas.
    Analytic,
    /// Exact expectation values of the simulated statevector.
    Exact,
    /// Shot sampling, ideal when `noise` is `None`.
    Sampled {
        shots: u64,
        seed: u64,
        noise: Option<NoiseModel>,
    },
}

impl Execution {
    pub fn method(&self) -> Method {
        match self {
            Execution::Analytic => Method::Analytic,
            Execution::Exact => Method::ExactStatevector,
            Execution::Sampled { noise: None, .. } => Method::SampledIdeal,
            Execution::Sampled { noise: Some(m), .. } if m.is_ideal() => Method::SampledIdeal,
            Execution::Sampled { .. } => Method::SampledNoisy,
        }
    }

    fn sample(
        &self,
        g: &BipartiteGraph,
        params: &QubitParams,
        rotations: &[(VertexId, Gate)],
        label: u64,
    ) -> Result<ShotRecord, ProtocolError> {
        let Execution::Sampled { shots, seed, noise } = *self else {
            unreachable!("sample() is only called for sampled execution");
        };
        let circuit_seed = derive_seed(seed, label);
        Ok(match noise {
            Some(model) => noisy_sample(g, params, rotations, shots, circuit_seed, &model)?,
            None => build_graph_state(g, params)?.sample(rotations, shots, circuit_seed)?,
        })
    }
}

/// A measured or computed scalar with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EstimationResult {
    pub value: f64,
    pub stderr: f64,
    /// Zero for analytic and exact results.
    pub shots: u64,
    pub seed: Option<u64>,
    pub method: Method,
}

impl EstimationResult {
    fn noiseless(value: f64, method: Method) -> Self {
        EstimationResult {
            value,
            stderr: 0.0,
            shots: 0,
            seed: None,
            method,
        }
    }

    /// An exact value with no sampling error.
    pub fn exact(value: f64) -> Self {
        Self::noiseless(value, Method::ExactStatevector)
    }

    fn sampled(value: f64, stderr: f64, exec: &Execution) -> Self {
        let (shots, seed) = match *exec {
            Execution::Sampled { shots, seed, .. } => (shots, Some(seed)),
            _ => (0, None),
        };
        EstimationResult {
            value,
            stderr,
            shots,
            seed,
            method: exec.method(),
        }
    }
}

/// Binomial standard error of a ±1-valued mean.
fn pm1_stderr(mean: f64, shots: u64) -> f64 {
    ((1.0 - mean * mean).max(0.0) / shots as f64).sqrt()
}

/// `⟨σ^x⟩, ⟨σ^y⟩, ⟨σ^z⟩` of qubit `q`, one circuit per axis.
pub fn measure_bloch_means(
    g: &BipartiteGraph,
    params: &QubitParams,
    q: VertexId,
    exec: &Execution,
) -> Result<[EstimationResult; 3], ProtocolError> {
    g.side(q).map_err(AnalyticError::from)?;
    match *exec {
        Execution::Analytic => {
            let m = analytic::means(g, params, q)?;
            Ok(m.as_array()
                .map(|v| EstimationResult::noiseless(v, Method::Analytic)))
        }
        Execution::Exact => {
            let state = build_graph_state(g, params)?;
            let mut out = [EstimationResult::exact(0.0); 3];
            for (slot, p) in out.iter_mut().zip(Pauli::ALL) {
                slot.value = state.pauli_expectation(&PauliString::single(q, p))?;
            }
            Ok(out)
        }
        Execution::Sampled { shots, .. } => {
            let support = BTreeSet::from([q]);
            let mut out = [EstimationResult::exact(0.0); 3];
            for (axis, (slot, p)) in out.iter_mut().zip(Pauli::ALL).enumerate() {
                let rotations: Vec<_> = p.basis_change().map(|g| (q, g)).into_iter().collect();
                let record = exec.sample(g, params, &rotations, axis as u64)?;
                let m = record.parity_estimate(&support)?;
                *slot = EstimationResult::sampled(m, pm1_stderr(m, shots), exec);
            }
            Ok(out)
        }
    }
}

/// Entanglement distance of qubit `q`.
///
/// Sampled results carry the first-order error `2·√(Σ m_j²(1 - m_j²)) / √shots`.
pub fn measure_entanglement_distance(
    g: &BipartiteGraph,
    params: &QubitParams,
    q: VertexId,
    exec: &Execution,
) -> Result<EstimationResult, ProtocolError> {
    if let Execution::Analytic = exec {
        let e = analytic::entanglement_distance(g, params, q)?;
        return Ok(EstimationResult::noiseless(e, Method::Analytic));
    }
    let means = measure_bloch_means(g, params, q, exec)?;
    let m = means.map(|r| r.value);
    let value = 1.0 - m.iter().map(|x| x * x).sum::<f64>();
    Ok(match *exec {
        Execution::Sampled { shots, .. } => {
            let var: f64 = m.iter().map(|x| x * x * (1.0 - x * x)).sum();
            EstimationResult::sampled(
                value,
                2.0 * var.max(0.0).sqrt() / (shots as f64).sqrt(),
                exec,
            )
        }
        _ => EstimationResult::exact(value),
    })
}

/// The four global correlators.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ParityCorrelators {
    pub cxx_all: EstimationResult,
    pub cx_u: EstimationResult,
    pub czz_all: EstimationResult,
    pub cz_v: EstimationResult,
}

impl ParityCorrelators {
    pub fn get(&self, which: Correlator) -> &EstimationResult {
        match which {
            Correlator::XxAll => &self.cxx_all,
            Correlator::XU => &self.cx_u,
            Correlator::ZzAll => &self.czz_all,
            Correlator::ZV => &self.cz_v,
        }
    }
}

/// Runs the X-basis and Z-basis circuits and estimates all four correlators.
pub fn measure_parity_correlators(
    g: &BipartiteGraph,
    params: &QubitParams,
    exec: &Execution,
) -> Result<ParityCorrelators, ProtocolError> {
    let values: [EstimationResult; 4] = match *exec {
        Execution::Analytic => {
            let r = analytic::AnalyticReport::compute(g, params)?;
            Correlator::ALL.map(|c| EstimationResult::noiseless(r.correlator(c), Method::Analytic))
        }
        Execution::Exact => {
            let state = build_graph_state(g, params)?;
            let mut out = [EstimationResult::exact(0.0); 4];
            for (slot, c) in out.iter_mut().zip(Correlator::ALL) {
                let p = PauliString::uniform(c.support(g), c.pauli())?;
                slot.value = state.pauli_expectation(&p)?;
            }
            out
        }
        Execution::Sampled { shots, .. } => {
            let x_rotations: Vec<_> = g
                .vertices()
                .map(|q| (q, Pauli::X.basis_change().expect("X needs a rotation")))
                .collect();
            let x_record = exec.sample(g, params, &x_rotations, 10)?;
            let z_record = exec.sample(g, params, &[], 11)?;
            let mut out = [EstimationResult::exact(0.0); 4];
            for (slot, c) in out.iter_mut().zip(Correlator::ALL) {
                let record = if c.pauli() == Pauli::X {
                    &x_record
                } else {
                    &z_record
                };
                let support: BTreeSet<_> = c.support(g).into_iter().collect();
                let v = record.parity_estimate(&support)?;
                *slot = EstimationResult::sampled(v, pm1_stderr(v, shots), exec);
            }
            out
        }
    };
    let [cxx_all, cx_u, czz_all, cz_v] = values;
    Ok(ParityCorrelators {
        cxx_all,
        cx_u,
        czz_all,
        cz_v,
    })
}

/// A real-valued vertex count with its propagated standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CountEstimate {
    pub value: f64,
    pub stderr: f64,
}

impl CountEstimate {
    /// Nearest integer, and whether it lies more than `2·stderr` away.
    ///
    /// A `1e-9` floor keeps rounding noise in exact results from being flagged.
    pub fn rounded(&self) -> (i64, bool) {
        let r = self.value.round();
        (r as i64, (self.value - r).abs() > 2.0 * self.stderr + 1e-9)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OddCounts {
    pub u_odd: CountEstimate,
    pub v_odd: CountEstimate,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EvenCounts {
    pub u_even: CountEstimate,
    pub v_even: CountEstimate,
}

/// Odd and even counts on both sides, with the inputs that produced them.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ParityCountEstimate {
    pub u_odd: CountEstimate,
    pub v_odd: CountEstimate,
    pub u_even: CountEstimate,
    pub v_even: CountEstimate,
    pub correlators: ParityCorrelators,
    pub angles: SideAngles,
    pub u_count: usize,
    pub v_count: usize,
}

const BASE_EPS: f64 = 1e-12;

struct Bases {
    b_u: f64,
    b_v: f64,
    c_u: f64,
    c_v: f64,
}

impl Bases {
    fn checked(angles: &SideAngles) -> Result<Self, ProtocolError> {
        let bases = Bases {
            b_u: angles.phi_u.cos() * angles.theta_u.sin(),
            b_v: angles.phi_v.cos() * angles.theta_v.sin(),
            c_u: angles.theta_u.cos(),
            c_v: angles.theta_v.cos(),
        };
        for (base, value) in [
            ("cos(phi_U) sin(theta_U)", bases.b_u),
            ("cos(phi_V) sin(theta_V)", bases.b_v),
            ("cos(theta_U)", bases.c_u),
            ("cos(theta_V)", bases.c_v),
        ] {
            // ln(base) sits in a denominator; cos(π/2) rounds to ~6e-17, not 0
            if !(value > BASE_EPS && value < 1.0 - BASE_EPS) {
                return Err(ProtocolError::NonInvertibleParameters { base, value });
            }
        }
        Ok(bases)
    }
}

/// Solves `corr = fixed_base^fixed_count · base^k` for `k`.
fn invert(
    corr: &EstimationResult,
    name: &'static str,
    fixed_base: f64,
    fixed_count: usize,
    base: f64,
) -> Result<CountEstimate, ProtocolError> {
    if corr.value.is_nan() || corr.value <= 0.0 {
        return Err(ProtocolError::NonPositiveCorrelator {
            correlator: name,
            value: corr.value,
        });
    }
    let ln_base = base.ln();
    Ok(CountEstimate {
        // adding 0.0 turns a -0.0 from an exact zero count into 0.0
        value: (corr.value.ln() - fixed_count as f64 * fixed_base.ln()) / ln_base + 0.0,
        stderr: corr.stderr / (corr.value * ln_base.abs()),
    })
}

/// Inverts one correlator into the parity-set size it encodes:
/// `cx_U → |V_odd|`, `cxx_all → |V_even|`, `cz_V → |U_odd|`, `czz_all → |U_even|`.
pub fn count_from_correlator(
    which: Correlator,
    corr: &EstimationResult,
    angles: &SideAngles,
    u_count: usize,
    v_count: usize,
) -> Result<CountEstimate, ProtocolError> {
    let b = Bases::checked(angles)?;
    match which {
        Correlator::XU | Correlator::XxAll => invert(corr, which.name(), b.b_u, u_count, b.b_v),
        Correlator::ZV | Correlator::ZzAll => invert(corr, which.name(), b.c_v, v_count, b.c_u),
    }
}

/// `|V_odd|` from `⟨Π_U X⟩` and `|U_odd|` from `⟨Π_V Z⟩`.
pub fn estimate_odd_counts(
    cx_u: &EstimationResult,
    cz_v: &EstimationResult,
    angles: &SideAngles,
    u_count: usize,
    v_count: usize,
) -> Result<OddCounts, ProtocolError> {
    Ok(OddCounts {
        v_odd: count_from_correlator(Correlator::XU, cx_u, angles, u_count, v_count)?,
        u_odd: count_from_correlator(Correlator::ZV, cz_v, angles, u_count, v_count)?,
    })
}

/// `|V_even|` from `⟨Π_{U∪V} X⟩` and `|U_even|` from `⟨Π_{U∪V} Z⟩`.
pub fn estimate_even_counts(
    cxx_all: &EstimationResult,
    czz_all: &EstimationResult,
    angles: &SideAngles,
    u_count: usize,
    v_count: usize,
) -> Result<EvenCounts, ProtocolError> {
    Ok(EvenCounts {
        v_even: count_from_correlator(Correlator::XxAll, cxx_all, angles, u_count, v_count)?,
        u_even: count_from_correlator(Correlator::ZzAll, czz_all, angles, u_count, v_count)?,
    })
}

/// Measures the correlators and inverts all four parity counts.
pub fn estimate_parity_counts(
    g: &BipartiteGraph,
    params: &QubitParams,
    exec: &Execution,
) -> Result<ParityCountEstimate, ProtocolError> {
    let angles = params
        .uniform(g.u_count())
        .ok_or(ProtocolError::NonUniformParameters)?;
    Bases::checked(&angles)?;
    let correlators = measure_parity_correlators(g, params, exec)?;
    let (nu, nv) = (g.u_count(), g.v_count());
    let odd = estimate_odd_counts(&correlators.cx_u, &correlators.cz_v, &angles, nu, nv)?;
    let even = estimate_even_counts(&correlators.cxx_all, &correlators.czz_all, &angles, nu, nv)?;
    Ok(ParityCountEstimate {
        u_odd: odd.u_odd,
        v_odd: odd.v_odd,
        u_even: even.u_even,
        v_even: even.v_even,
        correlators,
        angles,
        u_count: nu,
        v_count: nv,
    })
}

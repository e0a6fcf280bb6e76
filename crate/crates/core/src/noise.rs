//! Stochastic Pauli noise by Monte-Carlo trajectories.
//!
//! A shot runs the circuit
//!
//! 1. per qubit: `RY(θ_k)`, then the phase gate `φ_k`,
//! 2. one CNOT per edge in edge-list order,
//! 3. the basis-change rotations,
//! 4. a computational-basis measurement,
//!
//! and independently draws faults: an `X` after each single-qubit gate with
//! probability `single_x_error`, a two-qubit Pauli after each CNOT with
//! probability `cnot_error`, and a classical flip of each measured bit with
//! probability `readout_flip`. Fault draws come from the shot's fault stream
//! in circuit order, then readout flips in qubit order (see [`crate::rng`]).
//! Shots that draw no gate fault reuse the ideal outcome distribution.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{BipartiteGraph, VertexId};
use crate::params::QubitParams;
use crate::rng::ShotStreams;
use crate::state::{
    build_graph_state, draw_outcome, Gate, Pauli, ShotRecord, StateError, StateVector,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NoiseError {
    #[error("{name} = {value} is not a probability")]
    ProbabilityOutOfRange { name: &'static str, value: f64 },
    #[error("bad noise spec {0:?}: {1}")]
    BadSpec(String, String),
    #[error(transparent)]
    State(#[from] StateError),
}

/// Fault applied after a CNOT.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CnotChannel {
    /// Uniform over the 15 non-identity two-qubit Paulis.
    #[default]
    Depolarizing2,
    /// `X ⊗ X` on control and target.
    BitflipBoth,
}

impl CnotChannel {
    pub fn name(self) -> &'static str {
        match self {
            CnotChannel::Depolarizing2 => "depolarizing2",
            CnotChannel::BitflipBoth => "bitflip_both",
        }
    }
}

impl FromStr for CnotChannel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "depolarizing2" | "depolarizing" => Ok(CnotChannel::Depolarizing2),
            "bitflip_both" | "bitflip" => Ok(CnotChannel::BitflipBoth),
            other => Err(format!("unknown CNOT channel {other:?}")),
        }
    }
}

/// Error probabilities for trajectory sampling.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub readout_flip: f64,
    pub single_x_error: f64,
    pub cnot_error: f64,
    pub cnot_channel: CnotChannel,
}

impl Default for NoiseModel {
    /// Readout `1e-2`, single-qubit X `1e-4`, CNOT `1e-2` depolarizing.
    fn default() -> Self {
        NoiseModel {
            readout_flip: 1e-2,
            single_x_error: 1e-4,
            cnot_error: 1e-2,
            cnot_channel: CnotChannel::Depolarizing2,
        }
    }
}

impl NoiseModel {
    pub fn new(
        readout_flip: f64,
        single_x_error: f64,
        cnot_error: f64,
        cnot_channel: CnotChannel,
    ) -> Result<Self, NoiseError> {
        let m = NoiseModel {
            readout_flip,
            single_x_error,
            cnot_error,
            cnot_channel,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn ideal() -> Self {
        NoiseModel {
            readout_flip: 0.0,
            single_x_error: 0.0,
            cnot_error: 0.0,
            cnot_channel: CnotChannel::Depolarizing2,
        }
    }

    pub fn is_ideal(&self) -> bool {
        self.readout_flip == 0.0 && self.single_x_error == 0.0 && self.cnot_error == 0.0
    }

    pub fn validate(&self) -> Result<(), NoiseError> {
        for (name, value) in [
            ("readout", self.readout_flip),
            ("x1", self.single_x_error),
            ("cnot", self.cnot_error),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(NoiseError::ProbabilityOutOfRange { name, value });
            }
        }
        Ok(())
    }
}

/// `readout=..,x1=..,cnot=..,channel=..`, starting from the defaults.
impl FromStr for NoiseModel {
    type Err = NoiseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |why: String| NoiseError::BadSpec(s.to_string(), why);
        match s.trim() {
            "ideal" => return Ok(NoiseModel::ideal()),
            "default" => return Ok(NoiseModel::default()),
            _ => {}
        }
        let mut m = NoiseModel::default();
        for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| bad(format!("expected key=value, found {item:?}")))?;
            let prob = || {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| bad(format!("bad probability {v:?}")))
            };
            match k.trim() {
                "readout" => m.readout_flip = prob()?,
                "x1" => m.single_x_error = prob()?,
                "cnot" => m.cnot_error = prob()?,
                "channel" => m.cnot_channel = v.parse().map_err(bad)?,
                other => return Err(bad(format!("unknown key {other:?}"))),
            }
        }
        m.validate()?;
        Ok(m)
    }
}

impl fmt::Display for NoiseModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "readout={},x1={},cnot={},channel={}",
            self.readout_flip,
            self.single_x_error,
            self.cnot_error,
            self.cnot_channel.name()
        )
    }
}

#[derive(Clone, Copy, Debug)]
enum Op {
    Single(VertexId, Gate),
    Cnot(VertexId, VertexId),
}

#[derive(Clone, Copy, Debug)]
enum Fault {
    X(VertexId),
    Two(VertexId, Option<Pauli>, VertexId, Option<Pauli>),
}

const PAULI_OR_I: [Option<Pauli>; 4] = [None, Some(Pauli::X), Some(Pauli::Y), Some(Pauli::Z)];

fn circuit(
    g: &BipartiteGraph,
    params: &QubitParams,
    pre_rotations: &[(VertexId, Gate)],
) -> Vec<Op> {
    let mut ops = Vec::new();
    for q in g.vertices() {
        ops.push(Op::Single(q, Gate::Ry(params.theta(q))));
        ops.push(Op::Single(q, Gate::Phase(params.phi(q))));
    }
    ops.extend(g.edges().iter().map(|&(u, v)| Op::Cnot(u, v)));
    ops.extend(pre_rotations.iter().map(|&(q, gate)| Op::Single(q, gate)));
    ops
}

fn draw_faults(ops: &[Op], model: &NoiseModel, rng: &mut ChaCha8Rng) -> Vec<(usize, Fault)> {
    let mut faults = Vec::new();
    for (pos, op) in ops.iter().enumerate() {
        match *op {
            Op::Single(q, _) => {
                if model.single_x_error > 0.0 && rng.gen::<f64>() < model.single_x_error {
                    faults.push((pos, Fault::X(q)));
                }
            }
            Op::Cnot(c, t) => {
                if model.cnot_error > 0.0 && rng.gen::<f64>() < model.cnot_error {
                    let fault = match model.cnot_channel {
                        CnotChannel::BitflipBoth => {
                            Fault::Two(c, Some(Pauli::X), t, Some(Pauli::X))
                        }
                        CnotChannel::Depolarizing2 => {
                            let k = rng.gen_range(1..16usize);
                            Fault::Two(c, PAULI_OR_I[k / 4], t, PAULI_OR_I[k % 4])
                        }
                    };
                    faults.push((pos, fault));
                }
            }
        }
    }
    faults
}

fn run_trajectory(
    n: usize,
    ops: &[Op],
    faults: &[(usize, Fault)],
) -> Result<StateVector, StateError> {
    let mut state = StateVector::zero(n)?;
    let mut pending = faults.iter().peekable();
    for (pos, op) in ops.iter().enumerate() {
        match *op {
            Op::Single(q, gate) => state.apply(q, gate)?,
            Op::Cnot(c, t) => state.apply_cnot(c, t)?,
        }
        while let Some(&(_, fault)) = pending.next_if(|(p, _)| *p == pos) {
            match fault {
                Fault::X(q) => state.apply(q, Gate::Pauli(Pauli::X))?,
                Fault::Two(a, pa, b, pb) => {
                    if let Some(p) = pa {
                        state.apply(a, Gate::Pauli(p))?;
                    }
                    if let Some(p) = pb {
                        state.apply(b, Gate::Pauli(p))?;
                    }
                }
            }
        }
    }
    Ok(state)
}

/// Samples the graph-state circuit under `model`, one trajectory per shot.
///
/// With an all-zero model the result equals
/// `build_graph_state(g, params)?.sample(pre_rotations, shots, seed)` exactly.
pub fn noisy_sample(
    g: &BipartiteGraph,
    params: &QubitParams,
    pre_rotations: &[(VertexId, Gate)],
    shots: u64,
    seed: u64,
    model: &NoiseModel,
) -> Result<ShotRecord, NoiseError> {
    model.validate()?;
    if shots == 0 {
        return Err(StateError::ZeroShots.into());
    }
    let ideal = build_graph_state(g, params)?;
    if model.is_ideal() {
        return Ok(ideal.sample(pre_rotations, shots, seed)?);
    }
    let mut rotated = ideal;
    for &(q, gate) in pre_rotations {
        rotated.apply(q, gate)?;
    }
    let ideal_cdf = rotated.cumulative();
    let ops = circuit(g, params, pre_rotations);
    let n = g.vertex_count();
    let streams = ShotStreams::new(seed);

    let outcomes: Vec<usize> = (0..shots)
        .into_par_iter()
        .map(|shot| -> Result<usize, StateError> {
            let mut fault_rng = streams.faults(shot);
            let faults = draw_faults(&ops, model, &mut fault_rng);
            let mut measure_rng = streams.measurement(shot);
            let mut outcome = if faults.is_empty() {
                draw_outcome(&ideal_cdf, &mut measure_rng)
            } else {
                let state = run_trajectory(n, &ops, &faults)?;
                draw_outcome(&state.cumulative(), &mut measure_rng)
            };
            if model.readout_flip > 0.0 {
                for k in 0..n {
                    if fault_rng.gen::<f64>() < model.readout_flip {
                        outcome ^= 1 << k;
                    }
                }
            }
            Ok(outcome)
        })
        .collect::<Result<_, _>>()?;
    Ok(ShotRecord::from_outcomes(
        n,
        shots,
        seed,
        outcomes.into_par_iter(),
    ))
}

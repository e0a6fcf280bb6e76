//! Quantum states of bipartite graphs.
//!
//! A bipartite graph `G(U, V, E)` is turned into a circuit by preparing every
//! qubit in `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩` and applying one CNOT per edge,
//! control in `U`, target in `V`. This crate simulates those states and
//! relates their single-qubit entanglement and global Pauli correlators to
//! the graph's vertex degrees.
//!
//! * [`graph`]: parsing, validation, degrees and parity sets.
//! * [`state`]: dense statevector kernels, exact Pauli expectations, seeded sampling.
//! * [`analytic`]: closed forms for every mean, entanglement distance and correlator.
//! * [`noise`]: trajectory sampling under readout, single-qubit and CNOT faults.
//! * [`protocols`]: the measurement protocols and the parity-count inversion.
//!
//! ```
//! use qbigraph::{analytic, graph::BipartiteGraph, params::SideAngles, graph::VertexId};
//! use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
//!
//! let star = BipartiteGraph::star(3)?;
//! let params = SideAngles { theta_u: FRAC_PI_2, phi_u: 0.0, theta_v: FRAC_PI_4, phi_v: 0.0 }
//!     .for_graph(&star)?;
//! let e = analytic::entanglement_distance(&star, &params, VertexId(0))?;
//! assert!((e - 0.875).abs() < 1e-12);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod analytic;
pub mod graph;
pub mod noise;
pub mod params;
pub mod protocols;
pub mod rng;
pub mod state;

pub use analytic::{AnalyticReport, BlochMeans, Correlator};
pub use graph::{BipartiteGraph, DegreeSummary, VertexId};
pub use noise::{CnotChannel, NoiseModel};
pub use params::{QubitParams, SideAngles};
pub use protocols::{EstimationResult, Execution, Method, ParityCountEstimate};
pub use state::{Gate, Pauli, PauliString, ShotRecord, StateVector};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/states.md")]
    mod states {}
    #[doc = include_str!("../../../book/src/entanglement.md")]
    mod entanglement {}
    #[doc = include_str!("../../../book/src/correlators.md")]
    mod correlators {}
    #[doc = include_str!("../../../book/src/protocols.md")]
    mod protocols {}
    #[doc = include_str!("../../../book/src/noise.md")]
    mod noise {}
}

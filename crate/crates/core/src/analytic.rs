//! Closed-form Pauli means, entanglement distance and global correlators.
//!
//! Write `b_k = cosφ_k sinθ_k` (the initial `⟨σ^x_k⟩`) and `c_k = cosθ_k`
//! (the initial `⟨σ^z_k⟩`). Conjugating through `CNOT(u, v)` maps
//! `σ^x_u → σ^x_u σ^x_v` and `σ^z_v → σ^z_u σ^z_v`, which gives
//!
//! | quantity | value |
//! |---|---|
//! | `⟨σ^x_u⟩`, `⟨σ^y_u⟩` | `cosφ_u sinθ_u · Π_{m∈N(u)} b_m`, `sinφ_u sinθ_u · Π_{m∈N(u)} b_m` |
//! | `⟨σ^z_u⟩` | `cosθ_u` |
//! | `⟨σ^x_v⟩` | `cosφ_v sinθ_v` |
//! | `⟨σ^y_v⟩`, `⟨σ^z_v⟩` | `sinφ_v sinθ_v · Π_{m∈N(v)} c_m`, `cosθ_v · Π_{m∈N(v)} c_m` |
//! | `⟨Π_{U∪V} σ^x⟩` | `Π_U b_u · Π_{V_even} b_v` |
//! | `⟨Π_U σ^x⟩` | `Π_U b_u · Π_{V_odd} b_v` |
//! | `⟨Π_{U∪V} σ^z⟩` | `Π_V c_v · Π_{U_even} c_u` |
//! | `⟨Π_V σ^z⟩` | `Π_V c_v · Π_{U_odd} c_u` |
//!
//! A `V` vertex of degree `d` appears `d + 1` times in the all-qubit X
//! product, so it survives exactly when `d` is even. Empty products are 1.

use serde::Serialize;
use thiserror::Error;

use crate::graph::{BipartiteGraph, DegreeSummary, GraphError, Side, VertexId};
use crate::params::QubitParams;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalyticError {
    #[error("vertex {vertex} is not on the {expected:?} side")]
    WrongSide { vertex: usize, expected: Side },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("graph has {graph} vertices but {params} qubit parameters were given")]
    SizeMismatch { graph: usize, params: usize },
}

/// Single-qubit Pauli means `(⟨σ^x⟩, ⟨σ^y⟩, ⟨σ^z⟩)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BlochMeans {
    pub mx: f64,
    pub my: f64,
    pub mz: f64,
}

impl BlochMeans {
    /// `1 - (mx² + my² + mz²)`
    pub fn entanglement_distance(&self) -> f64 {
        1.0 - (self.mx * self.mx + self.my * self.my + self.mz * self.mz)
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.mx, self.my, self.mz]
    }
}

/// Which global Pauli product a correlator measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Correlator {
    /// `⟨Π_{U∪V} σ^x⟩`
    XxAll,
    /// `⟨Π_U σ^x⟩`
    XU,
    /// `⟨Π_{U∪V} σ^z⟩`
    ZzAll,
    /// `⟨Π_V σ^z⟩`
    ZV,
}

impl Correlator {
    pub const ALL: [Correlator; 4] = [
        Correlator::XxAll,
        Correlator::XU,
        Correlator::ZzAll,
        Correlator::ZV,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Correlator::XxAll => "cxx_all",
            Correlator::XU => "cx_U",
            Correlator::ZzAll => "czz_all",
            Correlator::ZV => "cz_V",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
    }

    pub fn pauli(self) -> crate::state::Pauli {
        match self {
            Correlator::XxAll | Correlator::XU => crate::state::Pauli::X,
            Correlator::ZzAll | Correlator::ZV => crate::state::Pauli::Z,
        }
    }

    /// Qubits the Pauli product acts on.
    pub fn support(self, g: &BipartiteGraph) -> Vec<VertexId> {
        match self {
            Correlator::XxAll | Correlator::ZzAll => g.vertices().collect(),
            Correlator::XU => g.u_vertices().collect(),
            Correlator::ZV => g.v_vertices().collect(),
        }
    }
}

fn check_sizes(g: &BipartiteGraph, params: &QubitParams) -> Result<(), AnalyticError> {
    if params.len() == g.vertex_count() {
        Ok(())
    } else {
        Err(AnalyticError::SizeMismatch {
            graph: g.vertex_count(),
            params: params.len(),
        })
    }
}

fn expect_side(g: &BipartiteGraph, x: VertexId, side: Side) -> Result<(), AnalyticError> {
    if g.side(x)? == side {
        Ok(())
    } else {
        Err(AnalyticError::WrongSide {
            vertex: x.0,
            expected: side,
        })
    }
}

/// Pauli means of a `U` vertex.
pub fn mean_u(
    g: &BipartiteGraph,
    params: &QubitParams,
    u: VertexId,
) -> Result<BlochMeans, AnalyticError> {
    check_sizes(g, params)?;
    expect_side(g, u, Side::U)?;
    let spread: f64 = g
        .neighborhood(u)?
        .iter()
        .map(|&m| params.bloch_x(m))
        .product();
    Ok(BlochMeans {
        mx: params.bloch_x(u) * spread,
        my: params.bloch_y(u) * spread,
        mz: params.bloch_z(u),
    })
}

/// Pauli means of a `V` vertex.
pub fn mean_v(
    g: &BipartiteGraph,
    params: &QubitParams,
    v: VertexId,
) -> Result<BlochMeans, AnalyticError> {
    check_sizes(g, params)?;
    expect_side(g, v, Side::V)?;
    let controls: f64 = g
        .neighborhood(v)?
        .iter()
        .map(|&m| params.bloch_z(m))
        .product();
    Ok(BlochMeans {
        mx: params.bloch_x(v),
        my: params.bloch_y(v) * controls,
        mz: params.bloch_z(v) * controls,
    })
}

/// Pauli means of any vertex, dispatching on its side.
pub fn means(
    g: &BipartiteGraph,
    params: &QubitParams,
    q: VertexId,
) -> Result<BlochMeans, AnalyticError> {
    match g.side(q)? {
        Side::U => mean_u(g, params, q),
        Side::V => mean_v(g, params, q),
    }
}

/// Entanglement distance of qubit `q` with the rest of the register.
///
/// Uses the factored forms
/// `sin²θ_u (1 - Π_{N(u)} b_m²)` on `U` and
/// `1 - b_v² - (sin²φ_v sin²θ_v + cos²θ_v) Π_{N(v)} c_m²` on `V`,
/// which agree with `1 - |means|²` and stay non-negative under rounding.
pub fn entanglement_distance(
    g: &BipartiteGraph,
    params: &QubitParams,
    q: VertexId,
) -> Result<f64, AnalyticError> {
    check_sizes(g, params)?;
    let e = match g.side(q)? {
        Side::U => {
            let spread: f64 = g
                .neighborhood(q)?
                .iter()
                .map(|&m| params.bloch_x(m).powi(2))
                .product();
            params.theta(q).sin().powi(2) * (1.0 - spread)
        }
        Side::V => {
            let controls: f64 = g
                .neighborhood(q)?
                .iter()
                .map(|&m| params.bloch_z(m).powi(2))
                .product();
            let rest = params.bloch_y(q).powi(2) + params.bloch_z(q).powi(2);
            1.0 - params.bloch_x(q).powi(2) - rest * controls
        }
    };
    Ok(e.clamp(0.0, 1.0))
}

fn product_over<'a>(
    ids: impl IntoIterator<Item = &'a VertexId>,
    f: impl Fn(VertexId) -> f64,
) -> f64 {
    ids.into_iter().map(|&q| f(q)).product()
}

fn correlator_with(
    g: &BipartiteGraph,
    params: &QubitParams,
    parity: &DegreeSummary,
    which: Correlator,
) -> f64 {
    let b = |q| params.bloch_x(q);
    let c = |q| params.bloch_z(q);
    let u_all: Vec<VertexId> = g.u_vertices().collect();
    let v_all: Vec<VertexId> = g.v_vertices().collect();
    match which {
        Correlator::XxAll => product_over(&u_all, b) * product_over(&parity.v_even, b),
        Correlator::XU => product_over(&u_all, b) * product_over(&parity.v_odd, b),
        Correlator::ZzAll => product_over(&v_all, c) * product_over(&parity.u_even, c),
        Correlator::ZV => product_over(&v_all, c) * product_over(&parity.u_odd, c),
    }
}

/// Closed form of one global correlator.
pub fn correlator(
    g: &BipartiteGraph,
    params: &QubitParams,
    which: Correlator,
) -> Result<f64, AnalyticError> {
    check_sizes(g, params)?;
    Ok(correlator_with(g, params, &g.parity_sets(), which))
}

/// `⟨Π_{U∪V} σ^x⟩ = Π_U b_u · Π_{V_even} b_v`
pub fn correlator_xx_all(g: &BipartiteGraph, params: &QubitParams) -> Result<f64, AnalyticError> {
    correlator(g, params, Correlator::XxAll)
}

/// `⟨Π_U σ^x⟩ = Π_U b_u · Π_{V_odd} b_v`
pub fn correlator_x_u(g: &BipartiteGraph, params: &QubitParams) -> Result<f64, AnalyticError> {
    correlator(g, params, Correlator::XU)
}

/// `⟨Π_{U∪V} σ^z⟩ = Π_V c_v · Π_{U_even} c_u`
pub fn correlator_zz_all(g: &BipartiteGraph, params: &QubitParams) -> Result<f64, AnalyticError> {
    correlator(g, params, Correlator::ZzAll)
}

/// `⟨Π_V σ^z⟩ = Π_V c_v · Π_{U_odd} c_u`
pub fn correlator_z_v(g: &BipartiteGraph, params: &QubitParams) -> Result<f64, AnalyticError> {
    correlator(g, params, Correlator::ZV)
}

/// Every closed-form quantity for one graph and parameter set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalyticReport {
    /// Indexed by qubit.
    pub means: Vec<BlochMeans>,
    /// Entanglement distance, indexed by qubit.
    pub entanglement: Vec<f64>,
    pub cxx_all: f64,
    pub cx_u: f64,
    pub czz_all: f64,
    pub cz_v: f64,
}

impl AnalyticReport {
    pub fn compute(g: &BipartiteGraph, params: &QubitParams) -> Result<Self, AnalyticError> {
        check_sizes(g, params)?;
        let parity = g.parity_sets();
        let means = g
            .vertices()
            .map(|q| means(g, params, q))
            .collect::<Result<Vec<_>, _>>()?;
        let entanglement = g
            .vertices()
            .map(|q| entanglement_distance(g, params, q))
            .collect::<Result<Vec<_>, _>>()?;
        let corr = |c| correlator_with(g, params, &parity, c);
        Ok(AnalyticReport {
            means,
            entanglement,
            cxx_all: corr(Correlator::XxAll),
            cx_u: corr(Correlator::XU),
            czz_all: corr(Correlator::ZzAll),
            cz_v: corr(Correlator::ZV),
        })
    }

    pub fn correlator(&self, which: Correlator) -> f64 {
        match which {
            Correlator::XxAll => self.cxx_all,
            Correlator::XU => self.cx_u,
            Correlator::ZzAll => self.czz_all,
            Correlator::ZV => self.cz_v,
        }
    }
}

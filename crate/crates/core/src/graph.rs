//! Bipartite graphs as circuit topologies.
//!
//! Vertices are identified by their global qubit index: the `U` side occupies
//! `0..|U|` and the `V` side `|U|..|U|+|V|`, both in declaration order. Every
//! edge `(u, v)` becomes a CNOT with control `u` and target `v`, so an edge's
//! orientation is fixed by construction and never inferred.
//!
//! The text format is line oriented:
//!
//! ```text
//! # star graph K_{1,3}
//! U 1
//! V 3
//! 0 1
//! 0 2
//! 0 3
//! ```
//!
//! `#` starts a comment and blank lines are ignored.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default upper bound on `|U| + |V|` (one qubit per vertex).
pub const DEFAULT_QUBIT_LIMIT: usize = 24;

/// Global qubit index of a vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub usize);

impl VertexId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl From<usize> for VertexId {
    fn from(i: usize) -> Self {
        VertexId(i)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Which partition a vertex belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    U,
    V,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: malformed header: {reason}")]
    MalformedHeader { line: usize, reason: String },
    #[error("line {line}: malformed edge line {text:?}")]
    MalformedEdge { line: usize, text: String },
    #[error("both partitions must be non-empty (|U|={u_count}, |V|={v_count})")]
    EmptyPartition { u_count: usize, v_count: usize },
    #[error("graph has {requested} vertices, above the qubit limit of {limit}")]
    TooManyQubits { requested: usize, limit: usize },
    #[error("edge ({u}, {v}) has an endpoint outside 0..{n}")]
    EdgeEndpointOutOfRange { u: usize, v: usize, n: usize },
    #[error("edge ({u}, {v}) does not run from U (0..{u_count}) to V ({u_count}..{n})")]
    EdgeNotBipartite {
        u: usize,
        v: usize,
        u_count: usize,
        n: usize,
    },
    #[error("duplicate edge ({u}, {v})")]
    DuplicateEdge { u: usize, v: usize },
    #[error("vertex {vertex} is out of range for a graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
}

/// A bipartite graph `G(U, V, E)` with edges oriented from `U` to `V`.
///
/// Edge order is preserved; it is the order in which CNOTs are applied.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BipartiteGraph {
    u_count: usize,
    v_count: usize,
    edges: Vec<(VertexId, VertexId)>,
}

impl BipartiteGraph {
    /// Builds and validates a graph with the default qubit limit.
    pub fn new(
        u_count: usize,
        v_count: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        Self::with_qubit_limit(u_count, v_count, edges, DEFAULT_QUBIT_LIMIT)
    }

    pub fn with_qubit_limit(
        u_count: usize,
        v_count: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        limit: usize,
    ) -> Result<Self, GraphError> {
        if u_count == 0 || v_count == 0 {
            return Err(GraphError::EmptyPartition { u_count, v_count });
        }
        let n = u_count + v_count;
        if n > limit {
            return Err(GraphError::TooManyQubits {
                requested: n,
                limit,
            });
        }
        let mut seen = HashSet::new();
        let mut checked = Vec::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(GraphError::EdgeEndpointOutOfRange { u, v, n });
            }
            if u >= u_count || v < u_count {
                return Err(GraphError::EdgeNotBipartite { u, v, u_count, n });
            }
            if !seen.insert((u, v)) {
                return Err(GraphError::DuplicateEdge { u, v });
            }
            checked.push((VertexId(u), VertexId(v)));
        }
        Ok(BipartiteGraph {
            u_count,
            v_count,
            edges: checked,
        })
    }

    /// The complete bipartite graph `K_{1,m}` with vertex 0 as the hub.
    pub fn star(leaves: usize) -> Result<Self, GraphError> {
        Self::new(1, leaves, (1..=leaves).map(|v| (0, v)))
    }

    pub fn u_count(&self) -> usize {
        self.u_count
    }

    pub fn v_count(&self) -> usize {
        self.v_count
    }

    /// Total number of vertices, equal to the number of qubits.
    pub fn vertex_count(&self) -> usize {
        self.u_count + self.v_count
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    pub fn u_vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.u_count).map(VertexId)
    }

    pub fn v_vertices(&self) -> impl Iterator<Item = VertexId> {
        (self.u_count..self.vertex_count()).map(VertexId)
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.vertex_count()).map(VertexId)
    }

    pub fn side(&self, x: VertexId) -> Result<Side, GraphError> {
        self.check(x)?;
        Ok(if x.0 < self.u_count { Side::U } else { Side::V })
    }

    fn check(&self, x: VertexId) -> Result<(), GraphError> {
        if x.0 < self.vertex_count() {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange {
                vertex: x.0,
                n: self.vertex_count(),
            })
        }
    }

    /// Vertices adjacent to `x`. They always lie on the opposite side.
    pub fn neighborhood(&self, x: VertexId) -> Result<BTreeSet<VertexId>, GraphError> {
        self.check(x)?;
        Ok(self
            .edges
            .iter()
            .filter_map(|&(u, v)| {
                if u == x {
                    Some(v)
                } else if v == x {
                    Some(u)
                } else {
                    None
                }
            })
            .collect())
    }

    pub fn degree(&self, x: VertexId) -> Result<usize, GraphError> {
        self.check(x)?;
        Ok(self
            .edges
            .iter()
            .filter(|&&(u, v)| u == x || v == x)
            .count())
    }

    /// Degrees of all vertices, indexed by qubit.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertex_count()];
        for &(u, v) in &self.edges {
            deg[u.0] += 1;
            deg[v.0] += 1;
        }
        deg
    }

    /// Degree map and the four parity sets.
    pub fn parity_sets(&self) -> DegreeSummary {
        let degree = self.degrees();
        let split = |range: std::ops::Range<usize>| {
            let (odd, even): (Vec<usize>, Vec<usize>) = range.partition(|&i| degree[i] % 2 == 1);
            (
                odd.into_iter().map(VertexId).collect(),
                even.into_iter().map(VertexId).collect(),
            )
        };
        let (u_odd, u_even) = split(0..self.u_count);
        let (v_odd, v_even) = split(self.u_count..self.vertex_count());
        DegreeSummary {
            degree,
            u_odd,
            u_even,
            v_odd,
            v_even,
        }
    }

    /// Parses the line-oriented graph format with the default qubit limit.
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        Self::parse_with_limit(text, DEFAULT_QUBIT_LIMIT)
    }

    pub fn parse_with_limit(text: &str, limit: usize) -> Result<Self, GraphError> {
        let mut lines = text.lines().enumerate().filter_map(|(i, raw)| {
            let content = raw.split('#').next().unwrap_or("").trim();
            (!content.is_empty()).then_some((i + 1, content))
        });

        let mut header = |key: &str| -> Result<usize, GraphError> {
            let (line, content) = lines.next().ok_or_else(|| GraphError::MalformedHeader {
                line: 0,
                reason: format!("missing \"{key} <count>\" line"),
            })?;
            let mut parts = content.split_whitespace();
            match (parts.next(), parts.next(), parts.next()) {
                (Some(k), Some(n), None) if k == key => {
                    n.parse().map_err(|_| GraphError::MalformedHeader {
                        line,
                        reason: format!("bad count {n:?} for {key}"),
                    })
                }
                _ => Err(GraphError::MalformedHeader {
                    line,
                    reason: format!("expected \"{key} <count>\", found {content:?}"),
                }),
            }
        };
        let u_count = header("U")?;
        let v_count = header("V")?;

        let mut edges = Vec::new();
        for (line, content) in lines {
            let mut parts = content.split_whitespace().map(str::parse::<usize>);
            match (parts.next(), parts.next(), parts.next()) {
                (Some(Ok(u)), Some(Ok(v)), None) => edges.push((u, v)),
                _ => {
                    return Err(GraphError::MalformedEdge {
                        line,
                        text: content.to_string(),
                    })
                }
            }
        }
        Self::with_qubit_limit(u_count, v_count, edges, limit)
    }

    /// Renders the graph in the text format accepted by [`BipartiteGraph::parse`].
    pub fn to_text(&self) -> String {
        let mut out = format!("U {}\nV {}\n", self.u_count, self.v_count);
        for (u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }
}

impl std::str::FromStr for BipartiteGraph {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

/// Vertex degrees together with the odd/even partition of each side.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeSummary {
    /// Degree of each vertex, indexed by qubit.
    pub degree: Vec<usize>,
    pub u_odd: BTreeSet<VertexId>,
    pub u_even: BTreeSet<VertexId>,
    pub v_odd: BTreeSet<VertexId>,
    pub v_even: BTreeSet<VertexId>,
}

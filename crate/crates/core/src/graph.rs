//! Hidden-graph representation and brute-force ground truth.
//!
//! A [`Graph`] is simple, undirected and immutable. Every vertex keeps its
//! neighborhood twice: as a fixed-width bit set for word-parallel
//! intersections and as a sorted list for sparse scans.

use crate::bitset::BitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Vertex ids are `0..n`.
pub type Vertex = u32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("edge {{{u},{v}}} has an endpoint outside 0..{n}")]
    EndpointOutOfRange { u: Vertex, v: Vertex, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("common neighbors of a vertex with itself are undefined (vertex {0})")]
    SameVertex(Vertex),
    #[error("vertex {v} outside 0..{n}")]
    VertexOutOfRange { v: Vertex, n: usize },
    #[error("pair sets {0}")]
    InvalidPairSet(&'static str),
}

/// An unordered vertex pair `{u, v}` with `u < v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge(Vertex, Vertex);

impl Edge {
    /// Normalizes orientation; `None` for a self-loop.
    pub fn new(u: Vertex, v: Vertex) -> Option<Edge> {
        match u.cmp(&v) {
            std::cmp::Ordering::Less => Some(Edge(u, v)),
            std::cmp::Ordering::Greater => Some(Edge(v, u)),
            std::cmp::Ordering::Equal => None,
        }
    }

    #[inline]
    pub fn lo(self) -> Vertex {
        self.0
    }

    #[inline]
    pub fn hi(self) -> Vertex {
        self.1
    }

    pub fn endpoints(self) -> (Vertex, Vertex) {
        (self.0, self.1)
    }

    pub fn contains(self, x: Vertex) -> bool {
        self.0 == x || self.1 == x
    }

    /// The endpoint that is not `x`. `x` must be an endpoint.
    pub fn other(self, x: Vertex) -> Vertex {
        debug_assert!(self.contains(x));
        if self.0 == x {
            self.1
        } else {
            self.0
        }
    }
}

impl std::fmt::Display for Edge {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{{},{}}}", self.0, self.1)
    }
}

/// A simple undirected graph on vertices `0..n`.
#[derive(Clone)]
pub struct Graph {
    adjacency: Vec<BitSet>,
    neighbors: Vec<Vec<Vertex>>,
    edge_count: usize,
}

impl Graph {
    /// Builds a graph from an edge list. Pairs are deduplicated under
    /// orientation; self-loops and out-of-range endpoints are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Graph, GraphError>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let mut adjacency = vec![BitSet::new(n); n];
        let mut edge_count = 0;
        for (u, v) in edges {
            if u as usize >= n || v as usize >= n {
                return Err(GraphError::EndpointOutOfRange { u, v, n });
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            if adjacency[u as usize].insert(v as usize) {
                adjacency[v as usize].insert(u as usize);
                edge_count += 1;
            }
        }
        let neighbors = adjacency
            .iter()
            .map(|row| row.iter().map(|w| w as Vertex).collect())
            .collect();
        Ok(Graph {
            adjacency,
            neighbors,
            edge_count,
        })
    }

    pub fn empty(n: usize) -> Graph {
        Graph::from_edges(n, std::iter::empty()).expect("no edges")
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    #[inline]
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.neighbors[v as usize]
    }

    #[inline]
    pub fn adjacency(&self, v: Vertex) -> &BitSet {
        &self.adjacency[v as usize]
    }

    #[inline]
    pub fn degree(&self, v: Vertex) -> usize {
        self.neighbors[v as usize].len()
    }

    #[inline]
    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        (u as usize) < self.vertex_count() && self.adjacency[u as usize].contains(v as usize)
    }

    /// All edges, each once, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.neighbors.iter().enumerate().flat_map(|(u, row)| {
            let u = u as Vertex;
            row.iter().filter(move |&&w| w > u).map(move |&w| Edge(u, w))
        })
    }

    /// `N(x) ∩ N(y)`, i.e. the apexes of triangles on the pair `{x, y}`.
    pub fn common_neighbors(&self, x: Vertex, y: Vertex) -> Result<Vec<Vertex>, GraphError> {
        let n = self.vertex_count();
        for v in [x, y] {
            if v as usize >= n {
                return Err(GraphError::VertexOutOfRange { v, n });
            }
        }
        if x == y {
            return Err(GraphError::SameVertex(x));
        }
        Ok(self
            .adjacency(x)
            .intersection(self.adjacency(y))
            .iter()
            .map(|w| w as Vertex)
            .collect())
    }

    /// Exact triangle count: every edge contributes `|Γ(e)|`, and each
    /// triangle is seen once per edge.
    pub fn count_triangles_exact(&self) -> u64 {
        let per_edge: u64 = self
            .edges()
            .map(|e| self.adjacency(e.lo()).intersection_count(self.adjacency(e.hi())) as u64)
            .sum();
        debug_assert_eq!(per_edge % 3, 0);
        per_edge / 3
    }

    /// Disjoint union; vertices of `other` are shifted by `self.vertex_count()`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let shift = self.vertex_count() as Vertex;
        let edges = self
            .edges()
            .map(Edge::endpoints)
            .chain(other.edges().map(|e| (e.lo() + shift, e.hi() + shift)));
        Graph::from_edges(self.vertex_count() + other.vertex_count(), edges)
            .expect("union of valid graphs is valid")
    }
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.vertex_count())
            .field("m", &self.edge_count)
            .finish()
    }
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.neighbors == other.neighbors
    }
}

impl Eq for Graph {}

/// A set `P` of unordered vertex pairs, the input of an edge-emptiness query.
///
/// `Product` is the pair set `A × B` of two disjoint vertex sets, kept in
/// factored form so that large products never get materialized.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VertexPairSet {
    Explicit(Vec<Edge>),
    Product { left: Vec<Vertex>, right: Vec<Vertex> },
}

impl VertexPairSet {
    /// Collects pairs, deduplicating under orientation. Self-pairs are rejected.
    pub fn from_pairs<I>(pairs: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let mut edges = pairs
            .into_iter()
            .map(|(u, v)| Edge::new(u, v).ok_or(GraphError::SelfLoop(u)))
            .collect::<Result<Vec<_>, _>>()?;
        edges.sort_unstable();
        edges.dedup();
        Ok(VertexPairSet::Explicit(edges))
    }

    /// `A × B` for disjoint `A` and `B`.
    pub fn product(left: &[Vertex], right: &[Vertex]) -> Result<Self, GraphError> {
        let mut left = left.to_vec();
        let mut right = right.to_vec();
        left.sort_unstable();
        left.dedup();
        right.sort_unstable();
        right.dedup();
        if left.iter().any(|v| right.binary_search(v).is_ok()) {
            return Err(GraphError::InvalidPairSet("of a product must come from disjoint sides"));
        }
        Ok(VertexPairSet::Product { left, right })
    }

    pub fn len(&self) -> usize {
        match self {
            VertexPairSet::Explicit(e) => e.len(),
            VertexPairSet::Product { left, right } => left.len() * right.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `V(P)`: every vertex that appears in some pair.
    pub fn vertices(&self) -> Vec<Vertex> {
        let mut vs: Vec<Vertex> = match self {
            VertexPairSet::Explicit(e) => e.iter().flat_map(|e| [e.lo(), e.hi()]).collect(),
            VertexPairSet::Product { left, right } if !left.is_empty() && !right.is_empty() => {
                left.iter().chain(right).copied().collect()
            }
            VertexPairSet::Product { .. } => Vec::new(),
        };
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    pub fn contains(&self, e: Edge) -> bool {
        match self {
            VertexPairSet::Explicit(edges) => edges.binary_search(&e).is_ok(),
            VertexPairSet::Product { left, right } => {
                let (a, b) = e.endpoints();
                (left.binary_search(&a).is_ok() && right.binary_search(&b).is_ok())
                    || (left.binary_search(&b).is_ok() && right.binary_search(&a).is_ok())
            }
        }
    }
}

//! Deterministic test-corpus generators.

use crate::graph::{Graph, GraphError, Vertex};
use crate::rng::Seed;
use rand::Rng;

/// Erdős–Rényi `G(n, p)`: every pair independently with probability `p`.
pub fn gen_er(n: usize, p: f64, seed: Seed) -> Result<Graph, GraphError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(GraphError::InvalidPairSet("need an edge probability in [0, 1]"));
    }
    let mut rng = seed.stream(0);
    let mut edges = Vec::new();
    for u in 0..n as Vertex {
        for v in u + 1..n as Vertex {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges)
}

pub fn complete(n: usize) -> Graph {
    let edges = (0..n as Vertex).flat_map(|u| (u + 1..n as Vertex).map(move |v| (u, v)));
    Graph::from_edges(n, edges).expect("valid")
}

/// `K_{a,b}` with sides `0..a` and `a..a+b`.
pub fn complete_bipartite(a: usize, b: usize) -> Graph {
    let edges = (0..a as Vertex).flat_map(|u| (a as Vertex..(a + b) as Vertex).map(move |v| (u, v)));
    Graph::from_edges(a + b, edges).expect("valid")
}

/// A star with center `0` and leaves `1..=leaves`.
pub fn star(leaves: usize) -> Graph {
    Graph::from_edges(leaves + 1, (1..=leaves as Vertex).map(|v| (0, v))).expect("valid")
}

pub fn path(n: usize) -> Graph {
    Graph::from_edges(n, (1..n as Vertex).map(|v| (v - 1, v))).expect("valid")
}

/// Random bipartite graph between `0..a` and `a..a+b` with edge probability `p`.
pub fn gen_bipartite(a: usize, b: usize, p: f64, seed: Seed) -> Result<Graph, GraphError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(GraphError::InvalidPairSet("need an edge probability in [0, 1]"));
    }
    let mut rng = seed.stream(0);
    let mut edges = Vec::new();
    for u in 0..a as Vertex {
        for v in a as Vertex..(a + b) as Vertex {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(a + b, edges)
}

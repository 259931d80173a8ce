//! Edge enumeration, counting and sampling built only on BIS answers.
//!
//! Every routine here talks to the hidden graph through [`BisOracle`], so the
//! same code runs against a plain BIS oracle or one simulated through EE.
//! Set arguments are sorted internally; all splitting is by position in the
//! sorted order, i.e. by vertex id.

mod cut;
mod enumerate;
mod estimate;
mod neighborhood;
mod sample;
mod walk;

pub use enumerate::{enum_edges_bipartite, enum_edges_induced};
pub use estimate::{
    estimate_edge_count, estimate_edge_count_with, estimate_edges, estimate_edges_with, CountEstimate,
};
pub use neighborhood::{approx_degree, approx_degree_with, neighbors_of, random_neighbor, random_neighbor_with};
pub use sample::{sample_edge, sample_edge_with, EdgeSampler};
pub use walk::{depth_bound, walk, walk_distribution, WalkTrace};

pub(crate) use sample::sample_in_cell;
pub(crate) use walk::walk_sorted;

use crate::graph::Vertex;
use crate::oracle::OracleError;
use crate::rng::Seed;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PrimitiveError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("invalid approximation parameters: {0}")]
    InvalidParams(String),
    #[error("no edge to sample")]
    EmptyEdgeSet,
    #[error("vertex {0} must not belong to the target set")]
    VertexInSet(Vertex),
    #[error("need at least two vertices, got {0}")]
    TooFewVertices(usize),
}

/// Accuracy knobs shared by the approximate primitives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ApproxParams {
    pub epsilon: f64,
    pub delta: f64,
    pub seed: Seed,
    /// Walks per median-of-means group, in units of `1/epsilon^2`.
    pub c_var: f64,
}

impl ApproxParams {
    pub const DEFAULT_C_VAR: f64 = 48.0;

    pub fn new(epsilon: f64, delta: f64, seed: impl Into<Seed>) -> Result<Self, PrimitiveError> {
        let ap = Self {
            epsilon,
            delta,
            seed: seed.into(),
            c_var: Self::DEFAULT_C_VAR,
        };
        ap.validate()?;
        Ok(ap)
    }

    pub fn with_c_var(mut self, c_var: f64) -> Result<Self, PrimitiveError> {
        self.c_var = c_var;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), PrimitiveError> {
        let open_unit = |x: f64| x > 0.0 && x < 1.0;
        if !open_unit(self.epsilon) {
            return Err(PrimitiveError::InvalidParams(format!("epsilon {} not in (0,1)", self.epsilon)));
        }
        if !open_unit(self.delta) {
            return Err(PrimitiveError::InvalidParams(format!("delta {} not in (0,1)", self.delta)));
        }
        if !(self.c_var > 0.0 && self.c_var.is_finite()) {
            return Err(PrimitiveError::InvalidParams(format!("c_var {} must be positive", self.c_var)));
        }
        Ok(())
    }
}

/// `⌈log2 x⌉` for `x ≥ 1`.
pub(crate) fn ceil_log2(x: usize) -> u32 {
    debug_assert!(x >= 1);
    usize::BITS - (x - 1).leading_zeros()
}

pub(crate) fn sorted(xs: &[Vertex]) -> Vec<Vertex> {
    let mut v = xs.to_vec();
    v.sort_unstable();
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_validation() {
        assert!(ApproxParams::new(0.1, 0.05, 1).is_ok());
        assert!(ApproxParams::new(0.0, 0.05, 1).is_err());
        assert!(ApproxParams::new(0.1, 1.0, 1).is_err());
        assert!(ApproxParams::new(0.1, 0.1, 1).unwrap().with_c_var(-1.0).is_err());
    }

    #[test]
    fn ceil_log2_values() {
        assert_eq!((1..=9).map(ceil_log2).collect::<Vec<_>>(), vec![0, 1, 2, 2, 3, 3, 3, 3, 4]);
    }
}

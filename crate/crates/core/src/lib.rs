//! Triangle counting in hidden graphs through bipartite independent set
//! (BIS) and edge emptiness (EE) queries.

pub mod bitset;
pub mod edgelist;
pub mod experiment;
pub mod generators;
pub mod graph;
pub mod hard;
pub mod oracle;
pub mod primitives;
pub mod rng;
pub mod stats;
pub mod triangle;

pub use graph::{Edge, Graph, GraphError, Vertex, VertexPairSet};
pub use oracle::{BisOracle, Cell, EeBacked, LedgerSnapshot, OracleError, OracleHandle};
pub use rng::Seed;

/// Floating-point estimate type used throughout.
pub type Estimate = f64;
/// Exact rational arithmetic for audits of unbiasedness.
pub type ExactRatio = num_rational::Ratio<i128>;

/// Numeric types the generic helpers accept; `f64` and [`ExactRatio`] both
/// qualify.
pub trait Scalar: num_traits::Num + num_traits::FromPrimitive + Clone + PartialOrd + std::fmt::Debug {}

impl<T> Scalar for T where T: num_traits::Num + num_traits::FromPrimitive + Clone + PartialOrd + std::fmt::Debug {}

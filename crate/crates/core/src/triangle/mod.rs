//! Triangle estimation through BIS queries: the high-count estimator, the
//! sketch-based low-count estimator, and the guessing wrapper that picks
//! between them.

mod high;
mod low;

pub use high::{high_trial_expectation, triangle_est_high, HighState};
pub use low::{build_low_sketch, estimate_from_sketch, triangle_est_low, ClosureMode, LowSketch};

use crate::graph::Vertex;
use crate::oracle::{BisOracle, LedgerSnapshot};
use crate::primitives::{enum_edges_induced, estimate_edge_count_with, ApproxParams, PrimitiveError};
use crate::rng::Seed;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimateError {
    #[error(transparent)]
    Primitive(#[from] PrimitiveError),
    #[error("invalid estimator configuration: {0}")]
    InvalidConfig(String),
    #[error("sketch was built with different parameters: {0}")]
    SketchMismatch(&'static str),
}

impl From<crate::oracle::OracleError> for EstimateError {
    fn from(e: crate::oracle::OracleError) -> Self {
        EstimateError::Primitive(e.into())
    }
}

/// Accuracy target and every tunable constant of the estimators.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    pub epsilon: f64,
    /// Failure probability; `None` means `1/n`.
    pub delta: Option<f64>,
    pub seed: Seed,
    /// Multiplier on the number of high-count trials.
    pub c_high: f64,
    /// Multiplier on the vertex sampling rate of the low-count sketch.
    pub c_s: f64,
    /// Multiplier on the number of edge draws of the low-count sketch.
    pub c_f: f64,
    /// Multiplier on the heaviness threshold.
    pub c_heavy: f64,
    /// Smallest guess tried before falling back to exact counting.
    pub l_floor: f64,
    /// Median-of-means width (`c_var`) used when estimating the edge count.
    pub c_count: f64,
    /// Walks averaged per vertex-degree estimate in the high-count estimator.
    pub degree_walks: u32,
    pub closure: ClosureMode,
}

impl EstimatorConfig {
    pub fn new(epsilon: f64, seed: impl Into<Seed>) -> Self {
        Self {
            epsilon,
            delta: None,
            seed: seed.into(),
            c_high: 1.0,
            c_s: 0.1,
            c_f: 0.1,
            c_heavy: 0.1,
            l_floor: 1.0,
            c_count: 1.0,
            degree_walks: 16,
            closure: ClosureMode::WedgeProbe,
        }
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = Some(delta);
        self
    }

    pub fn validate(&self) -> Result<(), EstimateError> {
        let bad = |what: &str| Err(EstimateError::InvalidConfig(what.to_string()));
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return bad("epsilon must lie in (0,1)");
        }
        if let Some(d) = self.delta {
            if !(d > 0.0 && d < 1.0) {
                return bad("delta must lie in (0,1)");
            }
        }
        let positive = [self.c_high, self.c_s, self.c_f, self.c_heavy, self.l_floor, self.c_count];
        if positive.iter().any(|&c| !(c > 0.0 && c.is_finite())) {
            return bad("multipliers and l_floor must be positive");
        }
        if self.degree_walks == 0 {
            return bad("degree_walks must be at least 1");
        }
        Ok(())
    }

    /// The failure probability in effect on an `n`-vertex graph.
    pub fn delta_for(&self, n: usize) -> f64 {
        self.delta.unwrap_or_else(|| (1.0 / n.max(1) as f64).min(0.5))
    }

    /// `ln n`, floored at 1 so tiny graphs keep positive rates.
    pub(crate) fn log_n(n: usize) -> f64 {
        (n.max(3) as f64).ln()
    }
}

/// Which estimator produced the final answer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    High,
    Low,
    ExactFallback,
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Algorithm::High => "high",
            Algorithm::Low => "low",
            Algorithm::ExactFallback => "exact-fallback",
        })
    }
}

/// One wrapper iteration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GuessStep {
    pub l_guess: f64,
    pub estimate: f64,
    pub algorithm: Algorithm,
    /// Queries spent in this iteration.
    pub queries: LedgerSnapshot,
}

/// The geometric search over guesses.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GuessState {
    pub l_guess: f64,
    pub m_hat: f64,
    pub history: Vec<GuessStep>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub t_hat: f64,
    pub algorithm: Algorithm,
    pub l_used: f64,
    /// Totals of the oracle handle after the run.
    pub ledger: LedgerSnapshot,
    pub seed: Seed,
    #[serde(skip)]
    pub guesses: GuessState,
}

/// Number of vertex triples, `C(n, 3)`.
fn choose3(n: usize) -> f64 {
    let n = n as f64;
    n * (n - 1.0) * (n - 2.0) / 6.0
}

/// Estimate the number of triangles of the hidden graph.
///
/// The edge count is estimated once. Starting from `L = C(n,3)/2`, each
/// iteration runs the high-count estimator when `L ≥ m̂` and the low-count
/// one otherwise, accepts the estimate if it is at least `L/2`, and halves
/// `L` otherwise. Below `l_floor` all edges are enumerated and triangles
/// counted exactly.
pub fn triangle_est<O: BisOracle + ?Sized>(
    o: &O,
    cfg: &EstimatorConfig,
    n: usize,
) -> Result<EstimateReport, EstimateError> {
    cfg.validate()?;
    if n != o.vertex_count() {
        return Err(EstimateError::InvalidConfig(format!(
            "n = {n} but the oracle has {} vertices",
            o.vertex_count()
        )));
    }
    let m_hat = edge_count_estimate(o, cfg, n)?;

    let mut state = GuessState {
        l_guess: choose3(n) / 2.0,
        m_hat,
        history: Vec::new(),
    };
    let mut high = HighState::new(n, cfg.seed.derive(2));
    let mut sampler = crate::primitives::EdgeSampler::new(n);
    let mut iteration = 0u64;
    while state.l_guess >= cfg.l_floor {
        let before = o.ledger();
        let mut rng = cfg.seed.derive(3).stream(iteration);
        let l = state.l_guess;
        let (estimate, algorithm) = if l >= m_hat {
            (high.run(o, cfg, l, m_hat, &mut rng)?, Algorithm::High)
        } else {
            let sk = low::build_with(o, cfg, l, m_hat, n, &mut sampler, &mut rng)?;
            (estimate_from_sketch(&sk, cfg, l, m_hat)?, Algorithm::Low)
        };
        state.history.push(GuessStep {
            l_guess: l,
            estimate,
            algorithm,
            queries: o.ledger().since(&before),
        });
        if estimate >= l / 2.0 {
            return Ok(EstimateReport {
                t_hat: estimate,
                algorithm,
                l_used: l,
                ledger: o.ledger(),
                seed: cfg.seed,
                guesses: state,
            });
        }
        state.l_guess = l / 2.0;
        iteration += 1;
    }
    let t_hat = exact_count(o, n)? as f64;
    Ok(EstimateReport {
        t_hat,
        algorithm: Algorithm::ExactFallback,
        l_used: state.l_guess,
        ledger: o.ledger(),
        seed: cfg.seed,
        guesses: state,
    })
}

/// The edge-count estimate the wrapper starts from: accuracy `ε/4`,
/// median-of-means width `c_count`.
pub fn edge_count_estimate<O: BisOracle + ?Sized>(o: &O, cfg: &EstimatorConfig, n: usize) -> Result<f64, EstimateError> {
    let ap = ApproxParams::new(cfg.epsilon / 4.0, cfg.delta_for(n), cfg.seed.derive(0))?.with_c_var(cfg.c_count)?;
    Ok(estimate_edge_count_with(o, &ap, &mut cfg.seed.stream(1))?.value)
}

/// Enumerate every edge and count triangles from the recovered graph.
pub fn exact_count<O: BisOracle + ?Sized>(o: &O, n: usize) -> Result<u64, EstimateError> {
    if n < 3 {
        return Ok(0);
    }
    let all: Vec<Vertex> = (0..n as Vertex).collect();
    let edges = enum_edges_induced(o, &all)?;
    let g = crate::graph::Graph::from_edges(n, edges.iter().map(|e| e.endpoints())).expect("edges come from the oracle");
    Ok(g.count_triangles_exact())
}

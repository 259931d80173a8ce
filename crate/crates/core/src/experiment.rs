//! Harnesses that run estimators over families of instances and collect
//! one row per run: the distinguishing experiment on planted instances, and
//! the benchmark sweep used for query-scaling studies.
//!
//! Rows are computed in parallel (one oracle handle and seed per row) and
//! returned in input order, so output does not depend on the thread count.

use crate::graph::Graph;
use crate::hard::{gen_hard, Flavor, HardError, HardInstanceSpec};
use crate::oracle::{BisOracle, EeBacked, OracleHandle};
use crate::rng::Seed;
use crate::stats::quantile;
use crate::triangle::{edge_count_estimate, exact_count, triangle_est, triangle_est_high, triangle_est_low, EstimateError, EstimatorConfig};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Spec(#[from] HardError),
    #[error(transparent)]
    Estimate(#[from] EstimateError),
    #[error("unknown algorithm {0:?}")]
    UnknownAlgorithm(String),
}

/// Which estimator a harness runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlgorithmId {
    /// Enumerate every edge through the oracle and count exactly.
    Exact,
    /// The full estimator with its guessing loop.
    TriangleEst,
    /// One High round with the guess pinned to the true count.
    High,
    /// One Low round with the guess pinned to the true count.
    Low,
}

impl std::fmt::Display for AlgorithmId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            AlgorithmId::Exact => "exact",
            AlgorithmId::TriangleEst => "triangle-est",
            AlgorithmId::High => "high",
            AlgorithmId::Low => "low",
        })
    }
}

impl std::str::FromStr for AlgorithmId {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(AlgorithmId::Exact),
            "triangle-est" | "triangle_est" => Ok(AlgorithmId::TriangleEst),
            "high" => Ok(AlgorithmId::High),
            "low" => Ok(AlgorithmId::Low),
            _ => Err(ExperimentError::UnknownAlgorithm(s.to_string())),
        }
    }
}

/// Run `alg` against `o`. `truth` is the exact triangle count, used only
/// to pin the guess for the single-round algorithms.
fn run_algorithm<O: BisOracle + ?Sized>(
    o: &O,
    alg: AlgorithmId,
    cfg: &EstimatorConfig,
    n: usize,
    truth: u64,
) -> Result<f64, EstimateError> {
    match alg {
        AlgorithmId::Exact => Ok(exact_count(o, n)? as f64),
        AlgorithmId::TriangleEst => Ok(triangle_est(o, cfg, n)?.t_hat),
        AlgorithmId::High | AlgorithmId::Low => {
            let l = (truth as f64).max(1.0);
            let m_hat = edge_count_estimate(o, cfg, n)?;
            if alg == AlgorithmId::High {
                triangle_est_high(o, cfg, l, m_hat)
            } else {
                triangle_est_low(o, cfg, l, m_hat, n)
            }
        }
    }
}

/// One distinguishing run; serializes to the CSV columns
/// `flavor,seed,m,t,n,edges,triangles,t_hat,classified,ee_queries`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistinguishRow {
    pub flavor: Flavor,
    pub seed: u64,
    pub m: u64,
    pub t: u64,
    pub n: usize,
    pub edges: usize,
    pub triangles: u64,
    pub t_hat: f64,
    pub classified: Flavor,
    pub ee_queries: u64,
    /// Direct BIS charges; zero when every query went through EE. Not a CSV
    /// column.
    #[serde(skip)]
    pub bis_queries: u64,
}

impl DistinguishRow {
    pub fn correct(&self) -> bool {
        self.flavor == self.classified
    }
}

/// Query-count quantiles over one flavor's runs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QueryQuantiles {
    pub p10: f64,
    pub p50: f64,
    pub p90: f64,
    pub max: f64,
}

impl QueryQuantiles {
    fn of(xs: &[f64]) -> Option<Self> {
        if xs.is_empty() {
            return None;
        }
        Some(Self {
            p10: quantile(xs, 0.1),
            p50: quantile(xs, 0.5),
            p90: quantile(xs, 0.9),
            max: quantile(xs, 1.0),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlavorSummary {
    pub flavor: Flavor,
    pub runs: usize,
    pub accuracy: f64,
    pub ee_queries: Option<QueryQuantiles>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub algorithm: AlgorithmId,
    pub rows: Vec<DistinguishRow>,
    pub yes: FlavorSummary,
    pub no: FlavorSummary,
    /// Fraction of all rows classified correctly.
    pub accuracy: f64,
}

/// The decision rule: below `1.5 t` reads as `Yes`.
pub fn classify(t_hat: f64, t: u64) -> Flavor {
    if t_hat < 1.5 * t as f64 {
        Flavor::Yes
    } else {
        Flavor::No
    }
}

/// For `i` in `0..trials`, generate the `Yes` and `No` instances for instance
/// seed `spec.seed.derive(i)`, run `algorithm` against each through the EE
/// oracle only, and classify. `spec.flavor` is ignored.
pub fn run_distinguisher(
    spec: &HardInstanceSpec,
    algorithm: AlgorithmId,
    cfg: &EstimatorConfig,
    trials: usize,
) -> Result<ExperimentReport, ExperimentError> {
    spec.validate()?;
    cfg.validate()?;
    let jobs: Vec<(Flavor, u64)> = [Flavor::Yes, Flavor::No]
        .into_iter()
        .flat_map(|f| (0..trials as u64).map(move |i| (f, i)))
        .collect();
    let rows = jobs
        .into_par_iter()
        .map(|(flavor, i)| {
            let inst = HardInstanceSpec {
                flavor,
                seed: spec.seed.derive(i),
                ..*spec
            };
            let (g, _) = gen_hard(&inst)?;
            let n = g.vertex_count();
            let (edges, triangles) = (g.edge_count(), g.count_triangles_exact());
            let mut run_cfg = *cfg;
            run_cfg.seed = cfg.seed.derive(i);
            let handle = OracleHandle::new(g);
            let t_hat = run_algorithm(&EeBacked(&handle), algorithm, &run_cfg, n, triangles)?;
            Ok(DistinguishRow {
                flavor,
                seed: inst.seed.0,
                m: spec.m,
                t: spec.t,
                n,
                edges,
                triangles,
                t_hat,
                classified: classify(t_hat, spec.t),
                ee_queries: handle.ledger().ee,
                bis_queries: handle.ledger().bis,
            })
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;
    let summary = |flavor: Flavor| {
        let mine: Vec<&DistinguishRow> = rows.iter().filter(|r| r.flavor == flavor).collect();
        let queries: Vec<f64> = mine.iter().map(|r| r.ee_queries as f64).collect();
        FlavorSummary {
            flavor,
            runs: mine.len(),
            accuracy: fraction(mine.iter().filter(|r| r.correct()).count(), mine.len()),
            ee_queries: QueryQuantiles::of(&queries),
        }
    };
    Ok(ExperimentReport {
        algorithm,
        yes: summary(Flavor::Yes),
        no: summary(Flavor::No),
        accuracy: fraction(rows.iter().filter(|r| r.correct()).count(), rows.len()),
        rows,
    })
}

fn fraction(k: usize, of: usize) -> f64 {
    if of == 0 {
        0.0
    } else {
        k as f64 / of as f64
    }
}

/// A named graph in a benchmark sweep.
#[derive(Clone, Debug)]
pub struct BenchInstance {
    pub name: String,
    pub graph: Graph,
}

/// One benchmark run. `t_hat` and `rel_error` are absent when the run
/// failed; `status` is `ok` or the error message.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub instance: String,
    pub algorithm: AlgorithmId,
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    #[serde(rename = "T")]
    pub triangles: u64,
    pub t_hat: Option<f64>,
    pub rel_error: Option<f64>,
    pub bis: u64,
    pub ee: u64,
    pub wall_ms: f64,
    pub status: String,
}

/// One row per `(instance, algorithm, seed)`, in that nesting order. A
/// failing run is recorded in its row and the sweep carries on.
pub fn bench(
    instances: &[BenchInstance],
    algorithms: &[AlgorithmId],
    seeds: &[u64],
    cfg: &EstimatorConfig,
) -> Vec<BenchRow> {
    let truths: Vec<u64> = instances.par_iter().map(|i| i.graph.count_triangles_exact()).collect();
    let jobs: Vec<(usize, AlgorithmId, u64)> = (0..instances.len())
        .flat_map(|i| algorithms.iter().flat_map(move |&a| seeds.iter().map(move |&s| (i, a, s))))
        .collect();
    jobs.into_par_iter()
        .map(|(i, algorithm, seed)| {
            let inst = &instances[i];
            let g = &inst.graph;
            let truth = truths[i];
            let mut run_cfg = *cfg;
            run_cfg.seed = Seed(seed);
            let handle = OracleHandle::new(g.clone());
            let start = Instant::now();
            let out = run_algorithm(&handle, algorithm, &run_cfg, g.vertex_count(), truth);
            let wall_ms = start.elapsed().as_secs_f64() * 1e3;
            let ledger = handle.ledger();
            let (t_hat, rel_error, status) = match out {
                Ok(x) => {
                    let err = if truth == 0 {
                        if x == 0.0 {
                            0.0
                        } else {
                            f64::INFINITY
                        }
                    } else {
                        (x - truth as f64) / truth as f64
                    };
                    (Some(x), Some(err), "ok".to_string())
                }
                Err(e) => (None, None, e.to_string()),
            };
            BenchRow {
                instance: inst.name.clone(),
                algorithm,
                seed,
                n: g.vertex_count(),
                m: g.edge_count(),
                triangles: truth,
                t_hat,
                rel_error,
                bis: ledger.bis,
                ee: ledger.ee,
                wall_ms,
                status,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{complete, gen_er};

    const M: u64 = 1 << 16;
    const T: u64 = 1 << 17;

    #[test]
    fn exact_distinguisher_is_always_right() {
        let spec = HardInstanceSpec::new(M, T, Flavor::Yes, 5);
        let cfg = EstimatorConfig::new(0.2, 1);
        let r = run_distinguisher(&spec, AlgorithmId::Exact, &cfg, 3).unwrap();
        assert_eq!(r.rows.len(), 6);
        assert_eq!(r.accuracy, 1.0);
        for row in &r.rows {
            assert_eq!(row.t_hat, row.triangles as f64);
            assert!(row.ee_queries > 0);
            assert_eq!(row.bis_queries, 0);
        }
        // Both flavors of an instance share its seed.
        assert_eq!(r.rows[0].seed, r.rows[3].seed);
        assert!(r.yes.ee_queries.unwrap().p50 > 0.0);
    }

    #[test]
    fn invalid_spec_is_rejected() {
        let spec = HardInstanceSpec::new(4096, 4096, Flavor::Yes, 0);
        let err = run_distinguisher(&spec, AlgorithmId::Exact, &EstimatorConfig::new(0.2, 1), 1).unwrap_err();
        assert!(err.to_string().contains("t ≤ m^(3/2)/128"));
    }

    #[test]
    fn classify_threshold() {
        assert_eq!(classify(149.9, 100), Flavor::Yes);
        assert_eq!(classify(150.0, 100), Flavor::No);
    }

    #[test]
    fn bench_has_one_row_per_combination() {
        let instances = vec![
            BenchInstance { name: "k6".into(), graph: complete(6) },
            BenchInstance { name: "er".into(), graph: gen_er(30, 0.3, Seed(2)).unwrap() },
        ];
        let algs = [AlgorithmId::Exact, AlgorithmId::TriangleEst];
        let rows = bench(&instances, &algs, &[1, 2, 3], &EstimatorConfig::new(0.3, 0));
        assert_eq!(rows.len(), 2 * 2 * 3);
        assert_eq!((rows[0].instance.as_str(), rows[0].algorithm, rows[0].seed), ("k6", AlgorithmId::Exact, 1));
        assert_eq!(rows[0].triangles, 20);
        for r in rows.iter().filter(|r| r.algorithm == AlgorithmId::Exact) {
            assert_eq!(r.rel_error, Some(0.0));
            assert_eq!(r.status, "ok");
        }
    }

    #[test]
    fn bench_records_failures_per_row() {
        let instances = vec![BenchInstance { name: "k5".into(), graph: complete(5) }];
        let mut cfg = EstimatorConfig::new(0.3, 0);
        cfg.epsilon = 2.0;
        let rows = bench(&instances, &[AlgorithmId::TriangleEst, AlgorithmId::Exact], &[1], &cfg);
        assert_eq!(rows.len(), 2);
        assert!(rows[0].t_hat.is_none());
        assert_ne!(rows[0].status, "ok");
        assert_eq!(rows[1].t_hat, Some(10.0));
    }
}

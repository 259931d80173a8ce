use super::{EstimateError, EstimatorConfig};
use crate::graph::{Graph, Vertex};
use crate::oracle::BisOracle;
use crate::primitives::{sample_in_cell, walk_sorted, EdgeSampler, PrimitiveError};
use crate::rng::Seed;
use crate::Scalar;
use rand::Rng;

/// Rank of a vertex: estimated degree, ties broken by id.
type RankKey = (f64, Vertex);

/// Given an oriented edge `(u, v)` with `u` ranked below `v`, and an apex `w`
/// adjacent to `u`, the trial counts triangle `{u, v, w}` iff `v` is ranked
/// below `w`. Together with the orientation this makes `{u, v}` the edge
/// joining the two lowest-ranked corners, so each triangle has exactly one
/// designated (edge, apex) pair.
fn designated<K: PartialOrd>(rank_v: &K, rank_w: &K) -> bool {
    rank_v < rank_w
}

/// Caches kept across high-count runs on the same oracle: the global edge
/// sampler and per-vertex degree estimates.
///
/// Two independent degree estimates are kept per vertex: one orders vertices,
/// the other weights successful trials. Keeping them independent means the
/// weight is not biased by the ranking that selected the vertex.
pub struct HighState {
    n: usize,
    seed: Seed,
    sampler: EdgeSampler,
    rank: Vec<Option<f64>>,
    weight: Vec<Option<f64>>,
    scratch: Vec<Vertex>,
}

const RANK_STREAM: u64 = 0;
const WEIGHT_STREAM: u64 = 1;

fn fill_others(out: &mut Vec<Vertex>, n: usize, v: Vertex) {
    out.clear();
    out.extend((0..v).chain(v + 1..n as Vertex));
}

impl HighState {
    pub fn new(n: usize, seed: Seed) -> Self {
        Self {
            n,
            seed,
            sampler: EdgeSampler::new(n),
            rank: vec![None; n],
            weight: vec![None; n],
            scratch: Vec::with_capacity(n),
        }
    }

    /// Mean of `walks` single-walk estimates of `deg(v)`; `v` must have an
    /// edge.
    fn degree_estimate<O: BisOracle + ?Sized>(&mut self, o: &O, v: Vertex, stream: u64, walks: u32) -> Result<f64, EstimateError> {
        fill_others(&mut self.scratch, self.n, v);
        let mut rng = self.seed.derive(stream).stream(v as u64);
        let mut sum = 0.0;
        for _ in 0..walks {
            sum += walk_sorted(o, &[v], &self.scratch, &mut rng)?.estimate();
        }
        Ok(sum / walks as f64)
    }

    fn rank_key<O: BisOracle + ?Sized>(&mut self, o: &O, v: Vertex, cfg: &EstimatorConfig) -> Result<RankKey, EstimateError> {
        let d = match self.rank[v as usize] {
            Some(d) => d,
            None => {
                let d = self.degree_estimate(o, v, RANK_STREAM, cfg.degree_walks)?;
                self.rank[v as usize] = Some(d);
                d
            }
        };
        Ok((d, v))
    }

    fn weight<O: BisOracle + ?Sized>(&mut self, o: &O, v: Vertex, cfg: &EstimatorConfig) -> Result<f64, EstimateError> {
        if let Some(d) = self.weight[v as usize] {
            return Ok(d);
        }
        let d = self.degree_estimate(o, v, WEIGHT_STREAM, cfg.degree_walks)?;
        self.weight[v as usize] = Some(d);
        Ok(d)
    }

    /// One run of the high-count estimator at guess `l`.
    pub fn run<O, R>(&mut self, o: &O, cfg: &EstimatorConfig, l: f64, m_hat: f64, rng: &mut R) -> Result<f64, EstimateError>
    where
        O: BisOracle + ?Sized,
        R: Rng + ?Sized,
    {
        if m_hat <= 0.0 || self.n < 3 {
            return Ok(0.0);
        }
        let trials = trial_count(cfg, l, m_hat, self.n);
        let mut sum = 0.0;
        for _ in 0..trials {
            let e = match self.sampler.sample(o, rng) {
                Ok(e) => e,
                Err(PrimitiveError::EmptyEdgeSet) => return Ok(0.0),
                Err(err) => return Err(err.into()),
            };
            let (x, y) = e.endpoints();
            let (kx, ky) = (self.rank_key(o, x, cfg)?, self.rank_key(o, y, cfg)?);
            let (u, v, kv) = if kx < ky { (x, y, ky) } else { (y, x, kx) };
            fill_others(&mut self.scratch, self.n, u);
            let w = sample_in_cell(o, &[u], &self.scratch, rng)?.other(u);
            if w == v {
                continue;
            }
            let kw = self.rank_key(o, w, cfg)?;
            if designated(&kv, &kw) && o.bis(&[v], &[w])? {
                sum += m_hat * self.weight(o, u, cfg)?;
            }
        }
        Ok(sum / trials as f64)
    }
}

/// `⌈c_high · max(1, m̂^{3/2}/L) · ln(2/δ) / ε²⌉`.
pub(crate) fn trial_count(cfg: &EstimatorConfig, l: f64, m_hat: f64, n: usize) -> u64 {
    let delta = cfg.delta_for(n);
    let scale = (m_hat.powf(1.5) / l).max(1.0);
    (cfg.c_high * scale * (2.0 / delta).ln() / (cfg.epsilon * cfg.epsilon)).ceil() as u64
}

/// High-count estimate of the number of triangles, assuming `T ≥ l_guess`.
///
/// Each trial draws a uniform edge, orients it from the lower-ranked
/// endpoint `u`, draws a uniform neighbor `w` of `u`, and succeeds when the
/// triangle `{u, v, w}` closes and `(u, v)` is its designated edge. A success
/// contributes `m̂ · deg(u)`; the estimate is the mean contribution.
pub fn triangle_est_high<O: BisOracle + ?Sized>(
    o: &O,
    cfg: &EstimatorConfig,
    l_guess: f64,
    m_hat: f64,
) -> Result<f64, EstimateError> {
    cfg.validate()?;
    if l_guess < 1.0 {
        return Err(EstimateError::InvalidConfig("l_guess must be at least 1".into()));
    }
    let mut state = HighState::new(o.vertex_count(), cfg.seed.derive(2));
    state.run(o, cfg, l_guess, m_hat, &mut cfg.seed.derive(3).rng())
}

/// Exact expectation of one high-count trial's contribution when edges and
/// neighbors are drawn exactly uniformly and degrees are exact. Vertices are
/// ranked by (degree, id). Equals the triangle count.
pub fn high_trial_expectation<S: Scalar>(g: &Graph) -> S {
    let m = g.edge_count();
    let mut total = S::zero();
    if m == 0 {
        return total;
    }
    let key = |x: Vertex| (g.degree(x), x);
    let ms = S::from_usize(m).unwrap();
    for e in g.edges() {
        let (x, y) = e.endpoints();
        let (u, v) = if key(x) < key(y) { (x, y) } else { (y, x) };
        let du = S::from_usize(g.degree(u)).unwrap();
        // Probability of drawing (e, w) times the contribution m · deg(u).
        let per_apex = (S::one() / ms.clone()) * (S::one() / du.clone()) * (ms.clone() * du);
        for &w in g.neighbors(u) {
            if w != v && designated(&key(v), &key(w)) && g.has_edge(v, w) {
                total = total + per_apex.clone();
            }
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{complete, complete_bipartite, gen_er};
    use crate::oracle::OracleHandle;
    use crate::ExactRatio;
    use rand::seq::SliceRandom;

    #[test]
    fn bipartite_gives_zero() {
        let h = OracleHandle::new(complete_bipartite(5, 6));
        let cfg = EstimatorConfig::new(0.2, 1).with_delta(0.05);
        assert_eq!(triangle_est_high(&h, &cfg, 10.0, 30.0).unwrap(), 0.0);
    }

    #[test]
    fn k5_within_band() {
        let h = OracleHandle::new(complete(5));
        let ok = (0..100)
            .filter(|&s| {
                let cfg = EstimatorConfig::new(0.2, s).with_delta(0.05);
                (8.0..=12.0).contains(&triangle_est_high(&h, &cfg, 10.0, 10.0).unwrap())
            })
            .count();
        assert!(ok >= 95, "{ok}");
    }

    #[test]
    fn expectation_equals_triangles() {
        for s in 0..30u64 {
            let g = gen_er(9, 0.5, s.into()).unwrap();
            let t = g.count_triangles_exact() as i128;
            assert_eq!(high_trial_expectation::<ExactRatio>(&g), ExactRatio::from_integer(t));
            assert!((high_trial_expectation::<f64>(&g) - t as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn designation_is_a_partition() {
        // For any total order on the vertices, every triangle of any graph on
        // at most 8 vertices is claimed by exactly one (edge, apex) pair.
        let mut rng = Seed(5).rng();
        for s in 0..200u64 {
            let n = 3 + (s % 6) as usize;
            let g = gen_er(n, 0.6, s.into()).unwrap();
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng);
            let key = |x: Vertex| order[x as usize];
            for a in 0..n as Vertex {
                for b in a + 1..n as Vertex {
                    for c in b + 1..n as Vertex {
                        if !(g.has_edge(a, b) && g.has_edge(b, c) && g.has_edge(a, c)) {
                            continue;
                        }
                        let mut claims = 0;
                        for (x, y, w) in [(a, b, c), (a, c, b), (b, c, a)] {
                            let (u, v) = if key(x) < key(y) { (x, y) } else { (y, x) };
                            claims += usize::from(g.has_edge(u, w) && designated(&key(v), &key(w)));
                        }
                        assert_eq!(claims, 1);
                    }
                }
            }
        }
    }

    #[test]
    fn trial_count_formula() {
        let cfg = EstimatorConfig::new(0.5, 0).with_delta(0.5);
        // max(1, 8/2) · ln 4 / 0.25
        assert_eq!(trial_count(&cfg, 2.0, 4.0, 10), (4.0 * 4f64.ln() / 0.25).ceil() as u64);
    }
}

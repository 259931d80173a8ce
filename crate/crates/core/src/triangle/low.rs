use super::{EstimateError, EstimatorConfig};
use crate::bitset::BitSet;
use crate::graph::{Edge, Vertex};
use crate::oracle::BisOracle;
use crate::primitives::{enum_edges_induced, neighbors_of, EdgeSampler, PrimitiveError};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap, HashSet};

/// How the closing-edge set `E_F` is gathered.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClosureMode {
    /// `E_F = ∪_{v ∈ V(F)} E(G[N(v) ∩ V(F)])`, learned by enumerating each
    /// neighborhood.
    Full,
    /// Only the pairs the estimation phase can ever look up: for every two
    /// draws of `F` sharing a vertex `y`, one BIS query on the two other
    /// endpoints. Yields the same estimate as `Full` with far fewer queries.
    WedgeProbe,
}

/// Parameters a sketch was built for; estimation must use the same.
#[derive(Clone, Copy, Debug, PartialEq)]
struct BuiltFor {
    epsilon: f64,
    c_s: f64,
    c_f: f64,
    l_guess: f64,
    m_hat: f64,
}

/// Everything the low-count estimator learns from the oracle.
#[derive(Clone, Debug, PartialEq)]
pub struct LowSketch {
    pub n: usize,
    /// Sampled vertices, sorted.
    pub s_set: Vec<Vertex>,
    /// All edges incident to `S`.
    pub e_s: Vec<Edge>,
    /// `∪_{v ∈ S} E(G[N(v)])`.
    pub e_s_prime: Vec<Edge>,
    /// Uniform edge draws, with repetition, in draw order.
    pub f_multiset: Vec<Edge>,
    pub e_f: Vec<Edge>,
    pub p_rate: f64,
    pub f_target: usize,
    built_for: BuiltFor,
}

pub(crate) fn p_rate(cfg: &EstimatorConfig, l: f64, n: usize) -> f64 {
    (cfg.c_s * EstimatorConfig::log_n(n) / (cfg.epsilon * cfg.epsilon * l.sqrt())).min(1.0)
}

pub(crate) fn f_target(cfg: &EstimatorConfig, l: f64, m_hat: f64, n: usize) -> usize {
    (cfg.c_f * m_hat * EstimatorConfig::log_n(n) / (cfg.epsilon * cfg.epsilon * l.sqrt())).ceil() as usize
}

fn sorted_unique(mut v: Vec<Edge>) -> Vec<Edge> {
    v.sort_unstable();
    v.dedup();
    v
}

/// Gather the sketch for guess `l_guess`. This is the only phase of the
/// low-count estimator that queries the oracle.
pub fn build_low_sketch<O: BisOracle + ?Sized>(
    o: &O,
    cfg: &EstimatorConfig,
    l_guess: f64,
    m_hat: f64,
    n: usize,
) -> Result<LowSketch, EstimateError> {
    cfg.validate()?;
    if l_guess < 1.0 {
        return Err(EstimateError::InvalidConfig("l_guess must be at least 1".into()));
    }
    let mut sampler = EdgeSampler::new(n);
    build_with(o, cfg, l_guess, m_hat, n, &mut sampler, &mut cfg.seed.derive(4).rng())
}

pub(crate) fn build_with<O, R>(
    o: &O,
    cfg: &EstimatorConfig,
    l: f64,
    m_hat: f64,
    n: usize,
    sampler: &mut EdgeSampler,
    rng: &mut R,
) -> Result<LowSketch, EstimateError>
where
    O: BisOracle + ?Sized,
    R: Rng + ?Sized,
{
    let p = p_rate(cfg, l, n);
    let f = f_target(cfg, l, m_hat, n);
    let mut sk = LowSketch {
        n,
        s_set: Vec::new(),
        e_s: Vec::new(),
        e_s_prime: Vec::new(),
        f_multiset: Vec::new(),
        e_f: Vec::new(),
        p_rate: p,
        f_target: f,
        built_for: BuiltFor {
            epsilon: cfg.epsilon,
            c_s: cfg.c_s,
            c_f: cfg.c_f,
            l_guess: l,
            m_hat,
        },
    };
    if m_hat <= 0.0 || n < 2 {
        return Ok(sk);
    }

    let all: Vec<Vertex> = (0..n as Vertex).collect();
    sk.s_set = all.iter().copied().filter(|_| rng.gen_bool(p)).collect();
    let mut others = Vec::with_capacity(n);
    let mut e_s = Vec::new();
    let mut e_s_prime = Vec::new();
    for &v in &sk.s_set {
        others.clear();
        others.extend(all.iter().copied().filter(|&x| x != v));
        let nv = neighbors_of(o, v, &others)?;
        e_s.extend(nv.iter().map(|&x| Edge::new(v, x).expect("no self-loops")));
        if nv.len() >= 2 {
            e_s_prime.extend(enum_edges_induced(o, &nv)?);
        }
    }
    sk.e_s = sorted_unique(e_s);
    sk.e_s_prime = sorted_unique(e_s_prime);

    for _ in 0..f {
        match sampler.sample(o, rng) {
            Ok(e) => sk.f_multiset.push(e),
            Err(PrimitiveError::EmptyEdgeSet) => break,
            Err(err) => return Err(err.into()),
        }
    }
    sk.e_f = match cfg.closure {
        ClosureMode::Full => closure_full(o, &sk.f_multiset)?,
        ClosureMode::WedgeProbe => closure_probe(o, &sk.f_multiset)?,
    };
    Ok(sk)
}

fn closure_full<O: BisOracle + ?Sized>(o: &O, f: &[Edge]) -> Result<Vec<Edge>, EstimateError> {
    let vf: Vec<Vertex> = f
        .iter()
        .flat_map(|e| [e.lo(), e.hi()])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut out = Vec::new();
    let mut others = Vec::with_capacity(vf.len());
    for &v in &vf {
        others.clear();
        others.extend(vf.iter().copied().filter(|&x| x != v));
        let nv = neighbors_of(o, v, &others)?;
        if nv.len() >= 2 {
            out.extend(enum_edges_induced(o, &nv)?);
        }
    }
    Ok(sorted_unique(out))
}

/// Calls `visit(x, y, z)` for every pair of draws `i < j` meeting at `y` with
/// distinct other endpoints `x`, `z`.
fn for_each_wedge(f: &[Edge], mut visit: impl FnMut(Vertex, Vertex, Vertex)) {
    let mut by_vertex: HashMap<Vertex, Vec<usize>> = HashMap::new();
    for (i, e) in f.iter().enumerate() {
        by_vertex.entry(e.lo()).or_default().push(i);
        by_vertex.entry(e.hi()).or_default().push(i);
    }
    let mut keys: Vec<Vertex> = by_vertex.keys().copied().collect();
    keys.sort_unstable();
    for y in keys {
        let idx = &by_vertex[&y];
        for (a, &i) in idx.iter().enumerate() {
            for &j in &idx[a + 1..] {
                let (x, z) = (f[i].other(y), f[j].other(y));
                if x != z {
                    visit(x, y, z);
                }
            }
        }
    }
}

fn closure_probe<O: BisOracle + ?Sized>(o: &O, f: &[Edge]) -> Result<Vec<Edge>, EstimateError> {
    let mut pairs = BTreeSet::new();
    for_each_wedge(f, |x, _, z| {
        pairs.insert(Edge::new(x, z).expect("distinct endpoints"));
    });
    let mut out = Vec::new();
    for e in pairs {
        if o.bis(&[e.lo()], &[e.hi()])? {
            out.push(e);
        }
    }
    Ok(out)
}

/// Pure estimation from a sketch; issues no queries.
///
/// An edge is heavy when at least `θ = c_heavy · ln n / ε²` sampled vertices
/// see both its endpoints. Triangles whose lexicographically least heavy edge
/// is `{x, y}` are counted through the apexes in `S`, each with weight `1/p`.
/// Triangles with three light edges are counted through pairs of draws of
/// `F` forming a wedge whose closing edge is in `E_F`; each such pair has
/// weight `m̂² / (3 f (f - 1))`, `f = |F|`.
pub fn estimate_from_sketch(sk: &LowSketch, cfg: &EstimatorConfig, l_guess: f64, m_hat: f64) -> Result<f64, EstimateError> {
    cfg.validate()?;
    let b = &sk.built_for;
    if b.epsilon != cfg.epsilon || b.c_s != cfg.c_s || b.c_f != cfg.c_f {
        return Err(EstimateError::SketchMismatch("estimator configuration"));
    }
    if b.l_guess != l_guess {
        return Err(EstimateError::SketchMismatch("guess"));
    }
    if b.m_hat != m_hat {
        return Err(EstimateError::SketchMismatch("edge-count estimate"));
    }
    let theta = cfg.c_heavy * EstimatorConfig::log_n(sk.n) / (cfg.epsilon * cfg.epsilon);

    // For each vertex, the members of S adjacent to it (as indices into S).
    let s_index: HashMap<Vertex, usize> = sk.s_set.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut seen_by: HashMap<Vertex, BitSet> = HashMap::new();
    for e in &sk.e_s {
        for (a, b) in [(e.lo(), e.hi()), (e.hi(), e.lo())] {
            if let Some(&i) = s_index.get(&a) {
                seen_by.entry(b).or_insert_with(|| BitSet::new(sk.s_set.len())).insert(i);
            }
        }
    }
    let load = |e: Edge| match (seen_by.get(&e.lo()), seen_by.get(&e.hi())) {
        (Some(x), Some(y)) => x.intersection_count(y),
        _ => 0,
    };
    // Heaviness of a triangle edge ignores the opposite vertex, so whether
    // that vertex was sampled into S cannot tip the edge over the threshold.
    let heavy = |e: Edge, opposite: Vertex| {
        let own = usize::from(s_index.contains_key(&opposite));
        load(e).saturating_sub(own) as f64 >= theta
    };
    // Least edge of triangle {x, y, v} among the heavy ones, if any.
    let least_heavy = |x: Vertex, y: Vertex, v: Vertex| {
        [(x, y, v), (x, v, y), (y, v, x)]
            .into_iter()
            .filter(|&(a, b, opp)| heavy(Edge::new(a, b).unwrap(), opp))
            .map(|(a, b, _)| Edge::new(a, b).unwrap())
            .min()
    };

    let mut heavy_count = 0.0;
    for &e in &sk.e_s_prime {
        let (x, y) = e.endpoints();
        let (Some(sx), Some(sy)) = (seen_by.get(&x), seen_by.get(&y)) else {
            continue;
        };
        // Cheap prefilter: the leave-one-out load is at least load - 1.
        if (load(e) as f64) < theta {
            continue;
        }
        for i in sx.intersection(sy).iter() {
            let v = sk.s_set[i];
            if least_heavy(x, y, v) == Some(e) {
                heavy_count += 1.0 / sk.p_rate;
            }
        }
    }

    let f = sk.f_multiset.len();
    let mut light_pairs = 0u64;
    if f >= 2 {
        let e_f: HashSet<Edge> = sk.e_f.iter().copied().collect();
        let fs = &sk.f_multiset;
        for_each_wedge(fs, |x, y, z| {
            let closing = Edge::new(x, z).unwrap();
            if !e_f.contains(&closing) {
                return;
            }
            if least_heavy(x, z, y).is_none() {
                light_pairs += 1;
            }
        });
    }
    let light_weight = if f >= 2 {
        m_hat * m_hat / (3.0 * f as f64 * (f as f64 - 1.0))
    } else {
        0.0
    };
    Ok(heavy_count + light_pairs as f64 * light_weight)
}

/// Build the sketch, then estimate from it.
pub fn triangle_est_low<O: BisOracle + ?Sized>(
    o: &O,
    cfg: &EstimatorConfig,
    l_guess: f64,
    m_hat: f64,
    n: usize,
) -> Result<f64, EstimateError> {
    let sk = build_low_sketch(o, cfg, l_guess, m_hat, n)?;
    estimate_from_sketch(&sk, cfg, l_guess, m_hat)
}

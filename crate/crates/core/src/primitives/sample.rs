use super::cut::CutLaw;
use super::enumerate::enumerate_cell;
use super::walk::depth_bound;
use super::{sorted, ApproxParams, PrimitiveError};
use crate::graph::{Edge, Vertex};
use crate::oracle::{BisOracle, Cell};
use rand::seq::SliceRandom;
use rand::Rng;

/// Trials before the enumeration fallback is considered.
const MIN_TRIALS: u64 = 8;

/// Whether enumerating a cell with depth bound `depth` is estimated to be
/// cheaper than drawing one more sample by rejection, after `trials` trials
/// of which `hits` were kept.
///
/// The acceptance rate is estimated conservatively as `(hits + 1) / trials`
/// and the edge count as that rate times `2^depth`. Enumeration costs about
/// one unit per edge and rejection about `1 / rate` units per sample, so
/// switch when `edges ≤ 1 / rate`, and only while the rate is below 1/8.
fn should_enumerate(trials: u64, hits: u64, depth: u32) -> bool {
    if trials < MIN_TRIALS {
        return false;
    }
    let rate = (hits + 1) as f64 / trials as f64;
    let edges = rate * (depth as f64).exp2();
    8.0 * rate <= 1.0 && edges * rate <= 1.0
}

/// One blind descent through the halving tree of `(a, b)`.
///
/// At every level one child is picked uniformly and only that child is
/// queried; an empty child ends the trial. A leaf at depth `d` is therefore
/// reached with probability exactly `2^-d` and is kept with probability
/// `2^(d - depth)`, so each edge of the cell comes out with probability
/// `2^-depth` per trial.
fn descend<O, R>(o: &O, cell: Cell<'_>, depth: u32, rng: &mut R) -> Result<Option<Edge>, PrimitiveError>
where
    O: BisOracle + ?Sized,
    R: Rng + ?Sized,
{
    let mut c = cell;
    if c.is_leaf() && !o.bis_cell(c)? {
        return Ok(None);
    }
    let mut d = 0;
    while !c.is_leaf() {
        let (c1, c2) = c.split();
        let next = if rng.gen::<bool>() { c1 } else { c2 };
        if !o.bis_cell(next)? {
            return Ok(None);
        }
        c = next;
        d += 1;
    }
    let gap = depth - d;
    let keep = gap == 0 || rng.gen_range(0..1u128 << gap) == 0;
    Ok(keep.then(|| Edge::new(c.a()[0], c.b()[0]).expect("disjoint sides")))
}

/// Exactly uniform edge of `E(a, b)`.
///
/// Blind descents are repeated until one keeps its leaf. When the failures
/// so far suggest that enumerating the cell is cheaper than continuing, the
/// cell is enumerated and an edge drawn uniformly from the list. The switch
/// happens between trials and each trial's output is uniform, so the output
/// law stays uniform.
pub fn sample_edge<O: BisOracle + ?Sized>(
    o: &O,
    a: &[Vertex],
    b: &[Vertex],
    ap: &ApproxParams,
) -> Result<Edge, PrimitiveError> {
    sample_edge_with(o, a, b, ap, &mut ap.seed.rng())
}

pub fn sample_edge_with<O, R>(
    o: &O,
    a: &[Vertex],
    b: &[Vertex],
    ap: &ApproxParams,
    rng: &mut R,
) -> Result<Edge, PrimitiveError>
where
    O: BisOracle + ?Sized,
    R: Rng + ?Sized,
{
    ap.validate()?;
    let (a, b) = (sorted(a), sorted(b));
    if !o.bis_cell(Cell::new(o.vertex_count(), &a, &b)?)? {
        return Err(PrimitiveError::EmptyEdgeSet);
    }
    sample_in_cell(o, &a, &b, rng)
}

/// [`sample_edge_with`] on sorted sides known to have an edge.
pub(crate) fn sample_in_cell<O, R>(o: &O, a: &[Vertex], b: &[Vertex], rng: &mut R) -> Result<Edge, PrimitiveError>
where
    O: BisOracle + ?Sized,
    R: Rng + ?Sized,
{
    let cell = Cell::new(o.vertex_count(), a, b)?;
    let depth = depth_bound(a.len(), b.len());
    let mut failures = 0u64;
    loop {
        if let Some(e) = descend(o, cell, depth, rng)? {
            return Ok(e);
        }
        failures += 1;
        if should_enumerate(failures, 0, depth) {
            let mut all = Vec::new();
            enumerate_cell(o, cell, &mut all)?;
            return all.choose(rng).copied().ok_or(PrimitiveError::EmptyEdgeSet);
        }
    }
}

/// Exactly uniform sampler over all edges of the hidden graph.
///
/// Each trial draws a random cut of `V` and runs one blind descent on it.
/// The cut law is invariant under relabelling and the depth bound depends
/// only on the side sizes, so every edge is output with the same probability
/// per trial.
///
/// The sampler keeps trial statistics across calls and switches to a cached
/// full enumeration once that is estimated to cost less than one more
/// sample by rejection.
#[derive(Debug)]
pub struct EdgeSampler {
    n: usize,
    cut: Option<CutLaw>,
    cache: Option<Vec<Edge>>,
    trials: u64,
    accepted: u64,
    a: Vec<Vertex>,
    b: Vec<Vertex>,
}

impl EdgeSampler {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            cut: (n >= 2).then(|| CutLaw::new(n)),
            cache: None,
            trials: 0,
            accepted: 0,
            a: Vec::with_capacity(n),
            b: Vec::with_capacity(n),
        }
    }

    /// Whether draws now come from a cached enumeration.
    pub fn is_enumerated(&self) -> bool {
        self.cache.is_some()
    }

    pub fn sample<O, R>(&mut self, o: &O, rng: &mut R) -> Result<Edge, PrimitiveError>
    where
        O: BisOracle + ?Sized,
        R: Rng + ?Sized,
    {
        let Some(cut) = self.cut else {
            return Err(PrimitiveError::EmptyEdgeSet);
        };
        loop {
            if let Some(all) = &self.cache {
                return all.choose(rng).copied().ok_or(PrimitiveError::EmptyEdgeSet);
            }
            cut.draw(rng, &mut self.a, &mut self.b);
            let kept = descend(o, Cell::new(self.n, &self.a, &self.b)?, cut.depth, rng)?;
            self.trials += 1;
            if let Some(e) = kept {
                self.accepted += 1;
                return Ok(e);
            }
            if should_enumerate(self.trials, self.accepted, cut.depth) {
                let all: Vec<Vertex> = (0..self.n as Vertex).collect();
                self.cache = Some(super::enum_edges_induced(o, &all)?);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{complete_bipartite, gen_er, path, star};
    use crate::graph::Graph;
    use crate::oracle::OracleHandle;
    use crate::rng::Seed;
    use crate::stats::tv_from_uniform;
    use std::collections::HashMap;

    fn ap(s: u64) -> ApproxParams {
        ApproxParams::new(0.1, 0.05, s).unwrap()
    }

    #[test]
    fn single_edge_and_empty() {
        let h = OracleHandle::new(Graph::from_edges(3, [(0, 2)]).unwrap());
        assert_eq!(sample_edge(&h, &[0, 1], &[2], &ap(0)).unwrap(), Edge::new(0, 2).unwrap());
        assert_eq!(sample_edge(&h, &[0], &[1], &ap(0)), Err(PrimitiveError::EmptyEdgeSet));
    }

    #[test]
    fn path_halves() {
        let h = OracleHandle::new(path(3));
        let mut rng = Seed(1).rng();
        let draws = 100_000;
        let mut left = 0;
        for _ in 0..draws {
            // {0,1} is the only edge with low endpoint 0.
            left += usize::from(sample_edge_with(&h, &[0, 2], &[1], &ap(0), &mut rng).unwrap().lo() == 0);
        }
        let f = left as f64 / draws as f64;
        assert!((0.48..=0.52).contains(&f), "{f}");
    }

    #[test]
    fn k22_tv() {
        let h = OracleHandle::new(complete_bipartite(2, 2));
        let mut rng = Seed(2).rng();
        let mut counts: HashMap<Edge, u64> = HashMap::new();
        for _ in 0..100_000 {
            *counts.entry(sample_edge_with(&h, &[0, 1], &[2, 3], &ap(0), &mut rng).unwrap()).or_default() += 1;
        }
        let c: Vec<u64> = counts.values().copied().collect();
        assert!(tv_from_uniform::<f64>(&c, 4) <= 0.02);
    }

    #[test]
    fn descent_law_is_exactly_uniform() {
        use num_rational::Ratio;
        // Expand every branch of one descent with exact probabilities, using
        // ground truth for emptiness, and check each edge gets 2^-D.
        fn expand(g: &Graph, c: Cell<'_>, d: u32, depth: u32, law: &mut HashMap<Edge, Ratio<u128>>) {
            if c.is_leaf() {
                let keep = Ratio::new(1u128, 1 << (depth - d));
                *law.entry(Edge::new(c.a()[0], c.b()[0]).unwrap()).or_default() += Ratio::new(1, 1u128 << d) * keep;
                return;
            }
            let (c1, c2) = c.split();
            for child in [c1, c2] {
                if child.a().iter().any(|&u| child.b().iter().any(|&v| g.has_edge(u, v))) {
                    expand(g, child, d + 1, depth, law);
                }
            }
        }
        let check = |g: &Graph, a: &[Vertex], b: &[Vertex]| {
            let depth = depth_bound(a.len(), b.len());
            let mut law = HashMap::new();
            if g.edge_count() > 0 {
                expand(g, Cell::new(g.vertex_count(), a, b).unwrap(), 0, depth, &mut law);
            }
            assert_eq!(law.len(), g.edge_count());
            for p in law.values() {
                assert_eq!(*p, Ratio::new(1, 1u128 << depth));
            }
        };
        for (ka, kb) in [(1usize, 1usize), (1, 3), (2, 2), (2, 3), (3, 3)] {
            let (a, b): (Vec<Vertex>, Vec<Vertex>) = ((0..ka as Vertex).collect(), (ka as Vertex..(ka + kb) as Vertex).collect());
            for mask in 0u32..1 << (ka * kb) {
                let edges = (0..ka * kb).filter(|i| mask >> i & 1 == 1).map(|i| (a[i / kb], b[i % kb]));
                check(&Graph::from_edges(ka + kb, edges).unwrap(), &a, &b);
            }
        }
        for s in 0..200u64 {
            let g = crate::generators::gen_bipartite(4, 4, 0.4, Seed(s)).unwrap();
            check(&g, &[0, 1, 2, 3], &[4, 5, 6, 7]);
            let g = crate::generators::gen_bipartite(3, 5, 0.5, Seed(s)).unwrap();
            check(&g, &[0, 1, 2], &[3, 4, 5, 6, 7]);
        }
    }

    #[test]
    fn star_leaves_quarter_each() {
        let h = OracleHandle::new(star(4));
        let mut rng = Seed(4).rng();
        let mut counts = [0u64; 5];
        for _ in 0..100_000 {
            counts[sample_edge_with(&h, &[0], &[1, 2, 3, 4], &ap(0), &mut rng).unwrap().hi() as usize] += 1;
        }
        for &c in &counts[1..] {
            let f = c as f64 / 1e5;
            assert!((0.23..=0.27).contains(&f), "{f}");
        }
    }

    #[test]
    fn global_sampler_uniform() {
        let g = gen_er(12, 0.3, Seed(5)).unwrap();
        let h = OracleHandle::new(g.clone());
        let mut sampler = EdgeSampler::new(12);
        let mut rng = Seed(6).rng();
        let mut counts: HashMap<Edge, u64> = HashMap::new();
        for _ in 0..100_000 {
            let e = sampler.sample(&h, &mut rng).unwrap();
            *counts.entry(e).or_default() += 1;
        }
        assert!(counts.keys().all(|e| g.has_edge(e.lo(), e.hi())));
        let c: Vec<u64> = counts.values().copied().collect();
        assert!(tv_from_uniform::<f64>(&c, g.edge_count()) <= 0.02);
    }

    #[test]
    fn global_sampler_empty_graph_errors() {
        let h = OracleHandle::new(Graph::empty(20));
        let mut sampler = EdgeSampler::new(20);
        assert_eq!(sampler.sample(&h, &mut Seed(0).rng()), Err(PrimitiveError::EmptyEdgeSet));
        assert!(sampler.is_enumerated());
    }
}

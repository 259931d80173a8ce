use super::{ceil_log2, sorted, PrimitiveError};
use crate::graph::{Edge, Vertex};
use crate::oracle::{BisOracle, Cell};
use num_rational::Ratio;
use rand::Rng;

/// Outcome of one root-to-leaf walk.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WalkTrace {
    pub leaf: Edge,
    /// Levels where both children were nonempty; the walk reached `leaf`
    /// with probability `2^-branchings`.
    pub branchings: u32,
    /// `⌈log2|A|⌉ + ⌈log2|B|⌉`, an upper bound on `branchings`.
    pub depth_bound: u32,
    pub queries_used: u64,
}

impl WalkTrace {
    /// Probability of this leaf as an exact dyadic rational.
    pub fn probability(&self) -> Ratio<u128> {
        Ratio::new(1, 1u128 << self.branchings)
    }

    /// Unbiased single-walk estimate of the number of edges in the cell.
    pub fn estimate(&self) -> f64 {
        (self.branchings as f64).exp2()
    }
}

pub fn depth_bound(a_len: usize, b_len: usize) -> u32 {
    ceil_log2(a_len) + ceil_log2(b_len)
}

/// One random walk from `(a, b)` down to a single edge.
///
/// At each cell the first child is queried. If it is empty the walk moves to
/// the second child without a query; otherwise the second child is queried
/// and the walk picks uniformly when both are nonempty. The caller must
/// already know that `E(a, b)` is nonempty.
pub fn walk<O, R>(o: &O, a: &[Vertex], b: &[Vertex], rng: &mut R) -> Result<WalkTrace, PrimitiveError>
where
    O: BisOracle + ?Sized,
    R: Rng + ?Sized,
{
    walk_sorted(o, &sorted(a), &sorted(b), rng)
}

pub(crate) fn walk_sorted<O, R>(o: &O, a: &[Vertex], b: &[Vertex], rng: &mut R) -> Result<WalkTrace, PrimitiveError>
where
    O: BisOracle + ?Sized,
    R: Rng + ?Sized,
{
    walk_cell(o, Cell::new(o.vertex_count(), a, b)?, rng)
}

pub(crate) fn walk_cell<O, R>(o: &O, cell: Cell<'_>, rng: &mut R) -> Result<WalkTrace, PrimitiveError>
where
    O: BisOracle + ?Sized,
    R: Rng + ?Sized,
{
    let depth = depth_bound(cell.a().len(), cell.b().len());
    let mut c = cell;
    let mut branchings = 0;
    let mut queries = 0;
    while !c.is_leaf() {
        let (c1, c2) = c.split();
        queries += 1;
        let next = if !o.bis_cell(c1)? {
            c2
        } else {
            queries += 1;
            if !o.bis_cell(c2)? {
                c1
            } else {
                branchings += 1;
                if rng.gen::<bool>() {
                    c1
                } else {
                    c2
                }
            }
        };
        c = next;
    }
    Ok(WalkTrace {
        leaf: Edge::new(c.a()[0], c.b()[0]).expect("disjoint sides"),
        branchings,
        depth_bound: depth,
        queries_used: queries,
    })
}

/// Every leaf the walk can reach, with its branching count, found by
/// expanding the whole walk tree. Intended for audits on small cells.
pub fn walk_distribution<O: BisOracle + ?Sized>(
    o: &O,
    a: &[Vertex],
    b: &[Vertex],
) -> Result<Vec<(Edge, u32)>, PrimitiveError> {
    let (a, b) = (sorted(a), sorted(b));
    let cell = Cell::new(o.vertex_count(), &a, &b)?;
    let mut out = Vec::new();
    if o.bis_cell(cell)? {
        expand(o, cell, 0, &mut out)?;
    }
    Ok(out)
}

fn expand<O: BisOracle + ?Sized>(o: &O, c: Cell<'_>, branchings: u32, out: &mut Vec<(Edge, u32)>) -> Result<(), PrimitiveError> {
    if c.is_leaf() {
        out.push((Edge::new(c.a()[0], c.b()[0]).expect("disjoint sides"), branchings));
        return Ok(());
    }
    let (c1, c2) = c.split();
    let first = o.bis_cell(c1)?;
    let second = !first || o.bis_cell(c2)?;
    let br = branchings + u32::from(first && second);
    if first {
        expand(o, c1, br, out)?;
    }
    if second {
        expand(o, c2, br, out)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::complete_bipartite;
    use crate::graph::Graph;
    use crate::oracle::OracleHandle;
    use crate::rng::Seed;

    fn exact_check(g: &Graph, a: &[Vertex], b: &[Vertex]) {
        let h = OracleHandle::new(g.clone());
        let truth: Vec<Edge> = g
            .edges()
            .filter(|e| (a.contains(&e.lo()) && b.contains(&e.hi())) || (a.contains(&e.hi()) && b.contains(&e.lo())))
            .collect();
        let dist = walk_distribution(&h, a, b).unwrap();
        // Each edge is exactly one leaf of the walk tree.
        let mut leaves: Vec<Edge> = dist.iter().map(|&(e, _)| e).collect();
        leaves.sort();
        assert_eq!(leaves, truth);
        let total: Ratio<u128> = dist.iter().map(|&(_, br)| Ratio::new(1, 1u128 << br)).sum();
        let expectation: Ratio<u128> = dist.iter().map(|&(_, br)| Ratio::new(1, 1u128 << br) * (1u128 << br)).sum();
        let d = depth_bound(a.len(), b.len());
        if truth.is_empty() {
            assert!(dist.is_empty());
        } else {
            assert_eq!(total, Ratio::from_integer(1));
            assert_eq!(expectation, Ratio::from_integer(truth.len() as u128));
            assert!(dist.iter().all(|&(_, br)| br <= d));
        }
    }

    #[test]
    fn unbiased_exhaustively_on_small_cells() {
        // Every bipartite graph between A = {0..a} and B = {a..a+b}, a, b ≤ 3,
        // plus sampled ones for a, b = 4.
        for a in 1..=3usize {
            for b in 1..=3usize {
                let pairs: Vec<(Vertex, Vertex)> = (0..a as Vertex)
                    .flat_map(|x| (a as Vertex..(a + b) as Vertex).map(move |y| (x, y)))
                    .collect();
                for mask in 0u32..(1 << pairs.len()) {
                    let edges = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p);
                    let g = Graph::from_edges(a + b, edges).unwrap();
                    let av: Vec<Vertex> = (0..a as Vertex).collect();
                    let bv: Vec<Vertex> = (a as Vertex..(a + b) as Vertex).collect();
                    exact_check(&g, &av, &bv);
                }
            }
        }
        for s in 0..300u64 {
            let g = crate::generators::gen_bipartite(4, 4, 0.5, Seed(s)).unwrap();
            exact_check(&g, &[0, 1, 2, 3], &[4, 5, 6, 7]);
        }
    }

    #[test]
    fn walk_leaf_is_edge_and_trace_consistent() {
        let g = complete_bipartite(5, 3);
        let h = OracleHandle::new(g.clone());
        let mut rng = Seed(3).rng();
        for _ in 0..200 {
            let t = walk(&h, &[0, 1, 2, 3, 4], &[5, 6, 7], &mut rng).unwrap();
            assert!(g.has_edge(t.leaf.lo(), t.leaf.hi()));
            assert_eq!(t.depth_bound, 5);
            assert!(t.branchings <= t.depth_bound);
            assert!(t.queries_used <= 2 * t.depth_bound as u64);
            assert_eq!(t.probability() * (1u128 << t.branchings), Ratio::from_integer(1));
        }
    }
}

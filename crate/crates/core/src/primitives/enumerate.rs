use super::{sorted, PrimitiveError};
use crate::graph::{Edge, Vertex};
use crate::oracle::{BisOracle, Cell};

/// All edges between `a` and `b`, found by recursive halving.
///
/// A cell whose BIS answer is "empty" is dropped; a nonempty cell is split and
/// both halves explored. When the first half turns out empty, the second is
/// known to be nonempty and is not queried.
pub fn enum_edges_bipartite<O: BisOracle + ?Sized>(
    o: &O,
    a: &[Vertex],
    b: &[Vertex],
) -> Result<Vec<Edge>, PrimitiveError> {
    let (a, b) = (sorted(a), sorted(b));
    let mut out = Vec::new();
    enumerate_sorted(o, &a, &b, &mut out)?;
    Ok(out)
}

/// Enumeration on sorted sides.
pub(crate) fn enumerate_sorted<O: BisOracle + ?Sized>(
    o: &O,
    a: &[Vertex],
    b: &[Vertex],
    out: &mut Vec<Edge>,
) -> Result<(), PrimitiveError> {
    enumerate_cell(o, Cell::new(o.vertex_count(), a, b)?, out)
}

pub(crate) fn enumerate_cell<O: BisOracle + ?Sized>(o: &O, c: Cell<'_>, out: &mut Vec<Edge>) -> Result<(), PrimitiveError> {
    if o.bis_cell(c)? {
        enumerate_known(o, c, out)?;
    }
    Ok(())
}

/// Same as [`enumerate_cell`] for a cell already known to contain an edge.
fn enumerate_known<O: BisOracle + ?Sized>(o: &O, c: Cell<'_>, out: &mut Vec<Edge>) -> Result<(), PrimitiveError> {
    if c.is_leaf() {
        out.push(Edge::new(c.a()[0], c.b()[0]).expect("disjoint sides"));
        return Ok(());
    }
    let (c1, c2) = c.split();
    let before = out.len();
    enumerate_cell(o, c1, out)?;
    if out.len() == before {
        enumerate_known(o, c2, out)
    } else {
        enumerate_cell(o, c2, out)
    }
}

/// All edges with both endpoints in `x`: halve `x`, recurse on each half and
/// enumerate the edges across the cut.
pub fn enum_edges_induced<O: BisOracle + ?Sized>(o: &O, x: &[Vertex]) -> Result<Vec<Edge>, PrimitiveError> {
    if x.len() < 2 {
        return Err(PrimitiveError::TooFewVertices(x.len()));
    }
    let x = sorted(x);
    if let Some(w) = x.windows(2).find(|w| w[0] == w[1]) {
        return Err(crate::oracle::OracleError::Repeated(w[0]).into());
    }
    let mut out = Vec::new();
    induced_rec(o, &x, &mut out)?;
    out.sort_unstable();
    Ok(out)
}

fn induced_rec<O: BisOracle + ?Sized>(o: &O, x: &[Vertex], out: &mut Vec<Edge>) -> Result<(), PrimitiveError> {
    if x.len() < 2 {
        return Ok(());
    }
    let (x1, x2) = x.split_at(x.len().div_ceil(2));
    induced_rec(o, x1, out)?;
    induced_rec(o, x2, out)?;
    enumerate_sorted(o, x1, x2, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{complete, complete_bipartite, gen_er};
    use crate::graph::Graph;
    use crate::oracle::{OracleError, OracleHandle};
    use crate::primitives::ceil_log2;

    #[test]
    fn empty_graph_one_query() {
        let h = OracleHandle::new(Graph::empty(8));
        assert!(enum_edges_bipartite(&h, &[0, 1, 2], &[3, 4, 5, 6]).unwrap().is_empty());
        assert_eq!(h.ledger().bis, 1);
    }

    #[test]
    fn single_edge() {
        let h = OracleHandle::new(Graph::from_edges(2, [(0, 1)]).unwrap());
        assert_eq!(enum_edges_bipartite(&h, &[0], &[1]).unwrap(), vec![Edge::new(0, 1).unwrap()]);
    }

    #[test]
    fn k44_within_bound() {
        let h = OracleHandle::new(complete_bipartite(4, 4));
        let mut got = enum_edges_bipartite(&h, &[0, 1, 2, 3], &[4, 5, 6, 7]).unwrap();
        got.sort();
        assert_eq!(got, complete_bipartite(4, 4).edges().collect::<Vec<_>>());
        assert!(h.ledger().bis <= 16 * (2 + 2 + 1));
    }

    #[test]
    fn overlap_rejected() {
        let h = OracleHandle::new(complete(4));
        assert_eq!(
            enum_edges_bipartite(&h, &[0, 1], &[1, 2]),
            Err(PrimitiveError::Oracle(OracleError::Overlap(1)))
        );
        assert_eq!(h.ledger().bis, 0);
    }

    #[test]
    fn induced_examples() {
        let h = OracleHandle::new(complete(3));
        assert_eq!(enum_edges_induced(&h, &[0, 1, 2]).unwrap().len(), 3);
        assert!(matches!(enum_edges_induced(&h, &[0]), Err(PrimitiveError::TooFewVertices(1))));
        let h = OracleHandle::new(crate::generators::path(6));
        assert!(enum_edges_induced(&h, &[0, 2, 4]).unwrap().is_empty());
    }

    #[test]
    fn induced_matches_ground_truth() {
        for s in 0..20 {
            let g = gen_er(64, 0.1, s.into()).unwrap();
            let h = OracleHandle::new(g.clone());
            let all: Vec<Vertex> = (0..64).collect();
            assert_eq!(enum_edges_induced(&h, &all).unwrap(), g.edges().collect::<Vec<_>>());
        }
    }

    #[test]
    fn bipartite_query_bound_on_random_graphs() {
        for s in 0..30u64 {
            let g = gen_er(40, 0.05 + 0.02 * (s % 10) as f64, s.into()).unwrap();
            let a: Vec<Vertex> = (0..17).collect();
            let b: Vec<Vertex> = (17..40).collect();
            let h = OracleHandle::new(g.clone());
            let got = enum_edges_bipartite(&h, &a, &b).unwrap();
            let truth: Vec<Edge> = g.edges().filter(|e| e.lo() < 17 && e.hi() >= 17).collect();
            assert_eq!(got.len(), truth.len());
            let d = (ceil_log2(a.len()) + ceil_log2(b.len()) + 1) as u64;
            assert!(h.ledger().bis <= 2 * (truth.len() as u64).max(1) * d);
        }
    }
}

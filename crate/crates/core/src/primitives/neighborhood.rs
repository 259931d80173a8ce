use super::estimate::estimate_edges_with;
use super::sample::sample_edge_with;
use super::{enum_edges_bipartite, ApproxParams, CountEstimate, PrimitiveError};
use crate::graph::Vertex;
use crate::oracle::BisOracle;
use rand::Rng;

fn check(v: Vertex, z: &[Vertex]) -> Result<(), PrimitiveError> {
    if z.contains(&v) {
        return Err(PrimitiveError::VertexInSet(v));
    }
    Ok(())
}

/// `N(v) ∩ z`, sorted.
pub fn neighbors_of<O: BisOracle + ?Sized>(o: &O, v: Vertex, z: &[Vertex]) -> Result<Vec<Vertex>, PrimitiveError> {
    check(v, z)?;
    if z.is_empty() {
        return Ok(Vec::new());
    }
    let mut out: Vec<Vertex> = enum_edges_bipartite(o, &[v], z)?.into_iter().map(|e| e.other(v)).collect();
    out.sort_unstable();
    Ok(out)
}

/// `(1 ± ε)`-estimate of `|N(v) ∩ z|`.
pub fn approx_degree<O: BisOracle + ?Sized>(
    o: &O,
    v: Vertex,
    z: &[Vertex],
    ap: &ApproxParams,
) -> Result<CountEstimate, PrimitiveError> {
    approx_degree_with(o, v, z, ap, &mut ap.seed.rng())
}

pub fn approx_degree_with<O, R>(
    o: &O,
    v: Vertex,
    z: &[Vertex],
    ap: &ApproxParams,
    rng: &mut R,
) -> Result<CountEstimate, PrimitiveError>
where
    O: BisOracle + ?Sized,
    R: Rng + ?Sized,
{
    check(v, z)?;
    if z.is_empty() {
        return Ok(CountEstimate::exact(0));
    }
    estimate_edges_with(o, &[v], z, ap, rng)
}

/// Uniform random member of `N(v) ∩ z`.
pub fn random_neighbor<O: BisOracle + ?Sized>(
    o: &O,
    v: Vertex,
    z: &[Vertex],
    ap: &ApproxParams,
) -> Result<Vertex, PrimitiveError> {
    random_neighbor_with(o, v, z, ap, &mut ap.seed.rng())
}

pub fn random_neighbor_with<O, R>(
    o: &O,
    v: Vertex,
    z: &[Vertex],
    ap: &ApproxParams,
    rng: &mut R,
) -> Result<Vertex, PrimitiveError>
where
    O: BisOracle + ?Sized,
    R: Rng + ?Sized,
{
    check(v, z)?;
    if z.is_empty() {
        return Err(PrimitiveError::EmptyEdgeSet);
    }
    Ok(sample_edge_with(o, &[v], z, ap, rng)?.other(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_er, star};
    use crate::graph::Graph;
    use crate::oracle::OracleHandle;
    use crate::rng::Seed;
    use crate::stats::tv_from_uniform;

    fn others(v: Vertex, n: usize) -> Vec<Vertex> {
        (0..n as Vertex).filter(|&x| x != v).collect()
    }

    #[test]
    fn neighbors_examples() {
        let h = OracleHandle::new(star(6));
        assert_eq!(neighbors_of(&h, 0, &[1, 2, 3, 4, 5, 6]).unwrap(), vec![1, 2, 3, 4, 5, 6]);
        let h = OracleHandle::new(Graph::from_edges(4, [(1, 2)]).unwrap());
        assert!(neighbors_of(&h, 0, &[1, 2, 3]).unwrap().is_empty());
        assert_eq!(h.ledger().bis, 1);
        assert_eq!(neighbors_of(&h, 1, &[1, 2]), Err(PrimitiveError::VertexInSet(1)));
        for s in 0..10 {
            let g = gen_er(64, 0.2, Seed(s)).unwrap();
            let h = OracleHandle::new(g.clone());
            for v in [0, 17, 63] {
                assert_eq!(neighbors_of(&h, v, &others(v, 64)).unwrap(), g.neighbors(v));
            }
        }
    }

    #[test]
    fn degree_examples() {
        let ap = |s| ApproxParams::new(0.1, 0.05, s).unwrap();
        let h = OracleHandle::new(Graph::from_edges(5, [(1, 2)]).unwrap());
        assert_eq!(approx_degree(&h, 0, &others(0, 5), &ap(0)).unwrap(), CountEstimate::exact(0));
        assert_eq!(approx_degree(&h, 1, &others(1, 5), &ap(0)).unwrap(), CountEstimate::exact(1));
        assert_eq!(random_neighbor(&h, 1, &others(1, 5), &ap(0)).unwrap(), 2);
        let h = OracleHandle::new(star(63));
        let ok = (0..100)
            .filter(|&s| {
                let d = approx_degree(&h, 0, &others(0, 64), &ap(s)).unwrap().value;
                (56.0..=70.0).contains(&d)
            })
            .count();
        assert!(ok >= 95);
    }

    #[test]
    fn random_neighbor_uniform() {
        let g = gen_er(64, 0.2, Seed(9)).unwrap();
        let h = OracleHandle::new(g.clone());
        let v = 5;
        let z = others(v, 64);
        let ap = ApproxParams::new(0.1, 0.05, 0).unwrap();
        let mut rng = Seed(10).rng();
        let mut counts = vec![0u64; 64];
        for _ in 0..100_000 {
            counts[random_neighbor_with(&h, v, &z, &ap, &mut rng).unwrap() as usize] += 1;
        }
        assert!(counts.iter().enumerate().all(|(x, &c)| c == 0 || g.has_edge(v, x as Vertex)));
        let c: Vec<u64> = counts.into_iter().filter(|&c| c > 0).collect();
        assert!(tv_from_uniform::<f64>(&c, g.degree(v)) <= 0.02);
    }
}

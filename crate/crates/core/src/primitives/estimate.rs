use super::cut::CutLaw;
use super::walk::{walk_cell, walk_sorted};
use super::{enumerate::enumerate_sorted, sorted, ApproxParams, PrimitiveError};
use crate::graph::Vertex;
use crate::oracle::{BisOracle, Cell};
use crate::stats::median_of_means;
use rand::Rng;

/// An edge-count estimate; `exact` is set when the value came from full
/// enumeration or an empty probe.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CountEstimate {
    pub value: f64,
    pub exact: bool,
}

impl CountEstimate {
    pub fn exact(value: usize) -> Self {
        Self {
            value: value as f64,
            exact: true,
        }
    }
}

const COARSE_WALKS: usize = 16;

/// Shared driver: coarse probe, small-count enumeration, otherwise
/// median-of-means over unbiased single-shot samples.
fn drive<R, S, E>(ap: &ApproxParams, rng: &mut R, mut sample: S, enumerate: E) -> Result<CountEstimate, PrimitiveError>
where
    R: Rng + ?Sized,
    S: FnMut(&mut R) -> Result<f64, PrimitiveError>,
    E: FnOnce() -> Result<usize, PrimitiveError>,
{
    ap.validate()?;
    let mut coarse = 0.0;
    for _ in 0..COARSE_WALKS {
        coarse += sample(rng)?;
    }
    coarse /= COARSE_WALKS as f64;
    if coarse <= 4.0 / (ap.epsilon * ap.epsilon) {
        return Ok(CountEstimate::exact(enumerate()?));
    }
    let groups = (8.0 * (2.0 / ap.delta).ln()).ceil() as usize;
    let per_group = (ap.c_var / (ap.epsilon * ap.epsilon)).ceil() as usize;
    let mut xs = Vec::with_capacity(groups * per_group);
    for _ in 0..groups * per_group {
        xs.push(sample(rng)?);
    }
    Ok(CountEstimate {
        value: median_of_means(&xs, per_group),
        exact: false,
    })
}

/// `(1 ± ε)`-estimate of `|E(a, b)|` with probability at least `1 - δ`.
pub fn estimate_edges<O: BisOracle + ?Sized>(
    o: &O,
    a: &[Vertex],
    b: &[Vertex],
    ap: &ApproxParams,
) -> Result<CountEstimate, PrimitiveError> {
    estimate_edges_with(o, a, b, ap, &mut ap.seed.rng())
}

pub fn estimate_edges_with<O, R>(
    o: &O,
    a: &[Vertex],
    b: &[Vertex],
    ap: &ApproxParams,
    rng: &mut R,
) -> Result<CountEstimate, PrimitiveError>
where
    O: BisOracle + ?Sized,
    R: Rng + ?Sized,
{
    ap.validate()?;
    let (a, b) = (sorted(a), sorted(b));
    if !o.bis(&a, &b)? {
        return Ok(CountEstimate::exact(0));
    }
    if a.len() == 1 && b.len() == 1 {
        return Ok(CountEstimate::exact(1));
    }
    drive(
        ap,
        rng,
        |rng| Ok(walk_sorted(o, &a, &b, rng)?.estimate()),
        || {
            let mut out = Vec::new();
            enumerate_sorted(o, &a, &b, &mut out)?;
            Ok(out.len())
        },
    )
}

/// Single-shot unbiased estimate of `m`: draw a random cut, walk the
/// crossing edges if any, and divide by the probability that an edge crosses.
pub(crate) fn global_sample<O, R>(
    o: &O,
    cut: &CutLaw,
    rng: &mut R,
    a: &mut Vec<Vertex>,
    b: &mut Vec<Vertex>,
) -> Result<f64, PrimitiveError>
where
    O: BisOracle + ?Sized,
    R: Rng + ?Sized,
{
    cut.draw(rng, a, b);
    let cell = Cell::new(cut.n, a, b)?;
    if !o.bis_cell(cell)? {
        return Ok(0.0);
    }
    Ok(walk_cell(o, cell, rng)?.estimate() / cut.cross_prob)
}

/// `(1 ± ε)`-estimate of the total number of edges.
pub fn estimate_edge_count<O: BisOracle + ?Sized>(o: &O, ap: &ApproxParams) -> Result<CountEstimate, PrimitiveError> {
    estimate_edge_count_with(o, ap, &mut ap.seed.rng())
}

pub fn estimate_edge_count_with<O, R>(o: &O, ap: &ApproxParams, rng: &mut R) -> Result<CountEstimate, PrimitiveError>
where
    O: BisOracle + ?Sized,
    R: Rng + ?Sized,
{
    let n = o.vertex_count();
    if n < 2 {
        return Ok(CountEstimate::exact(0));
    }
    let cut = CutLaw::new(n);
    let (mut a, mut b) = (Vec::with_capacity(n), Vec::with_capacity(n));
    drive(
        ap,
        rng,
        |rng| global_sample(o, &cut, rng, &mut a, &mut b),
        || {
            let all: Vec<Vertex> = (0..n as Vertex).collect();
            Ok(super::enum_edges_induced(o, &all)?.len())
        },
    )
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{complete_bipartite, gen_er};
    use crate::graph::Graph;
    use crate::oracle::OracleHandle;

    #[test]
    fn empty_and_single() {
        let h = OracleHandle::new(Graph::empty(10));
        let ap = ApproxParams::new(0.1, 0.05, 0).unwrap();
        assert_eq!(estimate_edges(&h, &[0, 1, 2], &[3, 4], &ap).unwrap(), CountEstimate::exact(0));
        assert_eq!(h.ledger().bis, 1);
        let h = OracleHandle::new(Graph::from_edges(2, [(0, 1)]).unwrap());
        assert_eq!(estimate_edges(&h, &[0], &[1], &ap).unwrap(), CountEstimate::exact(1));
        let h = OracleHandle::new(crate::generators::star(5));
        let e = estimate_edges(&h, &[0], &[3, 1, 2], &ap).unwrap();
        assert_eq!(e, CountEstimate::exact(3));
    }

    #[test]
    fn k32_32_within_ten_percent() {
        let h = OracleHandle::new(complete_bipartite(32, 32));
        let a: Vec<Vertex> = (0..32).collect();
        let b: Vec<Vertex> = (32..64).collect();
        let mut ok = 0;
        for s in 0..100u64 {
            let ap = ApproxParams::new(0.1, 0.05, s).unwrap();
            let e = estimate_edges(&h, &a, &b, &ap).unwrap().value;
            ok += usize::from((922.0..=1127.0).contains(&e));
        }
        assert!(ok >= 95, "{ok}/100");
    }

    #[test]
    fn global_count() {
        let g = gen_er(100, 0.2, 7.into()).unwrap();
        let m = g.edge_count() as f64;
        let h = OracleHandle::new(g);
        let mut ok = 0;
        for s in 0..20u64 {
            let ap = ApproxParams::new(0.1, 0.05, s).unwrap();
            let e = estimate_edge_count(&h, &ap).unwrap().value;
            ok += usize::from((e - m).abs() <= 0.1 * m);
        }
        assert!(ok >= 19, "{ok}/20");
        let h = OracleHandle::new(Graph::empty(30));
        let ap = ApproxParams::new(0.1, 0.05, 0).unwrap();
        assert_eq!(estimate_edge_count(&h, &ap).unwrap(), CountEstimate::exact(0));
    }
}

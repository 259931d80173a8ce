use bisq::edgelist::{read_edge_list, write_edge_list};
use bisq::primitives::{enum_edges_bipartite, enum_edges_induced, neighbors_of, sample_edge_with, ApproxParams, EdgeSampler};
use bisq::triangle::{build_low_sketch, estimate_from_sketch, EstimatorConfig};
use bisq::{EeBacked, Edge, Graph, OracleHandle, Seed, Vertex};
use proptest::prelude::*;
use std::collections::BTreeSet;

fn graph_strategy(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n).prop_flat_map(|n| {
        proptest::collection::vec((0..n as Vertex, 0..n as Vertex), 0..n * 3)
            .prop_map(move |pairs| Graph::from_edges(n, pairs.into_iter().filter(|(u, v)| u != v)).unwrap())
    })
}

/// Graph plus a random split of its vertices into two nonempty sides and a
/// leftover part.
fn split_strategy() -> impl Strategy<Value = (Graph, Vec<Vertex>, Vec<Vertex>)> {
    graph_strategy(20).prop_flat_map(|g| {
        let n = g.vertex_count();
        (Just(g), proptest::collection::vec(0u8..3, n)).prop_filter_map("both sides nonempty", |(g, side)| {
            let pick = |s: u8| -> Vec<Vertex> { (0..side.len()).filter(|&i| side[i] == s).map(|i| i as Vertex).collect() };
            let (a, b) = (pick(0), pick(1));
            (!a.is_empty() && !b.is_empty()).then_some((g, a, b))
        })
    })
}

fn brute_triangles(g: &Graph) -> u64 {
    let n = g.vertex_count() as Vertex;
    let mut t = 0;
    for x in 0..n {
        for y in x + 1..n {
            for z in y + 1..n {
                t += u64::from(g.has_edge(x, y) && g.has_edge(y, z) && g.has_edge(x, z));
            }
        }
    }
    t
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn adjacency_is_symmetric_and_counts_agree(g in graph_strategy(30)) {
        let n = g.vertex_count() as Vertex;
        let degree_sum: usize = (0..n).map(|v| g.degree(v)).sum();
        prop_assert_eq!(degree_sum, 2 * g.edge_count());
        for u in 0..n {
            prop_assert!(!g.has_edge(u, u));
            for v in 0..n {
                prop_assert_eq!(g.has_edge(u, v), g.has_edge(v, u));
            }
        }
        prop_assert_eq!(g.count_triangles_exact(), brute_triangles(&g));
    }

    #[test]
    fn bis_matches_brute_force((g, a, b) in split_strategy()) {
        let h = OracleHandle::new(g.clone());
        let truth = a.iter().any(|&x| b.iter().any(|&y| g.has_edge(x, y)));
        prop_assert_eq!(h.bis(&a, &b).unwrap(), truth);
        prop_assert_eq!(h.bis_via_ee(&a, &b).unwrap(), truth);
        let l = h.ledger();
        prop_assert_eq!((l.bis, l.ee), (1, 1));
    }

    #[test]
    fn bipartite_enumeration_is_exact_and_within_bound((g, a, b) in split_strategy()) {
        let h = OracleHandle::new(g.clone());
        let got: BTreeSet<Edge> = enum_edges_bipartite(&h, &a, &b).unwrap().into_iter().collect();
        let want: BTreeSet<Edge> = g
            .edges()
            .filter(|e| (a.contains(&e.lo()) && b.contains(&e.hi())) || (b.contains(&e.lo()) && a.contains(&e.hi())))
            .collect();
        let k = want.len() as u64;
        prop_assert_eq!(got, want);
        let d = (a.len() as f64).log2().ceil() as u64 + (b.len() as f64).log2().ceil() as u64;
        prop_assert!(h.ledger().bis <= 1 + 2 * k * d.max(1));
    }

    #[test]
    fn induced_enumeration_and_neighborhoods_are_exact(g in graph_strategy(24), ee in any::<bool>()) {
        let h = OracleHandle::new(g.clone());
        let all: Vec<Vertex> = (0..g.vertex_count() as Vertex).collect();
        let got = if ee {
            enum_edges_induced(&EeBacked(&h), &all).unwrap()
        } else {
            enum_edges_induced(&h, &all).unwrap()
        };
        prop_assert_eq!(got, g.edges().collect::<Vec<_>>());
        for &v in &all {
            let rest: Vec<Vertex> = all.iter().copied().filter(|&x| x != v).collect();
            prop_assert_eq!(neighbors_of(&h, v, &rest).unwrap(), g.neighbors(v).to_vec());
        }
    }

    #[test]
    fn samplers_return_real_edges((g, a, b) in split_strategy(), seed in any::<u64>()) {
        let h = OracleHandle::new(g.clone());
        let ap = ApproxParams::new(0.2, 0.1, seed).unwrap();
        let mut rng = Seed(seed).rng();
        let crossing = a.iter().any(|&x| b.iter().any(|&y| g.has_edge(x, y)));
        match sample_edge_with(&h, &a, &b, &ap, &mut rng) {
            Ok(e) => {
                prop_assert!(g.has_edge(e.lo(), e.hi()));
                prop_assert!(a.contains(&e.lo()) != a.contains(&e.hi()));
            }
            Err(_) => prop_assert!(!crossing),
        }
        let mut sampler = EdgeSampler::new(g.vertex_count());
        for _ in 0..5 {
            match sampler.sample(&h, &mut rng) {
                Ok(e) => prop_assert!(g.has_edge(e.lo(), e.hi())),
                Err(_) => prop_assert_eq!(g.edge_count(), 0),
            }
        }
    }

    #[test]
    fn sketch_estimation_issues_no_queries(g in graph_strategy(40), seed in any::<u64>(), l in 1.0f64..50.0) {
        let h = OracleHandle::new(g.clone());
        let cfg = EstimatorConfig::new(0.3, seed);
        let m_hat = g.edge_count() as f64;
        let sk = build_low_sketch(&h, &cfg, l, m_hat, g.vertex_count()).unwrap();
        let before = h.ledger();
        let est = estimate_from_sketch(&sk, &cfg, l, m_hat).unwrap();
        prop_assert_eq!(before, h.ledger());
        prop_assert!(est >= 0.0 && est.is_finite());
        if g.count_triangles_exact() == 0 {
            prop_assert_eq!(est, 0.0);
        }
    }

    #[test]
    fn edge_list_round_trips(g in graph_strategy(40)) {
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf).unwrap();
        let back = read_edge_list(&buf[..]).unwrap();
        prop_assert_eq!(back.vertex_count(), g.vertex_count());
        prop_assert_eq!(back.edges().collect::<Vec<_>>(), g.edges().collect::<Vec<_>>());
    }
}

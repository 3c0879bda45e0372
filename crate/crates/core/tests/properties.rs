use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use perfgen::exactalgs::{alpha_exact, classify_gs, connectivity, omega_exact, GSTag};
use perfgen::graph::{graph6_decode, graph6_encode};
use perfgen::graphon::{t_graphon, wp};
use perfgen::numerics::LogWeight;
use perfgen::structure::{alpha_omega_fast, verify_cycle};
use perfgen::{Generator, Graph, VertexSet};

fn graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let mut g = Graph::new(n);
            let mut it = bits.into_iter();
            for v in 1..n {
                for u in 0..v {
                    if it.next().unwrap() {
                        g.add_edge(u, v);
                    }
                }
            }
            g
        })
    })
}

fn disjoint_union(a: &Graph, b: &Graph) -> Graph {
    let mut g = Graph::new(a.n() + b.n());
    for (u, v) in a.edges() {
        g.add_edge(u, v);
    }
    for (u, v) in b.edges() {
        g.add_edge(a.n() + u, a.n() + v);
    }
    g
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn graph6_round_trip(g in graph(100)) {
        let s = graph6_encode(&g);
        prop_assert_eq!(graph6_decode(s.as_bytes()).unwrap(), g);
    }

    #[test]
    fn complement_is_an_involution(g in graph(70)) {
        let c = g.complement();
        prop_assert_eq!(c.complement(), g.clone());
        for v in 0..g.n() {
            prop_assert_eq!(g.degree(v) + c.degree(v), g.n() - 1);
        }
        prop_assert_eq!(g.edge_count() + c.edge_count(), g.n() * (g.n() - 1) / 2);
    }

    #[test]
    fn row_kernels_match_naive_loops(g in graph(64), mask in any::<u64>()) {
        let n = g.n();
        let s = VertexSet::from_iter(n, (0..n).filter(|&v| mask >> v & 1 == 1));
        for v in 0..n {
            let naive = (0..n).filter(|&u| s.contains(u) && g.has_edge(u, v)).count();
            prop_assert_eq!(g.degree_in(v, &s), naive);
            prop_assert_eq!(g.neighbors(v).count(), (0..n).filter(|&u| g.has_edge(u, v)).count());
        }
        let clique = s.iter().all(|u| s.iter().all(|w| u == w || g.has_edge(u, w)));
        prop_assert_eq!(g.is_clique(&s), clique);
        let stable = s.iter().all(|u| s.iter().all(|w| !g.has_edge(u, w)));
        prop_assert_eq!(g.is_stable(&s), stable);
    }

    #[test]
    fn log_weight_sums_associate(a in -60.0f64..60.0, b in -60.0f64..60.0, c in -60.0f64..60.0) {
        let (x, y, z) = (LogWeight::from_lg(a), LogWeight::from_lg(b), LogWeight::from_lg(c));
        let l = ((x + y) + z).lg;
        let r = (x + (y + z)).lg;
        prop_assert!((l - r).abs() <= 1e-12 * l.abs().max(1.0));
        prop_assert!(((x * y).lg - (a + b)).abs() <= 1e-12 * (a + b).abs().max(1.0));
    }

    #[test]
    fn classification_swaps_under_complement(g in graph(9)) {
        let a = classify_gs(&g).unwrap().tag;
        let b = classify_gs(&g.complement()).unwrap().tag;
        let want = match a {
            GSTag::UnipolarOnly => GSTag::CoUnipolarOnly,
            GSTag::CoUnipolarOnly => GSTag::UnipolarOnly,
            t => t,
        };
        prop_assert_eq!(b, want);
    }

    #[test]
    fn alpha_is_omega_of_complement(g in graph(24)) {
        prop_assert_eq!(alpha_exact(&g).unwrap(), omega_exact(&g.complement()).unwrap());
    }

    #[test]
    fn connectivity_at_most_min_degree(g in graph(30)) {
        let k = connectivity(&g);
        if g.n() > 1 {
            prop_assert!(k <= g.min_degree());
        }
    }

    #[test]
    fn densities_multiply_over_disjoint_unions(a in graph(4), b in graph(4)) {
        let w = wp();
        let joint = t_graphon(&disjoint_union(&a, &b), &w).unwrap();
        prop_assert_eq!(joint, t_graphon(&a, &w).unwrap() * t_graphon(&b, &w).unwrap());
    }

    #[test]
    fn every_order_of_a_complete_graph_is_a_cycle(n in 3usize..40, seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert!(verify_cycle(&Graph::complete(n), &order));
        order.pop();
        prop_assert!(!verify_cycle(&Graph::complete(n), &order));
        order.push(order[0]);
        prop_assert!(!verify_cycle(&Graph::complete(n), &order));
    }

    #[test]
    fn generated_graphs_carry_valid_arrangements(n in 1usize..60, seed in any::<u64>()) {
        let (g, arr) = Generator::new(n).gen(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert!(arr.validate(&g).is_ok());
        let (gc, dual) = (g.complement(), arr.dual());
        prop_assert!(dual.validate(&gc).is_ok());
        let f = alpha_omega_fast(&g, &arr).unwrap();
        let fc = alpha_omega_fast(&gc, &dual).unwrap();
        prop_assert_eq!((f.alpha, f.omega), (fc.omega, fc.alpha));
    }
}

use groupcast::coloring::{
    exact_local_chromatic, fractional_local_chromatic, greedy_local_coloring, largest_bidirected_clique,
    local_chromatic_ilp, max_local_colors, SolverLimits,
};
use groupcast::conflict::Digraph;
use groupcast::rational::from_usize;
use proptest::prelude::*;

fn digraph(max_order: usize) -> impl Strategy<Value = Digraph> {
    (1..=max_order)
        .prop_flat_map(|n| (Just(n), prop::collection::vec(any::<bool>(), n * n)))
        .prop_map(|(n, bits)| {
            let edges = (0..n)
                .flat_map(|a| (0..n).map(move |b| (a, b)))
                .filter(|&(a, b)| a != b && bits[a * n + b]);
            Digraph::new(n, edges).unwrap()
        })
}

fn edges(g: &Digraph) -> Vec<(usize, usize)> {
    (0..g.order())
        .flat_map(|a| g.successors(a).iter().map(move |&b| (a, b)))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn colorings_are_proper_and_values_recompute(g in digraph(8)) {
        let limits = SolverLimits::default();
        for consistent in [false, true] {
            let r = exact_local_chromatic(&g, consistent, &limits).unwrap();
            let colors = r.coloring.colors();
            for a in 0..g.order() {
                for &b in g.neighbors(a) {
                    prop_assert_ne!(colors[a], colors[b]);
                }
            }
            prop_assert_eq!(max_local_colors(&g, colors), r.chi_l);
            prop_assert!(r.chi_l >= largest_bidirected_clique(&g));
        }
        let greedy = greedy_local_coloring(&g);
        prop_assert_eq!(max_local_colors(&g, greedy.coloring.colors()), greedy.chi_l);
        prop_assert!(greedy.chi_l >= exact_local_chromatic(&g, false, &limits).unwrap().chi_l);
    }

    #[test]
    fn relaxation_ordering(g in digraph(7)) {
        let limits = SolverLimits::default();
        let exact = exact_local_chromatic(&g, false, &limits).unwrap().chi_l;
        prop_assert_eq!(local_chromatic_ilp(&g, &limits).unwrap(), exact);
        prop_assert!(fractional_local_chromatic(&g, &limits).unwrap().value <= from_usize(exact));
    }

    #[test]
    fn invariant_under_vertex_relabeling(g in digraph(8), perm_seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut perm: Vec<usize> = (0..g.order()).collect();
        perm.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(perm_seed));
        let h = Digraph::new(g.order(), edges(&g).into_iter().map(|(a, b)| (perm[a], perm[b]))).unwrap();
        let limits = SolverLimits::default();
        prop_assert_eq!(
            exact_local_chromatic(&g, false, &limits).unwrap().chi_l,
            exact_local_chromatic(&h, false, &limits).unwrap().chi_l
        );
    }

    #[test]
    fn adding_an_edge_never_helps(g in digraph(8), pick in any::<prop::sample::Index>()) {
        let n = g.order();
        let missing: Vec<(usize, usize)> = (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .filter(|&(a, b)| a != b && !g.has_edge(a, b))
            .collect();
        prop_assume!(!missing.is_empty());
        let mut more = edges(&g);
        more.push(missing[pick.index(missing.len())]);
        let h = Digraph::new(n, more).unwrap();
        let limits = SolverLimits::default();
        prop_assert!(
            exact_local_chromatic(&h, false, &limits).unwrap().chi_l
                >= exact_local_chromatic(&g, false, &limits).unwrap().chi_l
        );
    }
}

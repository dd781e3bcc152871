use std::collections::BTreeSet;

use groupcast::conflict::build_conflict_graph;
use groupcast::model::{binomial, place_caches, requested_vertices, PacketLabel, RequestMatrix, SystemParams};
use groupcast::rational::from_usize;
use proptest::prelude::*;
use proptest::sample::subsequence;

/// `(n, m, t, L)` with integer `t` plus one request matrix.
fn instance() -> impl Strategy<Value = (SystemParams, RequestMatrix)> {
    (1usize..=5, 1usize..=4)
        .prop_flat_map(|(n, m)| (Just(n), Just(m), 0..=n, 1..=m))
        .prop_flat_map(|(n, m, t, l)| {
            let row = subsequence((1..=m).collect::<Vec<_>>(), l).prop_shuffle();
            (Just((n, m, t, l)), prop::collection::vec(row, n))
        })
        .prop_map(|((n, m, t, l), rows)| {
            let p = SystemParams::new(n, m, from_usize(t * m) / from_usize(n), l).unwrap();
            let f = RequestMatrix::for_params(&p, rows).unwrap();
            (p, f)
        })
}

fn relabel(label: &PacketLabel, perm: &[usize]) -> PacketLabel {
    PacketLabel::new(label.file, label.subset.iter().map(|&u| perm[u - 1]).collect())
}

proptest! {
    #[test]
    fn caches_hold_exactly_m_file_units((p, _) in instance()) {
        let pl = place_caches(&p).unwrap();
        let t = p.integer_t().unwrap();
        let total: usize = (1..=p.users).map(|u| pl.cache(u).len()).sum();
        // sum of cached packets over C(n, t) is n M file units
        prop_assert_eq!(from_usize(total) / from_usize(binomial(p.users, t)), from_usize(p.users) * &p.memory);
        for u in 1..=p.users {
            let expect = if t == 0 { 0 } else { p.files * binomial(p.users - 1, t - 1) };
            prop_assert_eq!(pl.cache(u).len(), expect);
        }
    }

    #[test]
    fn cached_and_requested_partition_each_file((p, f) in instance()) {
        let pl = place_caches(&p).unwrap();
        let requested = requested_vertices(&pl, &f).unwrap();
        for u in 1..=p.users {
            for &file in f.row(u) {
                let mut seen = BTreeSet::new();
                for label in pl.packets_of(file) {
                    let wanted = requested.iter().any(|(v, l)| *v == u && *l == label);
                    prop_assert!(wanted != pl.is_cached(u, &label));
                    seen.insert(label);
                }
                prop_assert_eq!(seen.len(), pl.packets_per_file());
            }
        }
    }

    #[test]
    fn requested_vertices_commute_with_user_relabeling(
        (p, f) in instance(),
        seed in any::<u64>(),
    ) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut perm: Vec<usize> = (1..=p.users).collect();
        perm.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let pl = place_caches(&p).unwrap();
        // user u of the relabeled instance is user perm^-1(u) of the original
        let mut rows = vec![Vec::new(); p.users];
        for u in 1..=p.users {
            rows[perm[u - 1] - 1] = f.row(u).to_vec();
        }
        let g = RequestMatrix::for_params(&p, rows).unwrap();
        let mapped: BTreeSet<(usize, PacketLabel)> = requested_vertices(&pl, &f)
            .unwrap()
            .into_iter()
            .map(|(u, l)| (perm[u - 1], relabel(&l, &perm)))
            .collect();
        let direct: BTreeSet<(usize, PacketLabel)> = requested_vertices(&pl, &g).unwrap().into_iter().collect();
        prop_assert_eq!(mapped, direct);
    }

    #[test]
    fn edges_follow_the_cache_rule((p, f) in instance()) {
        let pl = place_caches(&p).unwrap();
        let g = build_conflict_graph(&pl, &f).unwrap();
        let d = g.digraph();
        let t = p.integer_t().unwrap();
        prop_assert_eq!(g.order(), p.requests * p.users * binomial(p.users - 1, t));
        for a in 0..g.order() {
            for b in 0..g.order() {
                let (va, vb) = (g.vertex(a), g.vertex(b));
                // edge a -> b iff b's packet is unknown to a's user and differs from a's
                let expect = a != b && !pl.is_cached(va.user, &vb.packet) && va.packet != vb.packet;
                prop_assert_eq!(d.has_edge(a, b), expect, "{} -> {}", a, b);
                if va.packet == vb.packet {
                    prop_assert!(!d.adjacent(a, b));
                    prop_assert_eq!(d.class_of(a), d.class_of(b));
                }
            }
        }
    }
}

use crate::conflict::Digraph;
use crate::error::{Error, Result};

use super::SolverLimits;

/// All nonempty independent sets of the undirected version, as bitmasks.
pub(crate) fn independent_sets(graph: &Digraph) -> Vec<u64> {
    let n = graph.order();
    let adj: Vec<u64> = (0..n)
        .map(|v| graph.neighbors(v).iter().fold(0u64, |m, &w| m | 1u64 << w))
        .collect();
    let mut out = Vec::new();
    fn rec(adj: &[u64], set: u64, candidates: u64, out: &mut Vec<u64>) {
        let mut rest = candidates;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let grown = set | 1u64 << v;
            out.push(grown);
            rec(adj, grown, rest & !adj[v], out);
        }
    }
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    rec(&adj, 0, all, &mut out);
    out
}

/// `hits[I]`: vertices whose closed out-neighborhood meets `I`.
pub(crate) fn hit_masks(graph: &Digraph, sets: &[u64]) -> Vec<u64> {
    let n = graph.order();
    // seen_by[u]: vertices v with u in N+(v)
    let mut seen_by = vec![0u64; n];
    for v in 0..n {
        seen_by[v] |= 1u64 << v;
        for &u in graph.successors(v) {
            seen_by[u] |= 1u64 << v;
        }
    }
    sets.iter()
        .map(|&set| {
            let mut hit = 0u64;
            let mut rest = set;
            while rest != 0 {
                let u = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                hit |= seen_by[u];
            }
            hit
        })
        .collect()
}

pub(crate) fn check_lp_size(graph: &Digraph, limits: &SolverLimits, solver: &'static str) -> Result<()> {
    let limit = limits.lp_vertices.min(63);
    if graph.order() > limit {
        return Err(Error::TooLarge {
            solver,
            size: graph.order(),
            limit,
        });
    }
    Ok(())
}

/// Optimal `k` of the 0/1 program: choose independent sets `x_I` covering
/// every vertex so that at most `k` chosen sets meet any closed
/// out-neighborhood.
///
/// Branch and bound over covers: the lowest uncovered vertex is always
/// covered next, by each independent set containing it in turn. Sets may
/// overlap; only the count of chosen sets touching each neighborhood
/// matters.
pub fn local_chromatic_ilp(graph: &Digraph, limits: &SolverLimits) -> Result<usize> {
    check_lp_size(graph, limits, "local chromatic 0/1 program")?;
    let n = graph.order();
    if n == 0 {
        return Ok(0);
    }
    let sets = independent_sets(graph);
    let hits = hit_masks(graph, &sets);
    let mut containing: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, &set) in sets.iter().enumerate() {
        for (v, list) in containing.iter_mut().enumerate() {
            if set >> v & 1 == 1 {
                list.push(i);
            }
        }
    }
    for list in &mut containing {
        list.sort_by_key(|&i| (std::cmp::Reverse(sets[i].count_ones()), i));
    }

    // Singletons are always a feasible cover.
    let mut best = (0..n).map(|v| graph.successors(v).len() + 1).max().unwrap_or(0);
    let full = (1u64 << n) - 1;
    let mut counts = vec![0usize; n];
    cover(&sets, &hits, &containing, full, 0, &mut counts, 0, &mut best);
    Ok(best)
}

#[allow(clippy::too_many_arguments)]
fn cover(
    sets: &[u64],
    hits: &[u64],
    containing: &[Vec<usize>],
    full: u64,
    covered: u64,
    counts: &mut [usize],
    current: usize,
    best: &mut usize,
) {
    if covered == full {
        *best = (*best).min(current);
        return;
    }
    let v = (!covered & full).trailing_zeros() as usize;
    for &i in &containing[v] {
        let mut worst = current;
        let mut rest = hits[i];
        while rest != 0 {
            let u = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            worst = worst.max(counts[u] + 1);
        }
        if worst >= *best {
            continue;
        }
        apply(hits[i], counts, true);
        cover(sets, hits, containing, full, covered | sets[i], counts, worst, best);
        apply(hits[i], counts, false);
    }
}

fn apply(mask: u64, counts: &mut [usize], add: bool) {
    let mut rest = mask;
    while rest != 0 {
        let u = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        if add {
            counts[u] += 1;
        } else {
            counts[u] -= 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::exact_local_chromatic;

    #[test]
    fn small_cases() {
        let limits = SolverLimits::default();
        assert_eq!(local_chromatic_ilp(&Digraph::new(1, []).unwrap(), &limits).unwrap(), 1);
        assert_eq!(local_chromatic_ilp(&Digraph::new(0, []).unwrap(), &limits).unwrap(), 0);
        for k in 1..=5 {
            assert_eq!(local_chromatic_ilp(&Digraph::complete(k), &limits).unwrap(), k);
        }
        assert_eq!(local_chromatic_ilp(&Digraph::cycle(5), &limits).unwrap(), 3);
    }

    #[test]
    fn independent_set_count() {
        // C5: 5 singletons + 5 non-adjacent pairs
        assert_eq!(independent_sets(&Digraph::cycle(5)).len(), 10);
        assert_eq!(independent_sets(&Digraph::new(4, []).unwrap()).len(), 15);
    }

    #[test]
    fn agrees_with_exact_search() {
        let limits = SolverLimits::default();
        for seed in 100..120 {
            let g = crate::coloring::test_graphs::random_digraph(seed, 8);
            let exact = exact_local_chromatic(&g, false, &limits).unwrap().chi_l;
            assert_eq!(local_chromatic_ilp(&g, &limits).unwrap(), exact, "seed {seed}");
        }
    }

    #[test]
    fn guard() {
        let limits = SolverLimits {
            lp_vertices: 4,
            ..SolverLimits::default()
        };
        assert!(local_chromatic_ilp(&Digraph::new(5, []).unwrap(), &limits).is_err());
    }
}

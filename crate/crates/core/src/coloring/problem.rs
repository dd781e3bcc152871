//! Bitset form of a local coloring instance shared by the exact search and
//! the greedy heuristic.
//!
//! Items are what receives a color: vertices, or vertex classes when classes
//! must be monochromatic. Every vertex contributes one window, the items of
//! its closed out-neighborhood; a coloring is feasible for `k` when no window
//! shows more than `k` colors.

use crate::conflict::Digraph;
use crate::error::{Error, Result};

pub(crate) const MAX_ITEMS: usize = 64;

#[derive(Clone, Debug)]
pub(crate) struct LocalProblem {
    pub item_of: Vec<usize>,
    pub adjacency: Vec<u64>,
    pub windows: Vec<u64>,
    pub windows_of: Vec<Vec<usize>>,
}

impl LocalProblem {
    pub fn build(graph: &Digraph, merge_classes: bool, limit: usize, solver: &'static str) -> Result<Self> {
        let item_of: Vec<usize> = if merge_classes {
            (0..graph.order()).map(|v| graph.class_of(v)).collect()
        } else {
            (0..graph.order()).collect()
        };
        let items = if merge_classes {
            graph.class_count()
        } else {
            graph.order()
        };
        let limit = limit.min(MAX_ITEMS);
        if items > limit {
            return Err(Error::TooLarge {
                solver,
                size: items,
                limit,
            });
        }
        let mut adjacency = vec![0u64; items];
        let mut raw_windows = Vec::with_capacity(graph.order());
        for v in 0..graph.order() {
            let a = item_of[v];
            let mut window = 1u64 << a;
            for &w in graph.successors(v) {
                window |= 1u64 << item_of[w];
            }
            for &w in graph.neighbors(v) {
                adjacency[a] |= 1u64 << item_of[w];
            }
            raw_windows.push(window);
        }
        // A window contained in another never binds.
        raw_windows.sort_unstable_by_key(|w| std::cmp::Reverse(w.count_ones()));
        let mut windows: Vec<u64> = Vec::new();
        for w in raw_windows {
            if !windows.iter().any(|&kept| kept & w == w) {
                windows.push(w);
            }
        }
        windows.sort_unstable();
        let mut windows_of = vec![Vec::new(); items];
        for (i, &w) in windows.iter().enumerate() {
            for (item, list) in windows_of.iter_mut().enumerate() {
                if w >> item & 1 == 1 {
                    list.push(i);
                }
            }
        }
        Ok(LocalProblem {
            item_of,
            adjacency,
            windows,
            windows_of,
        })
    }

    pub fn items(&self) -> usize {
        self.adjacency.len()
    }

    /// Largest clique of the item graph inside any single window.
    pub fn window_clique_bound(&self) -> usize {
        let mut best = usize::from(self.items() > 0);
        for &w in &self.windows {
            if (w.count_ones() as usize) > best {
                best = best.max(self.max_clique_within(w, best));
            }
        }
        best
    }

    fn max_clique_within(&self, candidates: u64, floor: usize) -> usize {
        fn grow(adj: &[u64], size: usize, candidates: u64, best: &mut usize) {
            if candidates == 0 {
                *best = (*best).max(size);
                return;
            }
            if size + candidates.count_ones() as usize <= *best {
                return;
            }
            let mut rest = candidates;
            while rest != 0 {
                if size + rest.count_ones() as usize <= *best {
                    return;
                }
                let v = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                grow(adj, size + 1, rest & adj[v], best);
            }
        }
        let mut best = floor;
        grow(&self.adjacency, 0, candidates, &mut best);
        best
    }

    /// Expands an item coloring (0-based) to 1-based vertex colors.
    pub fn vertex_colors(&self, item_colors: &[u8]) -> Vec<usize> {
        self.item_of
            .iter()
            .map(|&item| item_colors[item] as usize + 1)
            .collect()
    }
}

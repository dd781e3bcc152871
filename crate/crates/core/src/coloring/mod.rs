//! Directed local chromatic number.
//!
//! For a proper coloring of the undirected version of a digraph, the local
//! color count of a vertex is the number of distinct colors in its closed
//! out-neighborhood. `chi_l` is the minimum over colorings of the maximum
//! local count. Four solvers live here:
//!
//! * [`exact_local_chromatic`]: exhaustive search, optionally forcing one
//!   color per vertex class (one color per packet in conflict graphs).
//! * [`local_chromatic_ilp`]: the 0/1 program over independent sets, solved
//!   by branch and bound over covers. Kept independent of the exact search.
//! * [`fractional_local_chromatic`]: the LP relaxation in exact arithmetic.
//! * [`greedy_local_coloring`]: a fast upper bound.

mod exact;
mod fractional;
mod greedy;
mod ilp;
mod problem;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::conflict::Digraph;
use crate::error::{Error, Result};

pub use exact::exact_local_chromatic;
pub use fractional::{fractional_local_chromatic, FractionalResult};
pub use greedy::greedy_local_coloring;
pub use ilp::local_chromatic_ilp;

/// Size guards for the exponential solvers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverLimits {
    /// Maximum number of items (vertices, or classes when packet-consistent)
    /// for the exact search. Hard ceiling 64.
    pub exact_items: usize,
    /// Maximum vertex count for the 0/1 program and the LP.
    pub lp_vertices: usize,
}

impl Default for SolverLimits {
    fn default() -> Self {
        SolverLimits {
            exact_items: 48,
            lp_vertices: 20,
        }
    }
}

/// Vertex coloring with colors `1..=palette_size`, every one used.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coloring {
    colors: Vec<usize>,
    palette_size: usize,
}

impl Coloring {
    /// Validates properness on the undirected graph and that every palette
    /// color is used.
    pub fn new(graph: &Digraph, colors: Vec<usize>) -> Result<Self> {
        if colors.len() != graph.order() {
            return Err(Error::Parse(format!(
                "{} colors for {} vertices",
                colors.len(),
                graph.order()
            )));
        }
        let palette_size = colors.iter().copied().max().unwrap_or(0);
        let used: BTreeSet<usize> = colors.iter().copied().collect();
        if colors.contains(&0) || used.len() != palette_size {
            return Err(Error::Parse("colors must be exactly 1..=|c|, all used".into()));
        }
        for v in 0..graph.order() {
            if let Some(&w) = graph.neighbors(v).iter().find(|&&w| colors[w] == colors[v]) {
                return Err(Error::Parse(format!(
                    "vertices {v} and {w} are adjacent but share color {}",
                    colors[v]
                )));
            }
        }
        Ok(Coloring {
            colors,
            palette_size,
        })
    }

    pub fn color(&self, v: usize) -> usize {
        self.colors[v]
    }

    pub fn colors(&self) -> &[usize] {
        &self.colors
    }

    pub fn palette_size(&self) -> usize {
        self.palette_size
    }

    /// True when every vertex class is monochromatic.
    pub fn is_class_consistent(&self, graph: &Digraph) -> bool {
        let mut class_color = vec![0usize; graph.class_count()];
        (0..graph.order()).all(|v| {
            let slot = &mut class_color[graph.class_of(v)];
            if *slot == 0 {
                *slot = self.colors[v];
            }
            *slot == self.colors[v]
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalColoringResult {
    pub coloring: Coloring,
    pub chi_l: usize,
}

/// Maximum over vertices of the number of colors in the closed
/// out-neighborhood. Zero for the empty graph.
pub fn max_local_colors(graph: &Digraph, colors: &[usize]) -> usize {
    (0..graph.order())
        .map(|v| {
            let mut seen: BTreeSet<usize> = graph.successors(v).iter().map(|&w| colors[w]).collect();
            seen.insert(colors[v]);
            seen.len()
        })
        .max()
        .unwrap_or(0)
}

/// Size of the largest set of vertices joined pairwise in both directions.
pub fn largest_bidirected_clique(graph: &Digraph) -> usize {
    let n = graph.order();
    let both: Vec<Vec<usize>> = (0..n)
        .map(|v| {
            graph
                .successors(v)
                .iter()
                .copied()
                .filter(|&w| graph.has_edge(w, v))
                .collect()
        })
        .collect();
    fn grow(both: &[Vec<usize>], clique: &mut Vec<usize>, candidates: &[usize], best: &mut usize) {
        *best = (*best).max(clique.len());
        if clique.len() + candidates.len() <= *best {
            return;
        }
        for (i, &c) in candidates.iter().enumerate() {
            let rest: Vec<usize> = candidates[i + 1..]
                .iter()
                .copied()
                .filter(|w| both[c].contains(w))
                .collect();
            clique.push(c);
            grow(both, clique, &rest, best);
            clique.pop();
        }
    }
    let mut best = 0;
    grow(&both, &mut Vec::new(), &(0..n).collect::<Vec<_>>(), &mut best);
    best
}

pub(crate) fn result_from_colors(graph: &Digraph, colors: Vec<usize>) -> LocalColoringResult {
    let chi_l = max_local_colors(graph, &colors);
    let coloring = Coloring::new(graph, colors).expect("solver produced a proper coloring");
    LocalColoringResult { coloring, chi_l }
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coloring_validation() {
        let g = Digraph::new(3, [(0, 1), (1, 2)]).unwrap();
        assert!(Coloring::new(&g, vec![1, 2, 1]).is_ok());
        assert!(Coloring::new(&g, vec![1, 1, 2]).is_err());
        assert!(Coloring::new(&g, vec![1, 3, 1]).is_err());
        assert!(Coloring::new(&g, vec![0, 1, 0]).is_err());
    }

    #[test]
    fn local_count_directed() {
        // 0 -> 1, 0 -> 2 with 1 and 2 non-adjacent
        let g = Digraph::new(3, [(0, 1), (0, 2)]).unwrap();
        assert_eq!(max_local_colors(&g, &[1, 2, 2]), 2);
        assert_eq!(max_local_colors(&g, &[1, 2, 3]), 3);
        assert_eq!(max_local_colors(&Digraph::new(0, []).unwrap(), &[]), 0);
    }

    #[test]
    fn bidirected_clique() {
        assert_eq!(largest_bidirected_clique(&Digraph::complete(5)), 5);
        assert_eq!(largest_bidirected_clique(&Digraph::cycle(5)), 2);
        let one_way = Digraph::new(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        assert_eq!(largest_bidirected_clique(&one_way), 1);
    }
}

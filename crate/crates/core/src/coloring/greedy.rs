use crate::conflict::Digraph;

use super::problem::{LocalProblem, MAX_ITEMS};
use super::{result_from_colors, LocalColoringResult};

/// Greedy class-consistent coloring.
///
/// Classes are visited in decreasing order of their largest closed
/// out-neighborhood; each takes the admissible color that keeps the worst
/// affected window smallest, lowest color on ties. Falls back to one color
/// per class when there are more than 64 classes.
pub fn greedy_local_coloring(graph: &Digraph) -> LocalColoringResult {
    match LocalProblem::build(graph, true, MAX_ITEMS, "greedy") {
        Ok(problem) => {
            let colors = greedy_items(&problem, graph);
            result_from_colors(graph, problem.vertex_colors(&colors))
        }
        Err(_) => {
            let colors = (0..graph.order()).map(|v| graph.class_of(v) + 1).collect();
            result_from_colors(graph, colors)
        }
    }
}

pub(crate) fn greedy_items(problem: &LocalProblem, graph: &Digraph) -> Vec<u8> {
    let items = problem.items();
    let mut reach = vec![0usize; items];
    for v in 0..graph.order() {
        let item = problem.item_of[v];
        reach[item] = reach[item].max(graph.successors(v).len() + 1);
    }
    let mut order: Vec<usize> = (0..items).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(reach[i]), i));

    const NONE: u8 = u8::MAX;
    let mut color = vec![NONE; items];
    let mut seen = vec![0u64; problem.windows.len()];
    let mut palette = 0usize;
    for item in order {
        let mut forbidden = 0u64;
        let mut adj = problem.adjacency[item];
        while adj != 0 {
            let w = adj.trailing_zeros() as usize;
            adj &= adj - 1;
            if color[w] != NONE {
                forbidden |= 1u64 << color[w];
            }
        }
        let mut best: Option<(u32, usize)> = None;
        for c in 0..=palette.min(MAX_ITEMS - 1) {
            if forbidden >> c & 1 == 1 {
                continue;
            }
            let worst = problem.windows_of[item]
                .iter()
                .map(|&w| (seen[w] | 1u64 << c).count_ones())
                .max()
                .unwrap_or(1);
            if best.is_none_or(|(score, _)| worst < score) {
                best = Some((worst, c));
            }
        }
        let (_, c) = best.expect("a fresh color is always admissible");
        color[item] = c as u8;
        palette = palette.max(c + 1);
        for &w in &problem.windows_of[item] {
            seen[w] |= 1u64 << c;
        }
    }
    color
}

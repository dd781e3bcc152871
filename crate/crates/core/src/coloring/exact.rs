use crate::conflict::Digraph;
use crate::error::Result;

use super::greedy::greedy_items;
use super::problem::LocalProblem;
use super::{result_from_colors, Coloring, LocalColoringResult, SolverLimits};

const NONE: u8 = u8::MAX;

/// Exact directed local chromatic number.
///
/// With `class_consistent` every vertex class (same packet) is forced onto
/// one color and the search runs over classes; the local counts are still
/// taken on the original directed graph. Otherwise every vertex is colored
/// freely, which is the plain graph-theoretic quantity.
///
/// The search tries `k = lower bound, lower bound + 1, ...` and answers each
/// "is there a coloring with every window at most `k`" question by
/// backtracking with forward checking. The first `k` that succeeds is
/// optimal; the greedy coloring caps the iteration.
pub fn exact_local_chromatic(
    graph: &Digraph,
    class_consistent: bool,
    limits: &SolverLimits,
) -> Result<LocalColoringResult> {
    if graph.is_empty() {
        return Ok(LocalColoringResult {
            coloring: Coloring::new(graph, Vec::new())?,
            chi_l: 0,
        });
    }
    let problem = LocalProblem::build(graph, class_consistent, limits.exact_items, "exact local chromatic search")?;
    let greedy = greedy_items(&problem, graph);
    let greedy_colors = problem.vertex_colors(&greedy);
    let upper = super::max_local_colors(graph, &greedy_colors);
    let lower = problem.window_clique_bound();
    for k in lower..upper {
        let mut search = Search::new(&problem, k);
        if search.run() {
            return Ok(result_from_colors(graph, problem.vertex_colors(&search.color)));
        }
    }
    Ok(result_from_colors(graph, greedy_colors))
}

struct Search<'a> {
    problem: &'a LocalProblem,
    k: u32,
    color: Vec<u8>,
    seen: Vec<u64>,
    palette: usize,
}

impl<'a> Search<'a> {
    fn new(problem: &'a LocalProblem, k: usize) -> Self {
        Search {
            problem,
            k: k as u32,
            color: vec![NONE; problem.items()],
            seen: vec![0; problem.windows.len()],
            palette: 0,
        }
    }

    fn run(&mut self) -> bool {
        self.extend(self.problem.items())
    }

    /// Colors admissible for `item` as a bitmask over the current palette,
    /// and whether a fresh color is admissible too.
    fn domain(&self, item: usize) -> (u64, bool, u32) {
        let mut forbidden = 0u64;
        let mut adj = self.problem.adjacency[item];
        while adj != 0 {
            let w = adj.trailing_zeros() as usize;
            adj &= adj - 1;
            let c = self.color[w];
            if c != NONE {
                forbidden |= 1u64 << c;
            }
        }
        let palette_mask = if self.palette >= 64 { u64::MAX } else { (1u64 << self.palette) - 1 };
        let mut allowed = palette_mask & !forbidden;
        let mut fresh = self.palette < 64;
        for &w in &self.problem.windows_of[item] {
            if self.seen[w].count_ones() >= self.k {
                allowed &= self.seen[w];
                fresh = false;
            }
        }
        (allowed, fresh, forbidden.count_ones())
    }

    fn extend(&mut self, remaining: usize) -> bool {
        if remaining == 0 {
            return true;
        }
        // Most constrained item first; ties by saturation, then index.
        let mut pick: Option<(usize, u32, usize, u64, bool)> = None;
        for item in 0..self.problem.items() {
            if self.color[item] != NONE {
                continue;
            }
            let (allowed, fresh, saturation) = self.domain(item);
            let size = allowed.count_ones() as usize + usize::from(fresh);
            if size == 0 {
                return false;
            }
            let better = match pick {
                None => true,
                Some((s, sat, _, _, _)) => size < s || (size == s && saturation > sat),
            };
            if better {
                pick = Some((size, saturation, item, allowed, fresh));
            }
        }
        let (_, _, item, allowed, fresh) = pick.expect("an uncolored item remains");
        let mut options = allowed;
        while options != 0 {
            let c = options.trailing_zeros() as usize;
            options &= options - 1;
            if self.try_color(item, c, remaining) {
                return true;
            }
        }
        if fresh {
            let c = self.palette;
            self.palette += 1;
            if self.try_color(item, c, remaining) {
                return true;
            }
            self.palette -= 1;
        }
        false
    }

    fn try_color(&mut self, item: usize, c: usize, remaining: usize) -> bool {
        let bit = 1u64 << c;
        let windows = &self.problem.windows_of[item];
        let saved: Vec<u64> = windows.iter().map(|&w| self.seen[w]).collect();
        for &w in windows {
            self.seen[w] |= bit;
        }
        self.color[item] = c as u8;
        if self.extend(remaining - 1) {
            return true;
        }
        self.color[item] = NONE;
        for (&w, s) in windows.iter().zip(saved) {
            self.seen[w] = s;
        }
        false
    }
}

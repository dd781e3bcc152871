use std::ops::{Add, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::conflict::Digraph;
use crate::error::Result;
use crate::lp;
use crate::rational::{self, Rational};

use super::ilp::{check_lp_size, hit_masks};
use super::{greedy_local_coloring, SolverLimits};

/// Optimal LP relaxation of the local chromatic 0/1 program.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FractionalResult {
    #[serde(with = "rational::serde_str")]
    pub value: Rational,
    /// Independent sets with positive weight.
    pub weights: Vec<WeightedSet>,
    /// Dual certificate: a multiplier per vertex on its neighborhood row,
    /// summing to one.
    #[serde(skip)]
    pub neighborhood_duals: Vec<Rational>,
    /// Dual certificate: a multiplier per vertex on its cover row. Their sum
    /// equals `value`, and no independent set `I` has cover weight exceeding
    /// the neighborhood weight of the vertices whose neighborhoods meet `I`.
    #[serde(skip)]
    pub cover_duals: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedSet {
    pub vertices: Vec<usize>,
    #[serde(with = "rational::serde_str")]
    pub weight: Rational,
}

/// Solves the fractional relaxation by column generation over all
/// independent sets.
///
/// The restricted master is solved in its dual form by [`lp::maximize`];
/// pricing searches every independent set for one whose cover weight beats
/// the neighborhood weight it touches. When none does, the restricted optimum
/// is optimal for the full program.
pub fn fractional_local_chromatic(graph: &Digraph, limits: &SolverLimits) -> Result<FractionalResult> {
    check_lp_size(graph, limits, "fractional local chromatic LP")?;
    let n = graph.order();
    if n == 0 {
        return Ok(FractionalResult {
            value: Rational::zero(),
            weights: Vec::new(),
            neighborhood_duals: Vec::new(),
            cover_duals: Vec::new(),
        });
    }
    let adjacency: Vec<u64> = (0..n)
        .map(|v| graph.neighbors(v).iter().fold(0u64, |m, &w| m | 1u64 << w))
        .collect();
    let mut seen_by = vec![0u64; n];
    for v in 0..n {
        seen_by[v] |= 1u64 << v;
        for &u in graph.successors(v) {
            seen_by[u] |= 1u64 << v;
        }
    }

    let mut columns: Vec<u64> = (0..n).map(|v| 1u64 << v).collect();
    let greedy = greedy_local_coloring(graph);
    for c in 1..=greedy.coloring.palette_size() {
        let class = (0..n)
            .filter(|&v| greedy.coloring.color(v) == c)
            .fold(0u64, |m, v| m | 1u64 << v);
        if !columns.contains(&class) {
            columns.push(class);
        }
    }

    loop {
        let hits = hit_masks(graph, &columns);
        // Dual variables: neighborhood multipliers 0..n, cover multipliers n..2n.
        let mut objective = vec![Rational::zero(); 2 * n];
        for o in &mut objective[n..] {
            *o = Rational::one();
        }
        let mut rows = Vec::with_capacity(columns.len() + 1);
        let mut bounds = Vec::with_capacity(columns.len() + 1);
        let mut k_row = vec![Rational::zero(); 2 * n];
        for r in &mut k_row[..n] {
            *r = Rational::one();
        }
        rows.push(k_row);
        bounds.push(Rational::one());
        for (&set, &hit) in columns.iter().zip(&hits) {
            let mut row = vec![Rational::zero(); 2 * n];
            for v in 0..n {
                if hit >> v & 1 == 1 {
                    row[v] = -Rational::one();
                }
                if set >> v & 1 == 1 {
                    row[n + v] = Rational::one();
                }
            }
            rows.push(row);
            bounds.push(Rational::zero());
        }
        let sol = lp::maximize(&objective, &rows, &bounds)?;
        let neighborhood = &sol.primal[..n];
        let cover = &sol.primal[n..];

        let entering = price(&adjacency, &seen_by, cover, neighborhood);
        match entering {
            Some(set) if !columns.contains(&set) => columns.push(set),
            Some(set) => unreachable!("pricing returned existing column {set:#b}"),
            None => {
                let weights = columns
                    .iter()
                    .zip(&sol.dual[1..])
                    .filter(|(_, w)| w.is_positive())
                    .map(|(&set, w)| WeightedSet {
                        vertices: (0..n).filter(|&v| set >> v & 1 == 1).collect(),
                        weight: w.clone(),
                    })
                    .collect();
                return Ok(FractionalResult {
                    value: sol.value,
                    weights,
                    neighborhood_duals: neighborhood.to_vec(),
                    cover_duals: cover.to_vec(),
                });
            }
        }
    }
}

/// An independent set whose cover weight strictly exceeds the neighborhood
/// weight it touches, if one exists (the most violated one).
fn price(adjacency: &[u64], seen_by: &[u64], cover: &[Rational], neighborhood: &[Rational]) -> Option<u64> {
    let scale = rational::common_denominator(cover.iter().chain(neighborhood));
    let scaled = |w: &Rational| -> BigInt { (w * Rational::from_integer(scale.clone())).to_integer() };
    let gain: Vec<BigInt> = cover.iter().map(scaled).collect();
    let cost: Vec<BigInt> = neighborhood.iter().map(scaled).collect();
    let small = |xs: &[BigInt]| xs.iter().map(|x| x.to_i128()).collect::<Option<Vec<i128>>>();
    let total_fits = gain.iter().chain(&cost).map(|x| x.abs()).sum::<BigInt>().to_i128().is_some();
    match (small(&gain), small(&cost), total_fits) {
        (Some(g), Some(c), true) => best_set(adjacency, seen_by, &g, &c),
        _ => best_set(adjacency, seen_by, &gain, &cost),
    }
}

fn best_set<T>(adjacency: &[u64], seen_by: &[u64], gain: &[T], cost: &[T]) -> Option<u64>
where
    T: Clone + Ord + Zero + for<'a> Add<&'a T, Output = T> + for<'a> Sub<&'a T, Output = T>,
{
    struct Ctx<'a, T> {
        adjacency: &'a [u64],
        seen_by: &'a [u64],
        gain: &'a [T],
        cost: &'a [T],
        best: T,
        best_set: u64,
    }
    fn rec<T>(ctx: &mut Ctx<'_, T>, set: u64, hit: u64, score: T, candidates: u64)
    where
        T: Clone + Ord + Zero + for<'a> Add<&'a T, Output = T> + for<'a> Sub<&'a T, Output = T>,
    {
        if score > ctx.best {
            ctx.best = score.clone();
            ctx.best_set = set;
        }
        let mut rest = candidates;
        while rest != 0 {
            let mut bound = score.clone();
            let mut r = rest;
            while r != 0 {
                let v = r.trailing_zeros() as usize;
                r &= r - 1;
                bound = bound + &ctx.gain[v];
            }
            if bound <= ctx.best {
                return;
            }
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let new_hit = hit | ctx.seen_by[v];
            let mut next = score.clone() + &ctx.gain[v];
            let mut fresh = new_hit & !hit;
            while fresh != 0 {
                let u = fresh.trailing_zeros() as usize;
                fresh &= fresh - 1;
                next = next - &ctx.cost[u];
            }
            let adj = ctx.adjacency[v];
            rec(ctx, set | 1u64 << v, new_hit, next, rest & !adj);
        }
    }
    let n = adjacency.len();
    let mut ctx = Ctx {
        adjacency,
        seen_by,
        gain,
        cost,
        best: T::zero(),
        best_set: 0,
    };
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    rec(&mut ctx, 0, 0, T::zero(), all);
    (ctx.best_set != 0).then_some(ctx.best_set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::ilp::independent_sets;
    use crate::coloring::{exact_local_chromatic, local_chromatic_ilp};
    use crate::rational::{from_usize, int, rat};

    /// Checks primal feasibility and the dual certificate against every
    /// independent set, which together prove optimality.
    fn certify(g: &Digraph, r: &FractionalResult) {
        let n = g.order();
        let closed: Vec<Vec<usize>> = (0..n)
            .map(|v| g.closed_out_neighborhood(v).unwrap().into_iter().collect())
            .collect();
        for (v, hood) in closed.iter().enumerate() {
            let covered: Rational = r
                .weights
                .iter()
                .filter(|s| s.vertices.contains(&v))
                .map(|s| s.weight.clone())
                .sum();
            assert!(covered >= int(1), "vertex {v} under-covered");
            let touching: Rational = r
                .weights
                .iter()
                .filter(|s| s.vertices.iter().any(|u| hood.contains(u)))
                .map(|s| s.weight.clone())
                .sum();
            assert!(touching <= r.value, "vertex {v} neighborhood exceeds value");
        }
        let total_nbhd: Rational = r.neighborhood_duals.iter().cloned().sum();
        assert!(total_nbhd <= int(1));
        let total_cover: Rational = r.cover_duals.iter().cloned().sum();
        assert_eq!(total_cover, r.value);
        for set in independent_sets(g) {
            let members: Vec<usize> = (0..n).filter(|&v| set >> v & 1 == 1).collect();
            let gain: Rational = members.iter().map(|&v| r.cover_duals[v].clone()).sum();
            let cost: Rational = (0..n)
                .filter(|&v| closed[v].iter().any(|u| members.contains(u)))
                .map(|v| r.neighborhood_duals[v].clone())
                .sum();
            assert!(gain <= cost, "dual violated by {members:?}");
        }
    }

    #[test]
    fn five_cycle() {
        let g = Digraph::cycle(5);
        let r = fractional_local_chromatic(&g, &SolverLimits::default()).unwrap();
        assert_eq!(r.value, rat(5, 2));
        certify(&g, &r);
    }

    #[test]
    fn cliques() {
        for k in 1..=5 {
            let g = Digraph::complete(k);
            let r = fractional_local_chromatic(&g, &SolverLimits::default()).unwrap();
            assert_eq!(r.value, from_usize(k));
            certify(&g, &r);
        }
    }

    #[test]
    fn empty() {
        let r = fractional_local_chromatic(&Digraph::new(0, []).unwrap(), &SolverLimits::default()).unwrap();
        assert_eq!(r.value, int(0));
    }

    #[test]
    fn relaxation_below_integral() {
        let limits = SolverLimits::default();
        for seed in 200..230 {
            let g = crate::coloring::test_graphs::random_digraph(seed, 8);
            let r = fractional_local_chromatic(&g, &limits).unwrap();
            certify(&g, &r);
            let ilp = local_chromatic_ilp(&g, &limits).unwrap();
            let exact = exact_local_chromatic(&g, false, &limits).unwrap().chi_l;
            assert!(r.value <= from_usize(ilp));
            assert_eq!(ilp, exact);
        }
    }
}

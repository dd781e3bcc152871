//! Dense primal simplex in exact rational arithmetic.
//!
//! Solves `maximize c.y subject to A y <= b, y >= 0` with `b >= 0`, so the
//! slack basis is feasible and no phase one is needed. Bland's rule keeps
//! degenerate pivots from cycling. The optimal tableau also yields the dual
//! solution, read off the objective row under the slack columns.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub value: Rational,
    /// Optimal `y`.
    pub primal: Vec<Rational>,
    /// Optimal multipliers of the rows of `A`, one per constraint.
    pub dual: Vec<Rational>,
}

pub fn maximize(objective: &[Rational], rows: &[Vec<Rational>], bounds: &[Rational]) -> Result<LpSolution> {
    let vars = objective.len();
    let m = rows.len();
    assert_eq!(bounds.len(), m, "one bound per row");
    if bounds.iter().any(Signed::is_negative) {
        return Err(Error::InvalidParams("simplex requires non-negative right-hand sides".into()));
    }
    let width = vars + m;
    let mut table: Vec<Vec<Rational>> = rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            assert_eq!(row.len(), vars, "row {i} has wrong width");
            let mut full = Vec::with_capacity(width + 1);
            full.extend(row.iter().cloned());
            full.extend((0..m).map(|j| if j == i { Rational::from_integer(1.into()) } else { Rational::zero() }));
            full.push(bounds[i].clone());
            full
        })
        .collect();
    let mut cost: Vec<Rational> = objective.iter().map(|c| -c.clone()).collect();
    cost.extend((0..m).map(|_| Rational::zero()));
    let mut value = Rational::zero();
    let mut basis: Vec<usize> = (vars..width).collect();

    while let Some(enter) = (0..width).find(|&j| cost[j].is_negative()) {
        let mut leave: Option<(usize, Rational)> = None;
        for (i, row) in table.iter().enumerate() {
            if !row[enter].is_positive() {
                continue;
            }
            let ratio = &row[width] / &row[enter];
            let better = match &leave {
                None => true,
                Some((l, best)) => ratio < *best || (ratio == *best && basis[i] < basis[*l]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        let Some((pivot_row, _)) = leave else {
            return Err(Error::Unbounded);
        };
        pivot(&mut table, &mut cost, &mut value, pivot_row, enter);
        basis[pivot_row] = enter;
    }

    let mut primal = vec![Rational::zero(); vars];
    for (i, &b) in basis.iter().enumerate() {
        if b < vars {
            primal[b] = table[i][width].clone();
        }
    }
    let dual = cost[vars..width].to_vec();
    Ok(LpSolution { value, primal, dual })
}

fn pivot(table: &mut [Vec<Rational>], cost: &mut [Rational], value: &mut Rational, r: usize, c: usize) {
    let width = cost.len();
    let inv = table[r][c].recip();
    for x in table[r].iter_mut() {
        if !x.is_zero() {
            *x *= &inv;
        }
    }
    let pivot_row = table[r].clone();
    let nonzero: Vec<usize> = (0..=width).filter(|&j| !pivot_row[j].is_zero()).collect();
    for (i, row) in table.iter_mut().enumerate() {
        if i == r || row[c].is_zero() {
            continue;
        }
        let factor = row[c].clone();
        for &j in &nonzero {
            row[j] -= &factor * &pivot_row[j];
        }
    }
    if !cost[c].is_zero() {
        let factor = cost[c].clone();
        for &j in &nonzero {
            if j < width {
                cost[j] -= &factor * &pivot_row[j];
            }
        }
        *value -= &factor * &pivot_row[width];
    }
}

//! Gaussian elimination over GF(2^q).

use super::field::{FieldElement, GaloisField};
use crate::error::{Error, Result};

/// Row-reduces `matrix` in place to reduced row echelon form and returns the
/// pivot column of each nonzero row. Row operations are mirrored on `rhs`.
pub fn row_reduce(
    field: &GaloisField,
    matrix: &mut [Vec<FieldElement>],
    mut rhs: Option<&mut [Vec<FieldElement>]>,
) -> Vec<usize> {
    let rows = matrix.len();
    let cols = matrix.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !matrix[i][c].is_zero()) else {
            continue;
        };
        matrix.swap(r, p);
        if let Some(rhs) = rhs.as_deref_mut() {
            rhs.swap(r, p);
        }
        let inv = field.inv(matrix[r][c]).expect("pivot is nonzero");
        for x in matrix[r].iter_mut() {
            *x = field.mul(*x, inv);
        }
        if let Some(rhs) = rhs.as_deref_mut() {
            for x in rhs[r].iter_mut() {
                *x = field.mul(*x, inv);
            }
        }
        let pivot_row = matrix[r].clone();
        let pivot_rhs = rhs.as_deref().map(|b| b[r].clone());
        for i in 0..rows {
            if i == r || matrix[i][c].is_zero() {
                continue;
            }
            let factor = matrix[i][c];
            for (x, &p) in matrix[i].iter_mut().zip(&pivot_row) {
                *x = field.sub(*x, field.mul(factor, p));
            }
            if let (Some(rhs), Some(pr)) = (rhs.as_deref_mut(), pivot_rhs.as_ref()) {
                for (x, &p) in rhs[i].iter_mut().zip(pr) {
                    *x = field.sub(*x, field.mul(factor, p));
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(field: &GaloisField, matrix: &[Vec<FieldElement>]) -> usize {
    let mut m = matrix.to_vec();
    row_reduce(field, &mut m, None).len()
}

/// For `A x = b`, which coordinates of `x` are pinned down by the system:
/// coordinate `j` is determined exactly when the unit vector `e_j` lies in
/// the row space of `A`.
pub fn determined_coordinates(field: &GaloisField, matrix: &[Vec<FieldElement>]) -> Vec<bool> {
    let mut m = matrix.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let pivots = row_reduce(field, &mut m, None);
    determined_from_rref(&m, &pivots, cols)
}

fn determined_from_rref(m: &[Vec<FieldElement>], pivots: &[usize], cols: usize) -> Vec<bool> {
    let mut out = vec![false; cols];
    for (r, &c) in pivots.iter().enumerate() {
        // In RREF other pivot columns vanish in this row; the row is e_c iff
        // every free column vanishes too.
        out[c] = m[r].iter().enumerate().all(|(j, x)| j == c || x.is_zero());
    }
    out
}

/// Solves `A x = B` (one column of `B` per symbol position) and returns the
/// determined coordinates of `x`; undetermined coordinates are `None`.
pub fn solve_determined(
    field: &GaloisField,
    matrix: &[Vec<FieldElement>],
    rhs: &[Vec<FieldElement>],
) -> Result<Vec<Option<Vec<FieldElement>>>> {
    let mut m = matrix.to_vec();
    let mut b = rhs.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let pivots = row_reduce(field, &mut m, Some(&mut b));
    if b[pivots.len()..].iter().any(|row| row.iter().any(|x| !x.is_zero())) {
        return Err(Error::InvalidParams("inconsistent linear system".into()));
    }
    let determined = determined_from_rref(&m, &pivots, cols);
    let mut out = vec![None; cols];
    for (r, &c) in pivots.iter().enumerate() {
        if determined[c] {
            out[c] = Some(b[r].clone());
        }
    }
    Ok(out)
}

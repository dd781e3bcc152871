//! Vandermonde generators of MDS codes.

use rand::Rng;

use super::field::{FieldElement, GaloisField};
use crate::error::{Error, Result};

/// `k x ncols` generator whose column `j` is `(1, a_j, a_j^2, ..., a_j^(k-1))`
/// for the evaluation point `a_j = j + 1`. Distinct points make every square
/// column submatrix a nonsingular Vandermonde matrix, so any `k` or fewer
/// columns are linearly independent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorMatrix {
    field: GaloisField,
    entries: Vec<Vec<FieldElement>>,
    cols: usize,
}

impl GeneratorMatrix {
    pub fn field(&self) -> &GaloisField {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, row: usize, col: usize) -> FieldElement {
        self.entries[row][col]
    }

    pub fn column(&self, col: usize) -> Vec<FieldElement> {
        self.entries.iter().map(|row| row[col]).collect()
    }

    pub fn as_rows(&self) -> &[Vec<FieldElement>] {
        &self.entries
    }

    /// Uniformly random entries; not MDS in general.
    pub fn random<R: Rng + ?Sized>(k: usize, ncols: usize, field: &GaloisField, rng: &mut R) -> Self {
        let entries = (0..k)
            .map(|_| {
                (0..ncols)
                    .map(|_| FieldElement(rng.gen_range(0..field.order()) as u16))
                    .collect()
            })
            .collect();
        GeneratorMatrix {
            field: field.clone(),
            entries,
            cols: ncols,
        }
    }

    /// The `rows x |cols|` submatrix on the given columns.
    pub fn submatrix(&self, cols: &[usize]) -> Vec<Vec<FieldElement>> {
        self.entries
            .iter()
            .map(|row| cols.iter().map(|&c| row[c]).collect())
            .collect()
    }
}

pub fn build_mds_generator(k: usize, ncols: usize, field: &GaloisField) -> Result<GeneratorMatrix> {
    if k > ncols {
        return Err(Error::InvalidParams(format!(
            "MDS dimension {k} exceeds code length {ncols}"
        )));
    }
    if ncols >= field.order() {
        return Err(Error::FieldTooSmall {
            degree: field.degree(),
            needed: ncols,
        });
    }
    let entries = (0..k)
        .map(|i| {
            (0..ncols)
                .map(|j| field.pow(FieldElement((j + 1) as u16), i as u64))
                .collect()
        })
        .collect();
    Ok(GeneratorMatrix {
        field: field.clone(),
        entries,
        cols: ncols,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::linalg::rank;

    /// Determinant by cofactor expansion; independent of elimination.
    fn det(f: &GaloisField, m: &[Vec<FieldElement>]) -> FieldElement {
        if m.len() == 1 {
            return m[0][0];
        }
        let mut acc = FieldElement::ZERO;
        for (j, &x) in m[0].iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let minor: Vec<Vec<FieldElement>> = m[1..]
                .iter()
                .map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &v)| v).collect())
                .collect();
            // characteristic 2: signs vanish
            acc = f.add(acc, f.mul(x, det(f, &minor)));
        }
        acc
    }

    #[test]
    fn single_row() {
        let f = GaloisField::gf256();
        let g = build_mds_generator(1, 3, &f).unwrap();
        assert_eq!(g.rows(), 1);
        assert!((0..3).all(|j| !g.entry(0, j).is_zero()));
    }

    #[test]
    fn square_is_invertible() {
        let f = GaloisField::gf256();
        for k in 1..=6 {
            let g = build_mds_generator(k, k, &f).unwrap();
            assert_eq!(rank(&f, g.as_rows()), k);
        }
    }

    #[test]
    fn pairs_over_gf8() {
        let f = GaloisField::new(3).unwrap();
        let g = build_mds_generator(2, 4, &f).unwrap();
        let mut checked = 0;
        for a in 0..4 {
            for b in a + 1..4 {
                assert!(!det(&f, &g.submatrix(&[a, b])).is_zero());
                checked += 1;
            }
        }
        assert_eq!(checked, 6);
    }

    #[test]
    fn field_too_small() {
        let f = GaloisField::new(2).unwrap();
        assert!(build_mds_generator(2, 3, &f).is_ok());
        assert!(matches!(build_mds_generator(2, 4, &f), Err(Error::FieldTooSmall { .. })));
        assert!(build_mds_generator(4, 3, &GaloisField::gf256()).is_err());
    }
}

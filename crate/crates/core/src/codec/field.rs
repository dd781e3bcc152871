//! GF(2^q) arithmetic for `1 <= q <= 16`.
//!
//! The modulus is the numerically smallest irreducible polynomial of degree
//! `q` (for `q = 8` that is `x^8 + x^4 + x^3 + x + 1`, 0x11B). The smallest
//! irreducible is not always primitive, so log/exp tables are built from the
//! first element that generates the multiplicative group.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FieldElement(pub u16);

impl FieldElement {
    pub const ZERO: Self = FieldElement(0);
    pub const ONE: Self = FieldElement(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#x}", self.0)
    }
}

#[derive(Debug)]
struct Tables {
    degree: u32,
    modulus: u32,
    generator: u16,
    exp: Vec<u16>,
    log: Vec<u16>,
}

/// A binary extension field. Cheap to clone.
#[derive(Clone, Debug)]
pub struct GaloisField {
    tables: Arc<Tables>,
}

impl PartialEq for GaloisField {
    fn eq(&self, other: &Self) -> bool {
        self.tables.modulus == other.tables.modulus
    }
}

impl Eq for GaloisField {}

/// Carry-less product reduced modulo `modulus` of degree `degree`.
fn mul_slow(a: u32, b: u32, modulus: u32, degree: u32) -> u32 {
    let mut acc = 0u32;
    let mut a = a;
    let mut b = b;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a >> degree & 1 == 1 {
            a ^= modulus;
        }
    }
    acc
}

fn poly_degree(p: u32) -> u32 {
    31 - p.leading_zeros()
}

fn poly_rem(mut a: u32, b: u32) -> u32 {
    let db = poly_degree(b);
    while a != 0 && poly_degree(a) >= db {
        a ^= b << (poly_degree(a) - db);
    }
    a
}

/// Irreducible over GF(2) iff no polynomial of degree `1..=deg/2` divides it.
pub fn is_irreducible(p: u32) -> bool {
    let d = poly_degree(p);
    if d == 0 {
        return false;
    }
    (1..=d / 2).all(|k| ((1u32 << k)..(1u32 << (k + 1))).all(|q| poly_rem(p, q) != 0))
}

pub fn smallest_irreducible(degree: u32) -> u32 {
    ((1u32 << degree)..(1u32 << (degree + 1)))
        .find(|&p| is_irreducible(p))
        .expect("irreducible polynomials exist in every degree")
}

impl GaloisField {
    pub fn new(degree: u32) -> Result<Self> {
        if !(1..=16).contains(&degree) {
            return Err(Error::UnsupportedDegree(degree));
        }
        let modulus = smallest_irreducible(degree);
        let order = 1usize << degree;
        let group = order - 1;
        let generator = (1..order as u32)
            .find(|&g| {
                let mut x = 1u32;
                for i in 1..=group {
                    x = mul_slow(x, g, modulus, degree);
                    if x == 1 {
                        return i == group;
                    }
                }
                false
            })
            .expect("multiplicative group is cyclic") as u16;
        let mut exp = vec![0u16; 2 * group];
        let mut log = vec![0u16; order];
        let mut x = 1u32;
        for (i, slot) in exp.iter_mut().take(group).enumerate() {
            *slot = x as u16;
            log[x as usize] = i as u16;
            x = mul_slow(x, generator as u32, modulus, degree);
        }
        for i in group..2 * group {
            exp[i] = exp[i - group];
        }
        Ok(GaloisField {
            tables: Arc::new(Tables {
                degree,
                modulus,
                generator,
                exp,
                log,
            }),
        })
    }

    /// GF(2^8).
    pub fn gf256() -> Self {
        Self::new(8).expect("degree 8 is supported")
    }

    /// The smallest field of degree at least `min_degree` with `2^q > points`.
    pub fn with_points(points: usize, min_degree: u32) -> Result<Self> {
        let mut degree = min_degree.max(1);
        while degree <= 16 && (1usize << degree) <= points {
            degree += 1;
        }
        if degree > 16 {
            return Err(Error::FieldTooSmall { degree: 16, needed: points });
        }
        Self::new(degree)
    }

    pub fn degree(&self) -> u32 {
        self.tables.degree
    }

    pub fn modulus(&self) -> u32 {
        self.tables.modulus
    }

    pub fn generator(&self) -> FieldElement {
        FieldElement(self.tables.generator)
    }

    /// Number of elements, `2^q`.
    pub fn order(&self) -> usize {
        1usize << self.tables.degree
    }

    pub fn element(&self, value: u32) -> Result<FieldElement> {
        if (value as usize) < self.order() {
            Ok(FieldElement(value as u16))
        } else {
            Err(Error::InvalidParams(format!(
                "{value} is not an element of GF(2^{})",
                self.degree()
            )))
        }
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(a.0 ^ b.0)
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, b)
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.0 == 0 || b.0 == 0 {
            return FieldElement::ZERO;
        }
        let t = &self.tables;
        FieldElement(t.exp[t.log[a.0 as usize] as usize + t.log[b.0 as usize] as usize])
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: FieldElement) -> Option<FieldElement> {
        if a.0 == 0 {
            return None;
        }
        let t = &self.tables;
        let group = self.order() - 1;
        Some(FieldElement(t.exp[(group - t.log[a.0 as usize] as usize) % group]))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Option<FieldElement> {
        self.inv(b).map(|ib| self.mul(a, ib))
    }

    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        if e == 0 {
            return FieldElement::ONE;
        }
        if a.0 == 0 {
            return FieldElement::ZERO;
        }
        let t = &self.tables;
        let group = (self.order() - 1) as u64;
        let l = (t.log[a.0 as usize] as u64 * (e % group)) % group;
        FieldElement(t.exp[l as usize])
    }

    /// Table-free product, for cross-checking.
    pub fn mul_reference(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(mul_slow(a.0 as u32, b.0 as u32, self.tables.modulus, self.tables.degree) as u16)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn known_moduli() {
        assert_eq!(smallest_irreducible(1), 0b10);
        assert_eq!(smallest_irreducible(2), 0b111);
        assert_eq!(smallest_irreducible(3), 0b1011);
        assert_eq!(smallest_irreducible(4), 0b10011);
        assert_eq!(smallest_irreducible(8), 0x11B);
        assert!(!is_irreducible(0b101)); // (x+1)^2
    }

    #[test]
    fn gf256_arithmetic() {
        let f = GaloisField::gf256();
        // AES field: 0x53 * 0xCA = 0x01
        assert_eq!(f.mul(FieldElement(0x53), FieldElement(0xCA)), FieldElement::ONE);
        assert_eq!(f.mul(FieldElement(0x57), FieldElement(0x83)), FieldElement(0xC1));
        assert_eq!(f.inv(FieldElement::ZERO), None);
    }

    #[test]
    fn every_degree_builds() {
        for q in 1..=16 {
            let f = GaloisField::new(q).unwrap();
            let g = f.generator();
            assert_eq!(f.pow(g, (f.order() - 1) as u64), FieldElement::ONE);
        }
        assert!(GaloisField::new(0).is_err());
        assert!(GaloisField::new(17).is_err());
    }

    #[test]
    fn exhaustive_inverse_small_fields() {
        for q in 1..=6 {
            let f = GaloisField::new(q).unwrap();
            for a in 1..f.order() as u16 {
                let a = FieldElement(a);
                assert_eq!(f.mul(a, f.inv(a).unwrap()), FieldElement::ONE);
            }
        }
    }

    #[test]
    fn points_fit() {
        assert_eq!(GaloisField::with_points(3, 1).unwrap().degree(), 2);
        assert_eq!(GaloisField::with_points(4, 1).unwrap().degree(), 3);
        assert_eq!(GaloisField::with_points(4, 8).unwrap().degree(), 8);
        assert_eq!(GaloisField::with_points(300, 8).unwrap().degree(), 9);
    }

    proptest! {
        #[test]
        fn distributive(q in 1u32..=16, a: u16, b: u16, c: u16) {
            let f = GaloisField::new(q).unwrap();
            let mask = (f.order() - 1) as u16;
            let (a, b, c) = (FieldElement(a & mask), FieldElement(b & mask), FieldElement(c & mask));
            prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
            prop_assert_eq!(f.mul(a, b), f.mul_reference(a, b));
        }

        #[test]
        fn fermat(q in 1u32..=16, x: u16) {
            let f = GaloisField::new(q).unwrap();
            let x = FieldElement((x & (f.order() - 1) as u16).max(1));
            prop_assert_eq!(f.pow(x, (f.order() - 1) as u64), FieldElement::ONE);
            let mut acc = FieldElement::ONE;
            let steps = if q <= 12 { f.order() - 1 } else { 0 };
            for _ in 0..steps {
                acc = f.mul_reference(acc, x);
            }
            prop_assert_eq!(acc, FieldElement::ONE);
        }
    }
}

//! Arithmetic in GF(2^m) through log/antilog tables.

use crate::error::{domain, Result};

/// Primitive polynomial for each `m` in `2..=16`, bit `k` holding the
/// coefficient of `x^k` (so `0x13` is `x^4 + x + 1`).
pub const PRIMITIVE_POLYNOMIALS: [(u32, u32); 15] = [
    (2, 0x7),
    (3, 0xB),
    (4, 0x13),
    (5, 0x25),
    (6, 0x43),
    (7, 0x89),
    (8, 0x11D),
    (9, 0x211),
    (10, 0x409),
    (11, 0x805),
    (12, 0x1053),
    (13, 0x201B),
    (14, 0x4443),
    (15, 0x8003),
    (16, 0x1100B),
];

/// Symbols are stored as `u16`; `m <= 16`.
pub type Symbol = u16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Field {
    m: u32,
    polynomial: u32,
    /// `exp[i] = alpha^i` for `i` in `0..2(q-1)`, doubled to skip a modulo in `mul`.
    exp: Vec<Symbol>,
    log: Vec<u32>,
}

impl Field {
    /// Field with the tabulated primitive polynomial for `m`.
    pub fn new(m: u32) -> Result<Self> {
        let poly = PRIMITIVE_POLYNOMIALS
            .iter()
            .find(|(k, _)| *k == m)
            .map(|(_, p)| *p);
        match poly {
            Some(p) => Self::with_polynomial(m, p),
            None => domain(format!("field degree must lie in 2..=16, got {m}")),
        }
    }

    /// Builds the tables, failing unless `alpha = x` generates all `q - 1` nonzero elements.
    pub fn with_polynomial(m: u32, polynomial: u32) -> Result<Self> {
        if !(2..=16).contains(&m) || polynomial >> m != 1 {
            return domain(format!("polynomial {polynomial:#x} does not have degree {m}"));
        }
        let q = 1usize << m;
        let order = q - 1;
        let mut exp = vec![0 as Symbol; 2 * order];
        let mut log = vec![0u32; q];
        let mut seen = vec![false; q];
        let mut x: u32 = 1;
        for (i, slot) in exp.iter_mut().take(order).enumerate() {
            if seen[x as usize] {
                return domain(format!("polynomial {polynomial:#x} is not primitive for m = {m}"));
            }
            seen[x as usize] = true;
            *slot = x as Symbol;
            log[x as usize] = i as u32;
            x <<= 1;
            if x & (1 << m) != 0 {
                x ^= polynomial;
            }
        }
        if x != 1 {
            return domain(format!("polynomial {polynomial:#x} is not primitive for m = {m}"));
        }
        for i in order..2 * order {
            exp[i] = exp[i - order];
        }
        Ok(Self {
            m,
            polynomial,
            exp,
            log,
        })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn polynomial(&self) -> u32 {
        self.polynomial
    }

    /// Field size `q = 2^m`.
    pub fn size(&self) -> usize {
        1 << self.m
    }

    fn order(&self) -> usize {
        self.size() - 1
    }

    pub fn contains(&self, a: Symbol) -> bool {
        (a as usize) < self.size()
    }

    #[inline]
    pub fn add(&self, a: Symbol, b: Symbol) -> Symbol {
        a ^ b
    }

    #[inline]
    pub fn mul(&self, a: Symbol, b: Symbol) -> Symbol {
        if a == 0 || b == 0 {
            return 0;
        }
        self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
    }

    pub fn inv(&self, a: Symbol) -> Result<Symbol> {
        if a == 0 {
            return domain("zero has no inverse");
        }
        Ok(self.exp[(self.order() - self.log[a as usize] as usize) % self.order()])
    }

    pub fn div(&self, a: Symbol, b: Symbol) -> Result<Symbol> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `alpha^k` for any integer `k`.
    pub fn alpha_pow(&self, k: i64) -> Symbol {
        self.exp[k.rem_euclid(self.order() as i64) as usize]
    }

    /// Discrete log base `alpha`; `None` for zero.
    pub fn log(&self, a: Symbol) -> Option<u32> {
        (a != 0).then(|| self.log[a as usize])
    }

    /// Evaluates a polynomial given highest-degree coefficient first (Horner).
    pub fn eval_high_first(&self, poly: &[Symbol], x: Symbol) -> Symbol {
        poly.iter().fold(0, |acc, &c| self.mul(acc, x) ^ c)
    }

    /// Evaluates a polynomial given lowest-degree coefficient first.
    pub fn eval_low_first(&self, poly: &[Symbol], x: Symbol) -> Symbol {
        poly.iter().rev().fold(0, |acc, &c| self.mul(acc, x) ^ c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn every_tabulated_polynomial_is_primitive() {
        for &(m, _) in &PRIMITIVE_POLYNOMIALS {
            Field::new(m).unwrap();
        }
        assert!(Field::new(1).is_err());
        assert!(Field::new(17).is_err());
        // x^4 + x^3 + x^2 + x + 1 is irreducible but has order 5
        assert!(Field::with_polynomial(4, 0x1F).is_err());
    }

    #[test]
    fn gf16_inverses_exhaustive() {
        let f = Field::new(4).unwrap();
        for x in 0..16u16 {
            assert_eq!(f.add(x, x), 0);
            if x != 0 {
                assert_eq!(f.mul(x, f.inv(x).unwrap()), 1);
            }
        }
        assert!(f.inv(0).is_err());
        assert_eq!(f.alpha_pow(15), 1);
        assert_eq!(f.alpha_pow(-1), f.inv(2).unwrap());
    }

    #[test]
    fn gf16_multiplication_matches_carryless_oracle() {
        let f = Field::new(4).unwrap();
        let slow = |a: u16, b: u16| {
            let mut p: u32 = 0;
            for k in 0..4 {
                if b >> k & 1 == 1 {
                    p ^= (a as u32) << k;
                }
            }
            for k in (4..8).rev() {
                if p >> k & 1 == 1 {
                    p ^= 0x13 << (k - 4);
                }
            }
            p as u16
        };
        for a in 0..16 {
            for b in 0..16 {
                assert_eq!(f.mul(a, b), slow(a, b));
            }
        }
    }

    proptest! {
        #[test]
        fn gf256_field_axioms(a in 0u16..256, b in 0u16..256, c in 0u16..256) {
            let f = Field::new(8).unwrap();
            prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
            prop_assert_eq!(f.mul(a, b), f.mul(b, a));
            prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        }
    }
}

//! Sparse formal linear combinations with exact coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Coefficient ring for formal sums.
pub trait Coeff: Clone + PartialEq + fmt::Display {
    fn vanishes(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale_rational(&self, r: &BigRational) -> Self;
}

impl Coeff for BigRational {
    fn vanishes(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale_rational(&self, r: &BigRational) -> Self {
        self * r
    }
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_pow(base: i64, e: i32) -> BigRational {
    let b = rat(base);
    if e >= 0 {
        num_traits::pow(b, e as usize)
    } else {
        num_traits::pow(b.recip(), (-e) as usize)
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct FormalSum<K: Ord + Clone, C: Coeff> {
    terms: BTreeMap<K, C>,
}

impl<K: Ord + Clone, C: Coeff> Default for FormalSum<K, C> {
    fn default() -> Self {
        FormalSum { terms: BTreeMap::new() }
    }
}

impl<K: Ord + Clone, C: Coeff> FormalSum<K, C> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(k: K, c: C) -> Self {
        let mut s = Self::new();
        s.add_term(k, c);
        s
    }

    pub fn add_term(&mut self, k: K, c: C) {
        if c.vanishes() {
            return;
        }
        match self.terms.get_mut(&k) {
            Some(old) => {
                let n = old.add(&c);
                if n.vanishes() {
                    self.terms.remove(&k);
                } else {
                    *old = n;
                }
            }
            None => {
                self.terms.insert(k, c);
            }
        }
    }

    pub fn add_assign(&mut self, o: &Self) {
        for (k, c) in &o.terms {
            self.add_term(k.clone(), c.clone());
        }
    }

    pub fn add_scaled(&mut self, o: &Self, t: &C) {
        for (k, c) in &o.terms {
            self.add_term(k.clone(), c.mul(t));
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut s = self.clone();
        for (k, c) in &o.terms {
            s.add_term(k.clone(), c.neg());
        }
        s
    }

    pub fn add_scaled_rational(&mut self, o: &Self, r: &BigRational) {
        for (k, c) in &o.terms {
            self.add_term(k.clone(), c.scale_rational(r));
        }
    }

    pub fn scale(&self, t: &C) -> Self {
        let mut s = Self::new();
        s.add_scaled(self, t);
        s
    }

    pub fn scale_rational(&self, r: &BigRational) -> Self {
        let mut s = Self::new();
        for (k, c) in &self.terms {
            s.add_term(k.clone(), c.scale_rational(r));
        }
        s
    }

    pub fn coeff(&self, k: &K) -> Option<&C> {
        self.terms.get(k)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &C)> {
        self.terms.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.terms.keys()
    }

    /// Apply a linear map given on basis elements.
    pub fn map_linear<E>(&self, mut f: impl FnMut(&K) -> Result<FormalSum<K, C>, E>) -> Result<Self, E> {
        let mut out = Self::new();
        for (k, c) in &self.terms {
            let img = f(k)?;
            out.add_scaled(&img, c);
        }
        Ok(out)
    }

    /// Push coefficients forward along a map of keys.
    pub fn pushforward<K2: Ord + Clone, E>(
        &self,
        mut f: impl FnMut(&K) -> Result<K2, E>,
    ) -> Result<FormalSum<K2, C>, E> {
        let mut out = FormalSum::new();
        for (k, c) in &self.terms {
            out.add_term(f(k)?, c.clone());
        }
        Ok(out)
    }

    /// Sum of all coefficients (the augmentation).
    pub fn augmentation(&self, zero: C) -> C {
        self.terms.values().fold(zero, |acc, c| acc.add(c))
    }
}

impl<K: Ord + Clone + fmt::Display, C: Coeff> fmt::Display for FormalSum<K, C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})*{k}")?;
        }
        Ok(())
    }
}

pub fn one() -> BigRational {
    BigRational::one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type S = FormalSum<u32, BigRational>;

    fn arb_sum() -> impl Strategy<Value = S> {
        proptest::collection::vec((0u32..8, -5i64..5, 1i64..4), 0..10).prop_map(|ts| {
            let mut s = S::new();
            for (k, n, d) in ts {
                s.add_term(k, ratio(n, d));
            }
            s
        })
    }

    proptest! {
        #[test]
        fn no_explicit_zeros(a in arb_sum(), b in arb_sum()) {
            let mut c = a.clone();
            c.add_assign(&b);
            for (_, v) in c.iter() {
                prop_assert!(!v.vanishes());
            }
            prop_assert!(a.sub(&a).is_zero());
        }

        #[test]
        fn addition_commutes(a in arb_sum(), b in arb_sum()) {
            let mut x = a.clone();
            x.add_assign(&b);
            let mut y = b.clone();
            y.add_assign(&a);
            prop_assert_eq!(x, y);
        }

        #[test]
        fn linear_maps_are_linear(a in arb_sum(), b in arb_sum()) {
            let f = |k: &u32| -> Result<S, ()> {
                let mut s = S::new();
                s.add_term(k + 1, rat(2));
                s.add_term(k % 3, ratio(1, 3));
                Ok(s)
            };
            let mut ab = a.clone();
            ab.add_assign(&b);
            let mut fa = a.map_linear(f).unwrap();
            fa.add_assign(&b.map_linear(f).unwrap());
            prop_assert_eq!(ab.map_linear(f).unwrap(), fa);
        }
    }
}

//! Exact arithmetic in Q[beta]/(H(beta)), or in Q when beta is a supplied integer root.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use super::IntPoly;
use crate::formal_sum::Coeff;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RootRingError {
    #[error("{0} is not a root of the polynomial")]
    NotARoot(i128),
    #[error("polynomial must have nonzero constant and leading coefficients")]
    Degenerate,
}

#[derive(Debug, PartialEq)]
pub struct RootRing {
    /// ascending coefficients of H
    h: Vec<BigRational>,
    root: Option<BigRational>,
}

#[derive(Clone, Debug)]
pub struct RootElem {
    ring: Arc<RootRing>,
    /// coordinates in 1, beta, ..., beta^{d-1}; a single value when beta is specialized
    c: Vec<BigRational>,
}

fn r(x: i128) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

impl RootRing {
    pub fn symbolic(h: &IntPoly) -> Result<Arc<RootRing>, RootRingError> {
        if h.0.len() < 2 || h.0[0] == 0 || *h.0.last().unwrap() == 0 {
            return Err(RootRingError::Degenerate);
        }
        Ok(Arc::new(RootRing { h: h.0.iter().map(|&x| r(x)).collect(), root: None }))
    }

    pub fn integer(h: &IntPoly, beta: i128) -> Result<Arc<RootRing>, RootRingError> {
        if h.0.len() < 2 || h.0[0] == 0 || *h.0.last().unwrap() == 0 {
            return Err(RootRingError::Degenerate);
        }
        if h.eval(beta) != 0 {
            return Err(RootRingError::NotARoot(beta));
        }
        Ok(Arc::new(RootRing { h: h.0.iter().map(|&x| r(x)).collect(), root: Some(r(beta)) }))
    }

    pub fn is_specialized(&self) -> bool {
        self.root.is_some()
    }

    pub fn root_value(&self) -> Option<&BigRational> {
        self.root.as_ref()
    }

    fn degree(&self) -> usize {
        self.h.len() - 1
    }

    fn width(&self) -> usize {
        if self.root.is_some() {
            1
        } else {
            self.degree()
        }
    }

    pub fn from_rational(self: &Arc<Self>, x: BigRational) -> RootElem {
        let mut c = vec![BigRational::zero(); self.width()];
        c[0] = x;
        RootElem { ring: self.clone(), c }
    }

    pub fn from_int(self: &Arc<Self>, x: i128) -> RootElem {
        self.from_rational(r(x))
    }

    pub fn zero(self: &Arc<Self>) -> RootElem {
        self.from_int(0)
    }

    pub fn one(self: &Arc<Self>) -> RootElem {
        self.from_int(1)
    }

    pub fn beta(self: &Arc<Self>) -> RootElem {
        match &self.root {
            Some(b) => self.from_rational(b.clone()),
            None => {
                let mut c = vec![BigRational::zero(); self.degree()];
                if self.degree() == 1 {
                    c[0] = -&self.h[0] / &self.h[1];
                } else {
                    c[1] = BigRational::one();
                }
                RootElem { ring: self.clone(), c }
            }
        }
    }

    /// beta^{-1} = -(h_d beta^{d-1} + ... + h_1) / h_0.
    pub fn beta_inv(self: &Arc<Self>) -> RootElem {
        match &self.root {
            Some(b) => self.from_rational(b.recip()),
            None => {
                let d = self.degree();
                let h0 = &self.h[0];
                let c = (0..d).map(|k| -&self.h[k + 1] / h0).collect();
                RootElem { ring: self.clone(), c }
            }
        }
    }

    fn reduce(&self, mut v: Vec<BigRational>) -> Vec<BigRational> {
        if self.root.is_some() {
            return v;
        }
        let d = self.degree();
        let lead = &self.h[d];
        while v.len() > d {
            let top = v.pop().unwrap();
            if top.is_zero() {
                continue;
            }
            let k = v.len() - d;
            let f = &top / lead;
            for i in 0..d {
                v[k + i] = &v[k + i] - &f * &self.h[i];
            }
        }
        v.resize(d, BigRational::zero());
        v
    }
}

impl RootElem {
    pub fn ring(&self) -> &Arc<RootRing> {
        &self.ring
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.c
    }

    pub fn pow(&self, e: i64) -> RootElem {
        let base = if e >= 0 { self.clone() } else { self.inverse_beta_power_only() };
        let mut acc = self.ring.one();
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }

    // only beta and rationals have inverses we need; general inverses are not required
    fn inverse_beta_power_only(&self) -> RootElem {
        if self.ring.root.is_some() {
            return self.ring.from_rational(self.c[0].recip());
        }
        let b = self.ring.beta();
        if self.c == b.c {
            return self.ring.beta_inv();
        }
        if self.c[1..].iter().all(|x| x.is_zero()) {
            return self.ring.from_rational(self.c[0].recip());
        }
        panic!("inverse only implemented for beta and rationals")
    }

    /// p-adic valuation when the element is a rational number.
    pub fn valuation(&self, p: u64) -> Option<i64> {
        if self.c[1..].iter().any(|x| !x.is_zero()) {
            return None;
        }
        let x = &self.c[0];
        if x.is_zero() {
            return None;
        }
        let vp = |n: &BigInt| {
            let mut n = n.abs();
            let pb = BigInt::from(p);
            let mut v = 0i64;
            while (&n % &pb).is_zero() {
                n /= &pb;
                v += 1;
            }
            v
        };
        Some(vp(x.numer()) - vp(x.denom()))
    }
}

impl PartialEq for RootElem {
    fn eq(&self, o: &Self) -> bool {
        Arc::ptr_eq(&self.ring, &o.ring) && self.c == o.c || (*self.ring == *o.ring && self.c == o.c)
    }
}

impl fmt::Display for RootElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .c
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(k, x)| match k {
                0 => format!("{x}"),
                1 => format!("({x})b"),
                _ => format!("({x})b^{k}"),
            })
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

impl Coeff for RootElem {
    fn vanishes(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }
    fn add(&self, o: &Self) -> Self {
        RootElem { ring: self.ring.clone(), c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect() }
    }
    fn mul(&self, o: &Self) -> Self {
        let n = self.c.len();
        if n == 1 {
            return RootElem { ring: self.ring.clone(), c: vec![&self.c[0] * &o.c[0]] };
        }
        let mut prod = vec![BigRational::zero(); 2 * n - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                prod[i + j] = &prod[i + j] + a * b;
            }
        }
        RootElem { ring: self.ring.clone(), c: self.ring.reduce(prod) }
    }
    fn neg(&self) -> Self {
        RootElem { ring: self.ring.clone(), c: self.c.iter().map(|x| -x).collect() }
    }
    fn scale_rational(&self, x: &BigRational) -> Self {
        RootElem { ring: self.ring.clone(), c: self.c.iter().map(|a| a * x).collect() }
    }
}

//! Truncated arithmetic in the unramified quadratic extension O_E = Z_p[w]/(f) modulo p^N.
//!
//! Elements are pairs (a, b) meaning a + b*w with a, b residues mod p^N. The defining
//! polynomial is f(x) = x^2 + c1*x + c0, irreducible mod p. Residues stay below 2^62 so
//! products fit comfortably in u128.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("precision {precision} unsupported for p = {p} (need 1 <= N and p^N < 2^62)")]
    PrecisionTooLarge { p: u64, precision: u32 },
    #[error("polynomial x^2 + {c1}x + {c0} is reducible mod {p}")]
    ReduciblePolynomial { p: u64, c1: u64, c0: u64 },
    #[error("element is not a unit")]
    NotAUnit,
    #[error("operands live in different fields")]
    FieldMismatch,
    #[error("target is not in the base ring Z_p")]
    NotInBaseRing,
    #[error("u-parameters are not units at p = {p}")]
    NonUnitParameters { p: u64 },
}

/// p-adic valuation of a truncated element. `AtLeast(N)` means the element is 0 mod p^N.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(u32),
    AtLeast(u32),
}

impl Valuation {
    pub fn finite(self) -> Option<u32> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::AtLeast(_) => None,
        }
    }

    /// Lower bound usable in comparisons.
    pub fn bound(self) -> u32 {
        match self {
            Valuation::Finite(v) | Valuation::AtLeast(v) => v,
        }
    }
}

/// Parameters of O_E / p^N.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct LocalField {
    p: u64,
    precision: u32,
    modulus: u64,
    c1: u64,
    c0: u64,
    // second root of f, lifted by Newton iteration from the residue field
    conj_w: (u64, u64),
}

impl fmt::Debug for LocalField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LocalField(p={}, N={}, f=x^2+{}x+{})", self.p, self.precision, self.c1, self.c0)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Largest precision N with p^N < 2^62.
pub fn max_precision(p: u64) -> u32 {
    let mut n = 0;
    let mut m: u128 = 1;
    while m * (p as u128) < (1u128 << 62) {
        m *= p as u128;
        n += 1;
    }
    n
}

fn irreducible_mod_p(p: u64, c1: u64, c0: u64) -> bool {
    (0..p).all(|x| !(x * x + c1 * x + c0).is_multiple_of(p))
}

/// Conway polynomial of degree 2 for small p, else the lexicographically first
/// irreducible monic quadratic.
pub fn default_polynomial(p: u64) -> (u64, u64) {
    match p {
        2 => (1, 1),
        3 => (2, 2),
        5 => (4, 2),
        7 => (6, 3),
        11 => (7, 2),
        13 => (12, 2),
        _ => {
            for c0 in 1..p {
                for c1 in 0..p {
                    if irreducible_mod_p(p, c1, c0) {
                        return (c1, c0);
                    }
                }
            }
            unreachable!("an irreducible quadratic always exists")
        }
    }
}

#[inline]
fn mulmod(x: u64, y: u64, m: u64) -> u64 {
    ((x as u128 * y as u128) % m as u128) as u64
}

#[inline]
fn addmod(x: u64, y: u64, m: u64) -> u64 {
    let s = x + y;
    if s >= m {
        s - m
    } else {
        s
    }
}

#[inline]
fn submod(x: u64, y: u64, m: u64) -> u64 {
    if x >= y {
        x - y
    } else {
        x + m - y
    }
}

fn inv_mod(x: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (x % m) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return None;
    }
    Some(s0.rem_euclid(m as i128) as u64)
}

impl LocalField {
    pub fn new(p: u64, precision: u32) -> Result<Self, ArithError> {
        let (c1, c0) = if is_prime(p) {
            default_polynomial(p)
        } else {
            return Err(ArithError::NotPrime(p));
        };
        Self::with_polynomial(p, precision, c1, c0)
    }

    pub fn with_polynomial(p: u64, precision: u32, c1: u64, c0: u64) -> Result<Self, ArithError> {
        if !is_prime(p) {
            return Err(ArithError::NotPrime(p));
        }
        if precision == 0 || precision > max_precision(p) {
            return Err(ArithError::PrecisionTooLarge { p, precision });
        }
        if !irreducible_mod_p(p, c1 % p, c0 % p) {
            return Err(ArithError::ReduciblePolynomial { p, c1, c0 });
        }
        let modulus = p.pow(precision);
        let mut field = LocalField { p, precision, modulus, c1: c1 % modulus, c0: c0 % modulus, conj_w: (0, 0) };
        field.conj_w = field.hensel_second_root();
        Ok(field)
    }

    /// Same polynomial at a different precision.
    pub fn with_precision(&self, precision: u32) -> Result<Self, ArithError> {
        Self::with_polynomial(self.p, precision, self.c1, self.c0)
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn q(&self) -> u64 {
        self.p
    }
    pub fn precision(&self) -> u32 {
        self.precision
    }
    pub fn modulus(&self) -> u64 {
        self.modulus
    }
    pub fn poly(&self) -> (u64, u64) {
        (self.c1, self.c0)
    }

    pub fn zero(&self) -> LocalElement {
        self.elem(0, 0)
    }
    pub fn one(&self) -> LocalElement {
        self.elem(1, 0)
    }
    pub fn omega(&self) -> LocalElement {
        self.elem(0, 1)
    }

    pub fn elem(&self, a: u64, b: u64) -> LocalElement {
        LocalElement { field: *self, a: a % self.modulus, b: b % self.modulus }
    }

    pub fn from_i64(&self, k: i64) -> LocalElement {
        self.from_pair(k, 0)
    }

    pub fn from_pair(&self, a: i64, b: i64) -> LocalElement {
        let m = self.modulus as i128;
        self.elem((a as i128).rem_euclid(m) as u64, (b as i128).rem_euclid(m) as u64)
    }

    /// p^k as an element (zero when k >= N).
    pub fn p_pow(&self, k: u32) -> LocalElement {
        if k >= self.precision {
            self.zero()
        } else {
            self.elem(self.p.pow(k), 0)
        }
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> LocalElement {
        self.elem(rng.gen_range(0..self.modulus), rng.gen_range(0..self.modulus))
    }

    /// All residues of the residue field F_{q^2}, as lifts with coordinates in [0, p).
    pub fn residue_field_elements(&self) -> Vec<LocalElement> {
        let mut out = Vec::with_capacity((self.p * self.p) as usize);
        for a in 0..self.p {
            for b in 0..self.p {
                out.push(self.elem(a, b));
            }
        }
        out
    }

    #[inline]
    pub(crate) fn add_raw(&self, x: (u64, u64), y: (u64, u64)) -> (u64, u64) {
        (addmod(x.0, y.0, self.modulus), addmod(x.1, y.1, self.modulus))
    }

    #[inline]
    pub(crate) fn sub_raw(&self, x: (u64, u64), y: (u64, u64)) -> (u64, u64) {
        (submod(x.0, y.0, self.modulus), submod(x.1, y.1, self.modulus))
    }

    #[inline]
    pub(crate) fn mul_raw(&self, x: (u64, u64), y: (u64, u64)) -> (u64, u64) {
        let m = self.modulus;
        let (a, b) = x;
        let (c, d) = y;
        let bd = mulmod(b, d, m);
        let re = submod(mulmod(a, c, m), mulmod(self.c0, bd, m), m);
        let im = submod(addmod(mulmod(a, d, m), mulmod(b, c, m), m), mulmod(self.c1, bd, m), m);
        (re, im)
    }

    fn eval_f(&self, r: (u64, u64)) -> (u64, u64) {
        let r2 = self.mul_raw(r, r);
        let t = self.mul_raw((self.c1, 0), r);
        self.add_raw(self.add_raw(r2, t), (self.c0, 0))
    }

    fn hensel_second_root(&self) -> (u64, u64) {
        // the other root mod p is -c1 - w; lift it with Newton steps, doubling precision each time
        let m = self.modulus;
        let mut r = ((m - self.c1 % self.p) % m, m - 1);
        let mut steps = 0;
        loop {
            let fr = self.eval_f(r);
            if fr == (0, 0) {
                return r;
            }
            let deriv = self.add_raw(self.mul_raw((2, 0), r), (self.c1, 0));
            let dinv = LocalElement { field: *self, a: deriv.0, b: deriv.1 }
                .inverse_unchecked()
                .expect("f has distinct roots mod p");
            r = self.sub_raw(r, self.mul_raw(fr, (dinv.a, dinv.b)));
            steps += 1;
            assert!(steps < 64, "Newton iteration did not converge");
        }
    }

    /// The second root of f found by Hensel lifting.
    pub fn conjugate_root(&self) -> LocalElement {
        self.elem(self.conj_w.0, self.conj_w.1)
    }

    fn int_valuation(&self, x: u64) -> Valuation {
        if x == 0 {
            return Valuation::AtLeast(self.precision);
        }
        if self.p == 2 {
            return Valuation::Finite(x.trailing_zeros());
        }
        let mut v = 0;
        let mut y = x;
        while y.is_multiple_of(self.p) {
            y /= self.p;
            v += 1;
        }
        Valuation::Finite(v)
    }

    /// Solve gamma + conj(gamma) = t for t in Z_p (mod p^N).
    pub fn solve_trace_equation(&self, t: LocalElement) -> Result<LocalElement, ArithError> {
        self.check(&t)?;
        if t.b != 0 {
            return Err(ArithError::NotInBaseRing);
        }
        // Tr(a + b w) = 2a - c1 b
        if self.p != 2 {
            let half = inv_mod(2, self.modulus).expect("2 is a unit");
            Ok(self.elem(mulmod(t.a, half, self.modulus), 0))
        } else {
            // a = 0, b = -t / c1 (c1 is odd since f is irreducible mod 2)
            let c1inv = inv_mod(self.c1, self.modulus).ok_or(ArithError::NotAUnit)?;
            let b = mulmod((self.modulus - t.a) % self.modulus, c1inv, self.modulus);
            Ok(self.elem(0, b))
        }
    }

    fn check(&self, x: &LocalElement) -> Result<(), ArithError> {
        if x.field != *self {
            Err(ArithError::FieldMismatch)
        } else {
            Ok(())
        }
    }
}

/// An element a + b*w of O_E / p^N.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct LocalElement {
    field: LocalField,
    a: u64,
    b: u64,
}

impl fmt::Debug for LocalElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for LocalElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.field.modulus;
        let s = |x: u64| -> i128 {
            if x > m / 2 {
                x as i128 - m as i128
            } else {
                x as i128
            }
        };
        match (s(self.a), s(self.b)) {
            (a, 0) => write!(f, "{a}"),
            (0, b) => write!(f, "{b}w"),
            (a, b) => write!(f, "{a}{b:+}w"),
        }
    }
}

impl LocalElement {
    pub fn field(&self) -> &LocalField {
        &self.field
    }
    pub fn coords(&self) -> (u64, u64) {
        (self.a, self.b)
    }
    pub(crate) fn raw(&self) -> (u64, u64) {
        (self.a, self.b)
    }
    pub(crate) fn from_raw(field: &LocalField, r: (u64, u64)) -> Self {
        LocalElement { field: *field, a: r.0, b: r.1 }
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    pub fn valuation(&self) -> Valuation {
        let va = self.field.int_valuation(self.a);
        let vb = self.field.int_valuation(self.b);
        match (va, vb) {
            (Valuation::AtLeast(n), Valuation::AtLeast(_)) => Valuation::AtLeast(n),
            (Valuation::Finite(x), Valuation::Finite(y)) => Valuation::Finite(x.min(y)),
            (Valuation::Finite(x), _) | (_, Valuation::Finite(x)) => Valuation::Finite(x),
        }
    }

    pub fn is_unit(&self) -> bool {
        self.valuation() == Valuation::Finite(0)
    }

    /// Nontrivial Galois automorphism: w goes to the other root of f.
    pub fn conj(&self) -> LocalElement {
        let f = &self.field;
        let r = f.add_raw((self.a, 0), f.mul_raw((self.b, 0), f.conj_w));
        LocalElement::from_raw(f, r)
    }

    /// x * conj(x), an element of Z_p / p^N.
    pub fn norm(&self) -> LocalElement {
        *self * self.conj()
    }

    pub fn trace(&self) -> LocalElement {
        *self + self.conj()
    }

    fn inverse_unchecked(&self) -> Option<LocalElement> {
        let f = &self.field;
        let cj = {
            // conj via the closed formula; used while conj_w is still being computed
            let a = submod(self.a, mulmod(self.b, f.c1, f.modulus), f.modulus);
            let b = (f.modulus - self.b) % f.modulus;
            (a, b)
        };
        let n = f.mul_raw((self.a, self.b), cj);
        debug_assert_eq!(n.1, 0);
        let ninv = inv_mod(n.0, f.modulus)?;
        Some(LocalElement::from_raw(f, f.mul_raw(cj, (ninv, 0))))
    }

    pub fn inverse(&self) -> Result<LocalElement, ArithError> {
        if !self.is_unit() {
            return Err(ArithError::NotAUnit);
        }
        self.inverse_unchecked().ok_or(ArithError::NotAUnit)
    }

    /// Exact division by p^k, assuming valuation >= k. The result is defined mod p^(N-k);
    /// the representative returned has coordinates below p^(N-k).
    pub fn div_p_pow(&self, k: u32) -> LocalElement {
        let d = self.field.p.pow(k);
        debug_assert!(self.a.is_multiple_of(d) && self.b.is_multiple_of(d));
        LocalElement { field: self.field, a: self.a / d, b: self.b / d }
    }

    /// Coordinates reduced mod p^k and the corresponding quotient: self = rem + p^k * quo.
    pub fn divrem_p_pow(&self, k: u32) -> (LocalElement, LocalElement) {
        let d = self.field.p.pow(k);
        let rem = LocalElement { field: self.field, a: self.a % d, b: self.b % d };
        let quo = LocalElement { field: self.field, a: self.a / d, b: self.b / d };
        (quo, rem)
    }

    /// Reduce to a residue (a mod p, b mod p).
    pub fn residue(&self) -> (u64, u64) {
        (self.a % self.field.p, self.b % self.field.p)
    }

    pub fn pow(&self, mut e: u64) -> LocalElement {
        let mut base = *self;
        let mut acc = self.field.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    pub fn checked_add(&self, o: &LocalElement) -> Result<LocalElement, ArithError> {
        self.field.check(o)?;
        Ok(*self + *o)
    }
    pub fn checked_sub(&self, o: &LocalElement) -> Result<LocalElement, ArithError> {
        self.field.check(o)?;
        Ok(*self - *o)
    }
    pub fn checked_mul(&self, o: &LocalElement) -> Result<LocalElement, ArithError> {
        self.field.check(o)?;
        Ok(*self * *o)
    }

    /// Change precision by reducing or lifting the residues (lifting keeps the integer representative).
    pub fn to_field(&self, target: &LocalField) -> LocalElement {
        target.elem(self.a, self.b)
    }
}

impl Add for LocalElement {
    type Output = LocalElement;
    fn add(self, o: LocalElement) -> LocalElement {
        assert!(self.field == o.field, "field mismatch");
        LocalElement::from_raw(&self.field, self.field.add_raw(self.raw(), o.raw()))
    }
}

impl Sub for LocalElement {
    type Output = LocalElement;
    fn sub(self, o: LocalElement) -> LocalElement {
        assert!(self.field == o.field, "field mismatch");
        LocalElement::from_raw(&self.field, self.field.sub_raw(self.raw(), o.raw()))
    }
}

impl Mul for LocalElement {
    type Output = LocalElement;
    fn mul(self, o: LocalElement) -> LocalElement {
        assert!(self.field == o.field, "field mismatch");
        LocalElement::from_raw(&self.field, self.field.mul_raw(self.raw(), o.raw()))
    }
}

impl Neg for LocalElement {
    type Output = LocalElement;
    fn neg(self) -> LocalElement {
        self.field.zero() - self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conway_defaults() {
        assert_eq!(default_polynomial(2), (1, 1));
        assert_eq!(default_polynomial(3), (2, 2));
        assert_eq!(default_polynomial(5), (4, 2));
        for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23] {
            let (c1, c0) = default_polynomial(p);
            assert!(irreducible_mod_p(p, c1, c0), "p={p}");
        }
    }

    #[test]
    fn omega_squared_p2() {
        let f = LocalField::new(2, 10).unwrap();
        let w = f.omega();
        assert_eq!(w * w, -w - f.one());
        assert_eq!(w * w * w, f.one());
    }

    #[test]
    fn conj_omega_and_norm_p3() {
        let f = LocalField::new(3, 10).unwrap();
        let w = f.omega();
        assert_eq!(w.conj(), f.from_pair(-2, -1));
        assert_eq!(w.norm(), f.from_i64(2));
        assert_eq!(f.conjugate_root(), f.from_pair(-2, -1));
    }

    #[test]
    fn hensel_root_matches_closed_form() {
        for p in [2u64, 3, 5, 7, 11] {
            let f = LocalField::new(p, 8).unwrap();
            let (c1, _) = f.poly();
            assert_eq!(f.conjugate_root(), f.from_pair(-(c1 as i64), -1));
        }
    }

    #[test]
    fn valuations() {
        let f = LocalField::new(2, 10).unwrap();
        assert_eq!(f.from_i64(12).valuation(), Valuation::Finite(2));
        assert_eq!(f.zero().valuation(), Valuation::AtLeast(10));
        assert_eq!(f.from_pair(8, 4).valuation(), Valuation::Finite(2));
    }

    #[test]
    fn inverse_of_one_plus_omega() {
        let f = LocalField::new(5, 12).unwrap();
        let x = f.one() + f.omega();
        let y = x.inverse().unwrap();
        assert_eq!(x * y, f.one());
        assert_eq!(f.from_i64(5).inverse(), Err(ArithError::NotAUnit));
    }

    #[test]
    fn trace_equation() {
        for p in [2u64, 3, 5] {
            let f = LocalField::new(p, 9).unwrap();
            for t in [-1i64, 1, 4, 7] {
                let g = f.solve_trace_equation(f.from_i64(t)).unwrap();
                assert_eq!(g.trace(), f.from_i64(t), "p={p} t={t}");
            }
            assert_eq!(f.solve_trace_equation(f.omega()), Err(ArithError::NotInBaseRing));
        }
    }

    #[test]
    fn errors() {
        assert_eq!(LocalField::new(4, 3), Err(ArithError::NotPrime(4)));
        assert!(matches!(LocalField::new(2, 63), Err(ArithError::PrecisionTooLarge { .. })));
        assert!(matches!(LocalField::with_polynomial(2, 4, 0, 1), Err(ArithError::ReduciblePolynomial { .. })));
        let a = LocalField::new(2, 5).unwrap();
        let b = LocalField::new(2, 6).unwrap();
        assert_eq!(a.one().checked_add(&b.one()), Err(ArithError::FieldMismatch));
    }

    #[test]
    fn residue_field_is_a_field() {
        // brute force: every nonzero residue has an inverse mod p
        for p in [2u64, 3, 5] {
            let f = LocalField::new(p, 1).unwrap();
            let els = f.residue_field_elements();
            for x in els.iter().filter(|x| !x.is_zero()) {
                assert!(els.iter().any(|y| *x * *y == f.one()));
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn elems() -> impl Strategy<Value = (u64, [(i64, i64, u32); 3])> {
            let e = (-100_000i64..100_000, -100_000i64..100_000, 0u32..4);
            (prop::sample::select(vec![2u64, 3, 5]), [e.clone(), e.clone(), e])
        }

        fn build(f: &LocalField, (a, b, k): (i64, i64, u32)) -> LocalElement {
            f.from_pair(a, b) * f.p_pow(k)
        }

        proptest! {
            #[test]
            fn ring_axioms((p, xs) in elems()) {
                let f = LocalField::new(p, 10).unwrap();
                let [a, b, c] = xs.map(|x| build(&f, x));
                prop_assert_eq!((a * b) * c, a * (b * c));
                prop_assert_eq!(a * (b + c), a * b + a * c);
                prop_assert_eq!(a * b, b * a);
                prop_assert_eq!(a - a, f.zero());
            }

            #[test]
            fn conjugation_norm_trace((p, xs) in elems()) {
                let f = LocalField::new(p, 10).unwrap();
                let [a, b, _] = xs.map(|x| build(&f, x));
                prop_assert_eq!(a.conj().conj(), a);
                prop_assert_eq!((a * b).conj(), a.conj() * b.conj());
                prop_assert_eq!((a * b).norm(), a.norm() * b.norm());
                prop_assert_eq!((a + b).trace(), a.trace() + b.trace());
                prop_assert_eq!(a.norm(), a * a.conj());
            }

            #[test]
            fn units_invert_and_valuations_add((p, xs) in elems()) {
                let f = LocalField::new(p, 12).unwrap();
                let [a, b, _] = xs.map(|x| build(&f, x));
                if a.is_unit() {
                    prop_assert_eq!(a * a.inverse().unwrap(), f.one());
                }
                if let (Some(va), Some(vb)) = (a.valuation().finite(), b.valuation().finite()) {
                    if va + vb < f.precision() {
                        prop_assert_eq!((a * b).valuation().finite(), Some(va + vb));
                    }
                }
            }

            #[test]
            fn reduction_is_a_ring_map((p, xs) in elems()) {
                let f = LocalField::new(p, 12).unwrap();
                let g = f.with_precision(5).unwrap();
                let [a, b, _] = xs.map(|x| build(&f, x));
                prop_assert_eq!((a * b).to_field(&g), a.to_field(&g) * b.to_field(&g));
                prop_assert_eq!((a + b).to_field(&g), a.to_field(&g) + b.to_field(&g));
            }
        }
    }
}

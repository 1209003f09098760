//! Orbit sums, the graph-level trace between conductor levels, the distribution relation and
//! the norm-compatible family built from a root of the specialized Hecke polynomial.
//!
//! The trace sends a term of level at most n to q times itself and x_{n+1} to q^{-5} times the
//! orbit sum U_V U_W x_n. Images of pair-vertices in H-orbit classes are computed through inv.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;
use thiserror::Error;

use crate::building::{Building, BuildingError, CanonicalFamily, PairVertex};
use crate::formal_sum::{rat, rat_pow, Coeff, FormalSum};
use crate::hecke::root_ring::{RootElem, RootRing, RootRingError};
use crate::hecke::{HeckePoly, IntPoly, MPoly, QSpec, Var};
use crate::operators::{apply_partial, apply_t, is_balanced, HeckeOp, PairSum, PartialOp};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DistributionError {
    #[error(transparent)]
    Building(#[from] BuildingError),
    #[error(transparent)]
    RootRing(#[from] RootRingError),
    #[error("vertex {vertex} of level {level} lies outside the canonical fiber")]
    UnsupportedSupport { vertex: PairVertex, level: u32 },
    #[error("canonical family too short: need x_{needed}, have up to x_{have}")]
    FamilyTooShort { needed: u32, have: u32 },
    #[error("precondition failed: {0}")]
    Precondition(String),
}

type Result<T> = std::result::Result<T, DistributionError>;

fn family_vertex(fam: &CanonicalFamily, n: u32) -> Result<PairVertex> {
    fam.xs
        .get(n as usize)
        .copied()
        .ok_or(DistributionError::FamilyTooShort { needed: n, have: fam.xs.len() as u32 - 1 })
}

#[derive(Clone, Debug)]
pub struct OrbitSum {
    /// level of the summands
    pub level: u32,
    pub sum: PairSum,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitSumReport {
    pub n: u32,
    pub support: usize,
    pub expected_support: u64,
    pub all_coefficients_one: bool,
    pub contains_next: bool,
    pub balanced_v: bool,
    pub balanced_w: bool,
}

impl OrbitSumReport {
    pub fn holds(&self) -> bool {
        self.support as u64 == self.expected_support
            && self.all_coefficients_one
            && self.contains_next
            && self.balanced_v
            && self.balanced_w
    }
}

/// U_V U_W x_n.
pub fn orbit_sum(b: &mut Building, fam: &CanonicalFamily, n: u32) -> Result<OrbitSum> {
    if n == 0 {
        return Err(DistributionError::Precondition("orbit sums start at level 1".into()));
    }
    let x = PairSum::single(family_vertex(fam, n)?, rat(1));
    let uw = apply_partial(b, &x, PartialOp::UW)?;
    let sum = apply_partial(b, &uw, PartialOp::UV)?;
    Ok(OrbitSum { level: n + 1, sum })
}

pub fn check_orbit_sum(b: &mut Building, fam: &CanonicalFamily, n: u32) -> Result<OrbitSumReport> {
    let o = orbit_sum(b, fam, n)?;
    let next = family_vertex(fam, n + 1)?;
    let (bv, bw) = is_balanced(b, &o.sum)?;
    let ones = o.sum.iter().all(|(_, c)| c == &rat(1));
    Ok(OrbitSumReport {
        n,
        support: o.sum.len(),
        expected_support: b.q().pow(6),
        all_coefficients_one: ones,
        contains_next: o.sum.coeff(&next).is_some(),
        balanced_v: bv,
        balanced_w: bw,
    })
}

/// Trace from level n+1 down to level n.
pub fn trace<C: Coeff>(
    b: &mut Building,
    fam: &CanonicalFamily,
    sum: &FormalSum<PairVertex, C>,
    n: u32,
) -> Result<FormalSum<PairVertex, C>> {
    let q = b.q() as i64;
    let next = family_vertex(fam, n + 1)?;
    let mut orbit: Option<PairSum> = None;
    let mut out = FormalSum::new();
    for (x, c) in sum.iter() {
        let level = b.conductor_level(*x)?;
        if level <= n {
            out.add_term(*x, c.scale_rational(&rat(q)));
        } else if *x == next {
            if orbit.is_none() {
                orbit = Some(orbit_sum(b, fam, n)?.sum);
            }
            let weight = rat_pow(q, -5);
            for (y, r) in orbit.as_ref().unwrap().iter() {
                out.add_term(*y, c.scale_rational(&(r * &weight)));
            }
        } else {
            return Err(DistributionError::UnsupportedSupport { vertex: *x, level });
        }
    }
    Ok(out)
}

/// Apply a polynomial in t10, t01 (with integer coefficients) to a formal sum.
pub fn apply_hecke_poly<C: Coeff>(
    b: &mut Building,
    poly: &MPoly,
    sum: &FormalSum<PairVertex, C>,
) -> Result<FormalSum<PairVertex, C>> {
    let d01 = poly.degree_in(Var::T01);
    let mut pow01 = vec![sum.clone()];
    for k in 1..=d01 as usize {
        let next = apply_t(b, &pow01[k - 1], HeckeOp::T01)?;
        pow01.push(next);
    }
    // cache t10^a t01^b sum by (a, b)
    let mut cache: BTreeMap<(u16, u16), FormalSum<PairVertex, C>> = BTreeMap::new();
    let mut out = FormalSum::new();
    for (m, c) in poly.terms() {
        if m.iter().enumerate().any(|(i, &e)| e > 0 && i != Var::T10 as usize && i != Var::T01 as usize) {
            return Err(DistributionError::Precondition(format!("operator polynomial has stray variables: {poly}")));
        }
        let (a, e01) = (m[Var::T10 as usize], m[Var::T01 as usize]);
        if !cache.contains_key(&(a, e01)) {
            let mut s = pow01[e01 as usize].clone();
            let start = (0..a).rev().find(|k| cache.contains_key(&(*k, e01)));
            if let Some(k) = start {
                s = cache[&(k, e01)].clone();
                for _ in k..a {
                    s = apply_t(b, &s, HeckeOp::T10)?;
                }
            } else {
                for _ in 0..a {
                    s = apply_t(b, &s, HeckeOp::T10)?;
                }
            }
            cache.insert((a, e01), s);
        }
        out.add_scaled_rational(&cache[&(a, e01)], &BigRational::from_integer(BigInt::from(*c)));
    }
    Ok(out)
}

/// Sum coefficients over H-orbit classes, labelled by inv.
pub fn inv_classes<C: Coeff>(b: &mut Building, sum: &FormalSum<PairVertex, C>) -> Result<FormalSum<(u32, u32), C>> {
    Ok(sum.pushforward(|x| b.inv(*x))?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Variant {
    /// the degree-4 factor H^(4)
    Short,
    /// the full degree-6 polynomial
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Pairing {
    /// C_i on xi_{n+i}
    Standard,
    /// C_i on xi_{n+deg-i}
    Reversed,
}

#[derive(Clone, Debug, Serialize)]
pub struct DistributionOutcome {
    pub q: u64,
    pub precision: u32,
    pub n: u32,
    pub variant: Variant,
    pub pairing: Pairing,
    pub degree: u16,
    /// support size of the traced combination as a sum of pair-vertices
    pub residual_terms: usize,
    /// the traced combination equals q^{-5} times the operator form sum_i C_i (V_V V_W)^{deg-i} O
    pub operator_form_agrees: bool,
    /// nonzero H-orbit class totals of the residual, as (inv, coefficient)
    pub class_residual: Vec<((u32, u32), String)>,
    /// largest formal sum handled along the way
    pub max_support: usize,
    /// a few residual terms with their inv, for inspection
    pub sample_terms: Vec<String>,
    #[serde(skip)]
    pub residual: PairSum,
}

impl DistributionOutcome {
    pub fn pair_residual_zero(&self) -> bool {
        self.residual_terms == 0
    }

    pub fn class_residual_zero(&self) -> bool {
        self.class_residual.is_empty()
    }
}

/// Hecke polynomial for the variant, with q specialized.
pub fn relation_polynomial(q: u64, variant: Variant) -> MPoly {
    let h = HeckePoly::explicit(QSpec::Int(q as i128));
    match variant {
        Variant::Short => h.h4,
        Variant::Full => h.full,
    }
}

/// Trace of sum_i C_i xi_{n+i} down to level n+deg-1, and the same relation in operator form.
pub fn distribution_check(
    b: &mut Building,
    fam: &CanonicalFamily,
    n: u32,
    variant: Variant,
    pairing: Pairing,
) -> Result<DistributionOutcome> {
    let q = b.q();
    let poly = relation_polynomial(q, variant);
    let deg = poly.degree_in(Var::Z);
    let coeffs = HeckePoly::coeffs(&poly);
    let top = n + deg as u32;
    family_vertex(fam, top)?;
    let qr = rat(q as i64);
    let c_at = |i: u16| match pairing {
        Pairing::Standard => &coeffs[i as usize],
        Pairing::Reversed => &coeffs[(deg - i) as usize],
    };

    // The trace commutes with the Hecke action, so C_i is applied after tracing each xi.
    let mut residual = PairSum::new();
    let mut max_support = 0;
    let orbit = orbit_sum(b, fam, top - 1)?.sum;
    for i in 0..=deg {
        let xi = PairSum::single(family_vertex(fam, n + i as u32)?, rat(1));
        let traced = if i == deg { trace(b, fam, &xi, top - 1)? } else { xi.scale(&qr) };
        let term = apply_hecke_poly(b, c_at(i), &traced)?;
        max_support = max_support.max(term.len());
        residual.add_assign(&term);
    }

    // sum_i C_i (V_V V_W)^{deg-i} O with O = U_V U_W x_{top-1}
    let mut operator = PairSum::new();
    let mut descent = orbit.clone();
    for k in 0..=deg {
        let i = deg - k;
        let term = apply_hecke_poly(b, c_at(i), &descent)?;
        max_support = max_support.max(term.len());
        operator.add_assign(&term);
        if k < deg {
            let w = apply_partial(b, &descent, PartialOp::VW)?;
            descent = apply_partial(b, &w, PartialOp::VV)?;
        }
    }
    let operator_form_agrees = operator.scale(&rat_pow(q as i64, -5)) == residual;

    let classes = inv_classes(b, &residual)?;
    let class_residual = classes.iter().map(|(k, c)| (*k, c.to_string())).collect();
    let mut sample_terms = Vec::new();
    for (x, c) in residual.iter().take(6) {
        let inv = b.inv(*x)?;
        sample_terms.push(format!("{c} * {x} inv={inv:?}"));
    }
    Ok(DistributionOutcome {
        q,
        precision: b.field().precision(),
        n,
        variant,
        pairing,
        degree: deg,
        residual_terms: residual.len(),
        operator_form_agrees,
        class_residual,
        max_support,
        sample_terms,
        residual,
    })
}

/// Norm-compatible family: b_5..b_0 from synthetic division of sum c_m z^m by (z - beta^{-1}),
/// where c_m is the coefficient of z^{6-m} in H.
#[derive(Clone, Debug)]
pub struct NormFamily {
    pub ring: Arc<RootRing>,
    pub q: u64,
    /// c_0..c_6
    pub c: Vec<RootElem>,
    /// b_0..b_5
    pub b: Vec<RootElem>,
    pub remainder: RootElem,
    pub alpha: RootElem,
}

pub type RootSum = FormalSum<PairVertex, RootElem>;

impl NormFamily {
    /// `beta = None` works in Q[beta]/(H(beta)).
    pub fn new(h: &IntPoly, q: u64, beta: Option<i128>) -> Result<NormFamily> {
        let ring = match beta {
            Some(x) => RootRing::integer(h, x)?,
            None => RootRing::symbolic(h)?,
        };
        let deg = h.degree();
        let c: Vec<RootElem> = (0..=deg).map(|m| ring.from_int(h.0[deg - m])).collect();
        let binv = ring.beta_inv();
        let mut b = vec![ring.zero(); deg];
        b[deg - 1] = c[deg].clone();
        for j in (1..deg).rev() {
            b[j - 1] = c[j].add(&binv.mul(&b[j]));
        }
        let remainder = c[0].add(&binv.mul(&b[0]));
        let alpha = binv.scale_rational(&rat(q as i64));
        Ok(NormFamily { ring, q, c, b, remainder, alpha })
    }

    pub fn degree(&self) -> usize {
        self.b.len()
    }

    pub fn division_exact(&self) -> bool {
        self.remainder.vanishes()
    }

    /// (sum_j b_j z^j)(z - beta^{-1}) compared with sum_m c_m z^m, coefficient by coefficient.
    pub fn telescoping_holds(&self) -> bool {
        let binv = self.ring.beta_inv();
        let d = self.degree();
        (0..=d).all(|m| {
            let mut lhs = self.ring.zero();
            if m >= 1 {
                lhs = lhs.add(&self.b[m - 1]);
            }
            if m < d {
                lhs = lhs.add(&binv.mul(&self.b[m]).neg());
            }
            lhs == self.c[m]
        })
    }

    /// y~_n = sum_j b_j xi_{n-d+1+j}.
    pub fn y_tilde(&self, fam: &CanonicalFamily, n: u32) -> Result<RootSum> {
        let d = self.degree() as u32;
        if n + 1 < d {
            return Err(DistributionError::Precondition(format!("y~_{n} needs n >= {}", d - 1)));
        }
        let mut s = RootSum::new();
        for (j, bj) in self.b.iter().enumerate() {
            s.add_term(family_vertex(fam, n + 1 - d + j as u32)?, bj.clone());
        }
        Ok(s)
    }

    /// y_n = alpha^{-n} y~_n; alpha^{-1} = beta / q.
    pub fn y(&self, fam: &CanonicalFamily, n: u32) -> Result<RootSum> {
        let ainv = self.ring.beta().scale_rational(&rat_pow(self.q as i64, -1));
        Ok(self.y_tilde(fam, n)?.scale(&ainv.pow(n as i64)))
    }

    /// sum_m c_m xi_{n-d+m}, the scalar distribution combination ending at level n+1.
    pub fn scalar_combination(&self, fam: &CanonicalFamily, n: u32) -> Result<RootSum> {
        let d = self.degree() as u32;
        let mut s = RootSum::new();
        for (m, cm) in self.c.iter().enumerate() {
            s.add_term(family_vertex(fam, n + 1 + m as u32 - d)?, cm.clone());
        }
        Ok(s)
    }

    pub fn alpha_valuation(&self, p: u64) -> Option<i64> {
        self.alpha.valuation(p)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NormDescentOutcome {
    pub n: u32,
    pub beta: String,
    /// trace(y~_{n+1}) = q beta^{-1} y~_n as formal sums of pair-vertices
    pub literal_tilde: bool,
    /// trace(y~_{n+1}) - q beta^{-1} y~_n = trace(sum_m c_m xi_{n-5+m})
    pub telescoping: bool,
    /// augmentation of trace(y~_{n+1}) - q beta^{-1} y~_n vanishes
    pub augmented_tilde: bool,
    /// trace(y_{n+1}) = y_n as formal sums
    pub literal_y: bool,
    /// augmentation of trace(y_{n+1}) - y_n vanishes
    pub augmented_y: bool,
    pub residual_terms: usize,
}

pub fn norm_descent_check(
    b: &mut Building,
    fam: &CanonicalFamily,
    family: &NormFamily,
    n: u32,
) -> Result<NormDescentOutcome> {
    let ring = &family.ring;
    let q_binv = ring.beta_inv().scale_rational(&rat(family.q as i64));
    let up = family.y_tilde(fam, n + 1)?;
    let down = family.y_tilde(fam, n)?;
    let traced = trace(b, fam, &up, n)?;
    let residual = traced.sub(&down.scale(&q_binv));
    let combo = trace(b, fam, &family.scalar_combination(fam, n)?, n)?;
    let yu = trace(b, fam, &family.y(fam, n + 1)?, n)?;
    let yd = family.y(fam, n)?;
    let yres = yu.sub(&yd);
    Ok(NormDescentOutcome {
        n,
        beta: ring.beta().to_string(),
        literal_tilde: residual.is_zero(),
        telescoping: residual == combo,
        augmented_tilde: residual.augmentation(ring.zero()).vanishes(),
        literal_y: yres.is_zero(),
        augmented_y: yres.augmentation(ring.zero()).vanishes(),
        residual_terms: residual.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::building::{build_canonical_family, FamilyVariant};
    use crate::formal_sum::ratio;
    use crate::hecke::{specialize_scalars, trivial_eigenvalues};

    fn setup(radius: u32, n_max: u32) -> (Building, CanonicalFamily) {
        let mut b = Building::with_default_precision(2, radius).unwrap();
        let fam = build_canonical_family(&mut b, n_max, FamilyVariant::Default).unwrap();
        (b, fam)
    }

    #[test]
    fn orbit_sums_small_levels() {
        let (mut b, fam) = setup(5, 4);
        for n in 1..=3 {
            let r = check_orbit_sum(&mut b, &fam, n).unwrap();
            assert!(r.holds(), "{r:?}");
            assert_eq!(r.support, 64);
        }
    }

    #[test]
    fn trace_examples() {
        let (mut b, fam) = setup(5, 4);
        let x3 = PairSum::single(fam.xs[3], rat(1));
        let t = trace(&mut b, &fam, &x3, 2).unwrap();
        assert_eq!(t.len(), 64);
        assert!(t.iter().all(|(_, c)| *c == ratio(1, 32)));
        assert_eq!(t.augmentation(rat(0)), rat(2));
        let x1 = PairSum::single(fam.xs[1], rat(1));
        assert_eq!(trace(&mut b, &fam, &x1, 2).unwrap(), x1.scale(&rat(2)));
    }

    #[test]
    fn trace_refuses_foreign_vertices() {
        let (mut b, fam) = setup(5, 4);
        let o = orbit_sum(&mut b, &fam, 2).unwrap().sum;
        let other = o.keys().copied().find(|x| *x != fam.xs[3]).unwrap();
        let e = PairSum::single(other, rat(1));
        assert!(matches!(trace(&mut b, &fam, &e, 2), Err(DistributionError::UnsupportedSupport { .. })));
    }

    #[test]
    fn trace_is_linear() {
        let (mut b, fam) = setup(5, 4);
        let mut s = PairSum::single(fam.xs[3], ratio(3, 2));
        s.add_term(fam.xs[1], rat(-5));
        let lhs = trace(&mut b, &fam, &s, 2).unwrap();
        let mut rhs = trace(&mut b, &fam, &PairSum::single(fam.xs[3], rat(1)), 2).unwrap().scale(&ratio(3, 2));
        rhs.add_assign(&PairSum::single(fam.xs[1], rat(-10)));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn short_relation_small_n() {
        let (mut b, fam) = setup(9, 8);
        let r = distribution_check(&mut b, &fam, 4, Variant::Short, Pairing::Standard).unwrap();
        assert!(r.operator_form_agrees);
        assert!(r.class_residual_zero(), "{:?}", r.class_residual);
        let rev = distribution_check(&mut b, &fam, 4, Variant::Short, Pairing::Reversed).unwrap();
        assert!(!rev.class_residual_zero());
    }

    #[test]
    fn norm_family_algebra() {
        let (t10, t01) = trivial_eigenvalues(2);
        let h = specialize_scalars(t10, t01, 2).full;
        for beta in [Some(64), Some(1), None] {
            let f = NormFamily::new(&h, 2, beta).unwrap();
            assert!(f.division_exact());
            assert!(f.telescoping_holds());
        }
        assert_eq!(NormFamily::new(&h, 2, Some(64)).unwrap().alpha_valuation(2), Some(-5));
        assert!(matches!(NormFamily::new(&h, 2, Some(3)), Err(DistributionError::RootRing(_))));
    }

    #[test]
    fn norm_descent_small() {
        let (t10, t01) = trivial_eigenvalues(2);
        let h = specialize_scalars(t10, t01, 2).full;
        let (mut b, fam) = setup(8, 7);
        let f = NormFamily::new(&h, 2, Some(64)).unwrap();
        let r = norm_descent_check(&mut b, &fam, &f, 6).unwrap();
        assert!(!r.literal_tilde);
        assert!(r.telescoping);
        assert!(r.augmented_tilde);
        assert!(r.augmented_y);
    }
}

//! The Hecke polynomial at an inert place, its factorization through the partial operators,
//! and its scalar specializations.

pub mod mpoly;
pub mod root_ring;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

pub use mpoly::{normalize, MPoly, Var, QUOTIENT_RULES};

/// Either an indeterminate q or a concrete integer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum QSpec {
    Symbolic,
    Int(i128),
}

impl QSpec {
    pub fn poly(self) -> MPoly {
        match self {
            QSpec::Symbolic => MPoly::var(Var::Q),
            QSpec::Int(q) => MPoly::constant(q),
        }
    }
}

/// Which value the sibling operator S_V is sent to in the quotient ring.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SvConvention {
    /// S_V = q (the value forced by the tree)
    Q,
    /// S_V = q^3 (the printed value)
    Q3,
}

#[derive(Clone, Debug)]
pub struct HeckePoly {
    pub q: QSpec,
    pub h2: MPoly,
    pub h4: MPoly,
    pub full: MPoly,
}

fn z() -> MPoly {
    MPoly::var(Var::Z)
}

fn zpow(e: u16) -> MPoly {
    MPoly::monomial(Var::Z, e, 1)
}

impl HeckePoly {
    pub fn explicit(q: QSpec) -> HeckePoly {
        let qq = q.poly();
        let one = MPoly::constant(1);
        let qm1 = &qq - &one;
        let t10 = MPoly::var(Var::T10);
        let t01 = MPoly::var(Var::T01);
        let q2 = qq.pow(2);
        let h2 = &(&zpow(2) - &(&(&q2 * &(&t01 - &qm1)) * &z())) + &qq.pow(6);
        // -t10 t01 + (q-1)(t10 + t01) - (q-1)^2
        let mid = &(&(-&(&t10 * &t01)) + &(&qm1 * &(&t10 + &t01))) - &qm1.pow(2);
        let quad = {
            let parts = [
                t10.pow(2),
                &q2 * &t01.pow(2),
                (&qm1 * &t10).scale(-2),
                (&(&q2 * &qm1) * &t01).scale(-2),
                -&qq.pow(4),
                qq.pow(3).scale(-2),
                q2.scale(2),
                qq.scale(-2),
                one.clone(),
            ];
            let inner = parts.iter().fold(MPoly::zero(), |a, b| &a + b);
            &q2 * &inner
        };
        let h4 = [zpow(4), &mid * &zpow(3), &quad * &zpow(2), &(&qq.pow(6) * &mid) * &z(), qq.pow(12)]
            .iter()
            .fold(MPoly::zero(), |a, b| &a + b);
        let full = &h2 * &h4;
        HeckePoly { q, h2, h4, full }
    }

    /// C_i = coefficient of z^{6-i}.
    pub fn c(&self, i: u16) -> MPoly {
        self.full.coeff_in(Var::Z, 6 - i)
    }

    /// Coefficients of a monic polynomial in z, indexed so that entry i multiplies z^{deg-i}.
    pub fn coeffs(poly: &MPoly) -> Vec<MPoly> {
        let d = poly.degree_in(Var::Z);
        (0..=d).map(|i| poly.coeff_in(Var::Z, d - i)).collect()
    }

    pub fn with_q(&self, q: i128) -> HeckePoly {
        let sub = |p: &MPoly| p.substitute_int(Var::Q, q);
        HeckePoly { q: QSpec::Int(q), h2: sub(&self.h2), h4: sub(&self.h4), full: sub(&self.full) }
    }
}

/// The six-factor product of partial operators.
pub fn six_factor_product(q: QSpec) -> MPoly {
    let q2 = q.poly().pow(2);
    let (uv, vv, uw, vw) = (MPoly::var(Var::UV), MPoly::var(Var::VV), MPoly::var(Var::UW), MPoly::var(Var::VW));
    let factors = [
        &z() - &(&q2 * &uw),
        &z() - &(&q2 * &vw),
        &z() - &(&vw * &vv),
        &z() - &(&uw * &vv),
        &z() - &(&vw * &uv),
        &z() - &(&uw * &uv),
    ];
    factors.iter().fold(MPoly::constant(1), |a, b| &a * b)
}

/// t10 and t01 written through the partial operators under the given convention.
pub fn t_substitution(q: QSpec, sv: SvConvention) -> (MPoly, MPoly) {
    let qq = q.poly();
    let one = MPoly::constant(1);
    let s_v = match sv {
        SvConvention::Q => qq.clone(),
        SvConvention::Q3 => qq.pow(3),
    };
    let t10 = &(&(&MPoly::var(Var::UV) + &MPoly::var(Var::VV)) + &s_v) - &one;
    let t01 = &(&(&MPoly::var(Var::UW) + &MPoly::var(Var::VW)) + &qq) - &one;
    (t10, t01)
}

/// Normal form in the quotient ring; the relations introduce powers of q, which are
/// evaluated when q is a number.
pub fn reduce(p: &MPoly, q: QSpec) -> MPoly {
    let n = normalize(p, &QUOTIENT_RULES);
    match q {
        QSpec::Symbolic => n,
        QSpec::Int(x) => n.substitute_int(Var::Q, x),
    }
}

pub fn in_quotient(p: &MPoly, q: QSpec, sv: SvConvention) -> MPoly {
    let (t10, t01) = t_substitution(q, sv);
    reduce(&p.substitute(Var::T10, &t10).substitute(Var::T01, &t01), q)
}

#[derive(Clone, Debug, Serialize)]
pub struct CoefficientComparison {
    pub z_power: u16,
    pub product: String,
    pub explicit: String,
    pub equal: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct FactorizationOutcome {
    pub convention: SvConvention,
    pub q: QSpec,
    pub coefficients: Vec<CoefficientComparison>,
}

impl FactorizationOutcome {
    pub fn holds(&self) -> bool {
        self.coefficients.iter().all(|c| c.equal)
    }

    pub fn mismatched_powers(&self) -> Vec<u16> {
        self.coefficients.iter().filter(|c| !c.equal).map(|c| c.z_power).collect()
    }
}

pub fn verify_factorization(q: QSpec, sv: SvConvention) -> FactorizationOutcome {
    let lhs = reduce(&six_factor_product(q), q);
    let rhs = in_quotient(&HeckePoly::explicit(q).full, q, sv);
    let coefficients = (0..=6u16)
        .rev()
        .map(|k| {
            let a = lhs.coeff_in(Var::Z, k);
            let b = rhs.coeff_in(Var::Z, k);
            CoefficientComparison { z_power: k, product: a.pretty(), explicit: b.pretty(), equal: a == b }
        })
        .collect();
    FactorizationOutcome { convention: sv, q, coefficients }
}

/// Elementary symmetric functions e1, e3, e4 of the four long roots, checked against
/// (U_V+V_V)(U_W+V_W), q^6 e1 and q^12 in the quotient ring.
pub fn long_root_symmetric_functions(q: QSpec) -> [bool; 3] {
    let (uv, vv, uw, vw) = (MPoly::var(Var::UV), MPoly::var(Var::VV), MPoly::var(Var::UW), MPoly::var(Var::VW));
    let roots = [&vv * &vw, &uw * &vv, &vw * &uv, &uw * &uv];
    let e1 = roots.iter().fold(MPoly::zero(), |a, b| &a + b);
    let mut e3 = MPoly::zero();
    for i in 0..4 {
        for j in i + 1..4 {
            for k in j + 1..4 {
                e3 = &e3 + &(&(&roots[i] * &roots[j]) * &roots[k]);
            }
        }
    }
    let e4 = roots.iter().fold(MPoly::constant(1), |a, b| &a * b);
    let n = |p: &MPoly| reduce(p, q);
    let s = &(&uv + &vv) * &(&uw + &vw);
    let qq = q.poly();
    [n(&e1) == n(&s), n(&e3) == n(&(&qq.pow(6) * &s)), n(&e4) == n(&qq.pow(12))]
}

/// H(V_V V_W) in the quotient ring (zero under the S_V = q convention).
pub fn evaluate_at_vv_vw(poly: &MPoly, q: QSpec, sv: SvConvention) -> MPoly {
    let root = &MPoly::var(Var::VV) * &MPoly::var(Var::VW);
    in_quotient(&poly.substitute(Var::Z, &root), q, sv)
}

/// Integer polynomial coefficients in ascending powers of z.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntPoly(pub Vec<i128>);

impl IntPoly {
    /// Value at x; panics if the value does not fit in i128.
    pub fn eval(&self, x: i128) -> i128 {
        i128::try_from(self.eval_big(x)).expect("value fits in i128")
    }

    pub fn eval_big(&self, x: i128) -> BigInt {
        let x = BigInt::from(x);
        self.0.iter().rev().fold(BigInt::zero(), |acc, c| acc * &x + c)
    }

    pub fn degree(&self) -> usize {
        self.0.len() - 1
    }

    /// Integer roots with multiplicity, by testing divisors of the lowest nonzero coefficient.
    pub fn integer_roots(&self) -> Vec<i128> {
        let mut p = self.0.clone();
        let mut roots = Vec::new();
        while p.len() > 1 && p[0] == 0 {
            roots.push(0);
            p.remove(0);
        }
        loop {
            if p.len() <= 1 {
                break;
            }
            let c0 = p[0].abs();
            let mut found = None;
            let mut d = 1i128;
            while d * d <= c0 {
                if c0 % d == 0 {
                    for cand in [d, -d, c0 / d, -(c0 / d)] {
                        if IntPoly(p.clone()).eval_big(cand).is_zero() {
                            found = Some(cand);
                            break;
                        }
                    }
                }
                if found.is_some() {
                    break;
                }
                d += 1;
            }
            match found {
                Some(r) => {
                    roots.push(r);
                    // synthetic division by (z - r)
                    let n = p.len() - 1;
                    let mut out = vec![0i128; n];
                    let mut carry = 0i128;
                    for k in (0..n).rev() {
                        carry = p[k + 1] + carry * r;
                        out[k] = carry;
                    }
                    p = out;
                }
                None => break,
            }
        }
        roots.sort();
        roots
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ScalarSpecialization {
    pub q: i128,
    pub t10: i128,
    pub t01: i128,
    pub h2: IntPoly,
    pub h4: IntPoly,
    pub full: IntPoly,
}

fn to_int_poly(p: &MPoly) -> IntPoly {
    let d = p.degree_in(Var::Z);
    IntPoly((0..=d).map(|k| p.coeff_in(Var::Z, k).as_constant().expect("fully specialized")).collect())
}

pub fn specialize_scalars(t10: i128, t01: i128, q: i128) -> ScalarSpecialization {
    let h = HeckePoly::explicit(QSpec::Int(q));
    let sp = |p: &MPoly| to_int_poly(&p.substitute_int(Var::T10, t10).substitute_int(Var::T01, t01));
    ScalarSpecialization { q, t10, t01, h2: sp(&h.h2), h4: sp(&h.h4), full: sp(&h.full) }
}

/// Degrees of t10 and t01 on the trivial representation: q^4 + q and q^2 + q.
pub fn trivial_eigenvalues(q: i128) -> (i128, i128) {
    (q.pow(4) + q, q * q + q)
}

/// Three printed variants of the sibling constant on the V-factor, rendered as formulas.
pub const PRINTED_SV_VARIANTS: [&str; 3] = [
    "relation lemma: (S_V)^2 - q^3 S_V = 0, V_V S_V = q^3 V_V, S_V U_V = q^3 U_V",
    "origin definition: S_V x_V = q^3 x_V, U_V x_V = q/(q+1) S_1, V_V x_V = (1-q^3) x_V + S_1/(q+1)",
    "balanced elements and quotient ring: S_V acts via q^3",
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn h2_at_q2() {
        let h = HeckePoly::explicit(QSpec::Int(2));
        let expect = {
            let t = MPoly::var(Var::T01);
            &(&zpow(2) - &(&(&t - &MPoly::constant(1)).scale(4) * &z())) + &MPoly::constant(64)
        };
        assert_eq!(h.h2, expect);
        assert_eq!(h.c(6).as_constant(), Some(262144));
        assert_eq!(h.c(0).as_constant(), Some(1));
    }

    #[test]
    fn symbolic_constants() {
        let h = HeckePoly::explicit(QSpec::Symbolic);
        assert_eq!(h.c(6), MPoly::monomial(Var::Q, 18, 1));
        assert_eq!(h.c(0), MPoly::constant(1));
    }

    #[test]
    fn factorization_conventions() {
        let good = verify_factorization(QSpec::Symbolic, SvConvention::Q);
        assert!(good.holds());
        let bad = verify_factorization(QSpec::Symbolic, SvConvention::Q3);
        assert!(!bad.holds());
        assert!(bad.mismatched_powers().contains(&3));
        assert!(verify_factorization(QSpec::Int(2), SvConvention::Q).holds());
        assert!(!verify_factorization(QSpec::Int(2), SvConvention::Q3).holds());
    }

    #[test]
    fn z3_mismatch_term() {
        // difference in the z^3 coefficient is q(q-1)(q+1)(U_W+V_W) under S_V = q^3
        let bad = verify_factorization(QSpec::Int(3), SvConvention::Q3);
        let c3 = bad.coefficients.iter().find(|c| c.z_power == 3).unwrap();
        assert_ne!(c3.product, c3.explicit);
        let h = HeckePoly::explicit(QSpec::Symbolic);
        let d = &in_quotient(&h.h4, QSpec::Symbolic, SvConvention::Q3)
            - &in_quotient(&h.h4, QSpec::Symbolic, SvConvention::Q);
        let q = MPoly::var(Var::Q);
        let expect = &(&(&q * &(&q - &MPoly::constant(1))) * &(&q + &MPoly::constant(1)))
            * &(&MPoly::var(Var::UW) + &MPoly::var(Var::VW));
        assert_eq!(d.coeff_in(Var::Z, 3), -&expect);
    }

    #[test]
    fn long_roots_and_vanishing() {
        assert_eq!(long_root_symmetric_functions(QSpec::Symbolic), [true, true, true]);
        let h = HeckePoly::explicit(QSpec::Symbolic);
        assert!(evaluate_at_vv_vw(&h.full, QSpec::Symbolic, SvConvention::Q).is_zero());
        assert!(evaluate_at_vv_vw(&h.h4, QSpec::Symbolic, SvConvention::Q).is_zero());
        assert!(!evaluate_at_vv_vw(&h.h4, QSpec::Symbolic, SvConvention::Q3).is_zero());
    }

    #[test]
    fn trivial_specialization_q2() {
        let (t10, t01) = trivial_eigenvalues(2);
        assert_eq!((t10, t01), (18, 6));
        let s = specialize_scalars(t10, t01, 2);
        assert_eq!(s.h2, IntPoly(vec![64, -20, 1]));
        assert_eq!(s.h2.integer_roots(), vec![4, 16]);
        assert_eq!(s.h4, IntPoly(vec![4096, -5440, 1428, -85, 1]));
        assert_eq!(s.h4.integer_roots(), vec![1, 4, 16, 64]);
        assert_eq!(s.full.integer_roots(), vec![1, 4, 4, 16, 16, 64]);
    }

    #[test]
    fn trivial_specialization_factors_for_other_q() {
        for q in [3i128, 5] {
            let (t10, t01) = trivial_eigenvalues(q);
            let s = specialize_scalars(t10, t01, q);
            assert_eq!(s.full.integer_roots().len(), 6, "q={q}");
        }
    }
}

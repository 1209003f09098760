//! Sparse multivariate polynomials with i128 coefficients over a fixed variable set.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    Q,
    Z,
    T10,
    T01,
    UV,
    VV,
    UW,
    VW,
}

pub const NVARS: usize = 8;

impl Var {
    pub const ALL: [Var; NVARS] = [Var::Q, Var::Z, Var::T10, Var::T01, Var::UV, Var::VV, Var::UW, Var::VW];

    pub fn name(self) -> &'static str {
        match self {
            Var::Q => "q",
            Var::Z => "z",
            Var::T10 => "t10",
            Var::T01 => "t01",
            Var::UV => "U_V",
            Var::VV => "V_V",
            Var::UW => "U_W",
            Var::VW => "V_W",
        }
    }
}

pub type Mono = [u16; NVARS];

#[derive(Clone, PartialEq, Eq, Default, Debug)]
pub struct MPoly {
    terms: BTreeMap<Mono, i128>,
}

impl MPoly {
    pub fn zero() -> MPoly {
        MPoly::default()
    }

    pub fn constant(c: i128) -> MPoly {
        let mut p = MPoly::zero();
        p.add_term([0; NVARS], c);
        p
    }

    pub fn var(v: Var) -> MPoly {
        MPoly::monomial(v, 1, 1)
    }

    pub fn monomial(v: Var, e: u16, c: i128) -> MPoly {
        let mut m = [0; NVARS];
        m[v as usize] = e;
        let mut p = MPoly::zero();
        p.add_term(m, c);
        p
    }

    pub fn add_term(&mut self, m: Mono, c: i128) {
        if c == 0 {
            return;
        }
        let e = self.terms.entry(m).or_insert(0);
        *e = e.checked_add(c).expect("coefficient overflow");
        if *e == 0 {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &i128)> {
        self.terms.iter()
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

    pub fn scale(&self, c: i128) -> MPoly {
        let mut out = MPoly::zero();
        for (m, v) in &self.terms {
            out.add_term(*m, v.checked_mul(c).expect("coefficient overflow"));
        }
        out
    }

    pub fn pow(&self, e: u32) -> MPoly {
        let mut acc = MPoly::constant(1);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn degree_in(&self, v: Var) -> u16 {
        self.terms.keys().map(|m| m[v as usize]).max().unwrap_or(0)
    }

    /// Coefficient of v^d, as a polynomial without v.
    pub fn coeff_in(&self, v: Var, d: u16) -> MPoly {
        let mut out = MPoly::zero();
        for (m, c) in &self.terms {
            if m[v as usize] == d {
                let mut m2 = *m;
                m2[v as usize] = 0;
                out.add_term(m2, *c);
            }
        }
        out
    }

    /// Replace v by the polynomial r.
    pub fn substitute(&self, v: Var, r: &MPoly) -> MPoly {
        let maxd = self.degree_in(v);
        let mut powers = vec![MPoly::constant(1)];
        for i in 1..=maxd as usize {
            let next = &powers[i - 1] * r;
            powers.push(next);
        }
        let mut out = MPoly::zero();
        for (m, c) in &self.terms {
            let d = m[v as usize] as usize;
            let mut m2 = *m;
            m2[v as usize] = 0;
            let mut base = MPoly::zero();
            base.add_term(m2, *c);
            out = &out + &(&base * &powers[d]);
        }
        out
    }

    pub fn substitute_int(&self, v: Var, x: i128) -> MPoly {
        self.substitute(v, &MPoly::constant(x))
    }

    /// Constant value, if the polynomial has no variables left.
    pub fn as_constant(&self) -> Option<i128> {
        match self.terms.len() {
            0 => Some(0),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                if m.iter().all(|&e| e == 0) {
                    Some(*c)
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    pub fn uses(&self, v: Var) -> bool {
        self.degree_in(v) > 0
    }

    /// Display with terms ordered by descending z, then t10, then t01 degree.
    pub fn pretty(&self) -> String {
        let mut ts: Vec<(&Mono, &i128)> = self.terms.iter().collect();
        let key = |m: &Mono| {
            let order = [Var::Z, Var::T10, Var::T01, Var::UV, Var::VV, Var::UW, Var::VW, Var::Q];
            order.map(|v| std::cmp::Reverse(m[v as usize]))
        };
        ts.sort_by_key(|(m, _)| key(m));
        if ts.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, (m, c)) in ts.iter().enumerate() {
            let c = **c;
            let mono: Vec<String> = [Var::Q, Var::T10, Var::T01, Var::UV, Var::VV, Var::UW, Var::VW, Var::Z]
                .iter()
                .filter(|v| m[**v as usize] > 0)
                .map(|v| {
                    let e = m[*v as usize];
                    if e == 1 {
                        v.name().to_string()
                    } else {
                        format!("{}^{}", v.name(), e)
                    }
                })
                .collect();
            let mag = c.unsigned_abs();
            let body = if mono.is_empty() {
                mag.to_string()
            } else if mag == 1 {
                mono.join("*")
            } else {
                format!("{}*{}", mag, mono.join("*"))
            };
            if i == 0 {
                if c < 0 {
                    s.push('-');
                }
            } else {
                s.push_str(if c < 0 { " - " } else { " + " });
            }
            s.push_str(&body);
        }
        s
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pretty())
    }
}

impl Add for &MPoly {
    type Output = MPoly;
    fn add(self, o: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(*m, *c);
        }
        out
    }
}

impl Sub for &MPoly {
    type Output = MPoly;
    fn sub(self, o: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(*m, -*c);
        }
        out
    }
}

impl Neg for &MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        self.scale(-1)
    }
}

impl Mul for &MPoly {
    type Output = MPoly;
    fn mul(self, o: &MPoly) -> MPoly {
        let mut out = MPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                let m: Mono = std::array::from_fn(|i| m1[i].saturating_add(m2[i]));
                out.add_term(m, c1.checked_mul(*c2).expect("coefficient overflow"));
            }
        }
        out
    }
}

macro_rules! owned_ops {
    ($tr:ident, $f:ident) => {
        impl $tr for MPoly {
            type Output = MPoly;
            fn $f(self, o: MPoly) -> MPoly {
                (&self).$f(&o)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

/// Rewrite rule a*b -> q^k.
#[derive(Clone, Copy, Debug)]
pub struct Rule {
    pub a: Var,
    pub b: Var,
    pub q_power: u16,
}

/// Relations of the quotient ring: U_V V_V = q^4 and U_W V_W = q^2.
pub const QUOTIENT_RULES: [Rule; 2] =
    [Rule { a: Var::UV, b: Var::VV, q_power: 4 }, Rule { a: Var::UW, b: Var::VW, q_power: 2 }];

fn rewrite_once(m: &Mono, r: &Rule) -> Option<Mono> {
    let (a, b) = (r.a as usize, r.b as usize);
    if m[a] > 0 && m[b] > 0 {
        let mut out = *m;
        out[a] -= 1;
        out[b] -= 1;
        out[Var::Q as usize] += r.q_power;
        Some(out)
    } else {
        None
    }
}

/// Normal form under the rules, fully reducing each monomial.
pub fn normalize(p: &MPoly, rules: &[Rule]) -> MPoly {
    let mut out = MPoly::zero();
    for (m, c) in p.terms() {
        let mut m = *m;
        for r in rules {
            let (a, b) = (r.a as usize, r.b as usize);
            let k = m[a].min(m[b]);
            m[a] -= k;
            m[b] -= k;
            m[Var::Q as usize] += k * r.q_power;
        }
        out.add_term(m, *c);
    }
    out
}

/// Normal form reached by single rewrite steps, choosing the rule at each step by `choose`.
/// Used to test confluence.
pub fn normalize_by_steps(p: &MPoly, rules: &[Rule], mut choose: impl FnMut(usize) -> usize) -> MPoly {
    let mut out = MPoly::zero();
    for (m, c) in p.terms() {
        let mut m = *m;
        loop {
            let applicable: Vec<&Rule> = rules.iter().filter(|r| rewrite_once(&m, r).is_some()).collect();
            if applicable.is_empty() {
                break;
            }
            let r = applicable[choose(applicable.len())];
            m = rewrite_once(&m, r).unwrap();
        }
        out.add_term(m, *c);
    }
    out
}

pub fn is_normal(p: &MPoly, rules: &[Rule]) -> bool {
    p.terms().all(|(m, _)| rules.iter().all(|r| rewrite_once(m, r).is_none()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_poly() -> impl Strategy<Value = MPoly> {
        proptest::collection::vec((proptest::array::uniform8(0u16..3), -5i128..5), 0..8).prop_map(|ts| {
            let mut p = MPoly::zero();
            for (m, c) in ts {
                p.add_term(m, c);
            }
            p
        })
    }

    proptest! {
        #[test]
        fn normal_form_is_confluent(p in arb_poly(), seed in 0u64..1000) {
            let mut s = seed;
            let nf = normalize(&p, &QUOTIENT_RULES);
            let nf2 = normalize_by_steps(&p, &QUOTIENT_RULES, |n| { s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407); (s >> 33) as usize % n });
            prop_assert!(is_normal(&nf, &QUOTIENT_RULES));
            prop_assert_eq!(nf, nf2);
        }

        #[test]
        fn normal_form_is_a_ring_map(a in arb_poly(), b in arb_poly()) {
            let lhs = normalize(&(&a * &b), &QUOTIENT_RULES);
            let rhs = normalize(&(&normalize(&a, &QUOTIENT_RULES) * &normalize(&b, &QUOTIENT_RULES)), &QUOTIENT_RULES);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn substitution_is_evaluation(a in arb_poly(), x in -3i128..3, y in -3i128..3) {
            let ev = |p: &MPoly| {
                let mut r = p.clone();
                for v in Var::ALL {
                    r = r.substitute_int(v, if v == Var::Z { y } else { x });
                }
                r.as_constant().unwrap()
            };
            let sq = &a * &a;
            prop_assert_eq!(ev(&sq), ev(&a) * ev(&a));
        }
    }

    #[test]
    fn pretty_order() {
        let z = MPoly::var(Var::Z);
        let t = MPoly::var(Var::T01);
        let p = &(&z * &z) - &(&t.scale(4) * &z) + MPoly::constant(64);
        assert_eq!(p.pretty(), "z^2 - 4*t01*z + 64");
    }
}

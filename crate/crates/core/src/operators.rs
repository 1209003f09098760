//! Hecke operators t_{1,0}, t_{0,1} and the partial operators U, V, S on formal sums of
//! pair-vertices.
//!
//! Away from the origin: U = neighbors farther from the origin, V = the unique closer
//! neighbor, S = the vertex plus its q - 1 same-distance neighbors. At the origin, with
//! A = q^3 on V and A = q on W: U x = A/(A+1) S_1, V x = (1-q) x + S_1/(A+1), S x = q x.

use num_rational::BigRational;
use serde::Serialize;

use crate::building::{Building, BuildingError, PairVertex, VertexId};
use crate::formal_sum::{rat, ratio, Coeff, FormalSum};
use crate::hermitian_lattice::Space;

pub type PairSum = FormalSum<PairVertex, BigRational>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum HeckeOp {
    T10,
    T01,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PartialKind {
    U,
    V,
    S,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PartialOp {
    pub space: Space,
    pub kind: PartialKind,
}

impl PartialOp {
    pub const UV: PartialOp = PartialOp { space: Space::V, kind: PartialKind::U };
    pub const VV: PartialOp = PartialOp { space: Space::V, kind: PartialKind::V };
    pub const SV: PartialOp = PartialOp { space: Space::V, kind: PartialKind::S };
    pub const UW: PartialOp = PartialOp { space: Space::W, kind: PartialKind::U };
    pub const VW: PartialOp = PartialOp { space: Space::W, kind: PartialKind::V };
    pub const SW: PartialOp = PartialOp { space: Space::W, kind: PartialKind::S };
}

fn origin_a(q: u64, space: Space) -> i64 {
    match space {
        Space::V => (q * q * q) as i64,
        Space::W => q as i64,
    }
}

fn set_factor(x: PairVertex, space: Space, y: VertexId) -> PairVertex {
    match space {
        Space::V => PairVertex { v: y, w: x.w },
        Space::W => PairVertex { v: x.v, w: y },
    }
}

fn factor(x: PairVertex, space: Space) -> VertexId {
    match space {
        Space::V => x.v,
        Space::W => x.w,
    }
}

/// Image of one vertex under a partial operator, as (vertex, coefficient) pairs.
pub fn partial_single(
    b: &mut Building,
    y: VertexId,
    op: PartialOp,
) -> Result<Vec<(VertexId, BigRational)>, BuildingError> {
    let q = b.q() as i64;
    let a = origin_a(b.q(), op.space);
    let store = b.store_mut(op.space);
    let d = store.dist(y);
    let nbrs = store.neighbors(y)?;
    let mut out = Vec::new();
    if d == 0 {
        match op.kind {
            PartialKind::U => out.extend(nbrs.iter().map(|&n| (n, ratio(a, a + 1)))),
            PartialKind::V => {
                out.push((y, rat(1 - q)));
                out.extend(nbrs.iter().map(|&n| (n, ratio(1, a + 1))));
            }
            PartialKind::S => out.push((y, rat(q))),
        }
        return Ok(out);
    }
    match op.kind {
        PartialKind::U => out.extend(nbrs.iter().filter(|&&n| store.dist(n) > d).map(|&n| (n, rat(1)))),
        PartialKind::V => {
            let closer: Vec<VertexId> = nbrs.iter().copied().filter(|&n| store.dist(n) < d).collect();
            if closer.len() != 1 {
                return Err(BuildingError::NonUniquePredecessor(closer.len()));
            }
            out.push((closer[0], rat(1)));
        }
        PartialKind::S => {
            out.push((y, rat(1)));
            out.extend(nbrs.iter().filter(|&&n| store.dist(n) == d).map(|&n| (n, rat(1))));
        }
    }
    Ok(out)
}

pub fn apply_partial<C: Coeff>(
    b: &mut Building,
    sum: &FormalSum<PairVertex, C>,
    op: PartialOp,
) -> Result<FormalSum<PairVertex, C>, BuildingError> {
    let mut out = FormalSum::new();
    for (x, c) in sum.iter() {
        for (y, r) in partial_single(b, factor(*x, op.space), op)? {
            out.add_term(set_factor(*x, op.space, y), c.scale_rational(&r));
        }
    }
    Ok(out)
}

pub fn apply_t<C: Coeff>(
    b: &mut Building,
    sum: &FormalSum<PairVertex, C>,
    op: HeckeOp,
) -> Result<FormalSum<PairVertex, C>, BuildingError> {
    let space = match op {
        HeckeOp::T10 => Space::V,
        HeckeOp::T01 => Space::W,
    };
    let mut out = FormalSum::new();
    for (x, c) in sum.iter() {
        for n in b.store_mut(space).neighbors(factor(*x, space))? {
            out.add_term(set_factor(*x, space, n), c.clone());
        }
    }
    Ok(out)
}

/// (V-factor balanced, W-factor balanced): S acts by q.
pub fn is_balanced(b: &mut Building, sum: &PairSum) -> Result<(bool, bool), BuildingError> {
    let q = rat(b.q() as i64);
    let qs = sum.scale(&q);
    let sv = apply_partial(b, sum, PartialOp::SV)?;
    let sw = apply_partial(b, sum, PartialOp::SW)?;
    Ok((sv == qs, sw == qs))
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationOutcome {
    pub space: Space,
    pub samples: usize,
    /// Sibling constant measured from S(S y) = c S y at the first sample, as (S S y)[y] / (S y)[y].
    pub measured_c: String,
    /// name -> number of samples where the identity held
    pub checks: Vec<(String, usize)>,
}

impl RelationOutcome {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|(_, n)| *n == self.samples)
    }
}

/// Check V U = q^4 (resp. q^2), U + V + S = t + 1, S S = c S, V S = c V, S U = c U on each sample.
pub fn relation_suite(b: &mut Building, space: Space, samples: &[VertexId]) -> Result<RelationOutcome, BuildingError> {
    let q = b.q() as i64;
    let vu_const = match space {
        Space::V => q.pow(4),
        Space::W => q.pow(2),
    };
    let ops = |k| PartialOp { space, kind: k };
    let t = match space {
        Space::V => HeckeOp::T10,
        Space::W => HeckeOp::T01,
    };
    let other = match space {
        Space::V => b.w.origin(),
        Space::W => b.v.origin(),
    };
    let mut counts = vec![0usize; 5];
    let mut c_measured: Option<BigRational> = None;
    for &y in samples {
        let x = match space {
            Space::V => PairVertex { v: y, w: other },
            Space::W => PairVertex { v: other, w: y },
        };
        let e = PairSum::single(x, rat(1));
        let u = apply_partial(b, &e, ops(PartialKind::U))?;
        let v = apply_partial(b, &e, ops(PartialKind::V))?;
        let s = apply_partial(b, &e, ops(PartialKind::S))?;
        let vu = apply_partial(b, &u, ops(PartialKind::V))?;
        if vu == e.scale(&rat(vu_const)) {
            counts[0] += 1;
        }
        let mut uvs = u.clone();
        uvs.add_assign(&v);
        uvs.add_assign(&s);
        let mut t1 = apply_t(b, &e, t)?;
        t1.add_assign(&e);
        if uvs == t1 {
            counts[1] += 1;
        }
        let ss = apply_partial(b, &s, ops(PartialKind::S))?;
        let c = ss.coeff(&x).cloned().unwrap_or_else(|| rat(0)) / s.coeff(&x).cloned().unwrap_or_else(|| rat(1));
        if c_measured.is_none() {
            c_measured = Some(c.clone());
        }
        let c = c_measured.clone().unwrap();
        if ss == s.scale(&c) {
            counts[2] += 1;
        }
        if apply_partial(b, &s, ops(PartialKind::V))? == v.scale(&c) {
            counts[3] += 1;
        }
        if apply_partial(b, &u, ops(PartialKind::S))? == u.scale(&c) {
            counts[4] += 1;
        }
    }
    let names = [
        format!("V∘U = {vu_const}"),
        "U+V+S = t+1".to_string(),
        "S∘S = c·S".to_string(),
        "V∘S = c·V".to_string(),
        "S∘U = c·U".to_string(),
    ];
    Ok(RelationOutcome {
        space,
        samples: samples.len(),
        measured_c: c_measured.map(|c| c.to_string()).unwrap_or_default(),
        checks: names.into_iter().zip(counts).collect(),
    })
}

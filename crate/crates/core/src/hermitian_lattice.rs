//! O_E-lattices in the Hermitian spaces V (dim 3) and W (dim 2) with antidiagonal Gram matrix.
//!
//! A lattice is stored as p^s * B O^d where B is the saturated Hermite form with minimal
//! entry valuation 0. The pair (s, B) is canonical and its encoding does not depend on the
//! working precision.

use std::fmt;

use thiserror::Error;

use crate::linalg::{self, col_scale, unit_col, zero_col, Col, Hnf, LinalgError, Matrix};
use crate::local_arith::{ArithError, LocalElement, LocalField};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("lattice is not self-dual")]
    NotSelfDual,
    #[error("dimension mismatch")]
    DimensionMismatch,
    #[error("expected {expected} neighbors, found {found}")]
    NeighborCount { expected: usize, found: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub enum Space {
    V,
    W,
}

impl Space {
    pub fn dim(self) -> usize {
        match self {
            Space::V => 3,
            Space::W => 2,
        }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Space::V => "V",
            Space::W => "W",
        })
    }
}

/// Precision-independent identity of a lattice.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub struct LatticeKey {
    pub dim: u8,
    pub scale: i32,
    pub entries: Vec<(u64, u64)>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum LatticeKind {
    Hyperspecial,
    Special,
    Other,
}

#[derive(Clone, Debug)]
pub struct HermLattice {
    scale: i32,
    basis: Hnf,
}

/// <x, y> = x^* Phi y with Phi antidiagonal.
pub fn herm(x: &[LocalElement], y: &[LocalElement]) -> LocalElement {
    let d = x.len();
    let mut acc = x[0].field().zero();
    for i in 0..d {
        acc = acc + x[i].conj() * y[d - 1 - i];
    }
    acc
}

/// A group element p^scale * m.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupElem {
    pub scale: i32,
    pub m: Matrix,
}

impl GroupElem {
    pub fn identity(field: &LocalField, dim: usize) -> GroupElem {
        GroupElem { scale: 0, m: Matrix::identity(field, dim) }
    }

    pub fn dim(&self) -> usize {
        self.m.ncols()
    }

    /// delta = diag(p, 1, p^{-1}) on V or diag(p, p^{-1}) on W.
    pub fn delta(field: &LocalField, space: Space, power: i32) -> GroupElem {
        let d = space.dim();
        let k = power.unsigned_abs();
        let mut m = Matrix::identity(field, d);
        // p^{-k} diag(p^{2k}, p^k, 1) for k > 0; mirror for k < 0
        let (first, last) = if power >= 0 { (2 * k, 0) } else { (0, 2 * k) };
        m.cols[0][0] = field.p_pow(first);
        m.cols[d - 1][d - 1] = field.p_pow(last);
        if d == 3 {
            m.cols[1][1] = field.p_pow(k);
        }
        GroupElem { scale: -(k as i32), m }
    }

    pub fn compose(&self, other: &GroupElem) -> GroupElem {
        GroupElem { scale: self.scale + other.scale, m: self.m.mul(&other.m) }
    }

    /// Checks g^* Phi g = Phi, i.e. m^* Phi m = p^{-2 scale} Phi.
    pub fn is_unitary(&self) -> bool {
        let d = self.dim();
        let f = *self.m.cols[0][0].field();
        if self.scale > 0 {
            return false;
        }
        let target = f.p_pow((-2 * self.scale) as u32);
        for i in 0..d {
            for j in 0..d {
                let g = herm(&self.m.cols[i], &self.m.cols[j]);
                let expect = if i + j == d - 1 { target } else { f.zero() };
                if g != expect {
                    return false;
                }
            }
        }
        true
    }

    pub fn act(&self, l: &HermLattice) -> Result<HermLattice, LatticeError> {
        if self.dim() != l.dim() {
            return Err(LatticeError::DimensionMismatch);
        }
        let gens: Vec<Col> = l.basis.cols.iter().map(|c| self.m.apply(c)).collect();
        HermLattice::from_generators(l.field(), l.dim(), l.scale + self.scale, &gens)
    }
}

impl HermLattice {
    /// The lattice p^scale * span(gens).
    pub fn from_generators(
        field: &LocalField,
        dim: usize,
        scale: i32,
        gens: &[Col],
    ) -> Result<HermLattice, LatticeError> {
        let h = linalg::hnf(field, dim, gens)?;
        let v0 = h.min_valuation();
        Ok(HermLattice { scale: scale + v0 as i32, basis: h.div_p_pow(v0) })
    }

    pub fn standard(field: &LocalField, space: Space) -> HermLattice {
        let d = space.dim();
        let gens: Vec<Col> = (0..d).map(|i| unit_col(field, d, i)).collect();
        HermLattice::from_generators(field, d, 0, &gens).expect("standard lattice")
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }
    pub fn scale(&self) -> i32 {
        self.scale
    }
    pub fn basis(&self) -> &Hnf {
        &self.basis
    }
    pub fn field(&self) -> &LocalField {
        self.basis.field()
    }

    pub fn key(&self) -> LatticeKey {
        LatticeKey { dim: self.dim() as u8, scale: self.scale, entries: self.basis.encoding() }
    }

    /// Signed length of O^d / L.
    pub fn volume(&self) -> i64 {
        self.dim() as i64 * self.scale as i64 + self.basis.exps.iter().map(|&a| a as i64).sum::<i64>()
    }

    /// Rebuild at another precision from the exact canonical entries.
    pub fn to_field(&self, target: &LocalField) -> Result<HermLattice, LatticeError> {
        HermLattice::from_generators(target, self.dim(), self.scale, &self.basis.to_field(target).cols)
    }

    /// Largest elementary divisor exponent of B.
    fn max_divisor(&self) -> u32 {
        let m = Matrix { cols: self.basis.cols.clone() };
        linalg::elementary_divisors(self.field(), &m).into_iter().map(|d| d.expect("full rank")).max().unwrap_or(0)
    }

    pub fn dual(&self) -> Result<HermLattice, LatticeError> {
        let field = *self.field();
        let d = self.dim();
        let a = self.max_divisor();
        let mut gens: Vec<Col> = (0..d).map(|i| col_scale(&unit_col(&field, d, i), field.p_pow(a))).collect();
        if a > 0 {
            let fa = field.with_precision(a)?;
            // rows of B^* Phi, reduced mod p^a
            let rows: Vec<Col> =
                (0..d).map(|i| (0..d).map(|j| self.basis.cols[i][d - 1 - j].conj().to_field(&fa)).collect()).collect();
            for k in linalg::kernel(&fa, &rows) {
                gens.push(k.iter().map(|x| x.to_field(&field)).collect());
            }
        } else {
            gens = (0..d).map(|i| unit_col(&field, d, i)).collect();
        }
        HermLattice::from_generators(&field, d, -self.scale - a as i32, &gens)
    }

    pub fn is_self_dual(&self) -> Result<bool, LatticeError> {
        Ok(self.dual()?.key() == self.key())
    }

    /// Does self contain p^k * other?
    pub fn contains_scaled(&self, other: &HermLattice, k: i32) -> bool {
        let e = k + other.scale - self.scale;
        if e < 0 {
            // other has an entry of valuation 0, self is inside p^0 O^d in its own frame
            return false;
        }
        let field = self.field();
        if e as u32 >= field.precision() {
            return true;
        }
        let t = field.p_pow(e as u32);
        other.basis.cols.iter().all(|c| self.basis.contains(&col_scale(c, t)))
    }

    pub fn contains_lattice(&self, other: &HermLattice) -> bool {
        self.contains_scaled(other, 0)
    }

    pub fn contains_vector(&self, scale: i32, v: &[LocalElement]) -> bool {
        // is p^scale v in self?
        let e = scale - self.scale;
        let field = self.field();
        if e < 0 {
            let k = (-e) as u32;
            if v.iter().any(|x| x.valuation().bound() < k) {
                return false;
            }
            let w: Col = v.iter().map(|x| x.div_p_pow(k)).collect();
            return self.basis.contains(&w);
        }
        self.basis.contains(&col_scale(v, field.p_pow(e as u32)))
    }

    /// Sum of lattices.
    pub fn sum(&self, other: &HermLattice) -> Result<HermLattice, LatticeError> {
        let field = *self.field();
        let s = self.scale.min(other.scale);
        let mut gens = Vec::new();
        for l in [self, other] {
            let t = field.p_pow((l.scale - s) as u32);
            gens.extend(l.basis.cols.iter().map(|c| col_scale(c, t)));
        }
        HermLattice::from_generators(&field, self.dim(), s, &gens)
    }

    /// p^k * self.
    pub fn scaled(&self, k: i32) -> HermLattice {
        HermLattice { scale: self.scale + k, basis: self.basis.clone() }
    }

    /// Elementary divisor exponents of `other` relative to `self`, descending.
    /// Computed from containment tests and the volume difference.
    pub fn relative_invariants(&self, other: &HermLattice) -> Vec<i32> {
        let n = self.field().precision() as i32;
        let mut e_max = other.scale - self.scale;
        while !other.contains_scaled(self, e_max) {
            e_max += 1;
            assert!(e_max < n + other.scale.abs() + self.scale.abs() + 2, "containment search diverged");
        }
        let mut e_min = other.scale - self.scale;
        while !self.contains_scaled(other, -e_min) {
            e_min -= 1;
            assert!(e_min > -n - other.scale.abs() - self.scale.abs() - 2, "containment search diverged");
        }
        let total = (other.volume() - self.volume()) as i32;
        match self.dim() {
            2 => {
                debug_assert_eq!(e_max + e_min, total);
                vec![e_max, e_min]
            }
            3 => vec![e_max, total - e_max - e_min, e_min],
            _ => unreachable!(),
        }
    }

    /// Tree distance between two self-dual lattices.
    pub fn distance(&self, other: &HermLattice) -> u32 {
        self.relative_invariants(other)[0].unsigned_abs()
    }

    pub fn classify(&self) -> Result<LatticeKind, LatticeError> {
        let dual = self.dual()?;
        if dual.key() == self.key() {
            return Ok(LatticeKind::Hyperspecial);
        }
        let pdual = dual.scaled(1);
        if self.contains_lattice(&pdual) && dual.contains_lattice(self) && pdual.key() != self.key() {
            return Ok(LatticeKind::Special);
        }
        Ok(LatticeKind::Other)
    }

    /// Gram matrix of the basis p^s B, divided by p^{2s}... i.e. the Gram matrix in
    /// L-coordinates, valid modulo p^{N + 2s}. Requires it to be integral.
    pub fn gram(&self) -> Result<(Vec<Col>, u32), LatticeError> {
        let field = *self.field();
        let d = self.dim();
        let raw: Vec<Col> =
            (0..d).map(|i| (0..d).map(|j| herm(&self.basis.cols[i], &self.basis.cols[j])).collect()).collect();
        let shift = -2 * self.scale;
        let prec = field.precision() as i32 - shift;
        if shift < 0 {
            // scale > 0: multiply up
            let t = field.p_pow((-shift) as u32);
            return Ok((raw.iter().map(|r| col_scale(r, t)).collect(), field.precision()));
        }
        if prec < 2 {
            return Err(LinalgError::PrecisionExhausted(field.precision()).into());
        }
        let k = shift as u32;
        let mut out = Vec::new();
        for r in raw {
            let mut row = Vec::new();
            for x in r {
                if x.valuation().bound() < k {
                    return Err(LatticeError::NotSelfDual);
                }
                row.push(x.div_p_pow(k));
            }
            out.push(row);
        }
        Ok((out, prec as u32))
    }

    /// Self-dual lattices at distance 1, via isotropic lines of the residual form.
    pub fn hyperspecial_neighbors(&self) -> Result<Vec<HermLattice>, LatticeError> {
        Ok(self.neighbor_data()?.into_iter().flat_map(|(_, ns)| ns).collect())
    }

    /// Special lattices adjacent to a self-dual lattice (one per isotropic line).
    pub fn special_neighbors(&self) -> Result<Vec<HermLattice>, LatticeError> {
        Ok(self.neighbor_data()?.into_iter().map(|(s, _)| s).collect())
    }

    fn neighbor_data(&self) -> Result<Vec<(HermLattice, Vec<HermLattice>)>, LatticeError> {
        let field = *self.field();
        let d = self.dim();
        let p = field.p();
        let (g, _) = self.gram()?;
        let f1 = field.with_precision(1)?;
        let f2 = field.with_precision(2)?;
        let g1: Vec<Col> = g.iter().map(|r| r.iter().map(|x| x.to_field(&f1)).collect()).collect();
        let g2: Vec<Col> = g.iter().map(|r| r.iter().map(|x| x.to_field(&f2)).collect()).collect();
        let form = |gm: &Vec<Col>, x: &[LocalElement], y: &[LocalElement]| -> LocalElement {
            let mut acc = x[0].field().zero();
            for i in 0..d {
                for j in 0..d {
                    acc = acc + x[i].conj() * gm[i][j] * y[j];
                }
            }
            acc
        };
        let lift = |v: &[LocalElement]| -> Col { v.iter().map(|x| x.to_field(&field)).collect() };
        let residues = f1.residue_field_elements();
        let mut out = Vec::new();
        for x in projective_points(&f1, d) {
            if !form(&g1, &x, &x).is_zero() {
                continue;
            }
            let row: Col = (0..d).map(|j| form(&g1, &x, &unit_col(&f1, d, j))).collect();
            let ker = linalg::kernel(&f1, std::slice::from_ref(&row));
            let yi = (0..d).find(|&j| !row[j].is_zero()).expect("form is nondegenerate");
            let y = unit_col(&f1, d, yi);
            let x2: Col = x.iter().map(|e| e.to_field(&f2)).collect();
            let y2: Col = y.iter().map(|e| e.to_field(&f2)).collect();
            let pp = f2.from_i64(p as i64);

            let mut special_gens: Vec<Col> =
                (0..d).map(|i| self.basis_apply(&col_scale(&unit_col(&field, d, i), field.p_pow(1)))).collect();
            special_gens.extend(ker.iter().map(|k| self.basis_apply(&lift(k))));
            let special = HermLattice::from_generators(&field, d, self.scale, &special_gens)?;

            let mut hs = Vec::new();
            for c in &residues {
                let c2 = c.to_field(&f2);
                let m2: Col = x2.iter().zip(&y2).map(|(a, b)| *a + pp * c2 * *b).collect();
                if !form(&g2, &m2, &m2).is_zero() {
                    continue;
                }
                let mut gens: Vec<Col> =
                    (0..d).map(|i| self.basis_apply(&col_scale(&unit_col(&field, d, i), field.p_pow(2)))).collect();
                gens.extend(ker.iter().map(|k| self.basis_apply(&col_scale(&lift(k), field.p_pow(1)))));
                gens.push(self.basis_apply(&lift(&m2)));
                hs.push(HermLattice::from_generators(&field, d, self.scale - 1, &gens)?);
            }
            if hs.len() != p as usize {
                return Err(LatticeError::NeighborCount { expected: p as usize, found: hs.len() });
            }
            out.push((special, hs));
        }
        Ok(out)
    }

    fn basis_apply(&self, v: &[LocalElement]) -> Col {
        Matrix { cols: self.basis.cols.clone() }.apply(v)
    }

    /// Unique neighbor one step closer to `origin` along the geodesic, for self-dual lattices
    /// at distance d >= 1: (L + p^{d-1} origin)^dual + p^{d-1} origin.
    pub fn step_toward(&self, origin: &HermLattice) -> Result<HermLattice, LatticeError> {
        let d = self.distance(origin) as i32;
        if d == 0 {
            return Ok(self.clone());
        }
        let o = origin.scaled(d - 1);
        let inner = self.sum(&o)?.dual()?;
        inner.sum(&o)
    }

    /// Canonical generator columns of the lattice with scale (p^s B).
    pub fn generators(&self) -> (i32, &[Col]) {
        (self.scale, &self.basis.cols)
    }
}

/// Points of P^{d-1}(F_{q^2}): first nonzero coordinate equal to 1.
pub fn projective_points(f1: &LocalField, d: usize) -> Vec<Col> {
    let residues = f1.residue_field_elements();
    let mut out = Vec::new();
    for lead in 0..d {
        let free = d - lead - 1;
        let total = residues.len().pow(free as u32);
        for idx in 0..total {
            let mut v = zero_col(f1, d);
            v[lead] = f1.one();
            let mut r = idx;
            for k in 0..free {
                v[lead + 1 + k] = residues[r % residues.len()];
                r /= residues.len();
            }
            out.push(v);
        }
    }
    out
}

/// Embedding W -> V: coordinates (x0, x1) go to (x0, 0, x1), and L goes to L + O e_mid.
pub fn embed_w(l: &HermLattice) -> Result<HermLattice, LatticeError> {
    if l.dim() != 2 {
        return Err(LatticeError::DimensionMismatch);
    }
    let field = *l.field();
    let s = l.scale.min(0);
    let t = field.p_pow((l.scale - s) as u32);
    let mut gens: Vec<Col> = l.basis.cols.iter().map(|c| vec![c[0] * t, field.zero(), c[1] * t]).collect();
    let mut mid = zero_col(&field, 3);
    mid[1] = field.p_pow((-s) as u32);
    gens.push(mid);
    HermLattice::from_generators(&field, 3, s, &gens)
}

/// For a self-dual L in V: is L = L' + O e_mid with L' in W?
pub fn in_w_image(l: &HermLattice) -> bool {
    let field = l.field();
    let e = unit_col(field, 3, 1);
    l.contains_vector(0, &e)
}

/// L intersected with W, as a lattice in W. Assumes `in_w_image(l)`.
pub fn restrict_to_w(l: &HermLattice) -> Result<HermLattice, LatticeError> {
    let field = *l.field();
    let (s, cols) = l.generators();
    // zeroing the middle coordinate subtracts a multiple of e_mid, which lies in L
    let gens: Vec<Col> = cols.iter().map(|c| vec![c[0], c[2]]).collect();
    HermLattice::from_generators(&field, 2, s, &gens)
}

/// Brute-force enumeration of self-dual lattices at distance 1 from a self-dual L, straight
/// from the definition. Slow; used as an oracle.
pub fn brute_force_neighbors(l: &HermLattice) -> Result<Vec<HermLattice>, LatticeError> {
    let field = *l.field();
    let d = l.dim();
    let (g, _) = l.gram()?;
    let f1 = field.with_precision(1)?;
    let f2 = field.with_precision(2)?;
    let g2: Vec<Col> = g.iter().map(|r| r.iter().map(|x| x.to_field(&f2)).collect()).collect();
    let g1: Vec<Col> = g.iter().map(|r| r.iter().map(|x| x.to_field(&f1)).collect()).collect();
    let form = |gm: &Vec<Col>, x: &[LocalElement], y: &[LocalElement]| -> LocalElement {
        let mut acc = x[0].field().zero();
        for i in 0..d {
            for j in 0..d {
                acc = acc + x[i].conj() * gm[i][j] * y[j];
            }
        }
        acc
    };
    let pp = f2.from_i64(field.p() as i64);
    let residues = f1.residue_field_elements();
    let lines = projective_points(&f1, d);
    let mut ws: Vec<Option<Col>> = vec![None];
    ws.extend(lines.iter().cloned().map(Some));
    let basis = Matrix { cols: l.basis.cols.clone() };
    let lift = |v: &[LocalElement]| -> Col { v.iter().map(|x| x.to_field(&field)).collect() };
    let origin_key = l.key();
    let mut seen = std::collections::BTreeMap::new();
    for x in &lines {
        let lead = x.iter().position(|e| !e.is_zero()).unwrap();
        // y ranges over vectors with zero in the leading coordinate of x
        let free: Vec<usize> = (0..d).filter(|&i| i != lead).collect();
        let total = residues.len().pow(free.len() as u32);
        for idx in 0..total {
            let mut y = zero_col(&f1, d);
            let mut r = idx;
            for &i in &free {
                y[i] = residues[r % residues.len()];
                r /= residues.len();
            }
            // v = p^{-1} x + y; <v, v> integral iff <x + p y, x + p y> = 0 mod p^2
            let v2: Col = x.iter().zip(&y).map(|(a, b)| a.to_field(&f2) + pp * b.to_field(&f2)).collect();
            if !form(&g2, &v2, &v2).is_zero() {
                continue;
            }
            for w in &ws {
                // <v, w> integral iff <x, w> = 0 mod p
                if let Some(w) = w {
                    if !form(&g1, x, w).is_zero() {
                        continue;
                    }
                }
                let mut gens: Vec<Col> =
                    (0..d).map(|i| basis.apply(&col_scale(&unit_col(&field, d, i), field.p_pow(2)))).collect();
                gens.push(basis.apply(&lift(&v2)));
                if let Some(w) = w {
                    gens.push(basis.apply(&col_scale(&lift(w), field.p_pow(1))));
                }
                let m = HermLattice::from_generators(&field, d, l.scale - 1, &gens)?;
                // integral with the volume of a self-dual lattice means self-dual
                if m.volume() != 0 {
                    continue;
                }
                let key = m.key();
                if key == origin_key || seen.contains_key(&key) {
                    continue;
                }
                if l.distance(&m) == 1 {
                    seen.insert(key, m);
                }
            }
        }
    }
    Ok(seen.into_values().collect())
}

impl fmt::Display for HermLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p^{} [", self.scale)?;
        for (j, c) in self.basis.cols.iter().enumerate() {
            if j > 0 {
                write!(f, "; ")?;
            }
            for (i, x) in c.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{x}")?;
            }
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fld(p: u64) -> LocalField {
        LocalField::new(p, 12).unwrap()
    }

    #[test]
    fn standard_is_self_dual_and_hyperspecial() {
        for p in [2, 3, 5] {
            let f = fld(p);
            for sp in [Space::V, Space::W] {
                let l = HermLattice::standard(&f, sp);
                assert!(l.is_self_dual().unwrap());
                assert_eq!(l.classify().unwrap(), LatticeKind::Hyperspecial);
            }
        }
    }

    #[test]
    fn delta_relative_invariants() {
        let f = fld(3);
        let l = HermLattice::standard(&f, Space::V);
        let dl = GroupElem::delta(&f, Space::V, 1).act(&l).unwrap();
        assert_eq!(l.relative_invariants(&dl), vec![1, 0, -1]);
        assert_eq!(l.distance(&dl), 1);
        let d2 = GroupElem::delta(&f, Space::V, 2).act(&l).unwrap();
        assert_eq!(l.relative_invariants(&d2), vec![2, 0, -2]);
        assert!(d2.is_self_dual().unwrap());
        let w = HermLattice::standard(&f, Space::W);
        let dw = GroupElem::delta(&f, Space::W, -3).act(&w).unwrap();
        assert_eq!(w.relative_invariants(&dw), vec![3, -3]);
    }

    #[test]
    fn delta_is_unitary() {
        let f = fld(2);
        for sp in [Space::V, Space::W] {
            for k in -3..=3 {
                assert!(GroupElem::delta(&f, sp, k).is_unitary());
            }
        }
    }

    #[test]
    fn dual_of_non_self_dual() {
        let f = fld(2);
        // L = span(e0, e1, p e2): dual is span(p^{-1} e0, e1, e2)
        let gens = Matrix::from_rows(&f, &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 2]]).cols;
        let l = HermLattice::from_generators(&f, 3, 0, &gens).unwrap();
        let dual = l.dual().unwrap();
        let expect_gens = Matrix::from_rows(&f, &[vec![1, 0, 0], vec![0, 2, 0], vec![0, 0, 2]]).cols;
        let expect = HermLattice::from_generators(&f, 3, -1, &expect_gens).unwrap();
        assert_eq!(dual.key(), expect.key());
        assert_eq!(dual.dual().unwrap().key(), l.key());
    }

    #[test]
    fn neighbor_counts_at_origin() {
        for p in [2u64, 3] {
            let f = fld(p);
            let v = HermLattice::standard(&f, Space::V);
            assert_eq!(v.hyperspecial_neighbors().unwrap().len() as u64, p.pow(4) + p);
            assert_eq!(v.special_neighbors().unwrap().len() as u64, p.pow(3) + 1);
            let w = HermLattice::standard(&f, Space::W);
            assert_eq!(w.hyperspecial_neighbors().unwrap().len() as u64, p * p + p);
            assert_eq!(w.special_neighbors().unwrap().len() as u64, p + 1);
        }
    }

    #[test]
    fn neighbors_are_self_dual_at_distance_one() {
        let f = fld(2);
        let v = HermLattice::standard(&f, Space::V);
        for n in v.hyperspecial_neighbors().unwrap() {
            assert!(n.is_self_dual().unwrap());
            assert_eq!(v.distance(&n), 1);
        }
        for s in v.special_neighbors().unwrap() {
            assert_eq!(s.classify().unwrap(), LatticeKind::Special);
        }
    }

    #[test]
    fn brute_force_agrees_at_origin() {
        for p in [2u64, 3] {
            let f = fld(p);
            for sp in [Space::V, Space::W] {
                let l = HermLattice::standard(&f, sp);
                let mut a: Vec<_> = l.hyperspecial_neighbors().unwrap().iter().map(|x| x.key()).collect();
                let mut b: Vec<_> = brute_force_neighbors(&l).unwrap().iter().map(|x| x.key()).collect();
                a.sort();
                b.sort();
                assert_eq!(a, b, "p={p} {sp}");
            }
        }
    }

    #[test]
    fn step_toward_is_a_closer_neighbor() {
        let f = fld(2);
        let o = HermLattice::standard(&f, Space::V);
        let l = GroupElem::delta(&f, Space::V, 3).act(&o).unwrap();
        let s = l.step_toward(&o).unwrap();
        assert_eq!(s.distance(&o), 2);
        assert_eq!(s.distance(&l), 1);
        assert!(s.is_self_dual().unwrap());
    }

    #[test]
    fn w_embedding_roundtrip() {
        let f = fld(3);
        let w = HermLattice::standard(&f, Space::W);
        for n in w.hyperspecial_neighbors().unwrap() {
            let e = embed_w(&n).unwrap();
            assert!(e.is_self_dual().unwrap());
            assert!(in_w_image(&e));
            assert_eq!(restrict_to_w(&e).unwrap().key(), n.key());
        }
        // exactly the q^2 + q embedded W-neighbors among the q^4 + q V-neighbors
        let vn = HermLattice::standard(&f, Space::V).hyperspecial_neighbors().unwrap();
        assert_eq!(vn.iter().filter(|l| in_w_image(l)).count(), 12);
    }

    #[test]
    fn precision_monotone_keys() {
        let f = fld(2);
        let g = LocalField::new(2, 20).unwrap();
        let o = HermLattice::standard(&f, Space::V);
        for n in o.hyperspecial_neighbors().unwrap().iter().take(5) {
            let lifted = n.to_field(&g).unwrap();
            assert_eq!(lifted.key(), n.key());
        }
    }

    mod props {
        use super::*;
        use crate::building::sample_h_element;
        use proptest::prelude::*;
        use rand::SeedableRng;
        use rand_chacha::ChaCha8Rng;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn dual_is_an_involution(p in prop::sample::select(vec![2u64, 3]), seed in any::<u64>()) {
                let f = LocalField::new(p, 16).unwrap();
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let gens: Vec<Col> = (0..3)
                    .map(|i| (0..3).map(|j| {
                        let x = f.random(&mut rng);
                        if i == j { x + f.p_pow(i as u32) } else { x * f.p_pow(2) }
                    }).collect())
                    .collect();
                let l = HermLattice::from_generators(&f, 3, 0, &gens).unwrap();
                prop_assume!(l.volume().abs() <= 4);
                let dd = l.dual().unwrap().dual().unwrap();
                prop_assert_eq!(dd.key(), l.key());
                prop_assert_eq!(l.is_self_dual().unwrap(), l.dual().unwrap().key() == l.key());
            }

            #[test]
            fn unitary_action_preserves_type_and_distance(
                p in prop::sample::select(vec![2u64, 3]),
                seed in any::<u64>(),
                m in 0i32..3,
            ) {
                let f = LocalField::new(p, 16).unwrap();
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let h = sample_h_element(&f, &mut rng, 4, 1);
                let o = HermLattice::standard(&f, Space::V);
                let x = GroupElem::delta(&f, Space::V, m).act(&o).unwrap();
                let (ho, hx) = (h.v.act(&o).unwrap(), h.v.act(&x).unwrap());
                prop_assert!(ho.is_self_dual().unwrap() && hx.is_self_dual().unwrap());
                prop_assert_eq!(ho.distance(&hx), o.distance(&x));
                prop_assert_eq!(hx.distance(&ho), ho.distance(&hx));
                let g = LocalField::new(p, 20).unwrap();
                prop_assert_eq!(hx.to_field(&g).unwrap().key(), hx.key());
            }
        }
    }
}

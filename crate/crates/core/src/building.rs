//! Lazily materialized hyperspecial vertices of the trees B(V) and B(W).
//!
//! Vertices are interned by canonical lattice key. Distances to the origin are read off the
//! scale of the canonical form (a self-dual lattice at distance d has scale -d), and the
//! radius budget is enforced on every insertion.

use std::collections::HashMap;
use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::hermitian_lattice::{
    embed_w, in_w_image, restrict_to_w, GroupElem, HermLattice, LatticeError, LatticeKey, Space,
};
use crate::linalg::Matrix;
use crate::local_arith::{ArithError, LocalElement, LocalField};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BuildingError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("vertex at distance {requested} exceeds the radius budget {budget} in {space}")]
    RadiusExceeded { space: Space, requested: u32, budget: u32 },
    #[error("projection to W is not unique")]
    AmbiguousProjection,
    #[error("vertex has {0} strictly closer neighbors")]
    NonUniquePredecessor(usize),
    #[error("lattice is not self-dual")]
    NotHyperspecial,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub struct VertexId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub struct PairVertex {
    pub v: VertexId,
    pub w: VertexId,
}

impl fmt::Display for PairVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(v{}, w{})", self.v.0, self.w.0)
    }
}

pub struct SpaceStore {
    space: Space,
    radius: u32,
    index: HashMap<LatticeKey, VertexId>,
    lattices: Vec<HermLattice>,
    dist: Vec<u32>,
    neighbors: Vec<Option<Vec<VertexId>>>,
    pred: Vec<Option<VertexId>>,
}

impl SpaceStore {
    fn new(field: &LocalField, space: Space, radius: u32) -> SpaceStore {
        let mut s = SpaceStore {
            space,
            radius,
            index: HashMap::new(),
            lattices: Vec::new(),
            dist: Vec::new(),
            neighbors: Vec::new(),
            pred: Vec::new(),
        };
        s.intern(HermLattice::standard(field, space)).expect("origin");
        s
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn len(&self) -> usize {
        self.lattices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lattices.is_empty()
    }

    pub fn origin(&self) -> VertexId {
        VertexId(0)
    }

    pub fn lattice(&self, v: VertexId) -> &HermLattice {
        &self.lattices[v.0 as usize]
    }

    pub fn dist(&self, v: VertexId) -> u32 {
        self.dist[v.0 as usize]
    }

    pub fn lookup(&self, l: &HermLattice) -> Option<VertexId> {
        self.index.get(&l.key()).copied()
    }

    /// Intern a self-dual lattice (not re-checked here; callers produce self-dual lattices).
    pub fn intern(&mut self, l: HermLattice) -> Result<VertexId, BuildingError> {
        let key = l.key();
        if let Some(&id) = self.index.get(&key) {
            return Ok(id);
        }
        let d = (-l.scale()).max(0) as u32;
        if d > self.radius {
            return Err(BuildingError::RadiusExceeded { space: self.space, requested: d, budget: self.radius });
        }
        let id = VertexId(self.lattices.len() as u32);
        self.index.insert(key, id);
        self.lattices.push(l);
        self.dist.push(d);
        self.neighbors.push(None);
        self.pred.push(None);
        Ok(id)
    }

    pub fn neighbors(&mut self, v: VertexId) -> Result<Vec<VertexId>, BuildingError> {
        if let Some(n) = &self.neighbors[v.0 as usize] {
            return Ok(n.clone());
        }
        let d = self.dist(v);
        if d + 1 > self.radius {
            return Err(BuildingError::RadiusExceeded { space: self.space, requested: d + 1, budget: self.radius });
        }
        let ls = self.lattice(v).hyperspecial_neighbors()?;
        let mut ids = Vec::with_capacity(ls.len());
        for l in ls {
            ids.push(self.intern(l)?);
        }
        self.neighbors[v.0 as usize] = Some(ids.clone());
        Ok(ids)
    }

    /// Neighbor one step closer to the origin, by the closed geodesic formula.
    pub fn predecessor(&mut self, v: VertexId) -> Result<VertexId, BuildingError> {
        if let Some(p) = self.pred[v.0 as usize] {
            return Ok(p);
        }
        if self.dist(v) == 0 {
            return Ok(v);
        }
        let origin = self.lattice(self.origin()).clone();
        let l = self.lattice(v).step_toward(&origin)?;
        let p = self.intern(l)?;
        self.pred[v.0 as usize] = Some(p);
        Ok(p)
    }

    /// Predecessor found among the enumerated neighbors, with the uniqueness assertion.
    pub fn predecessor_by_neighbors(&mut self, v: VertexId) -> Result<VertexId, BuildingError> {
        let d = self.dist(v);
        let closer: Vec<VertexId> = self.neighbors(v)?.into_iter().filter(|&n| self.dist(n) < d).collect();
        if closer.len() != 1 {
            return Err(BuildingError::NonUniquePredecessor(closer.len()));
        }
        Ok(closer[0])
    }

    pub fn distance(&self, a: VertexId, b: VertexId) -> u32 {
        if a == b {
            return 0;
        }
        self.lattice(a).distance(self.lattice(b))
    }

    /// All vertices within distance r of the origin, by breadth-first expansion.
    pub fn ball(&mut self, r: u32) -> Result<Vec<VertexId>, BuildingError> {
        let mut out = vec![self.origin()];
        let mut frontier = vec![self.origin()];
        for _ in 0..r {
            let mut next = Vec::new();
            for v in frontier {
                for n in self.neighbors(v)? {
                    if self.dist(n) > self.dist(v) {
                        next.push(n);
                    }
                }
            }
            out.extend(&next);
            frontier = next;
        }
        Ok(out)
    }

    /// Random walk outward from the origin, ending at distance `d`.
    pub fn random_vertex<R: Rng + ?Sized>(&mut self, d: u32, rng: &mut R) -> Result<VertexId, BuildingError> {
        let mut v = self.origin();
        for _ in 0..d {
            let ch: Vec<VertexId> = self.neighbors(v)?.into_iter().filter(|&n| self.dist(n) > self.dist(v)).collect();
            v = ch[rng.gen_range(0..ch.len())];
        }
        Ok(v)
    }

    /// Edge list (id, id) of all materialized vertices whose neighbors are cached.
    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        let mut out = Vec::new();
        for (i, n) in self.neighbors.iter().enumerate() {
            if let Some(ns) = n {
                for &j in ns {
                    if (i as u32) < j.0 {
                        out.push((VertexId(i as u32), j));
                    }
                }
            }
        }
        out
    }
}

pub struct Building {
    field: LocalField,
    radius: u32,
    pub v: SpaceStore,
    pub w: SpaceStore,
}

impl Building {
    pub fn new(field: &LocalField, radius: u32) -> Building {
        Building {
            field: *field,
            radius,
            v: SpaceStore::new(field, Space::V, radius),
            w: SpaceStore::new(field, Space::W, radius),
        }
    }

    /// Field with the default precision 2R + 6.
    pub fn with_default_precision(p: u64, radius: u32) -> Result<Building, BuildingError> {
        let field = LocalField::new(p, 2 * radius + 6)?;
        Ok(Building::new(&field, radius))
    }

    pub fn field(&self) -> &LocalField {
        &self.field
    }
    pub fn q(&self) -> u64 {
        self.field.p()
    }
    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn store(&self, s: Space) -> &SpaceStore {
        match s {
            Space::V => &self.v,
            Space::W => &self.w,
        }
    }

    pub fn store_mut(&mut self, s: Space) -> &mut SpaceStore {
        match s {
            Space::V => &mut self.v,
            Space::W => &mut self.w,
        }
    }

    pub fn origin(&self) -> PairVertex {
        PairVertex { v: self.v.origin(), w: self.w.origin() }
    }

    pub fn vertex_of(&mut self, l: HermLattice) -> Result<VertexId, BuildingError> {
        if !l.is_self_dual()? {
            return Err(BuildingError::NotHyperspecial);
        }
        let s = if l.dim() == 3 { Space::V } else { Space::W };
        self.store_mut(s).intern(l)
    }

    /// delta^m applied to the origin.
    pub fn apartment_vertex(&mut self, m: i32, space: Space) -> Result<VertexId, BuildingError> {
        let o = HermLattice::standard(&self.field, space);
        let l = GroupElem::delta(&self.field, space, m).act(&o)?;
        self.store_mut(space).intern(l)
    }

    /// The embedded W-vertex that is closest to v, by walking toward the origin until the
    /// W-image is reached. Returns the V-vertex, its W-preimage and the number of steps.
    pub fn project_to_w(&mut self, v: VertexId) -> Result<(VertexId, VertexId, u32), BuildingError> {
        let mut cur = v;
        let mut steps = 0;
        while !in_w_image(self.v.lattice(cur)) {
            cur = self.v.predecessor(cur)?;
            steps += 1;
        }
        let lw = restrict_to_w(self.v.lattice(cur))?;
        let w = self.w.intern(lw)?;
        Ok((cur, w, steps))
    }

    /// Argmin over embedded W-vertices within distance dist(v)+1 of the origin; slow oracle.
    pub fn project_to_w_argmin(&mut self, v: VertexId) -> Result<VertexId, BuildingError> {
        let r = self.v.dist(v) + 1;
        let ws = self.w.ball(r)?;
        let mut best: Option<(u32, VertexId)> = None;
        let mut tie = false;
        for w in ws {
            let e = embed_w(self.w.lattice(w))?;
            let d = self.v.lattice(v).distance(&e);
            match best {
                Some((bd, _)) if d > bd => {}
                Some((bd, _)) if d == bd => tie = true,
                _ => {
                    tie = false;
                    best = Some((d, self.v.intern(e)?));
                }
            }
        }
        if tie {
            return Err(BuildingError::AmbiguousProjection);
        }
        Ok(best.expect("nonempty ball").1)
    }

    pub fn inv(&mut self, x: PairVertex) -> Result<(u32, u32), BuildingError> {
        let (_, pw, d1) = self.project_to_w(x.v)?;
        let d2 = self.w.distance(x.w, pw);
        Ok((d1, d2))
    }

    pub fn conductor_level(&mut self, x: PairVertex) -> Result<u32, BuildingError> {
        let (d1, d2) = self.inv(x)?;
        Ok(d1.min(2 * d2))
    }

    pub fn act_h(&mut self, h: &HElement, x: PairVertex) -> Result<PairVertex, BuildingError> {
        let lv = h.v.act(self.v.lattice(x.v))?;
        let lw = h.w.act(self.w.lattice(x.w))?;
        Ok(PairVertex { v: self.v.intern(lv)?, w: self.w.intern(lw)? })
    }
}

/// The unipotent matrix [[1, b, g], [0, 1, -conj(b)], [0, 0, 1]].
pub fn unipotent_u(field: &LocalField, beta: LocalElement, gamma: LocalElement) -> Result<GroupElem, ArithError> {
    if !beta.is_unit() || !gamma.is_unit() {
        return Err(ArithError::NonUnitParameters { p: field.p() });
    }
    let z = field.zero();
    let o = field.one();
    let m = Matrix::from_elem_rows(&[vec![o, beta, gamma], vec![z, o, -beta.conj()], vec![z, z, o]]);
    Ok(GroupElem { scale: 0, m })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum FamilyVariant {
    /// beta = 1 and gamma solving gamma + conj(gamma) = -1
    Default,
    /// beta = gamma = -2
    Alternative,
}

#[derive(Clone, Debug)]
pub struct CanonicalFamily {
    pub u: GroupElem,
    pub beta: LocalElement,
    pub gamma: LocalElement,
    pub xs: Vec<PairVertex>,
}

/// x_n = (u delta_V^n x_V, delta_W^n x_W): the vertex at distance n along the apartment of u.
pub fn u_apartment_lattice(field: &LocalField, u: &GroupElem, n: i32) -> Result<HermLattice, LatticeError> {
    let o = HermLattice::standard(field, Space::V);
    u.compose(&GroupElem::delta(field, Space::V, n)).act(&o)
}

/// The lattice delta_V^{-n} u x_V taken literally.
pub fn literal_family_lattice(field: &LocalField, u: &GroupElem, n: i32) -> Result<HermLattice, LatticeError> {
    let o = HermLattice::standard(field, Space::V);
    GroupElem::delta(field, Space::V, -n).compose(u).act(&o)
}

pub fn family_u(
    field: &LocalField,
    variant: FamilyVariant,
) -> Result<(GroupElem, LocalElement, LocalElement), ArithError> {
    let (beta, gamma) = match variant {
        FamilyVariant::Default => (field.one(), field.solve_trace_equation(field.from_i64(-1))?),
        FamilyVariant::Alternative => (field.from_i64(-2), field.from_i64(-2)),
    };
    let u = unipotent_u(field, beta, gamma)?;
    assert!(u.is_unitary(), "u must be unitary");
    Ok((u, beta, gamma))
}

pub fn build_canonical_family(
    b: &mut Building,
    n_max: u32,
    variant: FamilyVariant,
) -> Result<CanonicalFamily, BuildingError> {
    let field = *b.field();
    let (u, beta, gamma) = family_u(&field, variant)?;
    let mut xs = Vec::new();
    for n in 0..=n_max as i32 {
        let lv = u_apartment_lattice(&field, &u, n)?;
        let lw = GroupElem::delta(&field, Space::W, n).act(&HermLattice::standard(&field, Space::W))?;
        xs.push(PairVertex { v: b.v.intern(lv)?, w: b.w.intern(lw)? });
    }
    Ok(CanonicalFamily { u, beta, gamma, xs })
}

/// An element of H = U(W), with its action on W and on V = W + O e_mid.
#[derive(Clone, Debug)]
pub struct HElement {
    pub w: GroupElem,
    pub v: GroupElem,
    pub word: Vec<String>,
}

impl HElement {
    pub fn identity(field: &LocalField) -> HElement {
        HElement { w: GroupElem::identity(field, 2), v: GroupElem::identity(field, 3), word: vec![] }
    }

    fn from_w(gw: GroupElem, word: Vec<String>) -> HElement {
        let f = *gw.m.cols[0][0].field();
        let z = f.zero();
        let mid = f.p_pow((-gw.scale) as u32);
        let m = &gw.m;
        let v = Matrix::from_elem_rows(&[
            vec![m.get(0, 0), z, m.get(0, 1)],
            vec![z, mid, z],
            vec![m.get(1, 0), z, m.get(1, 1)],
        ]);
        HElement { v: GroupElem { scale: gw.scale, m: v }, w: gw, word }
    }

    pub fn compose(&self, o: &HElement) -> HElement {
        let mut word = self.word.clone();
        word.extend(o.word.iter().cloned());
        HElement::from_w(self.w.compose(&o.w), word)
    }
}

/// Random word of the given length in delta_W^{+-1}, diag(a, conj(a)^{-1}) and trace-zero unipotents.
pub fn sample_h_element<R: Rng + ?Sized>(field: &LocalField, rng: &mut R, len: usize, max_delta: usize) -> HElement {
    let z = field.zero();
    let o = field.one();
    // theta = w - conj(w) has trace zero
    let theta = field.omega() - field.omega().conj();
    let mut h = HElement::identity(field);
    let mut deltas = 0;
    for _ in 0..len {
        let kind = rng.gen_range(0..4);
        let (g, name) = match kind {
            0 if deltas < max_delta => {
                deltas += 1;
                let s = if rng.gen_bool(0.5) { 1 } else { -1 };
                (GroupElem::delta(field, Space::W, s), format!("delta^{s}"))
            }
            1 => {
                let a = loop {
                    let a = field.random(rng);
                    if a.is_unit() {
                        break a;
                    }
                };
                let ai = a.conj().inverse().expect("unit");
                (GroupElem { scale: 0, m: Matrix::from_elem_rows(&[vec![a, z], vec![z, ai]]) }, format!("diag({a})"))
            }
            2 => {
                let b = theta * field.from_i64(rng.gen_range(-50..50));
                (GroupElem { scale: 0, m: Matrix::from_elem_rows(&[vec![o, b], vec![z, o]]) }, format!("upper({b})"))
            }
            _ => {
                let b = theta * field.from_i64(rng.gen_range(-50..50));
                (GroupElem { scale: 0, m: Matrix::from_elem_rows(&[vec![o, z], vec![b, o]]) }, format!("lower({b})"))
            }
        };
        assert!(g.is_unitary());
        h = h.compose(&HElement::from_w(g, vec![name]));
    }
    assert!(h.w.is_unitary() && h.v.is_unitary());
    h
}

//! Linear algebra over the chain ring O_E / p^N.
//!
//! Lattices are handled through integral generator sets that are known to contain
//! p^N O^d. The Hermite form below is saturated (Howell style), so membership of a vector
//! can be decided by triangular elimination even though everything is truncated.

use thiserror::Error;

use crate::local_arith::{LocalElement, LocalField, Valuation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("generators do not span a full-rank lattice")]
    RankDeficient,
    #[error("lattice reaches the working precision p^{0}; increase the precision")]
    PrecisionExhausted(u32),
}

pub type Col = Vec<LocalElement>;

pub fn zero_col(field: &LocalField, dim: usize) -> Col {
    vec![field.zero(); dim]
}

pub fn unit_col(field: &LocalField, dim: usize, i: usize) -> Col {
    let mut c = zero_col(field, dim);
    c[i] = field.one();
    c
}

pub fn col_scale(c: &[LocalElement], t: LocalElement) -> Col {
    c.iter().map(|x| *x * t).collect()
}

pub fn col_axpy(y: &mut [LocalElement], t: LocalElement, x: &[LocalElement]) {
    for (a, b) in y.iter_mut().zip(x) {
        *a = *a + t * *b;
    }
}

fn min_valuation(c: &[LocalElement]) -> Option<u32> {
    c.iter().filter_map(|x| x.valuation().finite()).min()
}

/// Square matrix stored by columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    pub cols: Vec<Col>,
}

impl Matrix {
    pub fn from_rows(field: &LocalField, rows: &[Vec<i64>]) -> Matrix {
        let n = rows.len();
        let m = rows[0].len();
        let cols = (0..m).map(|j| (0..n).map(|i| field.from_i64(rows[i][j])).collect()).collect();
        Matrix { cols }
    }

    pub fn from_elem_rows(rows: &[Vec<LocalElement>]) -> Matrix {
        let n = rows.len();
        let m = rows[0].len();
        Matrix { cols: (0..m).map(|j| (0..n).map(|i| rows[i][j]).collect()).collect() }
    }

    pub fn identity(field: &LocalField, n: usize) -> Matrix {
        Matrix { cols: (0..n).map(|i| unit_col(field, n, i)).collect() }
    }

    pub fn nrows(&self) -> usize {
        self.cols.first().map_or(0, |c| c.len())
    }
    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn get(&self, i: usize, j: usize) -> LocalElement {
        self.cols[j][i]
    }

    pub fn apply(&self, v: &[LocalElement]) -> Col {
        let mut out = zero_col(self.cols[0][0].field(), self.nrows());
        for (c, x) in self.cols.iter().zip(v) {
            col_axpy(&mut out, *x, c);
        }
        out
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        Matrix { cols: other.cols.iter().map(|c| self.apply(c)).collect() }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Matrix {
        let n = self.nrows();
        Matrix { cols: (0..n).map(|i| self.cols.iter().map(|c| c[i].conj()).collect()).collect() }
    }

    pub fn scale(&self, t: LocalElement) -> Matrix {
        Matrix { cols: self.cols.iter().map(|c| col_scale(c, t)).collect() }
    }

    pub fn min_valuation(&self) -> Option<u32> {
        self.cols.iter().filter_map(|c| min_valuation(c)).min()
    }
}

/// Saturated upper-triangular Hermite form of a full-rank lattice containing p^N O^d.
///
/// Column i has pivot exactly p^{exps[i]} in row i, zeros below, and entries above
/// reduced coordinate-wise mod p^{exps[i']} where i' is the row of that entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hnf {
    pub cols: Vec<Col>,
    pub exps: Vec<u32>,
}

pub fn hnf(field: &LocalField, dim: usize, gens: &[Col]) -> Result<Hnf, LinalgError> {
    let n = field.precision();
    let mut gens: Vec<Col> = gens.iter().filter(|c| c.iter().any(|x| !x.is_zero())).cloned().collect();
    let mut basis: Vec<Option<Col>> = vec![None; dim];
    let mut exps = vec![0u32; dim];
    for row in (0..dim).rev() {
        let mut best: Option<(usize, u32)> = None;
        for (idx, g) in gens.iter().enumerate() {
            if let Valuation::Finite(v) = g[row].valuation() {
                if best.is_none_or(|(_, bv)| v < bv) {
                    best = Some((idx, v));
                    if v == 0 {
                        break;
                    }
                }
            }
        }
        let Some((idx, a)) = best else {
            return Err(LinalgError::RankDeficient);
        };
        let mut piv = gens.swap_remove(idx);
        let unit = piv[row].div_p_pow(a);
        let uinv = unit.inverse().expect("pivot quotient is a unit");
        piv = col_scale(&piv, uinv);
        debug_assert_eq!(piv[row], field.p_pow(a));
        for g in gens.iter_mut() {
            if !g[row].is_zero() {
                let t = g[row].div_p_pow(a);
                col_axpy(g, -t, &piv);
                debug_assert!(g[row].is_zero());
            }
        }
        if a > 0 {
            let mut sat = col_scale(&piv, field.p_pow(n - a));
            sat[row] = field.zero();
            if sat.iter().any(|x| !x.is_zero()) {
                gens.push(sat);
            }
        }
        gens.retain(|c| c.iter().any(|x| !x.is_zero()));
        basis[row] = Some(piv);
        exps[row] = a;
    }
    let mut cols: Vec<Col> = basis.into_iter().map(|c| c.unwrap()).collect();
    // reduce entries above the pivots, working upward through the rows
    for j in 0..dim {
        for i in (0..j).rev() {
            let (quo, _) = cols[j][i].divrem_p_pow(exps[i]);
            if !quo.is_zero() {
                let ci = cols[i].clone();
                col_axpy(&mut cols[j], -quo, &ci);
            }
        }
    }
    let h = Hnf { cols, exps };
    // a lattice not containing p^{N-2} O^d is too close to the truncation to trust
    for i in 0..dim {
        let mut e = zero_col(field, dim);
        e[i] = field.p_pow(n.saturating_sub(2));
        if !h.contains(&e) {
            return Err(LinalgError::PrecisionExhausted(n));
        }
    }
    Ok(h)
}

impl Hnf {
    pub fn dim(&self) -> usize {
        self.exps.len()
    }

    pub fn field(&self) -> &LocalField {
        self.cols[0][0].field()
    }

    pub fn contains(&self, v: &[LocalElement]) -> bool {
        let mut v = v.to_vec();
        for i in (0..self.dim()).rev() {
            if v[i].is_zero() {
                continue;
            }
            match v[i].valuation() {
                Valuation::Finite(x) if x >= self.exps[i] => {
                    let t = v[i].div_p_pow(self.exps[i]);
                    col_axpy(&mut v, -t, &self.cols[i]);
                }
                _ => return false,
            }
        }
        true
    }

    pub fn contains_all(&self, vs: &[Col]) -> bool {
        vs.iter().all(|v| self.contains(v))
    }

    pub fn min_valuation(&self) -> u32 {
        self.cols.iter().filter_map(|c| min_valuation(c)).min().expect("full rank")
    }

    /// Divide all columns by p^k (k at most the minimal entry valuation).
    pub fn div_p_pow(&self, k: u32) -> Hnf {
        Hnf {
            cols: self.cols.iter().map(|c| c.iter().map(|x| x.div_p_pow(k)).collect()).collect(),
            exps: self.exps.iter().map(|a| a - k).collect(),
        }
    }

    /// Coordinates of the upper triangle, which are exact small integers.
    pub fn encoding(&self) -> Vec<(u64, u64)> {
        let mut out = Vec::new();
        for j in 0..self.dim() {
            for i in 0..=j {
                out.push(self.cols[j][i].coords());
            }
        }
        out
    }

    pub fn to_field(&self, target: &LocalField) -> Hnf {
        Hnf {
            cols: self.cols.iter().map(|c| c.iter().map(|x| x.to_field(target)).collect()).collect(),
            exps: self.exps.clone(),
        }
    }
}

/// Smith form with the column transform: A * V = U * D for some invertible U.
#[derive(Clone, Debug)]
pub struct Snf {
    /// Valuation of the k-th diagonal entry; `None` if that entry is 0 mod p^N.
    pub diag: Vec<Option<u32>>,
    pub v: Matrix,
    pub ncols: usize,
}

pub fn snf(field: &LocalField, rows: &[Col]) -> Snf {
    let r = rows.len();
    let c = rows[0].len();
    let mut a: Vec<Col> = rows.to_vec();
    let mut v = Matrix::identity(field, c);
    let mut diag = Vec::new();
    for k in 0..r.min(c) {
        let mut best: Option<(usize, usize, u32)> = None;
        for (i, row) in a.iter().enumerate().skip(k) {
            for (j, x) in row.iter().enumerate().skip(k) {
                if let Valuation::Finite(val) = x.valuation() {
                    if best.is_none_or(|(_, _, b)| val < b) {
                        best = Some((i, j, val));
                    }
                }
            }
        }
        let Some((bi, bj, val)) = best else {
            break;
        };
        a.swap(k, bi);
        for row in a.iter_mut() {
            row.swap(k, bj);
        }
        v.cols.swap(k, bj);
        let uinv = a[k][k].div_p_pow(val).inverse().expect("unit");
        for row in a.iter_mut() {
            row[k] = row[k] * uinv;
        }
        v.cols[k] = col_scale(&v.cols[k], uinv);
        let pivot_row = a[k].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != k && !row[k].is_zero() {
                let t = row[k].div_p_pow(val);
                col_axpy(row, -t, &pivot_row);
            }
        }
        let vk = v.cols[k].clone();
        for (j, x) in a[k].iter_mut().enumerate() {
            if j != k && !x.is_zero() {
                let t = x.div_p_pow(val);
                *x = field.zero();
                col_axpy(&mut v.cols[j], -t, &vk);
            }
        }
        diag.push(Some(val));
    }
    while diag.len() < r.min(c) {
        diag.push(None);
    }
    Snf { diag, v, ncols: c }
}

/// Generators of { x in O^c : A x = 0 mod p^N } for a row-major matrix A.
pub fn kernel(field: &LocalField, rows: &[Col]) -> Vec<Col> {
    let s = snf(field, rows);
    let n = field.precision();
    let mut out = Vec::new();
    for j in 0..s.ncols {
        match s.diag.get(j).copied().flatten() {
            Some(d) => {
                if d > 0 {
                    out.push(col_scale(&s.v.cols[j], field.p_pow(n - d)));
                }
            }
            None => out.push(s.v.cols[j].clone()),
        }
    }
    out
}

/// Elementary divisor exponents of a square matrix, ascending.
pub fn elementary_divisors(field: &LocalField, m: &Matrix) -> Vec<Option<u32>> {
    let rows: Vec<Col> = (0..m.nrows()).map(|i| m.cols.iter().map(|c| c[i]).collect()).collect();
    let mut d = snf(field, &rows).diag;
    d.sort_by_key(|x| x.unwrap_or(u32::MAX));
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f(p: u64, n: u32) -> LocalField {
        LocalField::new(p, n).unwrap()
    }

    #[test]
    fn hnf_of_diagonal() {
        let fl = f(2, 10);
        let m = Matrix::from_rows(&fl, &[vec![4, 0, 0], vec![0, 1, 0], vec![0, 0, 2]]);
        let h = hnf(&fl, 3, &m.cols).unwrap();
        assert_eq!(h.exps, vec![2, 0, 1]);
        assert!(h.contains(&m.cols[0]));
        assert!(!h.contains(&unit_col(&fl, 3, 0)));
    }

    #[test]
    fn hnf_is_basis_independent() {
        let fl = f(3, 8);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let m = Matrix::from_rows(&fl, &[vec![9, 3, 1], vec![0, 3, 2], vec![0, 0, 27]]);
        let h0 = hnf(&fl, 3, &m.cols).unwrap();
        for _ in 0..20 {
            // random unimodular change of generators, plus redundant combinations
            let mut gens = m.cols.clone();
            for _ in 0..6 {
                let i = rng.gen_range(0..3);
                let j = rng.gen_range(0..3);
                if i != j {
                    let t = fl.random(&mut rng);
                    let gj = gens[j].clone();
                    col_axpy(&mut gens[i], t, &gj);
                }
            }
            let t = fl.random(&mut rng);
            gens.push(col_scale(&gens[1], t));
            let h = hnf(&fl, 3, &gens).unwrap();
            assert_eq!(h, h0);
        }
    }

    #[test]
    fn rank_deficiency_and_precision() {
        let fl = f(2, 6);
        let m = Matrix::from_rows(&fl, &[vec![1, 0], vec![0, 0]]);
        assert_eq!(hnf(&fl, 2, &m.cols), Err(LinalgError::RankDeficient));
        let m = Matrix::from_rows(&fl, &[vec![1, 0], vec![0, 64]]);
        assert_eq!(hnf(&fl, 2, &m.cols), Err(LinalgError::RankDeficient));
        let m = Matrix::from_rows(&fl, &[vec![1, 0], vec![0, 32]]);
        assert_eq!(hnf(&fl, 2, &m.cols), Err(LinalgError::PrecisionExhausted(6)));
        let m = Matrix::from_rows(&fl, &[vec![1, 0], vec![0, 16]]);
        assert!(hnf(&fl, 2, &m.cols).is_ok());
    }

    #[test]
    fn membership_matches_brute_force_over_residues() {
        // oracle: enumerate the span mod p^2 of a lattice containing p^2 O^2
        let fl = f(2, 2);
        let big = f(2, 6);
        let m = Matrix::from_rows(&fl, &[vec![2, 1], vec![0, 2]]);
        let h = hnf(&big, 2, &Matrix::from_rows(&big, &[vec![2, 1], vec![0, 2]]).cols).unwrap();
        let residues: Vec<LocalElement> =
            (0..4).flat_map(|a| (0..4).map(move |b| (a, b))).map(|(a, b)| fl.elem(a, b)).collect();
        let mut span = std::collections::HashSet::new();
        for x in &residues {
            for y in &residues {
                let v = m.apply(&[*x, *y]);
                span.insert(v);
            }
        }
        for x in &residues {
            for y in &residues {
                let v = vec![*x, *y];
                let lifted: Col = v.iter().map(|e| e.to_field(&big)).collect();
                assert_eq!(h.contains(&lifted), span.contains(&v));
            }
        }
    }

    #[test]
    fn snf_and_kernel() {
        let fl = f(5, 6);
        let m = Matrix::from_rows(&fl, &[vec![5, 1, 0], vec![0, 25, 0], vec![0, 0, 1]]);
        let d = elementary_divisors(&fl, &m);
        assert_eq!(d, vec![Some(0), Some(0), Some(3)]);
        let rows: Vec<Col> = vec![vec![fl.from_i64(5), fl.from_i64(10), fl.zero()]];
        let k = kernel(&fl, &rows);
        for v in &k {
            let s = rows[0].iter().zip(v).fold(fl.zero(), |acc, (a, b)| acc + *a * *b);
            assert!(s.is_zero());
        }
        // kernel of (5, 10, 0) mod 5^6 has index 5^5 in O^3
        let big = f(5, 9);
        let mut gens: Vec<Col> = k.iter().map(|c| c.iter().map(|x| x.to_field(&big)).collect()).collect();
        gens.extend((0..3).map(|i| col_scale(&unit_col(&big, 3, i), big.p_pow(6))));
        let h = hnf(&big, 3, &gens).unwrap();
        assert_eq!(h.exps.iter().sum::<u32>(), 5);
    }
}

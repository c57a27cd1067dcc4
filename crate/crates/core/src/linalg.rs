//! Sparse exact linear algebra and finite cochain complexes.
//!
//! Elimination always picks the first remaining nonzero row (lowest index)
//! and, within it, the lowest nonzero column. Free variables are set to zero,
//! so every solve is a deterministic function of its input.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use std::collections::BTreeMap;

/// A rows × cols matrix storing only nonzero entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), Scalar>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> SparseMatrix {
        SparseMatrix { rows, cols, entries: BTreeMap::new() }
    }

    pub fn identity(n: usize) -> SparseMatrix {
        let mut m = SparseMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Scalar::one());
        }
        m
    }

    pub fn from_dense(rows: Vec<Vec<Scalar>>) -> SparseMatrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = SparseMatrix::zeros(r, c);
        for (i, row) in rows.into_iter().enumerate() {
            assert_eq!(row.len(), c, "ragged matrix");
            for (j, v) in row.into_iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn from_ints(rows: &[&[i64]]) -> SparseMatrix {
        SparseMatrix::from_dense(
            rows.iter().map(|r| r.iter().map(|&x| Scalar::from_int(x)).collect()).collect(),
        )
    }

    /// Matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_columns(rows: usize, columns: &[Vec<Scalar>]) -> SparseMatrix {
        let mut m = SparseMatrix::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (i, v) in col.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Scalar {
        self.entries.get(&(i, j)).cloned().unwrap_or_default()
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        if v.is_zero() {
            self.entries.remove(&(i, j));
        } else {
            self.entries.insert((i, j), v);
        }
    }

    pub fn add_to(&mut self, i: usize, j: usize, v: &Scalar) {
        let cur = self.get(i, j);
        self.set(i, j, &cur + v);
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize), &Scalar)> {
        self.entries.iter()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn to_dense(&self) -> Vec<Vec<Scalar>> {
        let mut out = vec![vec![Scalar::zero(); self.cols]; self.rows];
        for (&(i, j), v) in &self.entries {
            out[i][j] = v.clone();
        }
        out
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut t = SparseMatrix::zeros(self.cols, self.rows);
        for (&(i, j), v) in &self.entries {
            t.entries.insert((j, i), v.clone());
        }
        t
    }

    pub fn scale(&self, s: &Scalar) -> SparseMatrix {
        let mut m = SparseMatrix::zeros(self.rows, self.cols);
        for (&(i, j), v) in &self.entries {
            m.set(i, j, v * s);
        }
        m
    }

    pub fn add(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} + {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut m = self.clone();
        for (&(i, j), v) in &other.entries {
            m.add_to(i, j, v);
        }
        Ok(m)
    }

    pub fn sub(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        self.add(&other.scale(&Scalar::from_int(-1)))
    }

    pub fn mul(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut by_row: Vec<Vec<(usize, &Scalar)>> = vec![Vec::new(); other.rows];
        for (&(k, j), v) in &other.entries {
            by_row[k].push((j, v));
        }
        let mut m = SparseMatrix::zeros(self.rows, other.cols);
        for (&(i, k), a) in &self.entries {
            for &(j, b) in &by_row[k] {
                m.add_to(i, j, &(a * b));
            }
        }
        Ok(m)
    }

    pub fn mul_vec(&self, x: &[Scalar]) -> Result<Vec<Scalar>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} applied to vector of length {}",
                self.rows,
                self.cols,
                x.len()
            )));
        }
        let mut y = vec![Scalar::zero(); self.rows];
        for (&(i, j), v) in &self.entries {
            if !x[j].is_zero() {
                y[i] = &y[i] + &(v * &x[j]);
            }
        }
        Ok(y)
    }

    /// Block matrix [[a, b], [c, d]] with compatible shapes.
    pub fn block(
        a: &SparseMatrix,
        b: &SparseMatrix,
        c: &SparseMatrix,
        d: &SparseMatrix,
    ) -> SparseMatrix {
        assert!(a.rows == b.rows && c.rows == d.rows && a.cols == c.cols && b.cols == d.cols);
        let mut m = SparseMatrix::zeros(a.rows + c.rows, a.cols + b.cols);
        for (&(i, j), v) in &a.entries {
            m.set(i, j, v.clone());
        }
        for (&(i, j), v) in &b.entries {
            m.set(i, a.cols + j, v.clone());
        }
        for (&(i, j), v) in &c.entries {
            m.set(a.rows + i, j, v.clone());
        }
        for (&(i, j), v) in &d.entries {
            m.set(a.rows + i, a.cols + j, v.clone());
        }
        m
    }
}

/// Reduced row echelon data: pivot (row, column) pairs of the reduced matrix.
struct Echelon {
    rows: Vec<BTreeMap<usize, Scalar>>,
    pivots: Vec<(usize, usize)>,
}

fn sparse_rows(m: &SparseMatrix) -> Vec<BTreeMap<usize, Scalar>> {
    let mut rows = vec![BTreeMap::new(); m.rows];
    for (&(i, j), v) in &m.entries {
        rows[i].insert(j, v.clone());
    }
    rows
}

/// Row-reduces in place; columns at index >= `limit` never become pivots.
fn reduce(mut rows: Vec<BTreeMap<usize, Scalar>>, limit: usize) -> Echelon {
    let mut pivots = Vec::new();
    let mut used = vec![false; rows.len()];
    loop {
        let mut choice = None;
        for (i, row) in rows.iter().enumerate() {
            if used[i] {
                continue;
            }
            if let Some((&j, _)) = row.iter().next().filter(|(&j, _)| j < limit) {
                choice = Some((i, j));
                break;
            }
        }
        let Some((pi, pj)) = choice else { break };
        used[pi] = true;
        let inv = rows[pi][&pj].inverse().expect("pivot is nonzero");
        let prow: BTreeMap<usize, Scalar> =
            rows[pi].iter().map(|(&j, v)| (j, v * &inv)).collect();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == pi {
                continue;
            }
            let Some(f) = row.get(&pj).cloned() else { continue };
            for (&j, v) in &prow {
                let nv = &row.get(&j).cloned().unwrap_or_default() - &(&f * v);
                if nv.is_zero() {
                    row.remove(&j);
                } else {
                    row.insert(j, nv);
                }
            }
        }
        rows[pi] = prow;
        pivots.push((pi, pj));
    }
    Echelon { rows, pivots }
}

/// Returns x with Mx = b when b lies in the image of M, else `None`.
pub fn solve_linear(m: &SparseMatrix, b: &[Scalar]) -> Result<Option<Vec<Scalar>>> {
    if b.len() != m.rows {
        return Err(Error::DimensionMismatch(format!(
            "system has {} rows but right-hand side has length {}",
            m.rows,
            b.len()
        )));
    }
    let mut rows = sparse_rows(m);
    for (i, v) in b.iter().enumerate() {
        if !v.is_zero() {
            rows[i].insert(m.cols, v.clone());
        }
    }
    let ech = reduce(rows, m.cols);
    let pivot_rows: Vec<bool> = {
        let mut p = vec![false; m.rows];
        for &(i, _) in &ech.pivots {
            p[i] = true;
        }
        p
    };
    for (i, row) in ech.rows.iter().enumerate() {
        if !pivot_rows[i] && row.contains_key(&m.cols) {
            return Ok(None);
        }
    }
    let mut x = vec![Scalar::zero(); m.cols];
    for &(i, j) in &ech.pivots {
        if let Some(v) = ech.rows[i].get(&m.cols) {
            x[j] = v.clone();
        }
    }
    Ok(Some(x))
}

/// Rank together with bases of the kernel and the image.
#[derive(Clone, Debug)]
pub struct RankKernelImage {
    pub rank: usize,
    pub kernel: Vec<Vec<Scalar>>,
    pub image: Vec<Vec<Scalar>>,
}

pub fn rank_kernel_image(m: &SparseMatrix) -> RankKernelImage {
    let ech = reduce(sparse_rows(m), m.cols);
    let mut pivot_of_col: BTreeMap<usize, usize> = BTreeMap::new();
    for &(i, j) in &ech.pivots {
        pivot_of_col.insert(j, i);
    }
    let mut kernel = Vec::new();
    for f in 0..m.cols {
        if pivot_of_col.contains_key(&f) {
            continue;
        }
        let mut v = vec![Scalar::zero(); m.cols];
        v[f] = Scalar::one();
        for (&j, &i) in &pivot_of_col {
            if let Some(c) = ech.rows[i].get(&f) {
                v[j] = -c;
            }
        }
        kernel.push(v);
    }
    let image = pivot_of_col.keys().map(|&j| m.column(j)).collect();
    RankKernelImage { rank: ech.pivots.len(), kernel, image }
}

pub fn rank(m: &SparseMatrix) -> usize {
    reduce(sparse_rows(m), m.cols).pivots.len()
}

/// Rank of a list of vectors of common length `n`.
pub fn rank_of_vectors(n: usize, vs: &[Vec<Scalar>]) -> usize {
    rank(&SparseMatrix::from_columns(n, vs))
}

/// A bounded cochain complex of finite-dimensional spaces, degrees lo..=hi.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteComplex {
    lo: i32,
    dims: Vec<usize>,
    /// `diffs[i]` maps degree lo+i to lo+i+1.
    diffs: Vec<SparseMatrix>,
}

impl FiniteComplex {
    pub fn new(lo: i32, dims: Vec<usize>, diffs: Vec<SparseMatrix>) -> Result<FiniteComplex> {
        if dims.is_empty() {
            return Ok(FiniteComplex { lo, dims, diffs: Vec::new() });
        }
        if diffs.len() + 1 != dims.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} degrees need {} differentials, got {}",
                dims.len(),
                dims.len() - 1,
                diffs.len()
            )));
        }
        for (i, d) in diffs.iter().enumerate() {
            if d.cols() != dims[i] || d.rows() != dims[i + 1] {
                return Err(Error::DimensionMismatch(format!(
                    "differential in degree {} is {}x{}, expected {}x{}",
                    lo + i as i32,
                    d.rows(),
                    d.cols(),
                    dims[i + 1],
                    dims[i]
                )));
            }
        }
        Ok(FiniteComplex { lo, dims, diffs })
    }

    /// A single space in degree `deg`.
    pub fn concentrated(deg: i32, dim: usize) -> FiniteComplex {
        FiniteComplex { lo: deg, dims: vec![dim], diffs: Vec::new() }
    }

    pub fn lo(&self) -> i32 {
        self.lo
    }

    pub fn hi(&self) -> i32 {
        self.lo + self.dims.len() as i32 - 1
    }

    pub fn dim(&self, k: i32) -> usize {
        if k < self.lo || k > self.hi() {
            return 0;
        }
        self.dims[(k - self.lo) as usize]
    }

    /// The differential leaving degree k (a zero map outside the range).
    pub fn diff(&self, k: i32) -> SparseMatrix {
        if k >= self.lo && k < self.hi() {
            return self.diffs[(k - self.lo) as usize].clone();
        }
        SparseMatrix::zeros(self.dim(k + 1), self.dim(k))
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i32> {
        self.lo..=self.hi()
    }

    pub fn check(&self) -> Result<()> {
        for k in self.lo..self.hi() - 1 {
            if !self.diff(k + 1).mul(&self.diff(k))?.is_zero() {
                return Err(Error::NotAComplex(k));
            }
        }
        Ok(())
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.degrees().map(|k| if k % 2 == 0 { 1 } else { -1 } * self.dim(k) as i64).sum()
    }
}

/// dim H^k for every degree of the complex, ascending.
pub fn cohomology_dims(c: &FiniteComplex) -> Result<BTreeMap<i32, usize>> {
    c.check()?;
    let ranks: BTreeMap<i32, usize> = c.degrees().map(|k| (k, rank(&c.diff(k)))).collect();
    Ok(c.degrees()
        .map(|k| {
            let incoming = ranks.get(&(k - 1)).copied().unwrap_or(0);
            (k, c.dim(k) - ranks[&k] - incoming)
        })
        .collect())
}

/// Cocycles in degree k whose classes form a basis of H^k.
pub fn cohomology_basis(c: &FiniteComplex, k: i32) -> Vec<Vec<Scalar>> {
    let n = c.dim(k);
    if n == 0 {
        return Vec::new();
    }
    let cycles = rank_kernel_image(&c.diff(k)).kernel;
    let mut span = Subspace::span(n, &rank_kernel_image(&c.diff(k - 1)).image);
    cycles.into_iter().filter(|z| span.insert(z)).collect()
}

/// A subspace of k^n kept in reduced row echelon form, so that every vector
/// has a canonical normal form modulo it.
#[derive(Clone, Debug, Default)]
pub struct Subspace {
    n: usize,
    /// Pivot column ↦ reduced row with a 1 at the pivot.
    rows: BTreeMap<usize, BTreeMap<usize, Scalar>>,
}

impl Subspace {
    pub fn new(n: usize) -> Subspace {
        Subspace { n, rows: BTreeMap::new() }
    }

    pub fn span(n: usize, vs: &[Vec<Scalar>]) -> Subspace {
        let mut s = Subspace::new(n);
        for v in vs {
            s.insert(v);
        }
        s
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    /// Coordinates that are not pivots; they index a basis of the quotient.
    pub fn free_coords(&self) -> Vec<usize> {
        (0..self.n).filter(|j| !self.rows.contains_key(j)).collect()
    }

    fn reduce_sparse(&self, v: &mut BTreeMap<usize, Scalar>) {
        for (&j, row) in &self.rows {
            let Some(f) = v.get(&j).cloned() else { continue };
            for (&c, x) in row {
                let nv = &v.get(&c).cloned().unwrap_or_default() - &(&f * x);
                if nv.is_zero() {
                    v.remove(&c);
                } else {
                    v.insert(c, nv);
                }
            }
        }
    }

    /// The canonical representative of v modulo the subspace.
    pub fn normal_form(&self, v: &[Scalar]) -> Vec<Scalar> {
        let mut m: BTreeMap<usize, Scalar> =
            v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(j, x)| (j, x.clone())).collect();
        self.reduce_sparse(&mut m);
        let mut out = vec![Scalar::zero(); self.n];
        for (j, x) in m {
            out[j] = x;
        }
        out
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        self.normal_form(v).iter().all(|x| x.is_zero())
    }

    /// Adds v; returns whether the dimension grew.
    pub fn insert(&mut self, v: &[Scalar]) -> bool {
        let mut m: BTreeMap<usize, Scalar> =
            v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(j, x)| (j, x.clone())).collect();
        self.reduce_sparse(&mut m);
        let Some((&p, pv)) = m.iter().next() else { return false };
        let inv = pv.inverse().expect("nonzero pivot");
        let new: BTreeMap<usize, Scalar> = m.iter().map(|(&j, x)| (j, x * &inv)).collect();
        for row in self.rows.values_mut() {
            let Some(f) = row.get(&p).cloned() else { continue };
            for (&c, x) in &new {
                let nv = &row.get(&c).cloned().unwrap_or_default() - &(&f * x);
                if nv.is_zero() {
                    row.remove(&c);
                } else {
                    row.insert(c, nv);
                }
            }
        }
        self.rows.insert(p, new);
        true
    }

    /// A basis of the subspace (the reduced rows).
    pub fn basis(&self) -> Vec<Vec<Scalar>> {
        self.rows
            .values()
            .map(|row| {
                let mut v = vec![Scalar::zero(); self.n];
                for (&j, x) in row {
                    v[j] = x.clone();
                }
                v
            })
            .collect()
    }
}

/// A degreewise linear map between two finite complexes.
#[derive(Clone, Debug)]
pub struct ChainMap {
    pub source: FiniteComplex,
    pub target: FiniteComplex,
    /// Degree k ↦ matrix dim target(k) × dim source(k); missing degrees are zero.
    pub maps: BTreeMap<i32, SparseMatrix>,
}

impl ChainMap {
    pub fn component(&self, k: i32) -> SparseMatrix {
        self.maps
            .get(&k)
            .cloned()
            .unwrap_or_else(|| SparseMatrix::zeros(self.target.dim(k), self.source.dim(k)))
    }

    fn range(&self) -> std::ops::RangeInclusive<i32> {
        self.source.lo().min(self.target.lo())..=self.source.hi().max(self.target.hi())
    }

    pub fn check(&self) -> Result<()> {
        for k in self.range() {
            let lhs = self.component(k + 1).mul(&self.source.diff(k))?;
            let rhs = self.target.diff(k).mul(&self.component(k))?;
            if lhs != rhs {
                return Err(Error::NotChainMap(k));
            }
        }
        Ok(())
    }

    /// Cone^k = S^{k+1} ⊕ T^k with d(s, t) = (−d s, f s + d t).
    pub fn mapping_cone(&self) -> Result<FiniteComplex> {
        let lo = self.range().start() - 1;
        let hi = *self.range().end();
        let dim = |k: i32| self.source.dim(k + 1) + self.target.dim(k);
        let dims: Vec<usize> = (lo..=hi).map(dim).collect();
        let mut diffs = Vec::new();
        for k in lo..hi {
            let ds = self.source.diff(k + 1).scale(&Scalar::from_int(-1));
            let top_right = SparseMatrix::zeros(self.source.dim(k + 2), self.target.dim(k));
            let f = self.component(k + 1);
            diffs.push(SparseMatrix::block(&ds, &top_right, &f, &self.target.diff(k)));
        }
        FiniteComplex::new(lo, dims, diffs)
    }
}

/// True iff the mapping cone of `f` is acyclic.
pub fn is_quasi_iso(f: &ChainMap) -> Result<bool> {
    f.check()?;
    Ok(cohomology_dims(&f.mapping_cone()?)?.values().all(|&d| d == 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[i64]) -> Vec<Scalar> {
        xs.iter().map(|&x| Scalar::from_int(x)).collect()
    }

    #[test]
    fn solve_identity_with_root_of_unity() {
        let b = vec![Scalar::one(), Scalar::zeta(3, 1)];
        assert_eq!(solve_linear(&SparseMatrix::identity(2), &b).unwrap(), Some(b));
    }

    #[test]
    fn solve_kernel_case_picks_zero() {
        let m = SparseMatrix::from_ints(&[&[1, 1]]);
        assert_eq!(solve_linear(&m, &v(&[0])).unwrap(), Some(v(&[0, 0])));
    }

    #[test]
    fn solve_inconsistent() {
        let m = SparseMatrix::from_ints(&[&[1], &[1]]);
        assert_eq!(solve_linear(&m, &v(&[1, 0])).unwrap(), None);
        assert!(solve_linear(&m, &v(&[1])).is_err());
    }

    #[test]
    fn rank_examples() {
        let r = rank_kernel_image(&SparseMatrix::zeros(3, 3));
        assert_eq!((r.rank, r.kernel.len()), (0, 3));
        assert_eq!(rank(&SparseMatrix::identity(4)), 4);
        let r = rank_kernel_image(&SparseMatrix::from_ints(&[&[1, 2], &[2, 4]]));
        assert_eq!(r.rank, 1);
        assert_eq!(r.kernel, vec![v(&[-2, 1])]);
    }

    #[test]
    fn cohomology_examples() {
        let point = FiniteComplex::concentrated(0, 1);
        assert_eq!(cohomology_dims(&point).unwrap(), BTreeMap::from([(0, 1)]));
        let acyclic = FiniteComplex::new(0, vec![1, 1], vec![SparseMatrix::identity(1)]).unwrap();
        assert_eq!(cohomology_dims(&acyclic).unwrap(), BTreeMap::from([(0, 0), (1, 0)]));
        // 1 → 2 → 1 with d0 = 0 and d1 = (0, −1)
        let ce = FiniteComplex::new(
            0,
            vec![1, 2, 1],
            vec![SparseMatrix::zeros(2, 1), SparseMatrix::from_ints(&[&[0, -1]])],
        )
        .unwrap();
        assert_eq!(cohomology_dims(&ce).unwrap(), BTreeMap::from([(0, 1), (1, 1), (2, 0)]));
    }

    #[test]
    fn not_a_complex_names_degree() {
        let c = FiniteComplex::new(
            2,
            vec![1, 1, 1],
            vec![SparseMatrix::identity(1), SparseMatrix::identity(1)],
        )
        .unwrap();
        assert_eq!(cohomology_dims(&c), Err(Error::NotAComplex(2)));
    }

    #[test]
    fn quasi_iso_examples() {
        let point = FiniteComplex::concentrated(0, 1);
        let id = ChainMap {
            source: point.clone(),
            target: point.clone(),
            maps: BTreeMap::from([(0, SparseMatrix::identity(1))]),
        };
        assert!(is_quasi_iso(&id).unwrap());
        let zero = ChainMap { source: point.clone(), target: point.clone(), maps: BTreeMap::new() };
        assert!(!is_quasi_iso(&zero).unwrap());
        // [F --id--> F] ⊕ F projected onto the lone summand
        let src = FiniteComplex::new(
            0,
            vec![2, 1],
            vec![SparseMatrix::from_ints(&[&[1, 0]])],
        )
        .unwrap();
        let proj = ChainMap {
            source: src,
            target: point,
            maps: BTreeMap::from([(0, SparseMatrix::from_ints(&[&[0, 1]]))]),
        };
        assert!(is_quasi_iso(&proj).unwrap());
    }

    #[test]
    fn chain_map_violation() {
        let src = FiniteComplex::new(0, vec![1, 1], vec![SparseMatrix::identity(1)]).unwrap();
        let tgt = FiniteComplex::new(0, vec![1, 1], vec![SparseMatrix::zeros(1, 1)]).unwrap();
        let f = ChainMap {
            source: src,
            target: tgt,
            maps: BTreeMap::from([(1, SparseMatrix::identity(1))]),
        };
        assert_eq!(is_quasi_iso(&f), Err(Error::NotChainMap(0)));
    }
}

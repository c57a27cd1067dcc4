//! Quasi-cohesive modules and the transfer of a Z-connection along a
//! quasi-isomorphism from a bounded free complex.
//!
//! `cohesify` covers base dgas whose degree-zero part is the ground field;
//! there every X ⊗_A A^k is free over the field and each inductive solve is
//! a finite scalar system, one per basis element of A^k.

use crate::algebra::{AElement, BasisKey, Kernel};
use crate::amatrix::AMatrix;
use crate::cohesive::{parity_sign, CohesiveModule};
use crate::dga::CurvedDga;
use crate::error::{Error, Result};
use crate::hom::{cone, hom_complex, is_homotopy_equivalence, null_homotopy_solve, HomComplex, HomMorphism};
use crate::linalg::{
    cohomology_basis, is_quasi_iso, rank_kernel_image, solve_linear, ChainMap, FiniteComplex, SparseMatrix,
    Subspace,
};
use crate::report::ValidationReport;
use crate::scalar::Scalar;
use std::collections::BTreeMap;
use std::sync::Arc;

/// A finite-dimensional graded space X with a right A⁰-action and a
/// Z-connection 𝕏, stored as a lift to X ⊗_k A: 𝕏(x_j) = Σ_l x_l ⊗ C_lj.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuasiCohesiveModule {
    pub name: String,
    pub algebra: Arc<CurvedDga>,
    pub basis: Vec<String>,
    pub degrees: Vec<i32>,
    /// One matrix per element of `algebra.basis_of_degree(0)`: column j is x_j·a.
    pub action: Vec<SparseMatrix>,
    pub connection: AMatrix,
}

fn table_only(a: &CurvedDga) -> Result<()> {
    match a.kernel {
        Kernel::Table(_) => Ok(()),
        Kernel::NcTorus(_) => Err(Error::Unsupported("quasi-cohesive modules over the torus kernel".into())),
    }
}

/// True when A⁰ is spanned by the unit.
pub fn degree_zero_is_field(a: &CurvedDga) -> bool {
    a.is_finite() && a.basis_of_degree(0).len() == 1
}

impl QuasiCohesiveModule {
    pub fn new(
        name: &str,
        algebra: Arc<CurvedDga>,
        basis: Vec<String>,
        degrees: Vec<i32>,
        action: Vec<SparseMatrix>,
        connection: AMatrix,
    ) -> Result<QuasiCohesiveModule> {
        table_only(&algebra)?;
        let n = basis.len();
        if degrees.len() != n || connection.rows() != n || connection.cols() != n {
            return Err(Error::DimensionMismatch(format!("{n} basis vectors need {n} degrees and an {n}×{n} connection")));
        }
        let k0 = algebra.basis_of_degree(0).len();
        if action.len() != k0 || action.iter().any(|m| m.rows() != n || m.cols() != n) {
            return Err(Error::DimensionMismatch(format!("need {k0} action matrices of size {n}×{n}")));
        }
        Ok(QuasiCohesiveModule { name: name.into(), algebra, basis, degrees, action, connection })
    }

    /// A module over a base with A⁰ = k: the action is by scalars only.
    pub fn over_field(
        name: &str,
        algebra: Arc<CurvedDga>,
        basis: Vec<String>,
        degrees: Vec<i32>,
        connection: AMatrix,
    ) -> Result<QuasiCohesiveModule> {
        if !degree_zero_is_field(&algebra) {
            return Err(Error::Unsupported("the degree-zero part of the base is not the ground field".into()));
        }
        let n = basis.len();
        QuasiCohesiveModule::new(name, algebra, basis, degrees, vec![SparseMatrix::identity(n)], connection)
    }

    /// A free cohesive module read as the space E ⊗ A⁰ with basis e_i ⊗ a.
    pub fn from_cohesive(e: &CohesiveModule) -> Result<QuasiCohesiveModule> {
        let a = e.algebra.clone();
        table_only(&a)?;
        if !e.is_free() {
            return Err(Error::NotFree(e.name.clone()));
        }
        let zero = a.basis_of_degree(0);
        let pos: BTreeMap<(usize, BasisKey), usize> = (0..e.rank())
            .flat_map(|i| zero.iter().map(move |k| (i, k.clone())))
            .enumerate()
            .map(|(j, x)| (x, j))
            .collect();
        let n = pos.len();
        let mut basis = vec![String::new(); n];
        let mut degrees = vec![0; n];
        for ((i, k), &j) in &pos {
            basis[j] = format!("{}⊗{}", e.generators[*i], a.key_name(k));
            degrees[j] = e.degrees[*i];
        }
        let unit = a.unit_key();
        // Split an element of E ⊗ A into the lift Σ (e_i ⊗ 1) ⊗ b.
        let lift = |v: &[AElement], col: &mut Vec<AElement>| {
            for (i, x) in v.iter().enumerate() {
                col[pos[&(i, unit.clone())]].add_assign(x);
            }
        };
        let mut action = Vec::new();
        for b in &zero {
            let mut m = SparseMatrix::zeros(n, n);
            for ((i, k), &j) in &pos {
                let p = a.multiply(&AElement::basis(k.clone()), &AElement::basis(b.clone()));
                for (k2, c) in p.terms() {
                    m.add_to(pos[&(*i, k2.clone())], j, c);
                }
            }
            action.push(m);
        }
        let mut cols = Vec::new();
        for j in 0..n {
            let (i, k) = pos.iter().find(|(_, &jj)| jj == j).map(|(x, _)| x.clone()).expect("bijective");
            let mut v = vec![AElement::zero(); e.rank()];
            v[i] = AElement::basis(k);
            let mut col = vec![AElement::zero(); n];
            lift(&e.apply_connection(&v), &mut col);
            cols.push(col);
        }
        QuasiCohesiveModule::new(&e.name, a, basis, degrees, action, AMatrix::from_columns(n, &cols))
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// The same data as a free cohesive module, when A⁰ is the field.
    pub fn as_free_module(&self) -> Result<CohesiveModule> {
        if !degree_zero_is_field(&self.algebra) {
            return Err(Error::Unsupported("the degree-zero part of the base is not the ground field".into()));
        }
        CohesiveModule::new(&self.name, self.algebra.clone(), self.basis.clone(), self.degrees.clone(), self.connection.clone())
    }

    /// 𝕏 on a lift v ∈ X ⊗_k A: Σ_l C_{·l} v_l + (−1)^{|x_l|} x_l ⊗ dv_l.
    pub fn apply_connection(&self, v: &[AElement]) -> Vec<AElement> {
        let a = &self.algebra;
        let mut out = self.connection.apply(a, v);
        for (l, x) in v.iter().enumerate() {
            if !x.is_zero() {
                out[l].add_scaled(&a.apply_d(x), &parity_sign(self.degrees[l]));
            }
        }
        out
    }

    /// The field-linear map 𝕏⁰ on X.
    pub fn zero_block(&self) -> SparseMatrix {
        let zero = self.algebra.basis_of_degree(0);
        let n = self.dim();
        let mut m = SparseMatrix::zeros(n, n);
        for j in 0..n {
            for l in 0..n {
                for (t, k) in zero.iter().enumerate() {
                    let c = self.connection.get(l, j).coeff(k);
                    if !c.is_zero() {
                        for i in 0..n {
                            let r = self.action[t].get(i, l);
                            if !r.is_zero() {
                                m.add_to(i, j, &(&c * &r));
                            }
                        }
                    }
                }
            }
        }
        m
    }
}

/// X ⊗_A A as the quotient of X ⊗_k A by x·a ⊗ b − x ⊗ ab.
struct Tensor {
    keys: BTreeMap<BasisKey, usize>,
    n: usize,
    relations: Subspace,
}

impl Tensor {
    fn new(x: &QuasiCohesiveModule) -> Tensor {
        let a = &x.algebra;
        let all = a.basis_keys().expect("table kernel");
        let keys: BTreeMap<BasisKey, usize> = all.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        let n = x.dim();
        let mut t = Tensor { keys, n, relations: Subspace::new(n * all.len()) };
        for (ai, ak) in a.basis_of_degree(0).iter().enumerate() {
            for m in 0..n {
                for b in &all {
                    let mut v = vec![AElement::zero(); n];
                    for (i, c) in x.action[ai].column(m).iter().enumerate() {
                        if !c.is_zero() {
                            v[i].add_term(b.clone(), c);
                        }
                    }
                    v[m].sub_assign(&a.multiply(&AElement::basis(ak.clone()), &AElement::basis(b.clone())));
                    let flat = t.flatten(&v);
                    t.relations.insert(&flat);
                }
            }
        }
        t
    }

    fn flatten(&self, v: &[AElement]) -> Vec<Scalar> {
        let m = self.keys.len();
        let mut out = vec![Scalar::zero(); self.n * m];
        for (l, x) in v.iter().enumerate() {
            for (k, c) in x.terms() {
                out[l * m + self.keys[k]] = c.clone();
            }
        }
        out
    }

    fn is_zero(&self, v: &[AElement]) -> bool {
        self.relations.contains(&self.flatten(v))
    }
}

/// Checks the action axioms, the grading, the Leibniz rule for 𝕏 against the
/// action, and F_𝕏 = 0, all in X ⊗_A A computed as a cokernel.
pub fn check_quasi_cohesive(x: &QuasiCohesiveModule) -> ValidationReport {
    let a = &x.algebra;
    let mut r = ValidationReport::new();
    let n = x.dim();
    let zero = a.basis_of_degree(0);
    let unit_pos = zero.iter().position(|k| *k == a.unit_key());
    let mut fail = None;
    if unit_pos.map(|u| x.action[u] != SparseMatrix::identity(n)).unwrap_or(true) {
        fail = Some("the unit does not act as the identity".to_string());
    }
    'outer: for (i, ka) in zero.iter().enumerate() {
        for (j, kb) in zero.iter().enumerate() {
            let ab = a.multiply(&AElement::basis(ka.clone()), &AElement::basis(kb.clone()));
            let mut rhs = SparseMatrix::zeros(n, n);
            for (k, c) in ab.terms() {
                let t = zero.iter().position(|z| z == k).expect("A⁰ is closed under products");
                rhs = rhs.add(&x.action[t].scale(c)).expect("square");
            }
            if x.action[j].mul(&x.action[i]).expect("square") != rhs {
                fail = Some(format!("(x·{})·{} ≠ x·({}{})", a.key_name(ka), a.key_name(kb), a.key_name(ka), a.key_name(kb)));
                break 'outer;
            }
        }
    }
    r.record("action", fail);

    let mut fail = None;
    for (t, m) in x.action.iter().enumerate() {
        if let Some(((i, j), _)) = m.entries().find(|((i, j), _)| x.degrees[*i] != x.degrees[*j]) {
            fail = Some(format!("{}·{} leaves degree {}", x.basis[*j], a.key_name(&zero[t]), x.degrees[*i]));
            break;
        }
    }
    if fail.is_none() {
        'deg: for j in 0..n {
            for l in 0..n {
                for (k, _) in x.connection.get(l, j).terms() {
                    let want = x.degrees[j] + 1 - x.degrees[l];
                    if a.degree(k) as i32 != want {
                        fail = Some(format!(
                            "𝕏({}) has a term {}⊗{} of total degree ≠ {}",
                            x.basis[j],
                            x.basis[l],
                            a.key_name(k),
                            x.degrees[j] + 1
                        ));
                        break 'deg;
                    }
                }
            }
        }
    }
    r.record("grading", fail);

    let tensor = Tensor::new(x);
    let mut fail = None;
    'leib: for (t, ka) in zero.iter().enumerate() {
        let da = a.apply_d(&AElement::basis(ka.clone()));
        for j in 0..n {
            let xa: Vec<AElement> = x.action[t].column(j).iter().map(|c| a.scalar(c.clone())).collect();
            let lhs = x.apply_connection(&xa);
            let mut unit_j = vec![AElement::zero(); n];
            unit_j[j] = a.unit();
            let mut rhs: Vec<AElement> =
                x.apply_connection(&unit_j).iter().map(|y| a.multiply(y, &AElement::basis(ka.clone()))).collect();
            rhs[j].add_scaled(&da, &parity_sign(x.degrees[j]));
            let diff: Vec<AElement> = lhs.iter().zip(&rhs).map(|(p, q)| p.minus(q)).collect();
            if !tensor.is_zero(&diff) {
                fail = Some(format!("𝕏({}·{}) ≠ 𝕏({})·{} ± {}⊗d{}", x.basis[j], a.key_name(ka), x.basis[j], a.key_name(ka), x.basis[j], a.key_name(ka)));
                break 'leib;
            }
        }
    }
    r.record("leibniz", fail);

    let mut fail = None;
    for j in 0..n {
        let mut v = vec![AElement::zero(); n];
        v[j] = a.unit();
        let mut f = x.apply_connection(&x.apply_connection(&v));
        f[j].add_assign(&a.curvature);
        if !tensor.is_zero(&f) {
            let worst = a
                .homogeneous_parts(&f.iter().fold(AElement::zero(), |s, y| s.plus(y)))
                .into_keys()
                .find(|&p| {
                    let part: Vec<AElement> = f.iter().map(|y| a.component(y, p)).collect();
                    !tensor.is_zero(&part)
                })
                .unwrap_or(0);
            fail = Some(format!(
                "F_𝕏({}) ≠ 0 at degree {} (form degree {worst})",
                x.basis[j], x.degrees[j]
            ));
            break;
        }
    }
    r.record("relative_curvature", fail);
    r
}

/// h̃_X(E): right A-linear maps E ⊗ A → X ⊗ A with d(φ) = 𝕏φ − (−1)^{|φ|}φ𝔼.
pub fn htilde_eval(x: &QuasiCohesiveModule, e: &Arc<CohesiveModule>) -> Result<HomComplex> {
    if *x.algebra != *e.algebra {
        return Err(Error::BaseMismatch);
    }
    let xm = Arc::new(x.as_free_module()?);
    hom_complex(e, &xm)
}

/// A right A⁰-module of finite dimension over the field, by action matrices
/// indexed like `basis_of_degree(0)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RightModule {
    pub dim: usize,
    pub action: Vec<SparseMatrix>,
}

impl RightModule {
    /// A⁰ acting on itself by right multiplication.
    pub fn regular(a: &CurvedDga) -> RightModule {
        let zero = a.basis_of_degree(0);
        let n = zero.len();
        let pos: BTreeMap<&BasisKey, usize> = zero.iter().enumerate().map(|(i, k)| (k, i)).collect();
        let action = zero
            .iter()
            .map(|b| {
                let mut m = SparseMatrix::zeros(n, n);
                for (j, k) in zero.iter().enumerate() {
                    let p = a.multiply(&AElement::basis(k.clone()), &AElement::basis(b.clone()));
                    for (k2, c) in p.terms() {
                        m.add_to(pos[k2], j, c);
                    }
                }
                m
            })
            .collect();
        RightModule { dim: n, action }
    }

    /// The free module of rank r.
    pub fn free(a: &CurvedDga, r: usize) -> RightModule {
        let reg = RightModule::regular(a);
        let action = reg
            .action
            .iter()
            .map(|m| {
                let mut big = SparseMatrix::zeros(r * reg.dim, r * reg.dim);
                for b in 0..r {
                    for ((i, j), c) in m.entries() {
                        big.set(b * reg.dim + i, b * reg.dim + j, c.clone());
                    }
                }
                big
            })
            .collect();
        RightModule { dim: r * reg.dim, action }
    }

    pub fn of(x: &QuasiCohesiveModule) -> RightModule {
        RightModule { dim: x.dim(), action: x.action.clone() }
    }
}

/// φ(x) = Σ_k y_k·φ_k(x) with φ_k ∈ Hom_A(C, A) and y_k ∈ D.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NuclearWitness {
    /// φ_k as dim A⁰ × dim C matrices.
    pub functionals: Vec<SparseMatrix>,
    pub elements: Vec<Vec<Scalar>>,
}

impl NuclearWitness {
    /// The map x ↦ Σ_k y_k·φ_k(x) as a dim D × dim C matrix.
    pub fn evaluate(&self, d: &RightModule) -> SparseMatrix {
        let cols = self.functionals.first().map_or(0, |f| f.cols());
        let mut out = SparseMatrix::zeros(d.dim, cols);
        for (f, y) in self.functionals.iter().zip(&self.elements) {
            out = out.add(&rank_one_map(d, y, f)).expect("same shape");
        }
        out
    }
}

/// x ↦ y·f(x) = Σ_b f_b(x)·(y·b).
fn rank_one_map(d: &RightModule, y: &[Scalar], f: &SparseMatrix) -> SparseMatrix {
    let mut out = SparseMatrix::zeros(d.dim, f.cols());
    for (b, act) in d.action.iter().enumerate() {
        let yb = act.mul_vec(y).expect("shape");
        for ((row, col), c) in f.entries() {
            if *row != b {
                continue;
            }
            for (i, v) in yb.iter().enumerate() {
                if !v.is_zero() {
                    out.add_to(i, *col, &(v * c));
                }
            }
        }
    }
    out
}

fn flatten(m: &SparseMatrix) -> Vec<Scalar> {
    let mut v = vec![Scalar::zero(); m.rows() * m.cols()];
    for ((i, j), c) in m.entries() {
        v[i * m.cols() + j] = c.clone();
    }
    v
}

/// Searches for a nuclear factorization of the A⁰-linear map φ: C → D by
/// solving for φ in the image of Hom_A(C, A) ⊗ D → Hom_A(C, D).
pub fn is_nuclear(a: &CurvedDga, c: &RightModule, d: &RightModule, phi: &SparseMatrix) -> Result<Option<NuclearWitness>> {
    if phi.rows() != d.dim || phi.cols() != c.dim {
        return Err(Error::DimensionMismatch(format!("φ must be {}×{}", d.dim, c.dim)));
    }
    if phi.is_zero() {
        return Ok(Some(NuclearWitness { functionals: Vec::new(), elements: Vec::new() }));
    }
    let reg = RightModule::regular(a);
    let (m, n) = (reg.dim, c.dim);
    // Hom_A(C, A): F with F·R^C_b = R^A_b·F for every b.
    let mut eqs = SparseMatrix::zeros(reg.action.len() * m * n, m * n);
    let mut row = 0;
    for (rc, ra) in c.action.iter().zip(&reg.action) {
        for i in 0..m {
            for j in 0..n {
                for k in 0..n {
                    let v = rc.get(k, j);
                    if !v.is_zero() {
                        eqs.add_to(row, i * n + k, &v);
                    }
                }
                for k in 0..m {
                    let v = ra.get(i, k);
                    if !v.is_zero() {
                        eqs.add_to(row, k * n + j, &(-&v));
                    }
                }
                row += 1;
            }
        }
    }
    let homs: Vec<SparseMatrix> = rank_kernel_image(&eqs)
        .kernel
        .iter()
        .map(|v| {
            let mut f = SparseMatrix::zeros(m, n);
            for (idx, x) in v.iter().enumerate() {
                if !x.is_zero() {
                    f.set(idx / n, idx % n, x.clone());
                }
            }
            f
        })
        .collect();
    let mut generators = Vec::new();
    let mut columns = Vec::new();
    for f in &homs {
        for s in 0..d.dim {
            let mut y = vec![Scalar::zero(); d.dim];
            y[s] = Scalar::one();
            columns.push(flatten(&rank_one_map(d, &y, f)));
            generators.push((f.clone(), y));
        }
    }
    let sys = SparseMatrix::from_columns(d.dim * n, &columns);
    let Some(coef) = solve_linear(&sys, &flatten(phi))? else { return Ok(None) };
    let mut w = NuclearWitness { functionals: Vec::new(), elements: Vec::new() };
    for (t, f) in homs.iter().enumerate() {
        let y: Vec<Scalar> = (0..d.dim).map(|s| coef[t * d.dim + s].clone()).collect();
        if y.iter().any(|x| !x.is_zero()) {
            w.functionals.push(f.clone());
            w.elements.push(y);
        }
    }
    debug_assert_eq!(w.evaluate(d), *phi);
    Ok(Some(w))
}

/// Checks that h⁰ (degree −1) and T⁰ (degree 0) are A⁰-linear, that
/// 𝕏⁰h⁰ + h⁰𝕏⁰ = 1 − T⁰, and that T⁰ is nuclear.
pub fn quasi_finite_check(x: &QuasiCohesiveModule, h0: &SparseMatrix, t0: &SparseMatrix) -> ValidationReport {
    let mut r = ValidationReport::new();
    let n = x.dim();
    if h0.rows() != n || h0.cols() != n || t0.rows() != n || t0.cols() != n {
        r.fail("shape", format!("h⁰ and T⁰ must be {n}×{n}"));
        return r;
    }
    let bad_h = h0.entries().find(|((i, j), _)| x.degrees[*i] != x.degrees[*j] - 1);
    let bad_t = t0.entries().find(|((i, j), _)| x.degrees[*i] != x.degrees[*j]);
    r.record(
        "grading",
        match (bad_h, bad_t) {
            (Some(((i, j), _)), _) => Some(format!("h⁰ sends {} to {}", x.basis[*j], x.basis[*i])),
            (_, Some(((i, j), _))) => Some(format!("T⁰ sends {} to {}", x.basis[*j], x.basis[*i])),
            _ => None,
        },
    );
    let linear = x.action.iter().all(|act| {
        h0.mul(act).ok() == act.mul(h0).ok() && t0.mul(act).ok() == act.mul(t0).ok()
    });
    r.record("a_linear", (!linear).then(|| "h⁰ or T⁰ does not commute with the A⁰-action".to_string()));
    let k0 = x.zero_block();
    let lhs = k0.mul(h0).and_then(|p| p.add(&h0.mul(&k0)?)).expect("square");
    let rhs = SparseMatrix::identity(n).sub(t0).expect("square");
    let residual = lhs.sub(&rhs).expect("square");
    r.record(
        "homotopy",
        (!residual.is_zero()).then(|| format!("residual [𝕏⁰,h⁰] − (1 − T⁰) = {:?}", dense_text(&residual))),
    );
    let m = RightModule::of(x);
    let nuclear = is_nuclear(&x.algebra, &m, &m, t0).ok().flatten();
    r.record("nuclear", nuclear.is_none().then(|| "no nuclear factorization of T⁰".to_string()));
    r
}

fn dense_text(m: &SparseMatrix) -> Vec<Vec<String>> {
    m.to_dense().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect()
}

/// The scalar part of an A⁰-valued matrix when A⁰ is the field.
fn scalar_matrix(a: &CurvedDga, m: &AMatrix) -> SparseMatrix {
    let u = a.unit_key();
    let mut out = SparseMatrix::zeros(m.rows(), m.cols());
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let c = m.get(i, j).coeff(&u);
            if !c.is_zero() {
                out.set(i, j, c);
            }
        }
    }
    out
}

/// A complex of field vector spaces with a generator in each basis position.
struct GradedComplex {
    by_degree: BTreeMap<i32, Vec<usize>>,
    complex: FiniteComplex,
}

impl GradedComplex {
    fn new(degrees: &[i32], k0: &SparseMatrix) -> Result<GradedComplex> {
        let mut by_degree: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
        for (i, &d) in degrees.iter().enumerate() {
            by_degree.entry(d).or_default().push(i);
        }
        let lo = by_degree.keys().next().copied().unwrap_or(0);
        let hi = by_degree.keys().last().copied().unwrap_or(0);
        let gens = |k: i32| by_degree.get(&k).cloned().unwrap_or_default();
        let dims: Vec<usize> = (lo..=hi).map(|k| gens(k).len()).collect();
        let mut diffs = Vec::new();
        for k in lo..hi {
            let (src, tgt) = (gens(k), gens(k + 1));
            let mut m = SparseMatrix::zeros(tgt.len(), src.len());
            for (b, &j) in src.iter().enumerate() {
                for (a, &i) in tgt.iter().enumerate() {
                    let c = k0.get(i, j);
                    if !c.is_zero() {
                        m.set(a, b, c);
                    }
                }
            }
            diffs.push(m);
        }
        let complex = FiniteComplex::new(lo, dims, diffs)?;
        for ((i, j), _) in k0.entries() {
            if degrees[*i] != degrees[*j] + 1 {
                return Err(Error::DimensionMismatch(format!("𝔼⁰ entry ({i},{j}) does not raise degree by one")));
            }
        }
        complex.check()?;
        Ok(GradedComplex { by_degree, complex })
    }

    fn gens(&self, k: i32) -> Vec<usize> {
        self.by_degree.get(&k).cloned().unwrap_or_default()
    }

    fn restrict(&self, k: i32, v: &[Scalar]) -> Vec<Scalar> {
        self.gens(k).iter().map(|&i| v[i].clone()).collect()
    }

    fn embed(&self, k: i32, v: &[Scalar], n: usize) -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(); n];
        for (x, &i) in v.iter().zip(&self.gens(k)) {
            out[i] = x.clone();
        }
        out
    }

    /// Coordinates of the class of a degree-k cocycle in the basis `reps`.
    fn class_coords(&self, k: i32, reps: &[Vec<Scalar>], w: &[Scalar]) -> Result<Vec<Scalar>> {
        let prev = self.complex.diff(k - 1);
        let mut cols: Vec<Vec<Scalar>> = reps.to_vec();
        cols.extend((0..prev.cols()).map(|j| prev.column(j)));
        let m = SparseMatrix::from_columns(w.len(), &cols);
        let x = solve_linear(&m, w)?.ok_or_else(|| Error::SolveFailed(format!("not a cocycle in degree {k}")))?;
        Ok(x[..reps.len()].to_vec())
    }
}

/// Cohomology representatives of (E, 𝔼⁰) per degree, as generator-coordinate
/// vectors; these fix the bases in which `lift_connection` reads its input.
pub fn cohomology_representatives(e: &CohesiveModule) -> Result<BTreeMap<i32, Vec<Vec<Scalar>>>> {
    if !degree_zero_is_field(&e.algebra) {
        return Err(Error::Unsupported("the degree-zero part of the base is not the ground field".into()));
    }
    let g = GradedComplex::new(&e.degrees, &scalar_matrix(&e.algebra, &e.block(0)))?;
    Ok(g.complex
        .degrees()
        .map(|k| (k, cohomology_basis(&g.complex, k).iter().map(|v| g.embed(k, v, e.rank())).collect()))
        .collect())
}

/// Lifts connections on the cohomology of (E, 𝔼⁰) to a degree-preserving
/// H̃: E → E ⊗ A¹ with H̃𝔼⁰ = 𝔼⁰H̃ inducing `hconn[k]` on H^k, where
/// column b of `hconn[k]` is ℍ(z_b) in the basis of
/// `cohomology_representatives`. The lift is found by one joint linear
/// solve per basis element of A¹.
pub fn lift_connection(e: &CohesiveModule, hconn: &BTreeMap<i32, AMatrix>) -> Result<AMatrix> {
    let a = &e.algebra;
    let reps = cohomology_representatives(e)?;
    let k0 = scalar_matrix(a, &e.block(0));
    let g = GradedComplex::new(&e.degrees, &k0)?;
    let n = e.rank();
    for (k, z) in &reps {
        let h = hconn.get(k).map_or((z.len(), z.len()), |m| (m.rows(), m.cols()));
        if h != (z.len(), z.len()) {
            return Err(Error::DimensionMismatch(format!("H^{k} has dimension {}", z.len())));
        }
    }
    // Unknowns: H[l][i] for |e_l| = |e_i|, then u_{k,b} ∈ E^{k−1}.
    let mut var = BTreeMap::new();
    for i in 0..n {
        for l in 0..n {
            if e.degrees[l] == e.degrees[i] {
                let t = var.len();
                var.insert((0usize, l, i), t);
            }
        }
    }
    for (k, z) in &reps {
        for b in 0..z.len() {
            for &m in &g.gens(k - 1) {
                let t = var.len();
                var.insert((1 + b, m, (*k - g.complex.lo()) as usize), t);
            }
        }
    }
    let u_var = |k: i32, b: usize, m: usize| var[&(1 + b, m, (k - g.complex.lo()) as usize)];
    let mut out = AMatrix::zeros(n, n);
    for key in a.basis_of_degree(1) {
        // Rows tagged by degree for the descending diagnosis.
        let mut rows: Vec<(i32, Vec<(usize, Scalar)>, Scalar)> = Vec::new();
        for i in 0..n {
            for l in 0..n {
                // (H K0 − K0 H)[l][i] = 0.
                let mut row = Vec::new();
                for m in 0..n {
                    let c = k0.get(m, i);
                    if !c.is_zero() {
                        if let Some(&t) = var.get(&(0, l, m)) {
                            row.push((t, c));
                        }
                    }
                    let c = k0.get(l, m);
                    if !c.is_zero() {
                        if let Some(&t) = var.get(&(0, m, i)) {
                            row.push((t, -&c));
                        }
                    }
                }
                if !row.is_empty() {
                    rows.push((e.degrees[i], row, Scalar::zero()));
                }
            }
        }
        for (k, z) in &reps {
            let hm = hconn.get(k);
            for (b, zb) in z.iter().enumerate() {
                for &l in &g.gens(*k) {
                    // (H z_b)[l] − (K0 u_b)[l] = Σ_c z_c[l] M[c][b].
                    let mut row = Vec::new();
                    for (i, zi) in zb.iter().enumerate() {
                        if !zi.is_zero() {
                            row.push((var[&(0, l, i)], zi.clone()));
                        }
                    }
                    for &m in &g.gens(k - 1) {
                        let c = k0.get(l, m);
                        if !c.is_zero() {
                            row.push((u_var(*k, b, m), -&c));
                        }
                    }
                    let mut rhs = Scalar::zero();
                    if let Some(hm) = hm {
                        for (c, zc) in z.iter().enumerate() {
                            rhs = &rhs + &(&zc[l] * &hm.get(c, b).coeff(&key));
                        }
                    }
                    rows.push((*k, row, rhs));
                }
            }
        }
        let solve = |min_tag: i32| -> Result<Option<Vec<Scalar>>> {
            let kept: Vec<_> = rows.iter().filter(|r| r.0 >= min_tag).collect();
            let mut m = SparseMatrix::zeros(kept.len(), var.len());
            let mut rhs = Vec::with_capacity(kept.len());
            for (ri, (_, row, b)) in kept.iter().enumerate() {
                for (t, c) in row {
                    m.add_to(ri, *t, c);
                }
                rhs.push(b.clone());
            }
            solve_linear(&m, &rhs)
        };
        let x = match solve(i32::MIN)? {
            Some(x) => x,
            None => {
                let (lo, hi) = (g.complex.lo(), g.complex.hi());
                let bad = (lo..=hi).rev().find(|&k| matches!(solve(k), Ok(None))).unwrap_or(lo);
                return Err(Error::LiftFailed(bad));
            }
        };
        for (&(tag, l, i), &t) in &var {
            if tag == 0 && !x[t].is_zero() {
                out.get_mut(l, i).add_term(key.clone(), &x[t]);
            }
        }
    }
    Ok(out)
}

/// The connection induced by (−1)^k 𝕏¹ on H^k(X, 𝕏⁰) in the basis of the
/// given representatives.
fn induced_connection(
    a: &CurvedDga,
    g: &GradedComplex,
    x1: &AMatrix,
    reps: &BTreeMap<i32, Vec<Vec<Scalar>>>,
    n: usize,
) -> Result<BTreeMap<i32, AMatrix>> {
    let mut out = BTreeMap::new();
    for (k, z) in reps {
        let mut m = AMatrix::zeros(z.len(), z.len());
        let zs: Vec<Vec<Scalar>> = z.iter().map(|v| g.restrict(*k, v)).collect();
        for (b, zb) in z.iter().enumerate() {
            let col: Vec<AElement> = zb.iter().map(|c| a.scalar(c.clone())).collect();
            let img = x1.apply(a, &col);
            for key in a.basis_of_degree(1) {
                let w: Vec<Scalar> = (0..n).map(|l| img[l].coeff(&key).signed(k.rem_euclid(2) == 1)).collect();
                let coords = g.class_coords(*k, &zs, &g.restrict(*k, &w))?;
                for (c, v) in coords.iter().enumerate() {
                    m.get_mut(c, b).add_term(key.clone(), v);
                }
            }
        }
        out.insert(*k, m);
    }
    Ok(out)
}

/// Cone of a partial morphism: X ⊕ E[1] with connection [[C_X, e], [0, −C_E]].
fn partial_cone(x: &CohesiveModule, e: &CohesiveModule, map: &AMatrix) -> Result<CohesiveModule> {
    let e1 = e.shift(1);
    let conn = AMatrix::block(&x.connection, map, &AMatrix::zeros(e.rank(), x.rank()), &e1.connection)?;
    let gens = x.generators.iter().cloned().chain(e1.generators.iter().map(|g| format!("{g}[1]"))).collect();
    let degs = x.degrees.iter().copied().chain(e1.degrees.iter().copied()).collect();
    CohesiveModule::new("L", x.algebra.clone(), gens, degs, conn)
}

/// Solves C⁰U + UC⁰ = −D for U supported on the E[1] columns of the cone,
/// one scalar system per basis element of A^n.
fn solve_step(a: &CurvedDga, l: &CohesiveModule, d: &AMatrix, nx: usize, n: u32) -> Result<AMatrix> {
    let k0 = scalar_matrix(a, &l.block(0));
    let size = l.rank();
    let mut slots = BTreeMap::new();
    for r in 0..size {
        for j in nx..size {
            if l.degrees[j] + 1 - l.degrees[r] == n as i32 {
                let t = slots.len();
                slots.insert((r, j), t);
            }
        }
    }
    let mut u = AMatrix::zeros(size, size);
    for key in a.basis_of_degree(n) {
        let eq = |r: usize, j: usize| r * (size - nx) + (j - nx);
        let mut m = SparseMatrix::zeros(size * (size - nx), slots.len());
        let mut rhs = vec![Scalar::zero(); size * (size - nx)];
        for r in 0..size {
            for j in nx..size {
                rhs[eq(r, j)] = -&d.get(r, j).coeff(&key);
            }
        }
        for (&(r, j), &t) in &slots {
            // U = E_rj contributes K0[:, r] in column j and K0[j, :] in row r.
            for i in 0..size {
                let c = k0.get(i, r);
                if !c.is_zero() {
                    m.add_to(eq(i, j), t, &c);
                }
            }
            for c2 in nx..size {
                let c = k0.get(j, c2);
                if !c.is_zero() {
                    m.add_to(eq(r, c2), t, &c);
                }
            }
        }
        let x = solve_linear(&m, &rhs)?.ok_or_else(|| {
            Error::SolveFailed(format!(
                "−D is not a boundary at form degree {n} (component {}); the cone of e⁰ is not acyclic there",
                a.key_name(&key)
            ))
        })?;
        for (&(r, j), &t) in &slots {
            if !x[t].is_zero() {
                u.get_mut(r, j).add_term(key.clone(), &x[t]);
            }
        }
    }
    Ok(u)
}

/// The invariant after step n: F_𝕃 vanishes in every form degree ≤ n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransferStep {
    pub form_degree: u32,
    pub invariant_holds: bool,
}

#[derive(Clone, Debug)]
pub struct Cohesified {
    pub module: Arc<CohesiveModule>,
    /// Closed degree-0 e: E → X with e⁰ the input quasi-isomorphism.
    pub morphism: HomMorphism,
    pub steps: Vec<TransferStep>,
    pub report: ValidationReport,
}

/// Builds a Z-connection 𝔼 = 𝔼⁰ + 𝔼¹ + … on E and e = e⁰ + e¹ + … closed in
/// h̃_X(E). Step one transports the cohomology connection of 𝕏 through e⁰,
/// lifts it, and corrects the lift together with e¹; later steps solve
/// −D = [𝕃⁰, 𝕃̃ⁿ] in the acyclic cone L = X ⊕ E[1].
pub fn cohesify(x: &QuasiCohesiveModule, e0: &CohesiveModule, map0: &AMatrix) -> Result<Cohesified> {
    let a = x.algebra.clone();
    if !degree_zero_is_field(&a) {
        return Err(Error::Unsupported(
            "cohesify needs a table-kernel base whose degree-zero part is the ground field".into(),
        ));
    }
    if *e0.algebra != *a {
        return Err(Error::BaseMismatch);
    }
    if e0.connection.max_form_degree(&a).unwrap_or(0) > 0 {
        return Err(Error::Unsupported("E⁰ must carry only its degree-zero differential".into()));
    }
    if map0.rows() != x.dim() || map0.cols() != e0.rank() || map0.max_form_degree(&a).unwrap_or(0) > 0 {
        return Err(Error::DimensionMismatch("e⁰ must be a scalar dim X × rank E matrix".into()));
    }
    let xm = x.as_free_module()?;
    let (nx, ne) = (xm.rank(), e0.rank());
    let gx = GradedComplex::new(&xm.degrees, &scalar_matrix(&a, &xm.block(0)))?;
    let ge = GradedComplex::new(&e0.degrees, &scalar_matrix(&a, &e0.block(0)))?;
    let s0 = scalar_matrix(&a, map0);
    let mut maps = BTreeMap::new();
    for ((i, j), c) in s0.entries() {
        if xm.degrees[*i] != e0.degrees[*j] {
            return Err(Error::NotQuasiIso(format!("e⁰ sends {} to a different degree", e0.generators[*j])));
        }
        let d = e0.degrees[*j];
        let (r, col) = (
            gx.gens(d).iter().position(|&t| t == *i).expect("indexed"),
            ge.gens(d).iter().position(|&t| t == *j).expect("indexed"),
        );
        maps.entry(d)
            .or_insert_with(|| SparseMatrix::zeros(gx.complex.dim(d), ge.complex.dim(d)))
            .set(r, col, c.clone());
    }
    let chain = ChainMap { source: ge.complex.clone(), target: gx.complex.clone(), maps };
    match is_quasi_iso(&chain) {
        Ok(true) => {}
        Ok(false) => return Err(Error::NotQuasiIso("the cone of e⁰ has cohomology".into())),
        Err(Error::NotChainMap(k)) => {
            return Err(Error::NotQuasiIso(format!("e⁰ is not a chain map in degree {k}")))
        }
        Err(err) => return Err(err),
    }
    let mut report = ValidationReport::new();
    report.pass("quasi_iso");

    // Step one: transport ℍ, lift, then correct jointly with e¹.
    let reps_x = cohomology_representatives(&xm)?;
    let reps_e = cohomology_representatives(e0)?;
    let hx = induced_connection(&a, &gx, &xm.block(1), &reps_x, nx)?;
    let mut he = BTreeMap::new();
    for (k, ze) in &reps_e {
        let zx: Vec<Vec<Scalar>> = reps_x[k].iter().map(|v| gx.restrict(*k, v)).collect();
        let h = ze.len();
        // Column b of t: the class of e⁰(y_b) in the basis z_c.
        let mut t = SparseMatrix::zeros(h, h);
        for (b, y) in ze.iter().enumerate() {
            let img = s0.mul_vec(y)?;
            for (c, v) in gx.class_coords(*k, &zx, &gx.restrict(*k, &img))?.iter().enumerate() {
                t.set(c, b, v.clone());
            }
        }
        let tinv_cols: Vec<Vec<Scalar>> = (0..h)
            .map(|b| {
                let mut unit = vec![Scalar::zero(); h];
                unit[b] = Scalar::one();
                solve_linear(&t, &unit)?.ok_or_else(|| Error::NotQuasiIso(format!("H^{k}(e⁰) is not invertible")))
            })
            .collect::<Result<_>>()?;
        let tinv = SparseMatrix::from_columns(h, &tinv_cols);
        let mut m = AMatrix::zeros(h, h);
        for key in a.basis_of_degree(1) {
            let mut mk = SparseMatrix::zeros(h, h);
            for r in 0..h {
                for c in 0..h {
                    mk.set(r, c, hx[k].get(r, c).coeff(&key));
                }
            }
            let conj = tinv.mul(&mk)?.mul(&t)?;
            for ((r, c), v) in conj.entries() {
                m.get_mut(*r, *c).add_term(key.clone(), v);
            }
        }
        he.insert(*k, m);
    }
    let htilde = lift_connection(e0, &he)?;
    let e_tilde1 = htilde.map(|l, _, v| v.signed(e0.degrees[l].rem_euclid(2) == 1));
    let mut conn_e = e0.connection.add(&e_tilde1)?;
    let mut map = map0.clone();
    let mut steps = Vec::new();
    let top = a.top_degree();
    for n in 1..=top {
        let em = CohesiveModule::new(&e0.name, a.clone(), e0.generators.clone(), e0.degrees.clone(), conn_e.clone())?;
        let l = partial_cone(&xm, &em, &map)?;
        let d = l.curvature_matrix().form_component(&a, n);
        if !d.submatrix(0..nx + ne, 0..nx).is_zero() {
            return Err(Error::SolveFailed(format!("F_𝕏 ≠ 0 at form degree {n}")));
        }
        let u = solve_step(&a, &l, &d, nx, n)?;
        map = map.add(&u.submatrix(0..nx, nx..nx + ne))?;
        conn_e = conn_e.sub(&u.submatrix(nx..nx + ne, nx..nx + ne))?;
        let em = CohesiveModule::new(&e0.name, a.clone(), e0.generators.clone(), e0.degrees.clone(), conn_e.clone())?;
        let f = partial_cone(&xm, &em, &map)?.curvature_matrix();
        let holds = (0..=n).all(|k| f.form_component(&a, k).is_zero());
        if n == 1 {
            let (e0m, e1m) = (em.block(0), em.block(1));
            let anti = e0m.mul(&a, &e1m)?.add(&e1m.mul(&a, &e0m)?)?;
            report.record("ide_anticommute", (!anti.is_zero()).then(|| "𝔼⁰𝔼¹ + 𝔼¹𝔼⁰ ≠ 0".to_string()));
            let m0 = map.form_component(&a, 0);
            let m1 = map.form_component(&a, 1);
            let lhs = m0.mul(&a, &e1m)?.sub(&xm.block(1).mul(&a, &m0)?)?;
            let rhs = xm.block(0).mul(&a, &m1)?.sub(&m1.mul(&a, &e0m)?)?;
            report.record("ide_homotopy", (lhs != rhs).then(|| "e⁰𝔼¹ − 𝕏¹e⁰ ≠ 𝕏⁰e¹ − e¹𝔼⁰".to_string()));
        }
        report.record(&format!("step_{n}"), (!holds).then(|| format!("Σ𝕃^i𝕃^{{k−i}} + r_c ≠ 0 after step {n}")));
        steps.push(TransferStep { form_degree: n, invariant_holds: holds });
        if !holds {
            return Err(Error::SolveFailed(format!("step invariant fails after form degree {n}")));
        }
    }
    let module = Arc::new(CohesiveModule::new(&e0.name, a.clone(), e0.generators.clone(), e0.degrees.clone(), conn_e)?);
    let xa = Arc::new(xm);
    let morphism = HomMorphism::new(module.clone(), xa, 0, map)?;
    let m = module.check();
    let module_ok = m.passed();
    report.extend("module.", m);
    report.record("closed", (!morphism.is_closed()).then(|| "d(e) ≠ 0".to_string()));
    let contractible = null_homotopy_solve(&cone(&morphism)?.cone)?.is_some();
    report.record("cone_contractible", (!contractible).then(|| "cone(e) has no contracting homotopy".to_string()));
    let equivalence = is_homotopy_equivalence(&morphism)?;
    report.record("homotopy_equivalence", (!equivalence).then(|| "e⁰ criterion fails".to_string()));
    if !(module_ok && morphism.is_closed() && contractible) {
        return Err(Error::SolveFailed("post-conditions failed on the constructed module".into()));
    }
    Ok(Cohesified { module, morphism, steps, report })
}

/// Input for one bundled transfer run.
#[derive(Clone, Debug)]
pub struct TransferScenario {
    pub name: String,
    pub x: QuasiCohesiveModule,
    pub e0: CohesiveModule,
    pub map0: AMatrix,
}

fn aff1() -> Arc<CurvedDga> {
    Arc::new(crate::models::chevalley_eilenberg(&crate::models::LieAlgebraData::aff1()))
}

/// The three bundled scenarios: an already-cohesive module with e⁰ = id, a
/// complex over the field with a contractible summand, and a CE(aff(1))
/// module mixing the trivial module with an acyclic piece through 𝕏¹.
pub fn transfer_scenarios() -> Vec<TransferScenario> {
    let mut out = Vec::new();
    let a = aff1();
    let el = |s: &str| a.parse_element(s).expect("bundled element");

    // u, v in degree 0 with 𝕏(u) = u·a1, 𝕏(v) = u·a2.
    let mut c = AMatrix::zeros(2, 2);
    c.set(0, 0, el("a1"));
    c.set(0, 1, el("a2"));
    let gens = vec!["u".to_string(), "v".to_string()];
    let x = QuasiCohesiveModule::over_field("X", a.clone(), gens.clone(), vec![0, 0], c).expect("valid");
    let e0 = CohesiveModule::new("E", a.clone(), gens, vec![0, 0], AMatrix::zeros(2, 2)).expect("valid");
    out.push(TransferScenario { name: "identity-aff1".into(), x, e0, map0: AMatrix::identity(&a, 2) });

    // x0 in degree 0 plus y → z (degrees −1, 0); e⁰(x0) = x0 + z.
    let k = Arc::new(CurvedDga::field());
    let mut c = AMatrix::zeros(3, 3);
    c.set(2, 1, k.unit());
    let x = QuasiCohesiveModule::over_field(
        "X",
        k.clone(),
        vec!["x0".into(), "y".into(), "z".into()],
        vec![0, -1, 0],
        c,
    )
    .expect("valid");
    let e0 = CohesiveModule::rank_one("E", k.clone(), 0);
    let mut m = AMatrix::zeros(3, 1);
    m.set(0, 0, k.unit());
    m.set(2, 0, k.unit());
    out.push(TransferScenario { name: "contractible-field".into(), x, e0, map0: m });

    // x (0), y (−1), z (0): 𝕏(x) = x·a1 + z·a2 + y·2a1a2, 𝕏(y) = z.
    let mut c = AMatrix::zeros(3, 3);
    c.set(0, 0, el("a1"));
    c.set(2, 0, el("a2"));
    c.set(1, 0, el("2*a1^a2"));
    c.set(2, 1, a.unit());
    let x = QuasiCohesiveModule::over_field(
        "X",
        a.clone(),
        vec!["x".into(), "y".into(), "z".into()],
        vec![0, -1, 0],
        c,
    )
    .expect("valid");
    let e0 = CohesiveModule::rank_one("E", a.clone(), 0);
    let mut m = AMatrix::zeros(3, 1);
    m.set(0, 0, a.unit());
    out.push(TransferScenario { name: "mixing-aff1".into(), x, e0, map0: m });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{chevalley_eilenberg, LieAlgebraData};

    #[test]
    fn bundled_scenarios_are_quasi_cohesive() {
        for s in transfer_scenarios() {
            let r = check_quasi_cohesive(&s.x);
            assert!(r.passed(), "{}: {:?}", s.name, r.failures().collect::<Vec<_>>());
        }
    }

    #[test]
    fn cohesify_bundled_scenarios() {
        for s in transfer_scenarios() {
            let out = cohesify(&s.x, &s.e0, &s.map0).unwrap();
            assert!(out.report.passed(), "{}: {:?}", s.name, out.report.failures().collect::<Vec<_>>());
            assert!(out.steps.iter().all(|t| t.invariant_holds));
        }
    }

    #[test]
    fn identity_scenario_returns_input() {
        let s = &transfer_scenarios()[0];
        let out = cohesify(&s.x, &s.e0, &s.map0).unwrap();
        assert_eq!(out.module.connection, s.x.connection);
        assert_eq!(out.morphism.matrix, s.map0);
    }

    #[test]
    fn mixing_scenario_transports_the_twist() {
        let s = &transfer_scenarios()[2];
        let out = cohesify(&s.x, &s.e0, &s.map0).unwrap();
        let a = &out.module.algebra;
        assert_eq!(a.format_element(out.module.connection.get(0, 0)), "1*a1");
        let e = out.module.clone();
        let dims = hom_complex(&e, &e).unwrap().cohomology_dims().unwrap();
        assert_eq!(dims, BTreeMap::from([(0, 1), (1, 1), (2, 0)]));
    }

    #[test]
    fn non_quasi_iso_is_rejected() {
        let s = &transfer_scenarios()[2];
        let zero = AMatrix::zeros(3, 1);
        assert!(matches!(cohesify(&s.x, &s.e0, &zero), Err(Error::NotQuasiIso(_))));
    }

    fn dual_numbers() -> Arc<CurvedDga> {
        let t = crate::algebra::TableAlgebra::truncated_polynomial("t", 0, 2);
        Arc::new(CurvedDga::from_table("k[t]/t2", t, vec![AElement::zero(); 2], AElement::zero()).unwrap())
    }

    #[test]
    fn free_module_over_dual_numbers_is_quasi_cohesive() {
        let a = dual_numbers();
        let mut c = AMatrix::zeros(2, 2);
        c.set(1, 0, a.parse_element("t").unwrap());
        let e = CohesiveModule::new("E", a.clone(), vec!["p".into(), "q".into()], vec![0, 1], c).unwrap();
        let x = QuasiCohesiveModule::from_cohesive(&e).unwrap();
        assert_eq!(x.dim(), 4);
        assert!(check_quasi_cohesive(&x).passed());
        assert!(x.as_free_module().is_err());
        let s = &transfer_scenarios()[0];
        let m = s.x.as_free_module().unwrap();
        assert!(check_quasi_cohesive(&QuasiCohesiveModule::from_cohesive(&m).unwrap()).passed());
    }

    #[test]
    fn non_multiplicative_action_fails() {
        let a = dual_numbers();
        // t acting as the identity gives t·t = 1 ≠ 0.
        let x = QuasiCohesiveModule::new(
            "X",
            a,
            vec!["p".into()],
            vec![0],
            vec![SparseMatrix::identity(1), SparseMatrix::identity(1)],
            AMatrix::zeros(1, 1),
        )
        .unwrap();
        assert!(!check_quasi_cohesive(&x).get("action").unwrap().passed);
    }

    #[test]
    fn unbounded_zero_complex_passes() {
        let k = Arc::new(CurvedDga::field());
        let degs: Vec<i32> = (-3..=3).collect();
        let names = degs.iter().map(|d| format!("x{d}")).collect();
        let x = QuasiCohesiveModule::over_field("X", k, names, degs, AMatrix::zeros(7, 7)).unwrap();
        assert!(check_quasi_cohesive(&x).passed());
    }

    #[test]
    fn non_square_zero_differential_fails_at_degree() {
        let k = Arc::new(CurvedDga::field());
        let mut c = AMatrix::zeros(2, 2);
        c.set(1, 0, k.unit());
        c.set(0, 1, k.unit());
        let x = QuasiCohesiveModule::over_field("X", k, vec!["p".into(), "q".into()], vec![0, 1], c).unwrap();
        let r = check_quasi_cohesive(&x);
        let f = r.get("relative_curvature").unwrap();
        assert!(!f.passed);
        assert!(f.detail.as_deref().unwrap_or("").contains("degree 0"), "{:?}", f.detail);
    }

    #[test]
    fn nuclear_examples() {
        let k = CurvedDga::field();
        let c = RightModule::free(&k, 1);
        let w = is_nuclear(&k, &c, &c, &SparseMatrix::identity(1)).unwrap().unwrap();
        assert_eq!(w.functionals.len(), 1);
        assert_eq!(w.evaluate(&c), SparseMatrix::identity(1));
        let z = is_nuclear(&k, &c, &c, &SparseMatrix::zeros(1, 1)).unwrap().unwrap();
        assert!(z.functionals.is_empty());
        let c3 = RightModule::free(&k, 3);
        let phi = SparseMatrix::from_ints(&[&[1, 2, 0], &[0, 1, 5], &[3, 0, 0]]);
        assert_eq!(is_nuclear(&k, &c3, &c3, &phi).unwrap().unwrap().evaluate(&c3), phi);
    }

    #[test]
    fn quasi_finite_examples() {
        let k = Arc::new(CurvedDga::field());
        let mut c = AMatrix::zeros(2, 2);
        c.set(1, 0, k.unit());
        let x = QuasiCohesiveModule::over_field("X", k, vec!["p".into(), "q".into()], vec![-1, 0], c).unwrap();
        let n = 2;
        assert!(quasi_finite_check(&x, &SparseMatrix::zeros(n, n), &SparseMatrix::identity(n)).passed());
        let h = SparseMatrix::from_ints(&[&[0, 1], &[0, 0]]);
        assert!(quasi_finite_check(&x, &h, &SparseMatrix::zeros(n, n)).passed());
        let r = quasi_finite_check(&x, &h.scale(&Scalar::from_int(-1)), &SparseMatrix::zeros(n, n));
        let f = r.get("homotopy").unwrap();
        assert!(!f.passed && f.detail.as_deref().unwrap_or("").contains("residual"));
    }

    #[test]
    fn lift_on_single_degree_is_the_given_connection() {
        let a = Arc::new(chevalley_eilenberg(&LieAlgebraData::aff1()));
        let e = CohesiveModule::rank_one("E", a.clone(), 0);
        let mut h = AMatrix::zeros(1, 1);
        h.set(0, 0, a.parse_element("a1 + 3*a2").unwrap());
        let lifted = lift_connection(&e, &BTreeMap::from([(0, h.clone())])).unwrap();
        assert_eq!(lifted, h);
    }

    #[test]
    fn lift_on_two_term_complex_commutes() {
        let a = Arc::new(chevalley_eilenberg(&LieAlgebraData::aff1()));
        // p (0) → q (1) by zero, plus r (0) → q by 1: H^0 = span(p), H^1 = 0.
        let mut c = AMatrix::zeros(3, 3);
        c.set(1, 2, a.unit());
        let e = CohesiveModule::new("E", a.clone(), vec!["p".into(), "q".into(), "r".into()], vec![0, 1, 0], c).unwrap();
        let reps = cohomology_representatives(&e).unwrap();
        let mut hconn = BTreeMap::new();
        for (k, z) in &reps {
            let mut m = AMatrix::zeros(z.len(), z.len());
            if *k == 0 && z.len() == 1 {
                m.set(0, 0, a.parse_element("a2").unwrap());
            }
            hconn.insert(*k, m);
        }
        let h = lift_connection(&e, &hconn).unwrap();
        let k0 = e.block(0);
        assert_eq!(h.mul(&a, &k0).unwrap(), k0.mul(&a, &h).unwrap());
        let z = &reps[&0][0];
        let zcol: Vec<AElement> = z.iter().map(|c| a.scalar(c.clone())).collect();
        let img = h.apply(&a, &zcol);
        let want: Vec<AElement> = zcol.iter().map(|x| a.multiply(x, &a.parse_element("a2").unwrap())).collect();
        // H̃z − z·ℍ must be 𝔼⁰-exact; with H^1 = 0 and r ↦ q this is a
        // multiple of q's preimage.
        let diff: Vec<AElement> = img.iter().zip(&want).map(|(x, y)| x.minus(y)).collect();
        assert!(diff[1].is_zero());
    }
}

//! Bundled example classes: Chevalley–Eilenberg dgas of Lie algebras with
//! their dualizing data, generalized Higgs algebroids, and noncommutative
//! tori in de Rham and Dolbeault flavors.

use crate::algebra::{AElement, BasisKey, Flavor, Kernel, NcTorus, TableAlgebra};
use crate::amatrix::AMatrix;
use crate::cohesive::CohesiveModule;
use crate::dga::CurvedDga;
use crate::error::{Error, Result};
use crate::functors::{CohesiveBimodule, DualizingData, IntegralKind, LeftAction};
use crate::hom::{hom_cohomology, HomCohomology};
use crate::linalg::{solve_linear, SparseMatrix, Subspace};
use crate::report::ValidationReport;
use crate::scalar::Scalar;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::sync::Arc;

pub(crate) fn q(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// A finite-dimensional Lie algebra over ℚ: [e_i, e_j] = Σ_k c^k_{ij} e_k.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieAlgebraData {
    pub name: String,
    pub basis: Vec<String>,
    /// `constants[i][j][k]` = c^k_{ij}.
    pub constants: Vec<Vec<Vec<BigRational>>>,
}

impl LieAlgebraData {
    /// Checks shape and antisymmetry always, and the Jacobi identity unless
    /// `defer_jacobi` is set (negative controls rely on that).
    pub fn new(
        name: &str,
        basis: Vec<String>,
        constants: Vec<Vec<Vec<BigRational>>>,
        defer_jacobi: bool,
    ) -> Result<LieAlgebraData> {
        let n = basis.len();
        if constants.len() != n || constants.iter().any(|r| r.len() != n || r.iter().any(|c| c.len() != n)) {
            return Err(Error::DimensionMismatch(format!("structure constants must be {n}×{n}×{n}")));
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if constants[i][j][k] != -constants[j][i][k].clone() {
                        return Err(Error::NotALieAlgebra(format!(
                            "c^{k}_{{{i}{j}}} = {} but c^{k}_{{{j}{i}}} = {}",
                            constants[i][j][k], constants[j][i][k]
                        )));
                    }
                }
            }
        }
        let l = LieAlgebraData { name: name.into(), basis, constants };
        if !defer_jacobi {
            if let Some(f) = l.jacobi_failure() {
                return Err(Error::NotALieAlgebra(f));
            }
        }
        Ok(l)
    }

    fn from_brackets(name: &str, basis: &[&str], brackets: &[(usize, usize, &[(usize, i64)])]) -> LieAlgebraData {
        let n = basis.len();
        let mut c = vec![vec![vec![BigRational::zero(); n]; n]; n];
        for &(i, j, terms) in brackets {
            for &(k, v) in terms {
                c[i][j][k] = q(v);
                c[j][i][k] = q(-v);
            }
        }
        LieAlgebraData::new(name, basis.iter().map(|s| s.to_string()).collect(), c, false)
            .expect("bundled Lie algebra is valid")
    }

    pub fn abelian(n: usize) -> LieAlgebraData {
        let basis: Vec<String> = (1..=n).map(|i| format!("e{i}")).collect();
        let names: Vec<&str> = basis.iter().map(|s| s.as_str()).collect();
        LieAlgebraData::from_brackets(&format!("abelian-{n}"), &names, &[])
    }

    /// aff(1): [e1, e2] = e2.
    pub fn aff1() -> LieAlgebraData {
        LieAlgebraData::from_brackets("aff1", &["e1", "e2"], &[(0, 1, &[(1, 1)])])
    }

    /// sl₂ on (h, e, f): [h,e] = 2e, [h,f] = −2f, [e,f] = h.
    pub fn sl2() -> LieAlgebraData {
        LieAlgebraData::from_brackets(
            "sl2",
            &["h", "e", "f"],
            &[(0, 1, &[(1, 2)]), (0, 2, &[(2, -2)]), (1, 2, &[(0, 1)])],
        )
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn bracket(&self, x: &[BigRational], y: &[BigRational]) -> Vec<BigRational> {
        let n = self.dim();
        let mut out = vec![BigRational::zero(); n];
        for i in 0..n {
            for j in 0..n {
                if x[i].is_zero() || y[j].is_zero() {
                    continue;
                }
                let s = &x[i] * &y[j];
                for (k, o) in out.iter_mut().enumerate() {
                    *o += &s * &self.constants[i][j][k];
                }
            }
        }
        out
    }

    fn unit_vector(&self, i: usize) -> Vec<BigRational> {
        (0..self.dim()).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect()
    }

    /// The first basis triple violating the Jacobi identity.
    pub fn jacobi_failure(&self) -> Option<String> {
        let n = self.dim();
        let e: Vec<_> = (0..n).map(|i| self.unit_vector(i)).collect();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let a = self.bracket(&e[i], &self.bracket(&e[j], &e[k]));
                    let b = self.bracket(&e[j], &self.bracket(&e[k], &e[i]));
                    let c = self.bracket(&e[k], &self.bracket(&e[i], &e[j]));
                    if (0..n).any(|m| !(&a[m] + &b[m] + &c[m]).is_zero()) {
                        return Some(format!(
                            "Jacobi fails on ({}, {}, {})",
                            self.basis[i], self.basis[j], self.basis[k]
                        ));
                    }
                }
            }
        }
        None
    }

    /// The modular character x ↦ tr(ad x) on the basis.
    pub fn modular_character(&self) -> Vec<BigRational> {
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).fold(BigRational::zero(), |s, k| s + &self.constants[i][k][k]))
            .collect()
    }

    /// Names of the dual generators α^i of the Chevalley–Eilenberg algebra.
    pub fn dual_names(&self) -> Vec<String> {
        (1..=self.dim()).map(|i| format!("a{i}")).collect()
    }
}

/// Λ•𝔞^∨ with dα^k = −Σ_{i<j} c^k_{ij} α^i∧α^j extended as a derivation;
/// zero curvature. A Jacobi failure surfaces as d² ≠ 0 in validation.
pub fn chevalley_eilenberg(l: &LieAlgebraData) -> CurvedDga {
    let n = l.dim();
    let (table, masks) = TableAlgebra::exterior(&l.dual_names());
    let pos: BTreeMap<u32, usize> = masks.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let mul = |a: &AElement, b: &AElement| -> AElement {
        let mut out = AElement::zero();
        for (x, cx) in a.terms() {
            for (y, cy) in b.terms() {
                out.add_scaled(&table.mult[x.index()][y.index()], &(cx * cy));
            }
        }
        out
    };
    let gen = |b: usize| AElement::basis(BasisKey::table(pos[&(1u32 << b)]));
    let d_gen: Vec<AElement> = (0..n)
        .map(|k| {
            let mut x = AElement::zero();
            for i in 0..n {
                for j in i + 1..n {
                    let c = &l.constants[i][j][k];
                    if !c.is_zero() {
                        x.add_term(BasisKey::table(pos[&(1u32 << i | 1u32 << j)]), &Scalar::from_rational(-c.clone()));
                    }
                }
            }
            x
        })
        .collect();
    let mut d = vec![AElement::zero(); masks.len()];
    // Masks are sorted by popcount, so d of the tail is known.
    for (idx, &m) in masks.iter().enumerate() {
        if m == 0 {
            continue;
        }
        let b = m.trailing_zeros() as usize;
        let rest = m & !(1u32 << b);
        let tail = AElement::basis(BasisKey::table(pos[&rest]));
        let mut v = mul(&d_gen[b], &tail);
        v.sub_assign(&mul(&gen(b), &d[pos[&rest]]));
        d[idx] = v;
    }
    CurvedDga::from_table(&format!("CE({})", l.name), table, d, AElement::zero()).expect("consistent shapes")
}

/// D = Λ^g𝔞, rank one in degree 0, with connection θ = Σ tr(ad e_i)·α^i;
/// ∫ is the coefficient of α^1∧…∧α^g and the basis is treated as orthonormal.
pub fn lie_dualizing_data(l: &LieAlgebraData) -> DualizingData {
    let a = Arc::new(chevalley_eilenberg(l));
    let t = a.table().expect("table kernel");
    let mut theta = AElement::zero();
    for (i, c) in l.modular_character().into_iter().enumerate() {
        if !c.is_zero() {
            let k = t.index_of(&format!("a{}", i + 1)).expect("generator present");
            theta.add_term(BasisKey::table(k), &Scalar::from_rational(c));
        }
    }
    let mut conn = AMatrix::zeros(1, 1);
    conn.set(0, 0, theta);
    let module = CohesiveModule::new("D", a.clone(), vec!["nu".into()], vec![0], conn)
        .expect("degree one connection");
    let top = BasisKey::table(t.dim() - 1);
    DualizingData {
        bimodule: CohesiveBimodule {
            name: "D".into(),
            left: a.clone(),
            module,
            action: LeftAction::Along(crate::dga::AlgebraMap::Identity),
        },
        dimension: l.dim() as u32,
        integral: IntegralKind::TopCoefficient(top),
    }
}

/// 𝔞_E = 𝔞 ⊕ E with [X + e, Y + f] = [X, Y] + X·f − Y·e and [E, E] = 0.
/// `action[i][γ][β]` is the coefficient of f_γ in e_i·f_β.
pub fn generalized_higgs_algebroid(
    l: &LieAlgebraData,
    action: &[Vec<Vec<BigRational>>],
) -> Result<LieAlgebraData> {
    let n = l.dim();
    if action.len() != n {
        return Err(Error::NotAModule(format!("{} action matrices for a {n}-dimensional algebra", action.len())));
    }
    let m = action.first().map_or(0, |x| x.len());
    if action.iter().any(|x| x.len() != m || x.iter().any(|r| r.len() != m)) {
        return Err(Error::NotAModule("action matrices must be square of one size".into()));
    }
    let matmul = |a: &Vec<Vec<BigRational>>, b: &Vec<Vec<BigRational>>| -> Vec<Vec<BigRational>> {
        (0..m)
            .map(|i| (0..m).map(|j| (0..m).fold(BigRational::zero(), |s, k| s + &a[i][k] * &b[k][j])).collect())
            .collect()
    };
    for i in 0..n {
        for j in i + 1..n {
            let (ab, ba) = (matmul(&action[i], &action[j]), matmul(&action[j], &action[i]));
            for g in 0..m {
                for b in 0..m {
                    let rho_bracket =
                        (0..n).fold(BigRational::zero(), |s, k| s + &l.constants[i][j][k] * &action[k][g][b]);
                    if rho_bracket != &ab[g][b] - &ba[g][b] {
                        return Err(Error::NotAModule(format!(
                            "ρ([{}, {}]) ≠ [ρ({}), ρ({})] at entry ({g}, {b})",
                            l.basis[i], l.basis[j], l.basis[i], l.basis[j]
                        )));
                    }
                }
            }
        }
    }
    let t = n + m;
    let mut c = vec![vec![vec![BigRational::zero(); t]; t]; t];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                c[i][j][k] = l.constants[i][j][k].clone();
            }
        }
        for b in 0..m {
            for g in 0..m {
                c[i][n + b][n + g] = action[i][g][b].clone();
                c[n + b][i][n + g] = -action[i][g][b].clone();
            }
        }
    }
    let mut basis = l.basis.clone();
    basis.extend((1..=m).map(|b| format!("f{b}")));
    LieAlgebraData::new(&format!("{}_E{m}", l.name), basis, c, false)
}

/// Splits the curvature of a module H over CE(𝔞_E) (generators in degree 0)
/// by form type: Λ²𝔞^∨ is flatness of ℍ₀, 𝔞^∨∧E^∨ is [ℍ₀, Φ] = 0 and Λ²E^∨
/// is Φ∧Φ = 0. `base_dim` is dim 𝔞; the remaining generators span E^∨.
pub fn higgs_module_check(h: &CohesiveModule, base_dim: usize) -> ValidationReport {
    let mut r = ValidationReport::new();
    let a = &h.algebra;
    let Some(t) = a.table() else {
        r.fail("base", "the base must be a Chevalley–Eilenberg algebra");
        return r;
    };
    let gens = t.degrees.iter().filter(|&&d| d == 1).count();
    let (_, masks) = TableAlgebra::exterior(&vec![String::new(); gens]);
    if masks.len() != t.dim() || base_dim > gens {
        r.fail("base", "the base must be a Chevalley–Eilenberg algebra over 𝔞 ⊕ E");
        return r;
    }
    r.record(
        "degree_zero_generators",
        h.degrees.iter().any(|&d| d != 0).then(|| format!("generator degrees {:?}", h.degrees)),
    );
    let base_mask = (1u32 << base_dim) - 1;
    let f = h.curvature_matrix();
    let residual = |pred: &dyn Fn(u32) -> bool| -> Option<String> {
        let part = f.map(|_, _, x| x.filter(|k| masks[k.index()].count_ones() == 2 && pred(masks[k.index()])));
        (!part.is_zero()).then(|| format!("residual {:?}", part.format(a)))
    };
    r.record("h0_flat", residual(&|m| m & !base_mask == 0));
    r.record("h0_commutes_with_phi", residual(&|m| (m & base_mask).count_ones() == 1));
    r.record("phi_wedge_phi", residual(&|m| m & base_mask == 0));
    r
}

/// Lattice data of a noncommutative torus with an optional complex structure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NcTorusData {
    pub rank: usize,
    pub b: Vec<Vec<BigRational>>,
    pub complex_structure: Option<Vec<Vec<BigRational>>>,
}

impl NcTorusData {
    pub fn new(
        b: Vec<Vec<BigRational>>,
        complex_structure: Option<Vec<Vec<BigRational>>>,
    ) -> Result<NcTorusData> {
        let r = b.len();
        if b.iter().any(|row| row.len() != r) {
            return Err(Error::DimensionMismatch("B must be square".into()));
        }
        for i in 0..r {
            for j in 0..r {
                if b[i][j] != -b[j][i].clone() {
                    return Err(Error::DimensionMismatch(format!("B is not antisymmetric at ({i}, {j})")));
                }
            }
        }
        if let Some(jm) = &complex_structure {
            if r % 2 == 1 || jm.len() != r || jm.iter().any(|row| row.len() != r) {
                return Err(Error::DimensionMismatch("J must be a 2g×2g matrix".into()));
            }
            for i in 0..r {
                for k in 0..r {
                    let s = (0..r).fold(BigRational::zero(), |s, m| s + &jm[i][m] * &jm[m][k]);
                    let want = if i == k { -BigRational::one() } else { BigRational::zero() };
                    if s != want {
                        return Err(Error::DimensionMismatch("J² ≠ −1".into()));
                    }
                }
            }
        }
        Ok(NcTorusData { rank: r, b, complex_structure })
    }

    /// Rank two with B₁₂ = θ.
    pub fn rank_two(theta: BigRational, with_complex_structure: bool) -> NcTorusData {
        let b = vec![vec![BigRational::zero(), theta.clone()], vec![-theta, BigRational::zero()]];
        let j = with_complex_structure.then(|| standard_complex_structure(1));
        NcTorusData::new(b, j).expect("valid torus data")
    }

    /// The conductor of σ, with 4 included when a complex structure is present.
    pub fn conductor(&self) -> u32 {
        let n = NcTorus::conductor_of(&self.b) as u64;
        if self.complex_structure.is_some() {
            num_integer::Integer::lcm(&n, &4) as u32
        } else {
            n as u32
        }
    }
}

/// The block complex structure J e_{2k−1} = e_{2k} on ℚ^{2g}.
pub fn standard_complex_structure(g: usize) -> Vec<Vec<BigRational>> {
    let mut j = vec![vec![BigRational::zero(); 2 * g]; 2 * g];
    for k in 0..g {
        j[2 * k + 1][2 * k] = q(1);
        j[2 * k][2 * k + 1] = q(-1);
    }
    j
}

/// Coordinates of D′(e_i) = (1 − iJ)e_i / 2 in a basis of V_{1,0} formed by
/// the pivot columns of (1 − iJ)/2.
fn holomorphic_directions(j: &[Vec<BigRational>]) -> Result<Vec<Vec<Scalar>>> {
    let r = j.len();
    let i = Scalar::i();
    let half = Scalar::from_ratio(1, 2);
    let p: Vec<Vec<Scalar>> = (0..r)
        .map(|col| {
            (0..r)
                .map(|row| {
                    let id = if row == col { Scalar::one() } else { Scalar::zero() };
                    &half * &(&id - &(&i * &Scalar::from_rational(j[row][col].clone())))
                })
                .collect()
        })
        .collect();
    let mut span = Subspace::new(r);
    let mut pivots = Vec::new();
    for (c, col) in p.iter().enumerate() {
        if span.insert(col) {
            pivots.push(c);
        }
    }
    let basis = SparseMatrix::from_columns(r, &pivots.iter().map(|&c| p[c].clone()).collect::<Vec<_>>());
    p.iter()
        .map(|col| {
            solve_linear(&basis, col)?
                .ok_or_else(|| Error::SolveFailed("D′ column outside its own image".into()))
        })
        .collect()
}

/// The torus dga A•(Λ; σ) with forms Λ•V (de Rham, d[λ] = [λ]⊗λ) or Λ•V_{1,0}
/// (Dolbeault, ∂̄[λ] = [λ]⊗D′(λ)); an optional curvature must be a central,
/// closed degree-2 element.
pub fn nc_torus_dga(t: &NcTorusData, flavor: Flavor, curvature: Option<AElement>) -> Result<CurvedDga> {
    let (form_names, dvec) = match flavor {
        Flavor::DeRham => (
            (1..=t.rank).map(|i| format!("v{i}")).collect::<Vec<_>>(),
            (0..t.rank)
                .map(|i| (0..t.rank).map(|k| if i == k { Scalar::one() } else { Scalar::zero() }).collect())
                .collect(),
        ),
        Flavor::Dolbeault => {
            let j = t.complex_structure.as_ref().ok_or(Error::MissingComplexStructure)?;
            ((1..=t.rank / 2).map(|i| format!("w{i}")).collect(), holomorphic_directions(j)?)
        }
    };
    let nc = NcTorus {
        rank: t.rank,
        b: t.b.clone(),
        conductor: NcTorus::conductor_of(&t.b),
        flavor,
        complex_structure: t.complex_structure.clone(),
        form_names,
        dvec,
    };
    let name = format!(
        "T{}({})",
        t.rank,
        match flavor {
            Flavor::DeRham => "dR",
            Flavor::Dolbeault => "Dol",
        }
    );
    let c = curvature.unwrap_or_else(AElement::zero);
    let a = CurvedDga::from_nc(&name, nc, c.clone());
    if c.is_zero() {
        return Ok(a);
    }
    if c.terms().any(|(k, _)| a.degree(k) != 2) {
        return Err(Error::WrongDegree { expected: 2, found: a.degree_of(&c).map_or(-1, |d| d as i32) });
    }
    for k in a.sample_keys() {
        let x = AElement::basis(k.clone());
        if !a.commutator(&c, &x).is_zero() {
            return Err(Error::NonCentralCurvature(format!("[c, {}] ≠ 0", a.key_name(&k))));
        }
    }
    let dc = a.apply_d(&c);
    if !dc.is_zero() {
        return Err(Error::NonClosedCurvature(format!("dc = {}", a.format_element(&dc))));
    }
    Ok(a)
}

/// τ(Σ a_λ[λ]) = a₀ on degree-0 elements.
pub fn nc_trace(a: &CurvedDga, x: &AElement) -> Result<Scalar> {
    let nc = a.nc().ok_or_else(|| Error::Unsupported("τ needs the torus kernel".into()))?;
    if let Some((k, _)) = x.terms().find(|(k, _)| k.form != 0) {
        return Err(Error::WrongDegree { expected: 0, found: k.form.count_ones() as i32 });
    }
    Ok(x.coeff(&BasisKey::nc(vec![0; nc.rank], 0)))
}

/// ξ_i(f) = Σ λ_i a_λ[λ], the derivation along the i-th lattice direction.
pub fn nc_derivation(x: &AElement, i: usize) -> AElement {
    let mut out = AElement::zero();
    for (k, c) in x.terms() {
        out.add_term(k.clone(), &(c * &Scalar::from_int(k.weight[i])));
    }
    out
}

/// D = A ⊗ Λ^gV_{0,1} with 𝔻 = ∂̄ (flat), ∗̄ sending [λ]·v′_I to
/// sign(I, I^c)·conj·[−λ]·v′_{I^c}, and ∫ = τ of the full-form coefficient.
pub fn nc_dualizing_data(a: &Arc<CurvedDga>) -> Result<DualizingData> {
    let nc = a.nc().ok_or_else(|| Error::Unsupported("torus dualizing data on a table kernel".into()))?;
    if nc.flavor != Flavor::Dolbeault {
        return Err(Error::MissingComplexStructure);
    }
    let module = CohesiveModule::new("D", a.clone(), vec!["v''".into()], vec![0], AMatrix::zeros(1, 1))?;
    Ok(DualizingData {
        bimodule: CohesiveBimodule {
            name: "D".into(),
            left: a.clone(),
            module,
            action: LeftAction::Along(crate::dga::AlgebraMap::Identity),
        },
        dimension: nc.forms() as u32,
        integral: IntegralKind::TorusTrace,
    })
}

/// Per-degree cohomology of E itself, P(O, E) with O the trivial rank-one
/// module, computed in the box of radius r and confirmed by one enlargement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightCohomology {
    pub cohomology: HomCohomology,
    pub stable: bool,
}

pub fn weight_cohomology(e: &Arc<CohesiveModule>, radius: i64) -> Result<WeightCohomology> {
    if !matches!(e.algebra.kernel, Kernel::NcTorus(_)) {
        return Err(Error::Unsupported("weight cohomology needs the torus kernel".into()));
    }
    crate::hom::generator_weights(e)?;
    let o = Arc::new(CohesiveModule::rank_one("O", e.algebra.clone(), 0));
    let h = hom_cohomology(&o, e, Some(radius))?;
    let bigger = hom_cohomology(&o, e, Some(radius + 1))?;
    Ok(WeightCohomology { stable: bigger.dims == h.dims, cohomology: h })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hom::hom_complex;

    fn ce_dims(l: &LieAlgebraData) -> BTreeMap<i32, usize> {
        let a = Arc::new(chevalley_eilenberg(l));
        let o = Arc::new(CohesiveModule::rank_one("O", a, 0));
        hom_complex(&o, &o).unwrap().cohomology_dims().unwrap()
    }

    #[test]
    fn aff1_differential_matches_bracket() {
        let a = chevalley_eilenberg(&LieAlgebraData::aff1());
        let t = a.table().unwrap();
        let a2 = AElement::basis(BasisKey::table(t.index_of("a2").unwrap()));
        assert_eq!(a.format_element(&a.apply_d(&a2)), "-1*a1^a2");
        let a1 = AElement::basis(BasisKey::table(t.index_of("a1").unwrap()));
        assert!(a.apply_d(&a1).is_zero());
    }

    #[test]
    fn lie_cohomology_tables() {
        assert_eq!(ce_dims(&LieAlgebraData::abelian(1)), BTreeMap::from([(0, 1), (1, 1)]));
        assert_eq!(ce_dims(&LieAlgebraData::aff1()), BTreeMap::from([(0, 1), (1, 1), (2, 0)]));
        assert_eq!(ce_dims(&LieAlgebraData::sl2()), BTreeMap::from([(0, 1), (1, 0), (2, 0), (3, 1)]));
    }

    #[test]
    fn ce_models_validate() {
        for l in [LieAlgebraData::abelian(2), LieAlgebraData::aff1(), LieAlgebraData::sl2()] {
            let r = chevalley_eilenberg(&l).validate();
            assert!(r.passed(), "{:?}", r.failures().collect::<Vec<_>>());
        }
    }

    #[test]
    fn jacobi_violation_fails_validation() {
        let mut l = LieAlgebraData::sl2();
        // [e, f] = h + e.
        l.constants[1][2][1] = q(1);
        l.constants[2][1][1] = q(-1);
        assert!(l.jacobi_failure().is_some());
        assert!(LieAlgebraData::new("bad", l.basis.clone(), l.constants.clone(), false).is_err());
        let r = chevalley_eilenberg(&l).validate();
        assert!(r.get("d2_equals_curvature_commutator").is_some_and(|c| !c.passed));
    }

    #[test]
    fn antisymmetry_is_enforced() {
        let mut l = LieAlgebraData::aff1();
        l.constants[1][0][1] = q(1);
        assert!(matches!(
            LieAlgebraData::new("x", l.basis, l.constants, true),
            Err(Error::NotALieAlgebra(_))
        ));
    }

    #[test]
    fn modular_characters() {
        assert_eq!(LieAlgebraData::aff1().modular_character(), vec![q(1), q(0)]);
        assert!(LieAlgebraData::sl2().modular_character().iter().all(|x| x.is_zero()));
    }

    #[test]
    fn lie_dualizing_data_is_valid() {
        for l in [LieAlgebraData::abelian(1), LieAlgebraData::aff1(), LieAlgebraData::sl2()] {
            let d = lie_dualizing_data(&l);
            let r = d.check();
            assert!(r.passed(), "{}: {:?}", l.name, r.failures().collect::<Vec<_>>());
        }
    }

    #[test]
    fn star_on_exterior_line() {
        let d = lie_dualizing_data(&LieAlgebraData::abelian(1));
        let a = d.algebra().clone();
        let one = a.unit();
        let x = AElement::basis(BasisKey::table(1));
        assert_eq!(d.star(&one), x);
        assert_eq!(d.star(&x), one);
        assert_eq!(d.star(&d.star(&x)), x);
    }

    fn trivial_action(n: usize, m: usize) -> Vec<Vec<Vec<BigRational>>> {
        vec![vec![vec![BigRational::zero(); m]; m]; n]
    }

    #[test]
    fn higgs_algebroid_examples() {
        let l = LieAlgebraData::abelian(1);
        assert_eq!(generalized_higgs_algebroid(&l, &trivial_action(1, 0)).unwrap().constants, l.constants);
        let ab = generalized_higgs_algebroid(&l, &trivial_action(1, 1)).unwrap();
        assert_eq!(ab.dim(), 2);
        assert!(ab.constants.iter().flatten().flatten().all(|c| c.is_zero()));
        let aff = LieAlgebraData::aff1();
        let act = vec![vec![vec![q(1)]], vec![vec![q(0)]]];
        let big = generalized_higgs_algebroid(&aff, &act).unwrap();
        assert_eq!(big.dim(), 3);
        assert!(big.jacobi_failure().is_none());
        assert!(chevalley_eilenberg(&big).validate().passed());
    }

    #[test]
    fn higgs_rejects_non_module() {
        let aff = LieAlgebraData::aff1();
        // e2 acting nontrivially breaks ρ([e1,e2]) = [ρ(e1), ρ(e2)] on a line.
        let act = vec![vec![vec![q(1)]], vec![vec![q(1)]]];
        assert!(matches!(generalized_higgs_algebroid(&aff, &act), Err(Error::NotAModule(_))));
    }

    #[test]
    fn higgs_module_conditions() {
        let big = generalized_higgs_algebroid(&LieAlgebraData::abelian(1), &trivial_action(1, 1)).unwrap();
        let a = Arc::new(chevalley_eilenberg(&big));
        let t = a.table().unwrap();
        let a1 = AElement::basis(BasisKey::table(t.index_of("a1").unwrap()));
        let a2 = AElement::basis(BasisKey::table(t.index_of("a2").unwrap()));
        // Rank 2: ℍ₀ = 0, Φ nilpotent.
        let mut c = AMatrix::zeros(2, 2);
        c.set(0, 1, a2.clone());
        let h = CohesiveModule::new("H", a.clone(), vec!["h1".into(), "h2".into()], vec![0, 0], c.clone())
            .unwrap();
        assert!(higgs_module_check(&h, 1).passed());
        // ℍ₀ = diag(a1, 0) does not commute with Φ.
        c.set(0, 0, a1.clone());
        let h = CohesiveModule::new("H", a.clone(), vec!["h1".into(), "h2".into()], vec![0, 0], c).unwrap();
        let r = higgs_module_check(&h, 1);
        assert!(r.get("h0_flat").unwrap().passed);
        assert!(!r.get("h0_commutes_with_phi").unwrap().passed);
        assert!(r.get("phi_wedge_phi").unwrap().passed);
    }

    fn theta(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn dolbeault_direction_is_holomorphic() {
        let t = NcTorusData::rank_two(theta(1, 3), true);
        let a = nc_torus_dga(&t, Flavor::Dolbeault, None).unwrap();
        let nc = a.nc().unwrap();
        assert_eq!(nc.forms(), 1);
        assert_eq!(nc.dvec[0], vec![Scalar::one()]);
        assert_eq!(nc.dvec[1], vec![Scalar::i()]);
        assert!(a.validate().passed());
    }

    #[test]
    fn dolbeault_requires_complex_structure() {
        let t = NcTorusData::rank_two(theta(1, 3), false);
        assert_eq!(nc_torus_dga(&t, Flavor::Dolbeault, None).unwrap_err(), Error::MissingComplexStructure);
        assert!(nc_torus_dga(&t, Flavor::DeRham, None).is_ok());
    }

    #[test]
    fn non_central_curvature_is_rejected() {
        let t = NcTorusData::rank_two(theta(1, 3), false);
        let a = nc_torus_dga(&t, Flavor::DeRham, None).unwrap();
        let c = a.parse_element("[1,0]·v1^v2").unwrap();
        assert!(matches!(nc_torus_dga(&t, Flavor::DeRham, Some(c)), Err(Error::NonCentralCurvature(_))));
        let ok = a.parse_element("[0,0]·v1^v2").unwrap();
        assert!(nc_torus_dga(&t, Flavor::DeRham, Some(ok)).unwrap().validate().passed());
    }

    #[test]
    fn trace_values() {
        let t = NcTorusData::rank_two(theta(1, 3), false);
        let a = nc_torus_dga(&t, Flavor::DeRham, None).unwrap();
        assert_eq!(nc_trace(&a, &a.unit()).unwrap(), Scalar::one());
        let u = AElement::basis(BasisKey::nc(vec![1, 0], 0));
        assert!(nc_trace(&a, &u).unwrap().is_zero());
        let v1 = AElement::basis(BasisKey::nc(vec![0, 0], 1));
        assert!(matches!(nc_trace(&a, &v1), Err(Error::WrongDegree { .. })));
    }

    #[test]
    fn de_rham_torus_cohomology() {
        let t = NcTorusData::rank_two(BigRational::zero(), false);
        let a = Arc::new(nc_torus_dga(&t, Flavor::DeRham, None).unwrap());
        let o = Arc::new(CohesiveModule::rank_one("O", a, 0));
        let w = weight_cohomology(&o, 2).unwrap();
        assert_eq!(w.cohomology.dims, BTreeMap::from([(0, 1), (1, 2), (2, 1)]));
        assert!(w.stable);
    }

    #[test]
    fn dolbeault_weight_cohomology() {
        for th in [theta(0, 1), theta(1, 3), theta(2, 5)] {
            let t = NcTorusData::rank_two(th, true);
            let a = Arc::new(nc_torus_dga(&t, Flavor::Dolbeault, None).unwrap());
            let o = Arc::new(CohesiveModule::rank_one("O", a, 0));
            let w = weight_cohomology(&o, 2).unwrap();
            assert_eq!(w.cohomology.dims, BTreeMap::from([(0, 1), (1, 1)]));
            assert!(w.stable);
        }
    }

    #[test]
    fn nc_dualizing_data_is_valid() {
        let t = NcTorusData::rank_two(theta(1, 3), true);
        let a = Arc::new(nc_torus_dga(&t, Flavor::Dolbeault, None).unwrap());
        let d = nc_dualizing_data(&a).unwrap();
        assert!(d.check().passed());
        let full = AElement::basis(BasisKey::nc(vec![0, 0], 1));
        assert_eq!(d.integrate(&full), Scalar::one());
        assert!(d.integrate(&AElement::basis(BasisKey::nc(vec![1, 0], 1))).is_zero());
        assert_eq!(d.star(&a.unit()), full);
        let f = a.parse_element("[0,0] + [1,0]").unwrap();
        // τ(f*f) = 2 for f = [0] + [e₁].
        let ff = d.inner(&AElement::basis(BasisKey::nc(vec![0, 0], 0)).plus(&AElement::basis(BasisKey::nc(vec![1, 0], 0))), &f);
        assert_eq!(ff, Scalar::from_int(2));
        let dr = Arc::new(nc_torus_dga(&NcTorusData::rank_two(theta(1, 3), false), Flavor::DeRham, None).unwrap());
        assert_eq!(nc_dualizing_data(&dr).unwrap_err(), Error::MissingComplexStructure);
    }
}

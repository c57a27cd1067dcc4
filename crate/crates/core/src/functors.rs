//! Dg-functors between module categories: pushforward along curved dga
//! homomorphisms and along cohesive bimodules, and Serre functors built from
//! dualizing data.

use crate::algebra::{AElement, BasisKey, Kernel};
use crate::amatrix::AMatrix;
use crate::cohesive::{check_entry_degrees, parity_sign, CohesiveModule};
use crate::dga::{AlgebraMap, CurvedDga, DgaHom};
use crate::error::{Error, Result};
use crate::hom::{hom_complex, hom_complex_at_weight, HomComplex, HomMorphism};
use crate::linalg::{rank, SparseMatrix};
use crate::report::ValidationReport;
use crate::scalar::Scalar;
use std::collections::BTreeMap;
use std::sync::Arc;

/// C₂ = f(C) + δ_li (−1)^{|e_i|} ω, the connection of E⊗_f A₂.
pub fn pushforward_hom(h: &DgaHom, e: &CohesiveModule) -> Result<CohesiveModule> {
    if *e.algebra != *h.source {
        return Err(Error::BaseMismatch);
    }
    let report = h.check();
    if !report.passed() {
        let first = report.failures().next().map(|c| c.name.clone()).unwrap_or_default();
        return Err(Error::InvalidHom(format!("homomorphism fails {first}")));
    }
    let c = e.connection.map(|l, i, x| {
        let mut y = h.apply(x);
        if l == i {
            y.add_scaled(&h.omega, &parity_sign(e.degrees[i]));
        }
        y
    });
    let idem = e.idempotent.as_ref().map(|p| p.map(|_, _, x| h.apply(x)));
    let m = CohesiveModule::new(
        &e.name,
        h.target.clone(),
        e.generators.clone(),
        e.degrees.clone(),
        c,
    )?;
    match idem {
        Some(p) => m.with_idempotent(p),
        None => Ok(m),
    }
}

/// How A₁ acts on the left of X⊗A₂.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LeftAction {
    /// One matrix over A₂ per table basis element of A₁:
    /// a·x_β = Σ_γ x_γ ρ(a)_γβ.
    Table(Vec<AMatrix>),
    /// X = A₂ of rank one in degree 0 with a·x = x·f(a); its generator is
    /// named "1" and is dropped from pushforward generator names.
    Along(AlgebraMap),
}

/// An A₁–A₂ cohesive bimodule: a module X over A₂ with connection 𝕏 and a
/// left A₁ action commuting with the right A₂ action.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohesiveBimodule {
    pub name: String,
    pub left: Arc<CurvedDga>,
    pub module: CohesiveModule,
    pub action: LeftAction,
}

impl CohesiveBimodule {
    pub fn right(&self) -> &Arc<CurvedDga> {
        &self.module.algebra
    }

    /// The diagonal bimodule A, or more generally the one induced by a
    /// homomorphism (f, ω): X = A₂ with 𝕏 = ω and a·x = x f(a).
    pub fn from_hom(h: &DgaHom) -> CohesiveBimodule {
        let mut c = AMatrix::zeros(1, 1);
        c.set(0, 0, h.omega.clone());
        CohesiveBimodule {
            name: format!("{}→{}", h.source.name, h.target.name),
            left: h.source.clone(),
            module: CohesiveModule {
                name: "X".into(),
                algebra: h.target.clone(),
                generators: vec!["1".into()],
                degrees: vec![0],
                connection: c,
                idempotent: None,
            },
            action: LeftAction::Along(h.map.clone()),
        }
    }

    pub fn diagonal(a: Arc<CurvedDga>) -> CohesiveBimodule {
        CohesiveBimodule::from_hom(&DgaHom::identity(a))
    }

    /// ρ(a), the matrix of left multiplication by `a` on the generators.
    pub fn act(&self, a: &AElement) -> AMatrix {
        match &self.action {
            LeftAction::Table(mats) => {
                let n = self.module.rank();
                let mut m = AMatrix::zeros(n, n);
                for (k, c) in a.terms() {
                    m = m.add(&mats[k.index()].scale(c)).expect("square matrices");
                }
                m
            }
            LeftAction::Along(map) => {
                let mut m = AMatrix::zeros(1, 1);
                let img = match map {
                    AlgebraMap::Identity => a.clone(),
                    AlgebraMap::Table(imgs) => {
                        let mut out = AElement::zero();
                        for (k, c) in a.terms() {
                            out.add_scaled(&imgs[k.index()], c);
                        }
                        out
                    }
                };
                m.set(0, 0, img);
                m
            }
        }
    }

    pub fn check(&self) -> ValidationReport {
        check_bimodule(self)
    }

    /// X[n], shifted as a right module.
    pub fn shift(&self, n: i32) -> CohesiveBimodule {
        CohesiveBimodule { module: self.module.shift(n), ..self.clone() }
    }
}

/// Checks grading and associativity of the action, the Leibniz rule
/// 𝕏(a·y) = da·y + (−1)^{|a|} a·𝕏(y), and 𝕏∘𝕏(y) = c₁·y − y·c₂.
pub fn check_bimodule(x: &CohesiveBimodule) -> ValidationReport {
    let (a1, a2) = (&x.left, x.right());
    let m = &x.module;
    let mut r = ValidationReport::new();
    if let LeftAction::Table(mats) = &x.action {
        if a1.table().map(|t| t.dim()) != Some(mats.len()) {
            r.fail("action", "one action matrix per basis element of the left algebra is required");
            return r;
        }
    }
    let keys = a1.sample_keys();
    let grading = keys.iter().find_map(|k| {
        let rho = x.act(&AElement::basis(k.clone()));
        check_entry_degrees(a2, &rho, &m.degrees, &m.degrees, a1.degree(k) as i32)
            .err()
            .map(|e| format!("action of {}: {e}", a1.key_name(k)))
    });
    r.record("grading", grading);

    let unit = (x.act(&a1.unit()) != AMatrix::identity(a2, m.rank()))
        .then(|| "the unit does not act as the identity".to_string());
    let assoc = unit.or_else(|| {
        keys.iter().find_map(|ka| {
            keys.iter().find_map(|kb| {
                let (ea, eb) = (AElement::basis(ka.clone()), AElement::basis(kb.clone()));
                let lhs = x.act(&a1.multiply(&ea, &eb));
                let rhs = x.act(&ea).mul(a2, &x.act(&eb)).expect("square");
                (lhs != rhs).then(|| format!("({}·{})·x ≠ {}·({}·x)", a1.key_name(ka), a1.key_name(kb), a1.key_name(ka), a1.key_name(kb)))
            })
        })
    });
    r.record("action", assoc);

    let leibniz = keys.iter().find_map(|k| {
        let a = AElement::basis(k.clone());
        let rho = x.act(&a);
        let lhs = m
            .connection
            .mul(a2, &rho)
            .expect("square")
            .add(&rho.map(|l, _, y| a2.apply_d(y).scale(&parity_sign(m.degrees[l]))))
            .expect("square");
        let rhs = x
            .act(&a1.apply_d(&a))
            .add(&rho.mul(a2, &m.connection).expect("square").scale(&parity_sign(a1.degree(k) as i32)))
            .expect("square");
        (lhs != rhs).then(|| format!("Leibniz rule fails for {}", a1.key_name(k)))
    });
    r.record("leibniz", leibniz);

    let f = m.curvature_matrix();
    let want = x.act(&a1.curvature);
    let curv = (f != want).then(|| {
        let diff = f.sub(&want).expect("square");
        let (l, i) = (0..m.rank())
            .flat_map(|l| (0..m.rank()).map(move |i| (l, i)))
            .find(|&(l, i)| !diff.get(l, i).is_zero())
            .unwrap_or((0, 0));
        format!(
            "𝕏∘𝕏 + (·c₂) − (c₁·) has entry ({l},{i}) = {}",
            a2.format_element(diff.get(l, i))
        )
    });
    r.record("curvature", curv);
    r
}

/// E⊗X with generators e_i⊗x_β (index i·rank X + β) and connection
/// C₂_{(l,γ),(i,β)} = ρ(C_li)_γβ + δ_li (−1)^{|e_i|} 𝕏_γβ.
pub fn pushforward_bimodule(x: &CohesiveBimodule, e: &CohesiveModule) -> Result<CohesiveModule> {
    if *e.algebra != *x.left {
        return Err(Error::BaseMismatch);
    }
    if !e.is_free() || !x.module.is_free() {
        return Err(Error::NotFree("bimodule pushforward of an idempotent module".into()));
    }
    let a2 = x.right();
    let (n, r) = (e.rank(), x.module.rank());
    let mut c = AMatrix::zeros(n * r, n * r);
    for l in 0..n {
        for i in 0..n {
            let rho = x.act(e.connection.get(l, i));
            for g in 0..r {
                for b in 0..r {
                    let mut y = rho.get(g, b).clone();
                    if l == i {
                        y.add_scaled(x.module.connection.get(g, b), &parity_sign(e.degrees[i]));
                    }
                    c.set(l * r + g, i * r + b, y);
                }
            }
        }
    }
    let mut gens = Vec::new();
    let mut degs = Vec::new();
    for i in 0..n {
        for b in 0..r {
            gens.push(if r == 1 && x.module.generators[0] == "1" {
                e.generators[i].clone()
            } else {
                format!("{}⊗{}", e.generators[i], x.module.generators[b])
            });
            degs.push(e.degrees[i] + x.module.degrees[b]);
        }
    }
    CohesiveModule::new(&format!("{}⊗{}", e.name, x.name), a2.clone(), gens, degs, c)
}

/// How the integral and ∗̄ of a dualizing module are evaluated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IntegralKind {
    /// ∫ = coefficient of this top-degree basis element.
    TopCoefficient(BasisKey),
    /// ∫ = τ of the coefficient of the full form, τ(Σ a_λ[λ]) = a₀.
    TorusTrace,
}

/// Dualizing data ((D, 𝔻), ∗̄, ∫) of dimension g with D of rank one in
/// degree 0, so D⊗A^k is identified with A^k.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualizingData {
    pub bimodule: CohesiveBimodule,
    pub dimension: u32,
    pub integral: IntegralKind,
}

impl DualizingData {
    pub fn algebra(&self) -> &Arc<CurvedDga> {
        &self.bimodule.left
    }

    /// ∫ on D⊗A^g; lower-degree terms are ignored.
    pub fn integrate(&self, x: &AElement) -> Scalar {
        let a = self.algebra();
        match &self.integral {
            IntegralKind::TopCoefficient(k) => x.coeff(k),
            IntegralKind::TorusTrace => {
                let n = a.nc().map_or(0, |n| n.forms());
                let full = if n == 0 { 0 } else { (1u32 << n) - 1 };
                let zero = vec![0; a.nc().map_or(0, |n| n.rank)];
                x.coeff(&BasisKey::nc(zero, full))
            }
        }
    }

    /// ∗̄(a·v_I) = sign(I, I^c)·a*·v_{I^c}, conjugate-linear; a* is the
    /// coefficient conjugate on table kernels and f*(λ) = conj f(−λ) on the
    /// torus kernel.
    pub fn star(&self, x: &AElement) -> AElement {
        let a = self.algebra();
        let mut out = AElement::zero();
        match &a.kernel {
            Kernel::Table(t) => {
                let IntegralKind::TopCoefficient(top) = &self.integral else { return out };
                for (k, c) in x.terms() {
                    for j in 0..t.dim() {
                        let p = a.multiply(&AElement::basis(k.clone()), &AElement::basis(BasisKey::table(j)));
                        let s = p.coeff(top);
                        if !s.is_zero() && t.degrees[j] + t.degrees[k.index()] == self.dimension {
                            out.add_term(BasisKey::table(j), &(&c.conjugate() * &s));
                        }
                    }
                }
            }
            Kernel::NcTorus(nc) => {
                let full = (1u32 << nc.forms()) - 1;
                for (k, c) in x.terms() {
                    let comp = full & !k.form;
                    let neg = crate::algebra::wedge_sign(k.form, comp).unwrap_or(false);
                    let w: Vec<i64> = k.weight.iter().map(|v| -v).collect();
                    out.add_term(BasisKey::nc(w, comp), &c.conjugate().signed(neg));
                }
            }
        }
        out
    }

    /// ⟨ω, η⟩ = ∫∗̄(ω)η.
    pub fn inner(&self, omega: &AElement, eta: &AElement) -> Scalar {
        let a = self.algebra();
        self.integrate(&a.multiply(&self.star(omega), eta))
    }

    /// ∫𝔻(x) for x ∈ D⊗A^{g−1}: 𝔻(δ·a) = δ·(θa + da) for 𝕏 = [θ].
    pub fn integral_of_connection(&self, x: &AElement) -> Scalar {
        let a = self.algebra();
        let theta = self.bimodule.module.connection.get(0, 0);
        self.integrate(&a.multiply(theta, x).plus(&a.apply_d(x)))
    }

    /// Checks the bimodule axioms, Stokes ∫𝔻 = 0 on D⊗A^{g−1}, and the
    /// graded trace property of ∫ on sampled elements.
    pub fn check(&self) -> ValidationReport {
        let a = self.algebra();
        let mut r = ValidationReport::new();
        r.extend("bimodule.", self.bimodule.check());
        let keys = a.sample_keys();
        let stokes = keys
            .iter()
            .filter(|k| a.degree(k) + 1 == self.dimension)
            .find_map(|k| {
                let v = self.integral_of_connection(&AElement::basis(k.clone()));
                (!v.is_zero()).then(|| format!("∫𝔻({}) = {v}", a.key_name(k)))
            });
        r.record("stokes", stokes);
        let trace = keys.iter().find_map(|x| {
            keys.iter()
                .filter(|y| a.degree(x) + a.degree(y) == self.dimension)
                .find_map(|y| {
                    let (ex, ey) = (AElement::basis(x.clone()), AElement::basis(y.clone()));
                    let (dx, dy) = (a.degree(x), a.degree(y));
                    let lhs = self.integrate(&a.multiply(&ex, &ey));
                    let rhs = self.integrate(&a.multiply(&ey, &ex)).signed(dx * dy % 2 == 1);
                    (lhs != rhs).then(|| format!("∫{}·{} ≠ ±∫{}·{}", a.key_name(x), a.key_name(y), a.key_name(y), a.key_name(x)))
                })
        });
        r.record("graded_trace", trace);
        r
    }
}

/// E⊗D, unshifted.
pub fn twist_by_dualizing(d: &DualizingData, e: &CohesiveModule) -> Result<CohesiveModule> {
    pushforward_bimodule(&d.bimodule, e)
}

/// S(E) = (E⊗D)[g].
pub fn serre_functor(d: &DualizingData, e: &CohesiveModule) -> Result<CohesiveModule> {
    let mut s = twist_by_dualizing(d, e)?.shift(d.dimension as i32);
    s.name = format!("S({})", e.name);
    Ok(s)
}

/// ⟨φ, ψ⟩ = (−1)^{(g+1)|φ|} ∫ str(ψ∘φ), for φ ∈ P^k(E, F) and
/// ψ ∈ P^{g−k}(F, E⊗D). Entries sit to the right of the generators, so the
/// supertrace of a degree-g matrix Y is Σ (−1)^{|e_i|(g+1)} Y_ii; with this
/// weight str(CY) = (−1)^{|Y|} str(YC) for any connection C.
pub fn serre_pairing(d: &DualizingData, phi: &HomMorphism, psi: &HomMorphism) -> Result<Scalar> {
    let g = d.dimension as i32;
    if phi.degree + psi.degree != g {
        return Err(Error::DegreeMismatch(format!(
            "degrees {} and {} do not add up to {g}",
            phi.degree, psi.degree
        )));
    }
    if phi.target != psi.source || phi.source.rank() != psi.target.rank() {
        return Err(Error::ObjectMismatch("ψ must map F to E⊗D".into()));
    }
    let a = phi.algebra();
    let prod = psi.matrix.mul(a, &phi.matrix)?;
    let mut tr = AElement::zero();
    for (i, &deg) in phi.source.degrees.iter().enumerate() {
        tr.add_scaled(prod.get(i, i), &parity_sign(deg * (g + 1)));
    }
    let v = d.integrate(&tr);
    Ok(v.signed(((g + 1) * phi.degree).rem_euclid(2) == 1))
}

/// The matrix of the pairing H^k(P(E, F)) × H^{g−k}(P(F, E⊗D)) → k on
/// cohomology representatives, with its rank.
#[derive(Clone, Debug)]
pub struct PairingTable {
    /// Degree k ↦ (dim H^k(P(E,F)), dim H^{g−k}(P(F,E⊗D)), rank, matrix).
    pub blocks: BTreeMap<i32, PairingBlock>,
}

#[derive(Clone, Debug)]
pub struct PairingBlock {
    pub left_dim: usize,
    pub right_dim: usize,
    pub rank: usize,
    pub matrix: SparseMatrix,
}

impl PairingTable {
    /// Every block is square and of full rank.
    pub fn perfect(&self) -> bool {
        self.blocks
            .values()
            .all(|b| b.left_dim == b.right_dim && b.rank == b.left_dim)
    }
}

fn pairing_blocks(
    d: &DualizingData,
    pef: &HomComplex,
    pfs: &HomComplex,
) -> Result<BTreeMap<i32, PairingBlock>> {
    let g = d.dimension as i32;
    let mut blocks = BTreeMap::new();
    for k in pef.complex.degrees() {
        let left = pef.cohomology_basis(k);
        let right = pfs.cohomology_basis(g - k);
        if left.is_empty() && right.is_empty() {
            continue;
        }
        let mut m = SparseMatrix::zeros(left.len(), right.len());
        for (i, phi) in left.iter().enumerate() {
            for (j, psi) in right.iter().enumerate() {
                m.set(i, j, serre_pairing(d, phi, psi)?);
            }
        }
        blocks.insert(k, PairingBlock { left_dim: left.len(), right_dim: right.len(), rank: rank(&m), matrix: m });
    }
    for k in pfs.complex.degrees() {
        let right = pfs.cohomology_basis(k);
        if !right.is_empty() && !blocks.contains_key(&(g - k)) {
            blocks.insert(
                g - k,
                PairingBlock { left_dim: 0, right_dim: right.len(), rank: 0, matrix: SparseMatrix::zeros(0, right.len()) },
            );
        }
    }
    Ok(blocks)
}

/// Pairing table over a table kernel.
pub fn pairing_table(
    d: &DualizingData,
    e: &Arc<CohesiveModule>,
    f: &Arc<CohesiveModule>,
) -> Result<PairingTable> {
    let ed = Arc::new(twist_by_dualizing(d, e)?);
    let pef = hom_complex(e, f)?;
    let pfs = hom_complex(f, &ed)?;
    Ok(PairingTable { blocks: pairing_blocks(d, &pef, &pfs)? })
}

/// Pairing table over the torus kernel: weight W of P(E,F) pairs with
/// weight −W of P(F, E⊗D), summed over the box of radius r.
pub fn pairing_table_torus(
    d: &DualizingData,
    e: &Arc<CohesiveModule>,
    f: &Arc<CohesiveModule>,
    radius: i64,
) -> Result<PairingTable> {
    let rank_l = d.algebra().nc().map(|n| n.rank).ok_or_else(|| {
        Error::Unsupported("torus pairing table over a table kernel".into())
    })?;
    let ed = Arc::new(twist_by_dualizing(d, e)?);
    let mut total: BTreeMap<i32, PairingBlock> = BTreeMap::new();
    for w in crate::dga::box_weights(rank_l, radius) {
        let neg: Vec<i64> = w.iter().map(|x| -x).collect();
        let pef = hom_complex_at_weight(e, f, &w)?;
        let pfs = hom_complex_at_weight(f, &ed, &neg)?;
        for (k, b) in pairing_blocks(d, &pef, &pfs)? {
            let t = total.entry(k).or_insert(PairingBlock {
                left_dim: 0,
                right_dim: 0,
                rank: 0,
                matrix: SparseMatrix::zeros(0, 0),
            });
            // Different weights pair to zero, so the total matrix is block diagonal.
            let m = SparseMatrix::block(
                &t.matrix,
                &SparseMatrix::zeros(t.left_dim, b.right_dim),
                &SparseMatrix::zeros(b.left_dim, t.right_dim),
                &b.matrix,
            );
            *t = PairingBlock {
                left_dim: t.left_dim + b.left_dim,
                right_dim: t.right_dim + b.right_dim,
                rank: t.rank + b.rank,
                matrix: m,
            };
        }
    }
    Ok(PairingTable { blocks: total })
}

/// ⟨dφ, ψ⟩ + (−1)^{|φ|}⟨φ, dψ⟩ for φ ∈ P^{k}(E,F), ψ ∈ P^{g−k−1}(F, E⊗D).
pub fn pairing_defect(d: &DualizingData, phi: &HomMorphism, psi: &HomMorphism) -> Result<Scalar> {
    let a = serre_pairing(d, &phi.differential(), psi)?;
    let b = serre_pairing(d, phi, &psi.differential())?;
    Ok(&a + &b.signed(phi.degree.rem_euclid(2) == 1))
}


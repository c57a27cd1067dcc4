//! Hom complexes P_A(E₁, E₂), their differential and cohomology, cones,
//! contractibility and the homotopy-equivalence criterion.

use crate::algebra::{AElement, BasisKey, Kernel};
use crate::amatrix::AMatrix;
use crate::cohesive::{check_entry_degrees, parity_sign, CohesiveModule};
use crate::dga::{box_weights, CurvedDga};
use crate::error::{Error, Result};
use crate::linalg::{
    cohomology_basis, cohomology_dims, is_quasi_iso, solve_linear, ChainMap, FiniteComplex,
    SparseMatrix, Subspace,
};
use crate::scalar::Scalar;
use std::collections::{BTreeMap, VecDeque};
use std::sync::Arc;

/// A right-A-linear map of degree k: φ(e_i) = Σ_l f_l·φ_li with
/// |φ_li| = |e_i| + k − |f_l|.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomMorphism {
    pub source: Arc<CohesiveModule>,
    pub target: Arc<CohesiveModule>,
    pub degree: i32,
    pub matrix: AMatrix,
}

impl HomMorphism {
    pub fn new(
        source: Arc<CohesiveModule>,
        target: Arc<CohesiveModule>,
        degree: i32,
        matrix: AMatrix,
    ) -> Result<HomMorphism> {
        if source.algebra != target.algebra {
            return Err(Error::BaseMismatch);
        }
        if matrix.rows() != target.rank() || matrix.cols() != source.rank() {
            return Err(Error::DimensionMismatch(format!(
                "morphism {} → {} needs a {}×{} matrix",
                source.name,
                target.name,
                target.rank(),
                source.rank()
            )));
        }
        check_entry_degrees(&source.algebra, &matrix, &source.degrees, &target.degrees, degree)
            .map_err(Error::DegreeMismatch)?;
        Ok(HomMorphism { source, target, degree, matrix })
    }

    pub fn zero(source: Arc<CohesiveModule>, target: Arc<CohesiveModule>, degree: i32) -> HomMorphism {
        let matrix = AMatrix::zeros(target.rank(), source.rank());
        HomMorphism { source, target, degree, matrix }
    }

    /// The identity, or the idempotent itself for a projective module.
    pub fn identity(e: &Arc<CohesiveModule>) -> HomMorphism {
        let matrix = match &e.idempotent {
            Some(p) => p.clone(),
            None => AMatrix::identity(&e.algebra, e.rank()),
        };
        HomMorphism { source: e.clone(), target: e.clone(), degree: 0, matrix }
    }

    pub fn algebra(&self) -> &CurvedDga {
        &self.source.algebra
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }

    pub fn apply(&self, v: &[AElement]) -> Vec<AElement> {
        self.matrix.apply(self.algebra(), v)
    }

    /// The component φ^p with entries in A^p.
    pub fn component(&self, p: u32) -> AMatrix {
        self.matrix.form_component(self.algebra(), p)
    }

    /// The part of φ in the filtration step F^k: components φ^i, i ≥ k.
    pub fn filtration_part(&self, k: u32) -> HomMorphism {
        let a = self.algebra();
        let matrix = self.matrix.map(|_, _, x| x.filter(|key| a.degree(key) >= k));
        HomMorphism { matrix, ..self.clone() }
    }

    pub fn scale(&self, s: &Scalar) -> HomMorphism {
        HomMorphism { matrix: self.matrix.scale(s), ..self.clone() }
    }

    pub fn add(&self, o: &HomMorphism) -> Result<HomMorphism> {
        self.same_space(o)?;
        Ok(HomMorphism { matrix: self.matrix.add(&o.matrix)?, ..self.clone() })
    }

    pub fn sub(&self, o: &HomMorphism) -> Result<HomMorphism> {
        self.same_space(o)?;
        Ok(HomMorphism { matrix: self.matrix.sub(&o.matrix)?, ..self.clone() })
    }

    fn same_space(&self, o: &HomMorphism) -> Result<()> {
        if self.source != o.source || self.target != o.target || self.degree != o.degree {
            return Err(Error::ObjectMismatch("morphisms live in different hom spaces".into()));
        }
        Ok(())
    }

    pub fn differential(&self) -> HomMorphism {
        differential(self)
    }

    pub fn is_closed(&self) -> bool {
        differential(self).is_zero()
    }
}

/// d(φ) = 𝔼₂∘φ − (−1)^{|φ|} φ∘𝔼₁, as matrices:
/// C₂φ + S₂·dφ − (−1)^k φC₁, then projected for idempotent modules.
pub fn differential(phi: &HomMorphism) -> HomMorphism {
    differential_with_sign(phi, false)
}

/// The hom differential with the sign of the φ∘𝔼₁ term optionally flipped.
/// The flipped form is wrong; the self-test uses it to confirm that its
/// d² = 0 check catches a Koszul sign error.
pub fn differential_with_sign(phi: &HomMorphism, flip_source_sign: bool) -> HomMorphism {
    let a = phi.algebra();
    let (s, t) = (&phi.source, &phi.target);
    let c2phi = t.connection.mul(a, &phi.matrix).expect("shapes agree");
    let phic1 = phi.matrix.mul(a, &s.connection).expect("shapes agree");
    let sign = parity_sign(phi.degree).signed(flip_source_sign);
    let mut m = c2phi.map(|l, i, x| {
        let mut y = x.clone();
        y.add_scaled(&a.apply_d(phi.matrix.get(l, i)), &parity_sign(t.degrees[l]));
        y.add_scaled(phic1.get(l, i), &-&sign);
        y
    });
    if let Some(q) = &t.idempotent {
        m = q.mul(a, &m).expect("shapes agree");
    }
    if let Some(p) = &s.idempotent {
        m = m.mul(a, p).expect("shapes agree");
    }
    HomMorphism { source: s.clone(), target: t.clone(), degree: phi.degree + 1, matrix: m }
}

/// ψ∘φ.
pub fn compose(psi: &HomMorphism, phi: &HomMorphism) -> Result<HomMorphism> {
    if *phi.target != *psi.source {
        return Err(Error::ObjectMismatch(format!(
            "cannot compose {} → {} after {} → {}",
            psi.source.name, psi.target.name, phi.source.name, phi.target.name
        )));
    }
    Ok(HomMorphism {
        source: phi.source.clone(),
        target: psi.target.clone(),
        degree: phi.degree + psi.degree,
        matrix: psi.matrix.mul(phi.algebra(), &phi.matrix)?,
    })
}

/// Lattice weights of generators for the torus kernel, chosen so that each
/// connection entry C_li has weight w_i − w_l; the first generator of each
/// connected component gets weight 0.
pub fn generator_weights(e: &CohesiveModule) -> Result<Vec<Vec<i64>>> {
    let Kernel::NcTorus(nc) = &e.algebra.kernel else {
        return Ok(vec![Vec::new(); e.rank()]);
    };
    if !e.is_free() {
        return Err(Error::Unsupported("idempotent modules over the torus kernel".into()));
    }
    let n = e.rank();
    let mut entry_weight: BTreeMap<(usize, usize), Vec<i64>> = BTreeMap::new();
    for l in 0..n {
        for i in 0..n {
            let x = e.connection.get(l, i);
            let mut ws = x.terms().map(|(k, _)| k.weight.clone());
            if let Some(w) = ws.next() {
                if ws.any(|v| v != w) {
                    return Err(Error::NotWeightHomogeneous(format!(
                        "entry ({l},{i}) of {} mixes lattice weights",
                        e.name
                    )));
                }
                entry_weight.insert((l, i), w);
            }
        }
    }
    let mut w: Vec<Option<Vec<i64>>> = vec![None; n];
    for start in 0..n {
        if w[start].is_some() {
            continue;
        }
        w[start] = Some(vec![0; nc.rank]);
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            let wu = w[u].clone().expect("visited");
            for (&(l, i), lam) in &entry_weight {
                let (other, want) = if i == u {
                    (l, wu.iter().zip(lam).map(|(a, b)| a - b).collect::<Vec<_>>())
                } else if l == u {
                    (i, wu.iter().zip(lam).map(|(a, b)| a + b).collect())
                } else {
                    continue;
                };
                match &w[other] {
                    None => {
                        w[other] = Some(want);
                        queue.push_back(other);
                    }
                    Some(have) if *have != want => {
                        return Err(Error::NotWeightHomogeneous(format!(
                            "generator {} of {} would need weights {have:?} and {want:?}",
                            e.generators[other], e.name
                        )));
                    }
                    Some(_) => {}
                }
            }
        }
    }
    Ok(w.into_iter().map(|x| x.expect("assigned")).collect())
}

/// One coordinate of a hom space: entry (l, i) with basis element `key`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Slot {
    l: usize,
    i: usize,
    key: BasisKey,
}

/// The hom complex in degrees lo..=hi, either the whole space (table kernel)
/// or one lattice weight (torus kernel).
#[derive(Clone, Debug)]
pub struct HomComplex {
    pub source: Arc<CohesiveModule>,
    pub target: Arc<CohesiveModule>,
    pub weight: Option<Vec<i64>>,
    pub complex: FiniteComplex,
    slots: BTreeMap<i32, Vec<Slot>>,
    index: BTreeMap<i32, BTreeMap<Slot, usize>>,
    /// For idempotent modules: a basis of the image of φ ↦ qφp per degree.
    sub: Option<BTreeMap<i32, Vec<Vec<Scalar>>>>,
}

struct WeightData {
    src: Vec<Vec<i64>>,
    tgt: Vec<Vec<i64>>,
    w: Vec<i64>,
}

fn degree_range(src: &CohesiveModule, tgt: &CohesiveModule) -> (i32, i32) {
    let top = src.algebra.top_degree() as i32;
    let diffs: Vec<i32> = tgt
        .degrees
        .iter()
        .flat_map(|dl| src.degrees.iter().map(move |di| dl - di))
        .collect();
    match (diffs.iter().min(), diffs.iter().max()) {
        (Some(&lo), Some(&hi)) => (lo, hi + top),
        _ => (0, 0),
    }
}

fn slots_in_degree(
    src: &CohesiveModule,
    tgt: &CohesiveModule,
    k: i32,
    wd: Option<&WeightData>,
    form: Option<u32>,
) -> Vec<Slot> {
    let a = &src.algebra;
    let top = a.top_degree() as i32;
    let mut out = Vec::new();
    for l in 0..tgt.rank() {
        for i in 0..src.rank() {
            let deg = src.degrees[i] + k - tgt.degrees[l];
            if deg < 0 || deg > top || form.is_some_and(|p| p as i32 != deg) {
                continue;
            }
            let keys = match wd {
                None => a.basis_of_degree(deg as u32),
                Some(wd) => {
                    let lam: Vec<i64> = (0..wd.w.len())
                        .map(|t| wd.src[i][t] - wd.tgt[l][t] + wd.w[t])
                        .collect();
                    a.keys_at_weight(&lam)
                        .into_iter()
                        .filter(|key| key.form.count_ones() as i32 == deg)
                        .collect()
                }
            };
            out.extend(keys.into_iter().map(|key| Slot { l, i, key }));
        }
    }
    out
}

impl HomComplex {
    fn assemble(
        src: &Arc<CohesiveModule>,
        tgt: &Arc<CohesiveModule>,
        weight: Option<Vec<i64>>,
        form: Option<u32>,
        diff: impl Fn(&HomMorphism) -> HomMorphism,
    ) -> Result<HomComplex> {
        if src.algebra != tgt.algebra {
            return Err(Error::BaseMismatch);
        }
        let wd = match &weight {
            Some(w) => Some(WeightData {
                src: generator_weights(src)?,
                tgt: generator_weights(tgt)?,
                w: w.clone(),
            }),
            None => None,
        };
        let (lo, hi) = degree_range(src, tgt);
        let mut slots = BTreeMap::new();
        let mut index = BTreeMap::new();
        for k in lo..=hi + 1 {
            let s = slots_in_degree(src, tgt, k, wd.as_ref(), form);
            index.insert(k, s.iter().cloned().enumerate().map(|(j, x)| (x, j)).collect());
            slots.insert(k, s);
        }
        let mut hc = HomComplex {
            source: src.clone(),
            target: tgt.clone(),
            weight,
            complex: FiniteComplex::concentrated(0, 0),
            slots,
            index,
            sub: None,
        };
        let free_diff = |k: i32| -> Result<SparseMatrix> {
            let cols: Vec<Vec<Scalar>> = hc.slots[&k]
                .iter()
                .map(|s| hc.free_vector(&diff(&hc.slot_morphism(k, s))))
                .collect::<Result<_>>()?;
            Ok(SparseMatrix::from_columns(hc.slots[&(k + 1)].len(), &cols))
        };
        let idempotent = src.idempotent.is_some() || tgt.idempotent.is_some();
        let mut diffs = Vec::new();
        let mut dims = Vec::new();
        if !idempotent {
            for k in lo..=hi {
                dims.push(hc.slots[&k].len());
                diffs.push(free_diff(k)?);
            }
        } else {
            let mut sub = BTreeMap::new();
            for k in lo..=hi + 1 {
                let n = hc.slots[&k].len();
                let mut span = Subspace::new(n);
                for s in &hc.slots[&k] {
                    let phi = hc.slot_morphism(k, s);
                    span.insert(&hc.free_vector(&project(&phi))?);
                }
                sub.insert(k, span.basis());
            }
            for k in lo..=hi {
                let basis = &sub[&k];
                let next = SparseMatrix::from_columns(hc.slots[&(k + 1)].len(), &sub[&(k + 1)]);
                let mut cols = Vec::new();
                for b in basis {
                    let phi = hc.free_morphism(k, b);
                    let dv = hc.free_vector(&project(&diff(&phi)))?;
                    let coords = solve_linear(&next, &dv)?.ok_or_else(|| {
                        Error::SolveFailed("differential leaves the projective hom space".into())
                    })?;
                    cols.push(coords);
                }
                dims.push(basis.len());
                diffs.push(SparseMatrix::from_columns(sub[&(k + 1)].len(), &cols));
            }
            hc.sub = Some(sub);
        }
        // Degree hi+1 is empty, so the last differential is dropped.
        diffs.pop();
        hc.complex = FiniteComplex::new(lo, dims, diffs)?;
        Ok(hc)
    }

    fn slot_morphism(&self, k: i32, s: &Slot) -> HomMorphism {
        let mut m = AMatrix::zeros(self.target.rank(), self.source.rank());
        m.set(s.l, s.i, AElement::basis(s.key.clone()));
        HomMorphism { source: self.source.clone(), target: self.target.clone(), degree: k, matrix: m }
    }

    fn free_morphism(&self, k: i32, v: &[Scalar]) -> HomMorphism {
        let mut m = AMatrix::zeros(self.target.rank(), self.source.rank());
        if let Some(slots) = self.slots.get(&k) {
            for (s, c) in slots.iter().zip(v) {
                m.get_mut(s.l, s.i).add_term(s.key.clone(), c);
            }
        }
        HomMorphism { source: self.source.clone(), target: self.target.clone(), degree: k, matrix: m }
    }

    fn free_vector(&self, phi: &HomMorphism) -> Result<Vec<Scalar>> {
        let empty = BTreeMap::new();
        let idx = self.index.get(&phi.degree).unwrap_or(&empty);
        let mut v = vec![Scalar::zero(); idx.len()];
        for l in 0..phi.matrix.rows() {
            for i in 0..phi.matrix.cols() {
                for (key, c) in phi.matrix.get(l, i).terms() {
                    let slot = Slot { l, i, key: key.clone() };
                    let j = idx.get(&slot).ok_or_else(|| {
                        Error::InvalidHom(format!(
                            "entry ({l},{i}) term {} lies outside this hom complex",
                            phi.algebra().key_name(key)
                        ))
                    })?;
                    v[*j] = &v[*j] + c;
                }
            }
        }
        Ok(v)
    }

    /// Coordinates of φ in the basis of degree |φ|.
    pub fn to_vector(&self, phi: &HomMorphism) -> Result<Vec<Scalar>> {
        let v = self.free_vector(phi)?;
        match &self.sub {
            None => Ok(v),
            Some(sub) => {
                let b = SparseMatrix::from_columns(v.len(), &sub[&phi.degree]);
                solve_linear(&b, &v)?
                    .ok_or_else(|| Error::InvalidHom("morphism is not in the projective hom space".into()))
            }
        }
    }

    /// The morphism with coordinates `v` in degree `k`.
    pub fn morphism(&self, k: i32, v: &[Scalar]) -> HomMorphism {
        match &self.sub {
            None => self.free_morphism(k, v),
            Some(sub) => {
                let n = self.slots.get(&k).map_or(0, |s| s.len());
                let mut free = vec![Scalar::zero(); n];
                for (b, c) in sub.get(&k).map(|x| x.as_slice()).unwrap_or(&[]).iter().zip(v) {
                    for (f, x) in free.iter_mut().zip(b) {
                        *f = &*f + &(c * x);
                    }
                }
                self.free_morphism(k, &free)
            }
        }
    }

    pub fn dim(&self, k: i32) -> usize {
        self.complex.dim(k)
    }

    pub fn dims(&self) -> BTreeMap<i32, usize> {
        self.complex.degrees().map(|k| (k, self.complex.dim(k))).collect()
    }

    pub fn cohomology_dims(&self) -> Result<BTreeMap<i32, usize>> {
        cohomology_dims(&self.complex)
    }

    /// Closed morphisms whose classes form a basis of H^k.
    pub fn cohomology_basis(&self, k: i32) -> Vec<HomMorphism> {
        cohomology_basis(&self.complex, k).iter().map(|v| self.morphism(k, v)).collect()
    }

    /// Basis morphisms of degree k.
    pub fn basis(&self, k: i32) -> Vec<HomMorphism> {
        let n = self.complex.dim(k);
        (0..n)
            .map(|j| {
                let mut v = vec![Scalar::zero(); n];
                v[j] = Scalar::one();
                self.morphism(k, &v)
            })
            .collect()
    }
}

fn project(phi: &HomMorphism) -> HomMorphism {
    let a = phi.algebra();
    let mut m = phi.matrix.clone();
    if let Some(q) = &phi.target.idempotent {
        m = q.mul(a, &m).expect("shapes agree");
    }
    if let Some(p) = &phi.source.idempotent {
        m = m.mul(a, p).expect("shapes agree");
    }
    HomMorphism { matrix: m, ..phi.clone() }
}

/// The hom complex over a table kernel.
pub fn hom_complex(e1: &Arc<CohesiveModule>, e2: &Arc<CohesiveModule>) -> Result<HomComplex> {
    if e1.algebra != e2.algebra {
        return Err(Error::BaseMismatch);
    }
    if !e1.algebra.is_finite() {
        return Err(Error::InfiniteDimensional(
            "hom complexes over the torus kernel are computed one lattice weight at a time".into(),
        ));
    }
    HomComplex::assemble(e1, e2, None, None, differential)
}

/// The weight-`w` summand of the hom complex over the torus kernel.
pub fn hom_complex_at_weight(
    e1: &Arc<CohesiveModule>,
    e2: &Arc<CohesiveModule>,
    w: &[i64],
) -> Result<HomComplex> {
    if e1.algebra != e2.algebra {
        return Err(Error::BaseMismatch);
    }
    match &e1.algebra.kernel {
        Kernel::Table(_) => hom_complex(e1, e2),
        Kernel::NcTorus(nc) if nc.rank == w.len() => {
            HomComplex::assemble(e1, e2, Some(w.to_vec()), None, differential)
        }
        Kernel::NcTorus(nc) => Err(Error::DimensionMismatch(format!(
            "weight of length {} on a rank-{} lattice",
            w.len(),
            nc.rank
        ))),
    }
}

/// The complex relevant for `phi`: the whole hom complex, or the summand of
/// the weight of φ.
pub fn hom_complex_for(phi: &HomMorphism) -> Result<HomComplex> {
    match &phi.algebra().kernel {
        Kernel::Table(_) => hom_complex(&phi.source, &phi.target),
        Kernel::NcTorus(nc) => {
            let w = morphism_weight(phi)?.unwrap_or_else(|| vec![0; nc.rank]);
            hom_complex_at_weight(&phi.source, &phi.target, &w)
        }
    }
}

/// The lattice weight W of a weight-homogeneous morphism (None if zero).
pub fn morphism_weight(phi: &HomMorphism) -> Result<Option<Vec<i64>>> {
    if phi.algebra().nc().is_none() {
        return Ok(None);
    }
    let ws = generator_weights(&phi.source)?;
    let wt = generator_weights(&phi.target)?;
    let mut found: Option<Vec<i64>> = None;
    for l in 0..phi.matrix.rows() {
        for i in 0..phi.matrix.cols() {
            for (k, _) in phi.matrix.get(l, i).terms() {
                let w: Vec<i64> =
                    (0..k.weight.len()).map(|t| k.weight[t] - ws[i][t] + wt[l][t]).collect();
                match &found {
                    None => found = Some(w),
                    Some(f) if *f != w => {
                        return Err(Error::NotWeightHomogeneous("morphism mixes lattice weights".into()))
                    }
                    Some(_) => {}
                }
            }
        }
    }
    Ok(found)
}

/// Cohomology of a hom complex, summed over the lattice weights of a box.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomCohomology {
    pub dims: BTreeMap<i32, usize>,
    /// Support box radius for the torus kernel; absent for table kernels.
    pub radius: Option<i64>,
    /// Weights with nonzero cohomology.
    pub by_weight: BTreeMap<Vec<i64>, BTreeMap<i32, usize>>,
}

/// Checks that every connection entry weight fits in the box of radius r.
pub fn check_support_box(e: &CohesiveModule, r: i64) -> Result<()> {
    for l in 0..e.rank() {
        for i in 0..e.rank() {
            for (k, _) in e.connection.get(l, i).terms() {
                if k.weight.iter().any(|x| x.abs() > r) {
                    return Err(Error::SupportBox(format!(
                        "connection entry ({l},{i}) of {} has weight {:?}, outside the box of radius {r}",
                        e.name, k.weight
                    )));
                }
            }
        }
    }
    Ok(())
}

pub fn hom_cohomology(
    e1: &Arc<CohesiveModule>,
    e2: &Arc<CohesiveModule>,
    radius: Option<i64>,
) -> Result<HomCohomology> {
    match &e1.algebra.kernel {
        Kernel::Table(_) => {
            let dims = hom_complex(e1, e2)?.cohomology_dims()?;
            Ok(HomCohomology { dims: dims.clone(), radius: None, by_weight: BTreeMap::from([(Vec::new(), dims)]) })
        }
        Kernel::NcTorus(nc) => {
            let r = radius.ok_or_else(|| {
                Error::InfiniteDimensional("a support box radius is required for the torus kernel".into())
            })?;
            check_support_box(e1, r)?;
            check_support_box(e2, r)?;
            let mut dims: BTreeMap<i32, usize> = BTreeMap::new();
            let mut by_weight = BTreeMap::new();
            for w in box_weights(nc.rank, r) {
                let h = hom_complex_at_weight(e1, e2, &w)?.cohomology_dims()?;
                for (&k, &d) in &h {
                    *dims.entry(k).or_default() += d;
                }
                if h.values().any(|&d| d > 0) {
                    by_weight.insert(w, h);
                }
            }
            Ok(HomCohomology { dims, radius: Some(r), by_weight })
        }
    }
}

/// A degree −1 endomorphism h with d(h) = id, if one exists.
pub fn null_homotopy_solve(e: &Arc<CohesiveModule>) -> Result<Option<HomMorphism>> {
    let hc = match &e.algebra.kernel {
        Kernel::Table(_) => hom_complex(e, e)?,
        Kernel::NcTorus(nc) => hom_complex_at_weight(e, e, &vec![0; nc.rank])?,
    };
    let id = HomMorphism::identity(e);
    let target = hc.to_vector(&id)?;
    let d = hc.complex.diff(-1);
    let d = if d.rows() == target.len() { d } else { SparseMatrix::zeros(target.len(), hc.dim(-1)) };
    Ok(solve_linear(&d, &target)?.map(|x| hc.morphism(-1, &x)))
}

/// The triangle E → F → Cone(φ) → E[1] of a closed degree-0 morphism.
#[derive(Clone, Debug)]
pub struct Triangle {
    pub cone: Arc<CohesiveModule>,
    /// F → Cone(φ).
    pub inclusion: HomMorphism,
    /// Cone(φ) → E[1], the plain projection.
    pub projection: HomMorphism,
    /// Degree −1 map E → Cone(φ) with d(h) = inclusion∘φ.
    pub homotopy: HomMorphism,
}

/// Cone(φ) = F ⊕ E[1] with connection [[C_F, φ], [0, −C_E]].
pub fn cone(phi: &HomMorphism) -> Result<Triangle> {
    if phi.degree != 0 {
        return Err(Error::WrongDegree { expected: 0, found: phi.degree });
    }
    if !phi.is_closed() {
        return Err(Error::NotClosed);
    }
    let a = phi.algebra();
    let (e, f) = (&phi.source, &phi.target);
    let e1 = e.shift(1);
    let (n, m) = (f.rank(), e.rank());
    let conn = AMatrix::block(&f.connection, &phi.matrix, &AMatrix::zeros(m, n), &e1.connection)?;
    let idem = match (&f.idempotent, &e.idempotent) {
        (None, None) => None,
        (q, p) => {
            let q = q.clone().unwrap_or_else(|| AMatrix::identity(a, n));
            let p = p.clone().unwrap_or_else(|| AMatrix::identity(a, m));
            Some(AMatrix::block(&q, &AMatrix::zeros(n, m), &AMatrix::zeros(m, n), &p)?)
        }
    };
    let cone = Arc::new(CohesiveModule {
        name: format!("Cone({}→{})", e.name, f.name),
        algebra: e.algebra.clone(),
        generators: f
            .generators
            .iter()
            .cloned()
            .chain(e.generators.iter().map(|g| format!("{g}[1]")))
            .collect(),
        degrees: f.degrees.iter().copied().chain(e1.degrees.iter().copied()).collect(),
        connection: conn,
        idempotent: idem,
    });
    let e1 = Arc::new(e1);
    let id_f = HomMorphism::identity(f).matrix;
    let id_e = HomMorphism::identity(e).matrix;
    let inclusion = AMatrix::block(
        &id_f,
        &AMatrix::zeros(n, 0),
        &AMatrix::zeros(m, n),
        &AMatrix::zeros(m, 0),
    )?;
    let projection = AMatrix::block(
        &AMatrix::zeros(0, n),
        &AMatrix::zeros(0, m),
        &AMatrix::zeros(m, n),
        &id_e,
    )?;
    let homotopy = AMatrix::block(
        &AMatrix::zeros(n, 0),
        &AMatrix::zeros(n, m),
        &AMatrix::zeros(m, 0),
        &id_e,
    )?;
    Ok(Triangle {
        inclusion: HomMorphism { source: f.clone(), target: cone.clone(), degree: 0, matrix: inclusion },
        projection: HomMorphism { source: cone.clone(), target: e1, degree: 0, matrix: projection },
        homotopy: HomMorphism { source: e.clone(), target: cone.clone(), degree: -1, matrix: homotopy },
        cone,
    })
}

/// The complex (E⊗A⁰, 𝔼⁰) of a free module over a table kernel, with
/// coordinates (generator, degree-0 basis element).
fn degree_zero_complex(
    e: &CohesiveModule,
    keys: &dyn Fn(usize) -> Vec<BasisKey>,
) -> Result<(FiniteComplex, BTreeMap<(usize, BasisKey), (i32, usize)>)> {
    let a = &e.algebra;
    let (lo, hi) = match (e.degrees.iter().min(), e.degrees.iter().max()) {
        (Some(&l), Some(&h)) => (l, h),
        _ => (0, 0),
    };
    let mut pos = BTreeMap::new();
    let mut dims = vec![0usize; (hi - lo + 1) as usize];
    for i in 0..e.rank() {
        for k in keys(i) {
            let d = e.degrees[i];
            pos.insert((i, k), (d, dims[(d - lo) as usize]));
            dims[(d - lo) as usize] += 1;
        }
    }
    let c0 = e.block(0);
    let mut diffs: Vec<SparseMatrix> = (lo..=hi)
        .map(|k| {
            let next = if k < hi { dims[(k + 1 - lo) as usize] } else { 0 };
            SparseMatrix::zeros(next, dims[(k - lo) as usize])
        })
        .collect();
    for ((i, key), &(d, j)) in &pos {
        let x = AElement::basis(key.clone());
        for l in 0..e.rank() {
            let y = a.multiply(c0.get(l, *i), &x);
            for (k2, c) in y.terms() {
                let &(d2, j2) = pos.get(&(l, k2.clone())).ok_or_else(|| {
                    Error::InvalidHom("degree-zero differential leaves the sampled weights".into())
                })?;
                debug_assert_eq!(d2, d + 1);
                diffs[(d - lo) as usize].add_to(j2, j, c);
            }
        }
    }
    diffs.pop();
    Ok((FiniteComplex::new(lo, dims, diffs)?, pos))
}

/// Decides whether a closed degree-0 φ is a homotopy equivalence by testing
/// φ⁰: (E₁, 𝔼₁⁰) → (E₂, 𝔼₂⁰) for being a quasi-isomorphism. Over the torus
/// kernel the complexes split by total lattice weight and depend on it only
/// modulo the conductor, so residues mod N are enough.
pub fn is_homotopy_equivalence(phi: &HomMorphism) -> Result<bool> {
    if phi.degree != 0 {
        return Err(Error::WrongDegree { expected: 0, found: phi.degree });
    }
    if !phi.is_closed() {
        return Err(Error::NotClosed);
    }
    let (s, t) = (&phi.source, &phi.target);
    if !s.is_free() || !t.is_free() {
        return Err(Error::NotFree("homotopy-equivalence test needs free modules".into()));
    }
    let a = phi.algebra();
    let phi0 = phi.component(0);
    let quasi = |ks: &dyn Fn(usize) -> Vec<BasisKey>, kt: &dyn Fn(usize) -> Vec<BasisKey>| -> Result<bool> {
        let (cs, ps) = degree_zero_complex(s, ks)?;
        let (ct, pt) = degree_zero_complex(t, kt)?;
        let mut maps: BTreeMap<i32, SparseMatrix> = BTreeMap::new();
        for ((i, key), &(d, j)) in &ps {
            let x = AElement::basis(key.clone());
            for l in 0..t.rank() {
                let y = a.multiply(phi0.get(l, *i), &x);
                for (k2, c) in y.terms() {
                    let &(_, j2) = pt.get(&(l, k2.clone())).ok_or_else(|| {
                        Error::InvalidHom("φ⁰ leaves the sampled weights".into())
                    })?;
                    maps.entry(d)
                        .or_insert_with(|| SparseMatrix::zeros(ct.dim(d), cs.dim(d)))
                        .add_to(j2, j, c);
                }
            }
        }
        is_quasi_iso(&ChainMap { source: cs, target: ct, maps })
    };
    match &a.kernel {
        Kernel::Table(_) => {
            let zero_keys = move |_: usize| a.basis_of_degree(0);
            quasi(&zero_keys, &zero_keys)
        }
        Kernel::NcTorus(nc) => {
            let ws = generator_weights(s)?;
            let wt = generator_weights(t)?;
            let shift = morphism_weight(phi)?.unwrap_or_else(|| vec![0; nc.rank]);
            for v in residues(nc.rank, nc.conductor as i64) {
                let ks = |i: usize| {
                    vec![BasisKey::nc((0..nc.rank).map(|q| v[q] - ws[i][q]).collect(), 0)]
                };
                let kt = |l: usize| {
                    vec![BasisKey::nc((0..nc.rank).map(|q| v[q] + shift[q] - wt[l][q]).collect(), 0)]
                };
                if !quasi(&ks, &kt)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

fn residues(rank: usize, n: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..rank {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..n).map(move |x| {
                    let mut v = w.clone();
                    v.push(x);
                    v
                })
            })
            .collect();
    }
    out
}

/// The E₀ and E₁ pages of the filtration by form degree, keyed by (p, q)
/// with total degree p + q.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiltrationPage {
    pub e0_dims: BTreeMap<(u32, i32), usize>,
    pub e1_dims: BTreeMap<(u32, i32), usize>,
}

impl FiltrationPage {
    /// Σ_p E₁^{p, k−p}.
    pub fn e1_total(&self) -> BTreeMap<i32, usize> {
        let mut out = BTreeMap::new();
        for (&(p, q), &d) in &self.e1_dims {
            *out.entry(p as i32 + q).or_default() += d;
        }
        out
    }
}

/// d₀(φ) = 𝔼₂⁰φ − (−1)^{|φ|} φ𝔼₁⁰.
pub fn d0(phi: &HomMorphism) -> HomMorphism {
    let a = phi.algebra();
    let l = phi.target.block(0).mul(a, &phi.matrix).expect("shapes agree");
    let r = phi.matrix.mul(a, &phi.source.block(0)).expect("shapes agree");
    let m = l.sub(&r.scale(&parity_sign(phi.degree))).expect("shapes agree");
    HomMorphism { degree: phi.degree + 1, matrix: m, ..phi.clone() }
}

pub fn filtration_page(
    e1: &Arc<CohesiveModule>,
    e2: &Arc<CohesiveModule>,
    weight: Option<&[i64]>,
) -> Result<FiltrationPage> {
    if !e1.is_free() || !e2.is_free() {
        return Err(Error::NotFree("filtration pages are computed for free modules".into()));
    }
    if e1.algebra.nc().is_some() && weight.is_none() {
        return Err(Error::InfiniteDimensional("pick a lattice weight for the torus kernel".into()));
    }
    let mut page = FiltrationPage { e0_dims: BTreeMap::new(), e1_dims: BTreeMap::new() };
    for p in 0..=e1.algebra.top_degree() {
        let hc = HomComplex::assemble(e1, e2, weight.map(|w| w.to_vec()), Some(p), d0)?;
        let h = hc.cohomology_dims()?;
        for k in hc.complex.degrees() {
            let q = k - p as i32;
            page.e0_dims.insert((p, q), hc.dim(k));
            page.e1_dims.insert((p, q), h[&k]);
        }
    }
    Ok(page)
}

//! Cohesive modules: graded free (or idempotent-presented) modules with a
//! Z-connection whose relative curvature vanishes.

use crate::algebra::AElement;
use crate::amatrix::AMatrix;
use crate::dga::{opposite, CurvedDga};
use crate::error::{Error, Result};
use crate::report::ValidationReport;
use crate::scalar::Scalar;
use std::sync::Arc;

/// A module E• with connection matrix C: 𝔼(e_i) = Σ_l e_l·C_li, extended by
/// 𝔼(e_i a) = 𝔼(e_i)a + (−1)^{|e_i|} e_i·da. Blocks 𝔼^k are the form-degree
/// k parts of C. With an idempotent p the module is the image of p and
/// 𝔼 = p∘(C + d)∘p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohesiveModule {
    pub name: String,
    pub algebra: Arc<CurvedDga>,
    pub generators: Vec<String>,
    pub degrees: Vec<i32>,
    pub connection: AMatrix,
    pub idempotent: Option<AMatrix>,
}

pub(crate) fn parity_sign(d: i32) -> Scalar {
    Scalar::from_int(if d.rem_euclid(2) == 1 { -1 } else { 1 })
}

impl CohesiveModule {
    /// Builds a free module after checking shapes and entry degrees.
    pub fn new(
        name: &str,
        algebra: Arc<CurvedDga>,
        generators: Vec<String>,
        degrees: Vec<i32>,
        connection: AMatrix,
    ) -> Result<CohesiveModule> {
        let m = CohesiveModule {
            name: name.into(),
            algebra,
            generators,
            degrees,
            connection,
            idempotent: None,
        };
        m.check_shape()?;
        Ok(m)
    }

    pub fn with_idempotent(mut self, p: AMatrix) -> Result<CohesiveModule> {
        self.idempotent = Some(p);
        self.check_shape()?;
        Ok(self)
    }

    fn check_shape(&self) -> Result<()> {
        let n = self.generators.len();
        if self.degrees.len() != n || self.connection.rows() != n || self.connection.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "module {} has {} generators, {} degrees and a {}×{} connection",
                self.name,
                n,
                self.degrees.len(),
                self.connection.rows(),
                self.connection.cols()
            )));
        }
        check_entry_degrees(&self.algebra, &self.connection, &self.degrees, &self.degrees, 1)
            .map_err(|e| Error::DegreeMismatch(format!("connection of {}: {e}", self.name)))?;
        if let Some(p) = &self.idempotent {
            if p.rows() != n || p.cols() != n {
                return Err(Error::DimensionMismatch("idempotent has the wrong size".into()));
            }
            check_entry_degrees(&self.algebra, p, &self.degrees, &self.degrees, 0)
                .map_err(|e| Error::DegreeMismatch(format!("idempotent of {}: {e}", self.name)))?;
        }
        Ok(())
    }

    /// Free rank-1 module on one generator with zero connection.
    pub fn rank_one(name: &str, algebra: Arc<CurvedDga>, degree: i32) -> CohesiveModule {
        CohesiveModule {
            name: name.into(),
            algebra,
            generators: vec!["e".into()],
            degrees: vec![degree],
            connection: AMatrix::zeros(1, 1),
            idempotent: None,
        }
    }

    pub fn zero(name: &str, algebra: Arc<CurvedDga>) -> CohesiveModule {
        CohesiveModule {
            name: name.into(),
            algebra,
            generators: Vec::new(),
            degrees: Vec::new(),
            connection: AMatrix::zeros(0, 0),
            idempotent: None,
        }
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn is_free(&self) -> bool {
        self.idempotent.is_none()
    }

    /// The block 𝔼^k of the connection.
    pub fn block(&self, k: u32) -> AMatrix {
        self.connection.form_component(&self.algebra, k)
    }

    fn sign(&self, l: usize) -> Scalar {
        parity_sign(self.degrees[l])
    }

    fn project(&self, v: Vec<AElement>) -> Vec<AElement> {
        match &self.idempotent {
            Some(p) => p.apply(&self.algebra, &v),
            None => v,
        }
    }

    /// 𝔼 applied to the element Σ e_i·v_i.
    pub fn apply_connection(&self, v: &[AElement]) -> Vec<AElement> {
        let a = &self.algebra;
        let mut out = self.connection.apply(a, v);
        for (l, x) in v.iter().enumerate() {
            out[l].add_scaled(&a.apply_d(x), &self.sign(l));
        }
        self.project(out)
    }

    /// v·b for a module element v and b ∈ A.
    pub fn right_multiply(&self, v: &[AElement], b: &AElement) -> Vec<AElement> {
        v.iter().map(|x| self.algebra.multiply(x, b)).collect()
    }

    /// F(v) = 𝔼(𝔼(v)) + v·c.
    pub fn relative_curvature(&self, v: &[AElement]) -> Vec<AElement> {
        let mut f = self.apply_connection(&self.apply_connection(v));
        let vc = self.right_multiply(v, &self.algebra.curvature);
        for (x, y) in f.iter_mut().zip(vc) {
            x.add_assign(&y);
        }
        f
    }

    /// Generator images: the unit vectors, or the columns of the idempotent.
    pub fn generator_vectors(&self) -> Vec<Vec<AElement>> {
        let n = self.rank();
        (0..n)
            .map(|i| match &self.idempotent {
                Some(p) => p.column(i),
                None => {
                    let mut v = vec![AElement::zero(); n];
                    v[i] = self.algebra.unit();
                    v
                }
            })
            .collect()
    }

    /// Matrix whose column i is F(e_i) (or F(p e_i)).
    pub fn curvature_matrix(&self) -> AMatrix {
        let cols: Vec<Vec<AElement>> =
            self.generator_vectors().iter().map(|v| self.relative_curvature(v)).collect();
        AMatrix::from_columns(self.rank(), &cols)
    }

    pub fn format_vector(&self, v: &[AElement]) -> String {
        let parts: Vec<String> = v
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(i, x)| format!("{}⊗({})", self.generators[i], self.algebra.format_element(x)))
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }

    pub fn check(&self) -> ValidationReport {
        check_cohesive(self)
    }

    /// E[n]: degrees lowered by n, connection multiplied by (−1)^n.
    pub fn shift(&self, n: i32) -> CohesiveModule {
        let neg = n.rem_euclid(2) == 1;
        CohesiveModule {
            name: format!("{}[{n}]", self.name),
            algebra: self.algebra.clone(),
            generators: self.generators.clone(),
            degrees: self.degrees.iter().map(|d| d - n).collect(),
            connection: if neg { self.connection.neg() } else { self.connection.clone() },
            idempotent: self.idempotent.clone(),
        }
    }

    /// E ⊕ F with block-diagonal connection.
    pub fn direct_sum(&self, other: &CohesiveModule) -> Result<CohesiveModule> {
        if self.algebra != other.algebra {
            return Err(Error::BaseMismatch);
        }
        let (n, m) = (self.rank(), other.rank());
        let conn = AMatrix::block(
            &self.connection,
            &AMatrix::zeros(n, m),
            &AMatrix::zeros(m, n),
            &other.connection,
        )?;
        let idem = match (&self.idempotent, &other.idempotent) {
            (None, None) => None,
            (p, q) => {
                let p = p.clone().unwrap_or_else(|| AMatrix::identity(&self.algebra, n));
                let q = q.clone().unwrap_or_else(|| AMatrix::identity(&self.algebra, m));
                Some(AMatrix::block(&p, &AMatrix::zeros(n, m), &AMatrix::zeros(m, n), &q)?)
            }
        };
        Ok(CohesiveModule {
            name: format!("{}⊕{}", self.name, other.name),
            algebra: self.algebra.clone(),
            generators: self.generators.iter().chain(&other.generators).cloned().collect(),
            degrees: self.degrees.iter().chain(&other.degrees).copied().collect(),
            connection: conn,
            idempotent: idem,
        })
    }

    /// Change of basis e'_i = Σ_l e_l g_li by a unipotent degree-0 matrix g;
    /// returns the new module and g⁻¹. The new connection is g⁻¹(Cg + S·dg).
    pub fn gauge(&self, g: &AMatrix) -> Result<(CohesiveModule, AMatrix)> {
        if !self.is_free() {
            return Err(Error::NotFree(self.name.clone()));
        }
        let a = &self.algebra;
        check_entry_degrees(a, g, &self.degrees, &self.degrees, 0)
            .map_err(|e| Error::DegreeMismatch(format!("gauge matrix: {e}")))?;
        let ginv = unipotent_inverse(a, g)?;
        let dg = g.map(|l, _, x| a.apply_d(x).scale(&self.sign(l)));
        let c = ginv.mul(a, &self.connection.mul(a, g)?.add(&dg)?)?;
        let m = CohesiveModule::new(
            &format!("{}^g", self.name),
            a.clone(),
            self.generators.clone(),
            self.degrees.clone(),
            c,
        )?;
        Ok((m, ginv))
    }

    /// The dual module over the opposite algebra, on the basis
    /// φ_i = (−1)^{d_i(d_i+1)/2} e_i^* of degree −d_i.
    pub fn dual(&self) -> Result<CohesiveModule> {
        dualize(self)
    }
}

/// Checks that each nonzero entry M_li is homogeneous of degree
/// src_i + shift − tgt_l.
pub(crate) fn check_entry_degrees(
    alg: &CurvedDga,
    m: &AMatrix,
    src: &[i32],
    tgt: &[i32],
    shift: i32,
) -> std::result::Result<(), String> {
    for l in 0..m.rows() {
        for i in 0..m.cols() {
            let x = m.get(l, i);
            if x.is_zero() {
                continue;
            }
            let want = src[i] + shift - tgt[l];
            for (k, _) in x.terms() {
                if alg.degree(k) as i32 != want {
                    return Err(format!(
                        "entry ({l},{i}) = {} should have degree {want}",
                        alg.format_element(x)
                    ));
                }
            }
        }
    }
    Ok(())
}

/// Inverse of 1 + N for nilpotent N, as Σ (−N)^k; fails if g is not of that form.
pub fn unipotent_inverse(a: &CurvedDga, g: &AMatrix) -> Result<AMatrix> {
    let n = g.rows();
    let id = AMatrix::identity(a, n);
    let nil = g.sub(&id)?;
    let mut term = id.clone();
    let mut inv = id.clone();
    let minus = nil.neg();
    for _ in 0..n.max(1) {
        term = term.mul(a, &minus)?;
        if term.is_zero() {
            break;
        }
        inv = inv.add(&term)?;
    }
    if g.mul(a, &inv)? != id || inv.mul(a, g)? != id {
        return Err(Error::InvalidHom("gauge matrix is not unipotent".into()));
    }
    Ok(inv)
}

pub fn check_cohesive(e: &CohesiveModule) -> ValidationReport {
    let a = &e.algebra;
    let mut r = ValidationReport::new();
    let n = e.rank();
    let scope = (!a.is_finite()).then(|| "sampled on lattice weights with |λ_i| ≤ 1".to_string());
    let record = |r: &mut ValidationReport, name: &str, fail: Option<String>| match (&fail, &scope) {
        (None, Some(s)) => r.pass_with(name, s.clone()),
        _ => r.record(name, fail),
    };

    r.record(
        "degrees",
        check_entry_degrees(a, &e.connection, &e.degrees, &e.degrees, 1).err(),
    );
    if let Some(p) = &e.idempotent {
        let sq = p.mul(a, p).ok();
        r.record("idempotent", (sq.as_ref() != Some(p)).then(|| "p² ≠ p".to_string()));
    }

    let keys = a.sample_keys();
    let mut leibniz = None;
    'outer: for i in 0..n {
        for ka in &keys {
            for kb in &keys {
                let (x, y) = (AElement::basis(ka.clone()), AElement::basis(kb.clone()));
                let mut v = vec![AElement::zero(); n];
                v[i] = x.clone();
                let v = match &e.idempotent {
                    Some(p) => p.apply(a, &v),
                    None => v,
                };
                let lhs = e.apply_connection(&e.right_multiply(&v, &y));
                let mut rhs = e.right_multiply(&e.apply_connection(&v), &y);
                let s = parity_sign(e.degrees[i] + a.degree(ka) as i32);
                let vdy = e.right_multiply(&v, &a.apply_d(&y));
                for (t, w) in rhs.iter_mut().zip(&e.project(vdy)) {
                    t.add_scaled(w, &s);
                }
                if lhs != rhs {
                    leibniz = Some(format!(
                        "𝔼(({}·{})·{}) violates the Leibniz rule",
                        e.generators[i],
                        a.key_name(ka),
                        a.key_name(kb)
                    ));
                    break 'outer;
                }
            }
        }
    }
    record(&mut r, "leibniz", leibniz);

    let f = e.curvature_matrix();
    let curv = (0..n).find_map(|i| {
        let col = f.column(i);
        col.iter().any(|x| !x.is_zero()).then(|| {
            format!("F({}) = {}", e.generators[i], e.format_vector(&col))
        })
    });
    r.record("relative_curvature", curv);

    let mut linear = None;
    'lin: for (i, v) in e.generator_vectors().iter().enumerate() {
        let fv = e.relative_curvature(v);
        for k in &keys {
            let b = AElement::basis(k.clone());
            let lhs = e.relative_curvature(&e.right_multiply(v, &b));
            let rhs = e.right_multiply(&fv, &b);
            if lhs != rhs {
                linear = Some(format!(
                    "F({}·{}) ≠ F({})·{}",
                    e.generators[i],
                    a.key_name(k),
                    e.generators[i],
                    a.key_name(k)
                ));
                break 'lin;
            }
        }
    }
    record(&mut r, "curvature_linearity", linear);
    r
}

/// Dual module over A^op with C^∨_ji = −ε_iε_j(−1)^{d_i}(−1)^{|C_ij|d_j} C_ij,
/// ε_i = (−1)^{d_i(d_i+1)/2}.
pub fn dualize(e: &CohesiveModule) -> Result<CohesiveModule> {
    if !e.is_free() {
        return Err(Error::NotFree(e.name.clone()));
    }
    let a = &e.algebra;
    let op = Arc::new(opposite(a));
    let n = e.rank();
    let eps = |d: i32| (d * (d + 1) / 2).rem_euclid(2) == 1;
    let mut c = AMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let x = e.connection.get(i, j);
            if x.is_zero() {
                continue;
            }
            let (di, dj) = (e.degrees[i], e.degrees[j]);
            let mut y = AElement::zero();
            for (deg, part) in a.homogeneous_parts(x) {
                let neg = !(eps(di) ^ eps(dj) ^ (di.rem_euclid(2) == 1) ^ ((deg as i32 * dj).rem_euclid(2) == 1));
                y.add_assign(&part.signed(neg));
            }
            c.set(j, i, y);
        }
    }
    let name = match e.name.strip_suffix("^∨") {
        Some(b) => b.to_string(),
        None => format!("{}^∨", e.name),
    };
    let gens = e
        .generators
        .iter()
        .map(|g| match g.strip_suffix("^*") {
            Some(b) => b.to_string(),
            None => format!("{g}^*"),
        })
        .collect();
    CohesiveModule::new(&name, op, gens, e.degrees.iter().map(|d| -d).collect(), c)
}

/// ⟨ψ, v⟩ for ψ = Σ φ_j·a_j in E^∨⊗A^op and v = Σ e_i b_i in E⊗A:
/// Σ_j (−1)^{|a_j|d_j} ε_j a_j b_j computed in A.
pub fn dual_pairing(e: &CohesiveModule, psi: &[AElement], v: &[AElement]) -> AElement {
    let a = &e.algebra;
    let mut out = AElement::zero();
    for (j, (x, y)) in psi.iter().zip(v).enumerate() {
        let d = e.degrees[j];
        let eps = (d * (d + 1) / 2).rem_euclid(2) == 1;
        for (deg, part) in a.homogeneous_parts(x) {
            let neg = eps ^ ((deg as i32 * d).rem_euclid(2) == 1);
            out.add_assign(&a.multiply(&part, y).signed(neg));
        }
    }
    out
}

/// Module image(p) over A with connection p∘d∘p and its relative curvature.
pub fn grassmann_connection(
    algebra: Arc<CurvedDga>,
    p: &AMatrix,
) -> Result<(CohesiveModule, AMatrix)> {
    let n = p.rows();
    if p.cols() != n || p.mul(&algebra, p)? != *p {
        return Err(Error::NotIdempotent);
    }
    if p.max_form_degree(&algebra).unwrap_or(0) != 0 {
        return Err(Error::NotIdempotent);
    }
    let m = CohesiveModule {
        name: "im(p)".into(),
        algebra,
        generators: (0..n).map(|i| format!("e{}", i + 1)).collect(),
        degrees: vec![0; n],
        connection: AMatrix::zeros(n, n),
        idempotent: None,
    }
    .with_idempotent(p.clone())?;
    let f = m.curvature_matrix();
    Ok((m, f))
}

/// Element e_i·b as a coordinate vector.
pub fn generator_times(n: usize, i: usize, b: AElement) -> Vec<AElement> {
    let mut v = vec![AElement::zero(); n];
    v[i] = b;
    v
}


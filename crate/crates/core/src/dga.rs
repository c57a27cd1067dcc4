//! Curved dgas (A•, d, c), their validation, opposites and homomorphisms.

use crate::algebra::{wedge_sign, AElement, BasisKey, Flavor, Kernel, NcTorus, TableAlgebra};
use crate::error::{Error, Result};
use crate::report::ValidationReport;
use crate::scalar::Scalar;
use std::collections::BTreeMap;
use std::sync::Arc;

/// A curved dga. For table kernels `d` is stored on basis elements; for the
/// torus kernel it is d[λ] = [λ] ⊗ D(λ) extended by the Leibniz rule.
#[derive(Clone, Debug)]
pub struct CurvedDga {
    pub name: String,
    pub kernel: Kernel,
    d_table: Vec<AElement>,
    pub curvature: AElement,
}

impl PartialEq for CurvedDga {
    fn eq(&self, o: &CurvedDga) -> bool {
        self.kernel == o.kernel && self.d_table == o.d_table && self.curvature == o.curvature
    }
}

impl Eq for CurvedDga {}

fn sign(neg: bool) -> Scalar {
    Scalar::from_int(if neg { -1 } else { 1 })
}

fn odd(n: u32) -> bool {
    n % 2 == 1
}

impl CurvedDga {
    pub fn from_table(
        name: &str,
        table: TableAlgebra,
        d: Vec<AElement>,
        curvature: AElement,
    ) -> Result<CurvedDga> {
        if d.len() != table.dim() || table.mult.len() != table.dim() {
            return Err(Error::DimensionMismatch(format!(
                "algebra of dimension {} with {} differential values",
                table.dim(),
                d.len()
            )));
        }
        Ok(CurvedDga { name: name.into(), kernel: Kernel::Table(table), d_table: d, curvature })
    }

    pub fn from_nc(name: &str, nc: NcTorus, curvature: AElement) -> CurvedDga {
        CurvedDga { name: name.into(), kernel: Kernel::NcTorus(nc), d_table: Vec::new(), curvature }
    }

    /// The ground field concentrated in degree 0.
    pub fn field() -> CurvedDga {
        CurvedDga::from_table("field", TableAlgebra::field(), vec![AElement::zero()], AElement::zero())
            .expect("consistent")
    }

    pub fn table(&self) -> Option<&TableAlgebra> {
        match &self.kernel {
            Kernel::Table(t) => Some(t),
            Kernel::NcTorus(_) => None,
        }
    }

    pub fn nc(&self) -> Option<&NcTorus> {
        match &self.kernel {
            Kernel::NcTorus(n) => Some(n),
            Kernel::Table(_) => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.table().is_some()
    }

    /// Differential values on the table basis.
    pub fn d_values(&self) -> &[AElement] {
        &self.d_table
    }

    pub fn degree(&self, k: &BasisKey) -> u32 {
        match &self.kernel {
            Kernel::Table(t) => t.degrees[k.index()],
            Kernel::NcTorus(_) => k.form.count_ones(),
        }
    }

    pub fn top_degree(&self) -> u32 {
        match &self.kernel {
            Kernel::Table(t) => t.top_degree(),
            Kernel::NcTorus(n) => n.forms() as u32,
        }
    }

    pub fn unit_key(&self) -> BasisKey {
        match &self.kernel {
            Kernel::Table(t) => BasisKey::table(t.unit),
            Kernel::NcTorus(n) => BasisKey::nc(vec![0; n.rank], 0),
        }
    }

    pub fn unit(&self) -> AElement {
        AElement::basis(self.unit_key())
    }

    pub fn scalar(&self, s: Scalar) -> AElement {
        AElement::term(self.unit_key(), s)
    }

    /// All basis keys of a table kernel, in index order.
    pub fn basis_keys(&self) -> Option<Vec<BasisKey>> {
        self.table().map(|t| (0..t.dim()).map(BasisKey::table).collect())
    }

    /// Table basis keys of degree `k`.
    pub fn basis_of_degree(&self, k: u32) -> Vec<BasisKey> {
        match &self.kernel {
            Kernel::Table(t) => (0..t.dim())
                .filter(|&i| t.degrees[i] == k)
                .map(BasisKey::table)
                .collect(),
            Kernel::NcTorus(_) => Vec::new(),
        }
    }

    /// All form keys of the torus kernel at one lattice weight, by form degree.
    pub fn keys_at_weight(&self, w: &[i64]) -> Vec<BasisKey> {
        let n = self.nc().map_or(0, |n| n.forms());
        let mut masks: Vec<u32> = (0..1u32 << n).collect();
        masks.sort_by_key(|m| (m.count_ones(), *m));
        masks.into_iter().map(|m| BasisKey::nc(w.to_vec(), m)).collect()
    }

    /// A finite set of keys on which validators run: the whole basis for table
    /// kernels, weights in the radius-1 box for the torus kernel.
    pub fn sample_keys(&self) -> Vec<BasisKey> {
        match &self.kernel {
            Kernel::Table(_) => self.basis_keys().unwrap_or_default(),
            Kernel::NcTorus(n) => box_weights(n.rank, 1)
                .into_iter()
                .flat_map(|w| self.keys_at_weight(&w))
                .collect(),
        }
    }

    pub fn key_name(&self, k: &BasisKey) -> String {
        match &self.kernel {
            Kernel::Table(t) => t.names[k.index()].clone(),
            Kernel::NcTorus(n) => {
                let w: Vec<String> = k.weight.iter().map(|x| x.to_string()).collect();
                format!("[{}]\u{b7}{}", w.join(","), n.form_name(k.form))
            }
        }
    }

    fn mul_keys(&self, a: &BasisKey, b: &BasisKey) -> AElement {
        match &self.kernel {
            Kernel::Table(t) => t.mult[a.index()][b.index()].clone(),
            Kernel::NcTorus(n) => match wedge_sign(a.form, b.form) {
                None => AElement::zero(),
                Some(neg) => {
                    let w: Vec<i64> = a.weight.iter().zip(&b.weight).map(|(x, y)| x + y).collect();
                    let c = n.sigma(&a.weight, &b.weight).signed(neg);
                    AElement::term(BasisKey::nc(w, a.form | b.form), c)
                }
            },
        }
    }

    pub fn multiply(&self, a: &AElement, b: &AElement) -> AElement {
        let mut out = AElement::zero();
        for (ka, va) in a.terms() {
            for (kb, vb) in b.terms() {
                out.add_scaled(&self.mul_keys(ka, kb), &(va * vb));
            }
        }
        out
    }

    fn d_key(&self, k: &BasisKey) -> AElement {
        match &self.kernel {
            Kernel::Table(_) => self.d_table[k.index()].clone(),
            Kernel::NcTorus(n) => {
                let dir = n.derivative_direction(&k.weight);
                let mut out = AElement::zero();
                for (a, c) in dir.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    if let Some(neg) = wedge_sign(1 << a, k.form) {
                        out.add_term(BasisKey::nc(k.weight.clone(), k.form | 1 << a), &c.signed(neg));
                    }
                }
                out
            }
        }
    }

    pub fn apply_d(&self, a: &AElement) -> AElement {
        let mut out = AElement::zero();
        for (k, v) in a.terms() {
            out.add_scaled(&self.d_key(k), v);
        }
        out
    }

    /// Splits an element into homogeneous components, keyed by degree.
    pub fn homogeneous_parts(&self, a: &AElement) -> BTreeMap<u32, AElement> {
        let mut parts: BTreeMap<u32, AElement> = BTreeMap::new();
        for (k, v) in a.terms() {
            parts.entry(self.degree(k)).or_default().add_term(k.clone(), v);
        }
        parts
    }

    /// The degree of a nonzero homogeneous element.
    pub fn degree_of(&self, a: &AElement) -> Option<u32> {
        let parts = self.homogeneous_parts(a);
        if parts.len() == 1 {
            parts.keys().next().copied()
        } else {
            None
        }
    }

    pub fn component(&self, a: &AElement, deg: u32) -> AElement {
        a.filter(|k| self.degree(k) == deg)
    }

    /// Graded commutator ab − (−1)^{|a||b|} ba, extended bilinearly.
    pub fn commutator(&self, a: &AElement, b: &AElement) -> AElement {
        let mut out = AElement::zero();
        for (da, pa) in self.homogeneous_parts(a) {
            for (db, pb) in self.homogeneous_parts(b) {
                out.add_assign(&self.multiply(&pa, &pb));
                out.add_scaled(&self.multiply(&pb, &pa), &sign(!odd(da * db)));
            }
        }
        out
    }

    /// d(ab) − d(a)b − (−1)^{|a|} a d(b) for homogeneous-by-parts `a`.
    pub fn leibniz_defect(&self, a: &AElement, b: &AElement) -> AElement {
        let mut out = self.apply_d(&self.multiply(a, b));
        out.sub_assign(&self.multiply(&self.apply_d(a), b));
        for (da, pa) in self.homogeneous_parts(a) {
            out.add_scaled(&self.multiply(&pa, &self.apply_d(b)), &sign(!odd(da)));
        }
        out
    }

    /// d(d(a)) − [c, a].
    pub fn curvature_defect(&self, a: &AElement) -> AElement {
        self.apply_d(&self.apply_d(a)).minus(&self.commutator(&self.curvature, a))
    }

    pub fn format_element(&self, a: &AElement) -> String {
        if a.is_zero() {
            return "0".into();
        }
        a.terms()
            .map(|(k, v)| format!("{v}*{}", self.key_name(k)))
            .collect::<Vec<_>>()
            .join(" + ")
    }

    pub fn parse_element(&self, text: &str) -> Result<AElement> {
        let mut out = AElement::zero();
        let t = text.trim();
        if t.is_empty() {
            return Err(Error::ScalarParse("empty algebra element".into()));
        }
        for term in split_top(t, '+') {
            let term = term.trim();
            let (coeff, body) = match split_top(term, '*').as_slice() {
                [c, rest @ ..] if !rest.is_empty() => (Scalar::parse(c)?, rest.join("*")),
                _ => {
                    if self.parse_key(term).is_ok() {
                        (Scalar::one(), term.to_string())
                    } else {
                        (Scalar::parse(term)?, self.key_name(&self.unit_key()))
                    }
                }
            };
            out.add_term(self.parse_key(body.trim())?, &coeff);
        }
        Ok(out)
    }

    fn parse_key(&self, name: &str) -> Result<BasisKey> {
        let bad = || Error::Schema {
            path: "element".into(),
            message: format!("unknown basis element {name:?} in algebra {}", self.name),
        };
        match &self.kernel {
            Kernel::Table(t) => t.index_of(name).map(BasisKey::table).ok_or_else(bad),
            Kernel::NcTorus(n) => {
                let rest = name.strip_prefix('[').ok_or_else(bad)?;
                let (w, form) = rest.split_once(']').ok_or_else(bad)?;
                let weight: Vec<i64> = if w.trim().is_empty() {
                    Vec::new()
                } else {
                    w.split(',').map(|x| x.trim().parse::<i64>()).collect::<std::result::Result<_, _>>().map_err(|_| bad())?
                };
                if weight.len() != n.rank {
                    return Err(bad());
                }
                let form = form.trim();
                let mask = match form.strip_prefix('\u{b7}') {
                    Some(f) => n.form_mask(f.trim()).ok_or_else(bad)?,
                    None if form.is_empty() => 0,
                    None => return Err(bad()),
                };
                Ok(BasisKey::nc(weight, mask))
            }
        }
    }

    pub fn validate(&self) -> ValidationReport {
        validate_curved_dga(self)
    }

    pub fn opposite(&self) -> CurvedDga {
        opposite(self)
    }
}

/// Splits at `sep` outside square brackets.
pub(crate) fn split_top(s: &str, sep: char) -> Vec<String> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '[' => depth += 1,
            ']' => depth -= 1,
            _ => {}
        }
        if ch == sep && depth == 0 {
            parts.push(std::mem::take(&mut cur));
        } else {
            cur.push(ch);
        }
    }
    parts.push(cur);
    parts
}

/// All integer vectors of length `rank` with entries in [−r, r], lexicographic.
pub fn box_weights(rank: usize, r: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..rank {
        out = out
            .into_iter()
            .flat_map(|w| {
                (-r..=r).map(move |x| {
                    let mut v = w.clone();
                    v.push(x);
                    v
                })
            })
            .collect();
    }
    out
}

fn first_failure<T>(items: impl IntoIterator<Item = T>, f: impl Fn(&T) -> Option<String>) -> Option<String> {
    items.into_iter().find_map(|x| f(&x))
}

/// Checks unit, grading, associativity, Leibniz, d² = [c,·] and dc = 0.
pub fn validate_curved_dga(a: &CurvedDga) -> ValidationReport {
    let keys = a.sample_keys();
    let name = |k: &BasisKey| a.key_name(k);
    let fmt = |e: &AElement| a.format_element(e);
    let mut r = ValidationReport::new();
    let scope = match &a.kernel {
        Kernel::Table(_) => None,
        Kernel::NcTorus(_) => Some("sampled on lattice weights with |λ_i| ≤ 1".to_string()),
    };
    let record = |r: &mut ValidationReport, n: &str, fail: Option<String>| match (&fail, &scope) {
        (None, Some(s)) => r.pass_with(n, s.clone()),
        _ => r.record(n, fail),
    };

    let pairs: Vec<(&BasisKey, &BasisKey)> =
        keys.iter().flat_map(|x| keys.iter().map(move |y| (x, y))).collect();

    let grading = first_failure(&pairs, |(x, y)| {
        let p = a.multiply(&AElement::basis((*x).clone()), &AElement::basis((*y).clone()));
        let want = a.degree(x) + a.degree(y);
        let bad = p.terms().any(|(k, _)| a.degree(k) != want);
        bad.then(|| format!("product {}·{} is not of degree {want}", name(x), name(y)))
    })
    .or_else(|| {
        first_failure(&keys, |k| {
            let dk = a.apply_d(&AElement::basis((*k).clone()));
            let bad = dk.terms().any(|(t, _)| a.degree(t) != a.degree(k) + 1);
            bad.then(|| format!("d({}) = {} is not of degree {}", name(k), fmt(&dk), a.degree(k) + 1))
        })
    })
    .or_else(|| {
        a.curvature
            .terms()
            .find(|(k, _)| a.degree(k) != 2)
            .map(|_| format!("curvature {} is not of degree 2", fmt(&a.curvature)))
    });
    record(&mut r, "grading", grading);

    let one = a.unit();
    let unit = first_failure(&keys, |k| {
        let b = AElement::basis((*k).clone());
        if a.multiply(&one, &b) != b || a.multiply(&b, &one) != b {
            Some(format!("unit fails on {}", name(k)))
        } else {
            None
        }
    });
    record(&mut r, "unit", unit);

    let triples: Vec<(BasisKey, BasisKey, BasisKey)> = match &a.kernel {
        Kernel::Table(_) => {
            let mut t = Vec::new();
            for x in &keys {
                for y in &keys {
                    for z in &keys {
                        t.push((x.clone(), y.clone(), z.clone()));
                    }
                }
            }
            t
        }
        Kernel::NcTorus(n) => {
            let ws = box_weights(n.rank, 1);
            let full = (1u32 << n.forms()) - 1;
            let forms = [0u32, 1, full];
            let mut t = Vec::new();
            for x in &ws {
                for y in &ws {
                    for z in &ws {
                        for (i, &f) in forms.iter().enumerate() {
                            let g = forms[(i + 1) % forms.len()];
                            t.push((BasisKey::nc(x.clone(), f), BasisKey::nc(y.clone(), 0), BasisKey::nc(z.clone(), g)));
                        }
                    }
                }
            }
            t
        }
    };
    let assoc = first_failure(&triples, |(x, y, z)| {
        let (x1, y1, z1) = (AElement::basis(x.clone()), AElement::basis(y.clone()), AElement::basis(z.clone()));
        let l = a.multiply(&a.multiply(&x1, &y1), &z1);
        let rr = a.multiply(&x1, &a.multiply(&y1, &z1));
        (l != rr).then(|| format!("({}·{})·{} ≠ {}·({}·{})", name(x), name(y), name(z), name(x), name(y), name(z)))
    });
    record(&mut r, "associativity", assoc);

    let leibniz = first_failure(&pairs, |(x, y)| {
        let e = a.leibniz_defect(&AElement::basis((*x).clone()), &AElement::basis((*y).clone()));
        (!e.is_zero()).then(|| format!("basis pair ({}, {}): defect {}", name(x), name(y), fmt(&e)))
    });
    record(&mut r, "leibniz", leibniz);

    let d2 = first_failure(&keys, |k| {
        let e = a.curvature_defect(&AElement::basis((*k).clone()));
        (!e.is_zero()).then(|| format!("on {}: d²−[c,·] = {}", name(k), fmt(&e)))
    });
    record(&mut r, "d2_equals_curvature_commutator", d2);

    let dc = a.apply_d(&a.curvature);
    record(&mut r, "bianchi", (!dc.is_zero()).then(|| format!("dc = {}", fmt(&dc))));
    r
}

/// a ·_op b = (−1)^{|a||b|} b·a, same d, curvature −c.
pub fn opposite(a: &CurvedDga) -> CurvedDga {
    let name = match a.name.strip_suffix("^op") {
        Some(base) => base.to_string(),
        None => format!("{}^op", a.name),
    };
    let kernel = match &a.kernel {
        Kernel::Table(t) => {
            let n = t.dim();
            let mult = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| t.mult[j][i].signed(odd(t.degrees[i] * t.degrees[j])))
                        .collect()
                })
                .collect();
            Kernel::Table(TableAlgebra { mult, ..t.clone() })
        }
        Kernel::NcTorus(nc) => {
            let b = nc.b.iter().map(|row| row.iter().map(|x| -x).collect()).collect();
            Kernel::NcTorus(NcTorus { b, ..nc.clone() })
        }
    };
    CurvedDga { name, kernel, d_table: a.d_table.clone(), curvature: a.curvature.neg() }
}

/// The graded-algebra part of a homomorphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlgebraMap {
    Identity,
    /// Images of the source table basis elements.
    Table(Vec<AElement>),
}

/// A curved dga homomorphism (f, ω).
#[derive(Clone, Debug)]
pub struct DgaHom {
    pub source: Arc<CurvedDga>,
    pub target: Arc<CurvedDga>,
    pub map: AlgebraMap,
    pub omega: AElement,
}

impl DgaHom {
    pub fn identity(a: Arc<CurvedDga>) -> DgaHom {
        DgaHom { source: a.clone(), target: a, map: AlgebraMap::Identity, omega: AElement::zero() }
    }

    pub fn apply(&self, x: &AElement) -> AElement {
        match &self.map {
            AlgebraMap::Identity => x.clone(),
            AlgebraMap::Table(imgs) => {
                let mut out = AElement::zero();
                for (k, v) in x.terms() {
                    out.add_scaled(&imgs[k.index()], v);
                }
                out
            }
        }
    }

    /// Composite `next ∘ self`: (g∘f, g(ω_f) + ω_g).
    pub fn then(&self, next: &DgaHom) -> Result<DgaHom> {
        if *self.target != *next.source {
            return Err(Error::InvalidHom("composite of non-matching homomorphisms".into()));
        }
        let map = match (&self.map, &next.map) {
            (AlgebraMap::Identity, m) => m.clone(),
            (m, AlgebraMap::Identity) => m.clone(),
            (AlgebraMap::Table(f), AlgebraMap::Table(_)) => {
                AlgebraMap::Table(f.iter().map(|x| next.apply(x)).collect())
            }
        };
        Ok(DgaHom {
            source: self.source.clone(),
            target: next.target.clone(),
            map,
            omega: next.apply(&self.omega).plus(&next.omega),
        })
    }

    pub fn check(&self) -> ValidationReport {
        check_hom(self)
    }
}

/// Checks f(d₁a) = d₂f(a) + [ω, f(a)] and f(c₁) = c₂ + d₂ω + ω².
pub fn check_hom(h: &DgaHom) -> ValidationReport {
    let (s, t) = (&*h.source, &*h.target);
    let mut r = ValidationReport::new();
    let keys = s.sample_keys();
    if let AlgebraMap::Table(imgs) = &h.map {
        if s.table().map(|x| x.dim()) != Some(imgs.len()) {
            r.fail("grading", "map does not list one image per source basis element");
            return r;
        }
    }
    if matches!(h.map, AlgebraMap::Identity) && s.kernel != t.kernel {
        r.fail("grading", "identity map between different algebras");
        return r;
    }
    let grading = keys
        .iter()
        .find_map(|k| {
            let fk = h.apply(&AElement::basis(k.clone()));
            let bad = fk.terms().any(|(x, _)| t.degree(x) != s.degree(k));
            bad.then(|| format!("f({}) is not of degree {}", s.key_name(k), s.degree(k)))
        })
        .or_else(|| {
            h.omega
                .terms()
                .any(|(x, _)| t.degree(x) != 1)
                .then(|| "ω is not of degree 1".to_string())
        });
    r.record("grading", grading);
    let unit = (h.apply(&s.unit()) != t.unit()).then(|| "f(1) ≠ 1".to_string());
    r.record("unit", unit);
    let mult = keys.iter().find_map(|x| {
        keys.iter().find_map(|y| {
            let (bx, by) = (AElement::basis(x.clone()), AElement::basis(y.clone()));
            let l = h.apply(&s.multiply(&bx, &by));
            let rr = t.multiply(&h.apply(&bx), &h.apply(&by));
            (l != rr).then(|| format!("f({}·{}) ≠ f({})f({})", s.key_name(x), s.key_name(y), s.key_name(x), s.key_name(y)))
        })
    });
    r.record("multiplicative", mult);
    let diff = keys.iter().find_map(|k| {
        let b = AElement::basis(k.clone());
        let fb = h.apply(&b);
        let lhs = h.apply(&s.apply_d(&b));
        let rhs = t.apply_d(&fb).plus(&t.commutator(&h.omega, &fb));
        let e = lhs.minus(&rhs);
        (!e.is_zero()).then(|| format!("on {}: residual {}", s.key_name(k), t.format_element(&e)))
    });
    r.record("differential", diff);
    let lhs = h.apply(&s.curvature);
    let rhs = t
        .curvature
        .plus(&t.apply_d(&h.omega))
        .plus(&t.multiply(&h.omega, &h.omega));
    let e = lhs.minus(&rhs);
    r.record("curvature", (!e.is_zero()).then(|| format!("f(c₁) − c₂ − d₂ω − ω² = {}", t.format_element(&e))));
    r
}

/// The gauge-shifted dga (A, d − [ω,·], ω² − dω) together with the
/// homomorphism (id, ω) from a flat dga into it.
pub fn gauge_shift(a: &Arc<CurvedDga>, omega: &AElement) -> Result<DgaHom> {
    if !a.curvature.is_zero() {
        return Err(Error::InvalidHom("gauge shift expects a flat dga".into()));
    }
    let t = a.table().ok_or_else(|| Error::Unsupported("gauge shift needs a table kernel".into()))?;
    let d: Vec<AElement> = (0..t.dim())
        .map(|i| {
            let b = AElement::basis(BasisKey::table(i));
            a.apply_d(&b).minus(&a.commutator(omega, &b))
        })
        .collect();
    let c = a.multiply(omega, omega).minus(&a.apply_d(omega));
    let target = CurvedDga::from_table(&format!("{}[ω]", a.name), t.clone(), d, c)?;
    Ok(DgaHom { source: a.clone(), target: Arc::new(target), map: AlgebraMap::Identity, omega: omega.clone() })
}

/// Flavor-aware name of the torus derivation, used in reports.
pub fn flavor_name(f: Flavor) -> &'static str {
    match f {
        Flavor::DeRham => "de Rham",
        Flavor::Dolbeault => "Dolbeault",
    }
}

//! The acceptance suite: seven criteria, each reduced to one pass/fail line.
//! Reports carry no timings, so two runs compare byte for byte; elapsed
//! times are returned separately.

use crate::algebra::{AElement, BasisKey, Flavor};
use crate::amatrix::AMatrix;
use crate::cohesive::{check_cohesive, CohesiveModule};
use crate::dga::CurvedDga;
use crate::error::{Error, Result};
use crate::functors::{pairing_defect, pairing_table, pairing_table_torus, twist_by_dualizing, DualizingData};
use crate::hom::{cone, differential_with_sign, hom_complex, is_homotopy_equivalence, null_homotopy_solve, HomMorphism};
use crate::models::{
    chevalley_eilenberg, lie_dualizing_data, nc_dualizing_data, nc_derivation, nc_torus_dga, nc_trace, q,
    weight_cohomology, LieAlgebraData, NcTorusData,
};
use crate::random::{self, Rng64};
use crate::scalar::Scalar;
use crate::transfer::{cohesify, transfer_scenarios};
use num_rational::BigRational;
use rand::Rng;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;
use std::time::{Duration, Instant};

/// A deliberate defect injected to confirm the suite can fail.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mutation {
    None,
    /// Flip the sign of φ∘𝔼₁ in the hom differential of criterion 1.
    KoszulFlip,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AcceptanceReport {
    pub criteria: Vec<CriterionResult>,
}

impl AcceptanceReport {
    pub fn passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }
}

impl fmt::Display for AcceptanceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.criteria {
            let status = if c.passed { "PASS" } else { "FAIL" };
            writeln!(f, "{status} criterion {} {}: {}", c.id, c.name, c.detail)?;
        }
        Ok(())
    }
}

/// Seconds allowed per criterion.
pub const BUDGETS: [(u32, u64); 6] = [(1, 10), (2, 10), (3, 5), (4, 5), (5, 10), (6, 2)];

#[derive(Clone, Copy, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    pub mutation: Mutation,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { seed: 20_240_601, mutation: Mutation::None }
    }
}

/// Counts cases and remembers the first failure.
#[derive(Default)]
struct Tally {
    cases: usize,
    failure: Option<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok && self.failure.is_none() {
            self.failure = Some(what());
        }
    }

    fn error(&mut self, context: &str, e: Error) {
        self.check(false, || format!("{context}: {e}"));
    }

    fn result(self, id: u32, name: &str, summary: String) -> CriterionResult {
        let passed = self.failure.is_none();
        let detail = match self.failure {
            None => summary,
            Some(f) => format!("{summary}; first failure: {f}"),
        };
        CriterionResult { id, name: name.into(), passed, detail }
    }
}

/// A random degree-k morphism E → F with entries of the matching form degree.
fn random_morphism(rng: &mut Rng64, e: &Arc<CohesiveModule>, f: &Arc<CohesiveModule>, k: i32) -> HomMorphism {
    let a = &e.algebra;
    let mut m = AMatrix::zeros(f.rank(), e.rank());
    for l in 0..f.rank() {
        for i in 0..e.rank() {
            if let Ok(p) = u32::try_from(e.degrees[i] + k - f.degrees[l]) {
                m.set(l, i, random::element_of_degree(rng, a, p));
            }
        }
    }
    HomMorphism::new(e.clone(), f.clone(), k, m).expect("entries have the required degrees")
}

fn degree_range(e: &CohesiveModule, f: &CohesiveModule, top: u32) -> std::ops::RangeInclusive<i32> {
    let lo = f.degrees.iter().flat_map(|&x| e.degrees.iter().map(move |&y| x - y)).min().unwrap_or(0) - top as i32;
    let hi = f.degrees.iter().flat_map(|&x| e.degrees.iter().map(move |&y| x - y)).max().unwrap_or(0);
    lo..=hi
}

fn module_leibniz_defect(e: &CohesiveModule, v: &[AElement], deg: i32, b: &AElement) -> Vec<AElement> {
    let a = &e.algebra;
    let lhs = e.apply_connection(&e.right_multiply(v, b));
    let mut rhs = e.right_multiply(&e.apply_connection(v), b);
    let db = a.apply_d(b);
    let sign = Scalar::from_int(if deg.rem_euclid(2) == 1 { -1 } else { 1 });
    for (r, x) in rhs.iter_mut().zip(v) {
        r.add_scaled(&a.multiply(x, &db), &sign);
    }
    lhs.iter().zip(&rhs).map(|(p, q)| p.minus(q)).collect()
}

fn all_zero(v: &[AElement]) -> bool {
    v.iter().all(AElement::is_zero)
}

fn axiom_suite(cfg: &SuiteConfig) -> CriterionResult {
    let mut rng = random::rng(cfg.seed);
    let mut t = Tally::default();
    let (mut dgas, mut modules, mut curved) = (0, 0, 0);
    let flip = cfg.mutation == Mutation::KoszulFlip;
    while dgas < 50 {
        let d = random::curved_dga(&mut rng);
        let a = d.algebra();
        let report = a.validate();
        t.check(report.passed(), || format!("{} fails validation: {report}", a.name));
        dgas += 1;
        if !a.curvature.is_zero() {
            curved += 1;
        }
        let ms = match random::flat_modules(&mut rng, &d.flat).and_then(|ms| {
            ms.iter().map(|m| d.transport(m).map(Arc::new)).collect::<Result<Vec<_>>>()
        }) {
            Ok(ms) => ms,
            Err(e) => {
                t.error("module construction", e);
                continue;
            }
        };
        for m in &ms {
            modules += 1;
            let r = check_cohesive(m);
            t.check(r.passed(), || format!("module {} over {}: {r}", m.name, a.name));
        }
        // d² = 0 on random morphisms of every degree between three pairs.
        for _ in 0..3 {
            let (e, f) = (&ms[rng.gen_range(0..ms.len())], &ms[rng.gen_range(0..ms.len())]);
            for k in degree_range(e, f, a.top_degree()) {
                let phi = random_morphism(&mut rng, e, f, k);
                let dd = differential_with_sign(&differential_with_sign(&phi, flip), flip);
                t.check(dd.is_zero(), || format!("d²φ ≠ 0 for φ: {} → {} of degree {k} over {}", e.name, f.name, a.name));
            }
        }
        for m in &ms {
            for _ in 0..2 {
                let deg = rng.gen_range(-2..=3);
                let v = random::module_vector(&mut rng, m, deg);
                let b = random::element(&mut rng, &a);
                let lhs = m.relative_curvature(&m.right_multiply(&v, &b));
                let rhs = m.right_multiply(&m.relative_curvature(&v), &b);
                t.check(lhs == rhs, || format!("F(v·a) ≠ F(v)·a on {} over {}", m.name, a.name));
                let defect = module_leibniz_defect(m, &v, deg, &b);
                t.check(all_zero(&defect), || format!("module Leibniz fails on {} over {}", m.name, a.name));
            }
        }
        for _ in 0..4 {
            let (x, y) = (random::element(&mut rng, &a), random::element(&mut rng, &a));
            let defect = a.leibniz_defect(&x, &y);
            t.check(defect.is_zero(), || format!("d(ab) ≠ da·b ± a·db over {}: {}", a.name, a.format_element(&defect)));
        }
    }
    let summary = format!("{dgas} dgas ({curved} curved), {modules} modules, {} exact checks", t.cases);
    t.result(1, "axiom-suite", summary)
}

fn ce_algebra(rng: &mut Rng64) -> Arc<CurvedDga> {
    Arc::new(chevalley_eilenberg(&random::lie_algebra(rng)))
}

fn equivalence_candidates(rng: &mut Rng64, a: &Arc<CurvedDga>) -> Result<Vec<(String, HomMorphism)>> {
    let ms: Vec<Arc<CohesiveModule>> = random::flat_modules(rng, a)?.into_iter().map(Arc::new).collect();
    let (p, g, c) = (&ms[0], &ms[2], &ms[3]);
    let mut out = vec![
        ("identity".to_string(), HomMorphism::identity(c)),
        ("zero".to_string(), HomMorphism::zero(g.clone(), g.clone(), 0)),
        ("scalar".to_string(), HomMorphism::identity(g).scale(&random::nonzero_scalar(rng))),
        ("random".to_string(), random::closed_morphism(rng, p, g)?),
    ];
    let gauge = random::unipotent(rng, g);
    let (gauged, ginv) = g.gauge(&gauge)?;
    // e'_i = Σ e_l g_li, so e_i = Σ e'_l (g⁻¹)_li.
    let iso = HomMorphism::new(g.clone(), Arc::new(gauged), 0, ginv)?;
    out.push(("gauge".to_string(), iso));
    let phi = random::closed_morphism(rng, p, g)?;
    out.push(("cone-inclusion".to_string(), cone(&phi)?.inclusion));
    Ok(out.into_iter().filter(|(_, m)| m.is_closed()).collect())
}

fn criterion_equivalence(cfg: &SuiteConfig) -> CriterionResult {
    let mut rng = random::rng(cfg.seed ^ 0x2);
    let mut t = Tally::default();
    let mut kinds: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    let mut total = 0;
    while total < 24 {
        let a = ce_algebra(&mut rng);
        let cands = match equivalence_candidates(&mut rng, &a) {
            Ok(c) => c,
            Err(e) => {
                t.error("candidate construction", e);
                break;
            }
        };
        for (kind, phi) in cands {
            total += 1;
            let by_criterion = is_homotopy_equivalence(&phi);
            let by_cone = cone(&phi).and_then(|tr| null_homotopy_solve(&tr.cone)).map(|h| h.is_some());
            match (by_criterion, by_cone) {
                (Ok(x), Ok(y)) => {
                    let entry = kinds.entry(kind.clone()).or_default();
                    if x {
                        entry.0 += 1;
                    } else {
                        entry.1 += 1;
                    }
                    t.check(x == y, || format!("{kind} over {}: φ⁰ criterion {x}, cone contractible {y}", a.name));
                }
                (Err(e), _) | (_, Err(e)) => t.error(&kind, e),
            }
        }
    }
    let split: Vec<String> = kinds.iter().map(|(k, (y, n))| format!("{k} {y}/{n}")).collect();
    let summary = format!("{total} morphisms agree (equivalence/not: {})", split.join(", "));
    t.result(2, "criterion-equivalence", summary)
}

fn transfer_criterion() -> CriterionResult {
    let mut t = Tally::default();
    let mut parts = Vec::new();
    for s in transfer_scenarios() {
        match cohesify(&s.x, &s.e0, &s.map0) {
            Ok(out) => {
                let report = check_cohesive(&out.module);
                t.check(report.passed(), || format!("{}: output fails check_cohesive: {report}", s.name));
                t.check(out.morphism.is_closed(), || format!("{}: d(e) ≠ 0", s.name));
                let contractible = cone(&out.morphism).and_then(|c| null_homotopy_solve(&c.cone)).map(|h| h.is_some());
                t.check(contractible == Ok(true), || format!("{}: cone(e) is not contractible", s.name));
                for step in &out.steps {
                    t.check(step.invariant_holds, || format!("{}: step invariant fails at n = {}", s.name, step.form_degree));
                }
                t.check(out.report.passed(), || format!("{}: {}", s.name, out.report));
                parts.push(format!("{} ({} steps)", s.name, out.steps.len()));
            }
            Err(e) => t.error(&s.name, e),
        }
    }
    t.result(3, "transfer", parts.join(", "))
}

fn dims_text(d: &BTreeMap<i32, usize>) -> String {
    let v: Vec<String> = d.values().map(|x| x.to_string()).collect();
    format!("({})", v.join(","))
}

fn trivial(d: &DualizingData) -> Arc<CohesiveModule> {
    Arc::new(CohesiveModule::rank_one("O", d.algebra().clone(), 0))
}

fn random_cochain(rng: &mut Rng64, hc: &crate::hom::HomComplex, k: i32) -> Option<HomMorphism> {
    let basis = hc.basis(k);
    let first = basis.first()?.scale(&Scalar::zero());
    Some(basis.iter().fold(first, |s, b| s.add(&b.scale(&random::scalar(rng))).expect("same space")))
}

fn duality_criterion(cfg: &SuiteConfig) -> CriterionResult {
    let mut t = Tally::default();
    let mut notes = Vec::new();
    let mut run = |t: &mut Tally| -> Result<()> {
        let aff = lie_dualizing_data(&LieAlgebraData::aff1());
        let o = trivial(&aff);
        let od = Arc::new(twist_by_dualizing(&aff, &o)?);
        let h = hom_complex(&o, &o)?.cohomology_dims()?;
        let ht = hom_complex(&o, &od)?.cohomology_dims()?;
        t.check(h == BTreeMap::from([(0, 1), (1, 1), (2, 0)]), || format!("aff(1) dims {h:?}"));
        t.check(ht == BTreeMap::from([(0, 0), (1, 1), (2, 1)]), || format!("aff(1) twisted dims {ht:?}"));
        let perfect = pairing_table(&aff, &o, &o)?.perfect();
        t.check(perfect, || "aff(1) pairing is not perfect".into());
        notes.push(format!("aff(1) {} vs twisted {}", dims_text(&h), dims_text(&ht)));

        let sl2 = lie_dualizing_data(&LieAlgebraData::sl2());
        let o = trivial(&sl2);
        let h = hom_complex(&o, &o)?.cohomology_dims()?;
        t.check(h == BTreeMap::from([(0, 1), (1, 0), (2, 0), (3, 1)]), || format!("sl2 dims {h:?}"));
        t.check(sl2.bimodule.module.connection.is_zero(), || "sl2 dualizing connection is not trivial".into());
        t.check(pairing_table(&sl2, &o, &o)?.perfect(), || "sl2 pairing is not perfect".into());
        notes.push(format!("sl2 {}", dims_text(&h)));

        let mut rng = random::rng(cfg.seed ^ 0x4);
        let mut pairs = 0;
        for l in [LieAlgebraData::aff1(), LieAlgebraData::sl2(), random::heisenberg()] {
            let d = lie_dualizing_data(&l);
            let ms: Vec<Arc<CohesiveModule>> =
                random::flat_modules(&mut rng, d.algebra())?.into_iter().map(Arc::new).collect();
            for (e, f) in [(&ms[0], &ms[1]), (&ms[2], &ms[0]), (&ms[3], &ms[2])] {
                let ed = Arc::new(twist_by_dualizing(&d, e)?);
                let (pef, pfs) = (hom_complex(e, f)?, hom_complex(f, &ed)?);
                let g = d.dimension as i32;
                for k in pef.complex.degrees() {
                    for _ in 0..2 {
                        let (Some(phi), Some(psi)) =
                            (random_cochain(&mut rng, &pef, k), random_cochain(&mut rng, &pfs, g - k - 1))
                        else {
                            continue;
                        };
                        let v = pairing_defect(&d, &phi, &psi)?;
                        pairs += 1;
                        t.check(v.is_zero(), || format!("⟨dφ,ψ⟩ ± ⟨φ,dψ⟩ = {v} over {}", l.name));
                    }
                }
            }
        }
        notes.push(format!("compatibility on {pairs} random cochain pairs"));
        Ok(())
    };
    if let Err(e) = run(&mut t) {
        t.error("duality", e);
    }
    t.result(4, "duality-tables", notes.join("; "))
}

fn nc_element(rng: &mut Rng64, rank: usize, radius: i64, form: u32) -> AElement {
    let mut x = AElement::zero();
    for _ in 0..rng.gen_range(1..=4) {
        let w: Vec<i64> = (0..rank).map(|_| rng.gen_range(-radius..=radius)).collect();
        let mut c = random::nonzero_scalar(rng);
        if rng.gen_bool(0.5) {
            c = &c * &Scalar::zeta(3, rng.gen_range(0..3));
        }
        x.add_term(BasisKey::nc(w, form), &c);
    }
    x
}

fn torus_criterion(cfg: &SuiteConfig) -> CriterionResult {
    let mut t = Tally::default();
    let mut notes = Vec::new();
    let mut run = |t: &mut Tally| -> Result<()> {
        let data = NcTorusData::rank_two(BigRational::new(1.into(), 3.into()), true);
        let a = Arc::new(nc_torus_dga(&data, Flavor::Dolbeault, None)?);
        let nc = a.nc().expect("torus kernel");
        let mut rng = random::rng(cfg.seed ^ 0x5);
        let lattice = |rng: &mut Rng64| -> Vec<i64> { (0..2).map(|_| rng.gen_range(-4..=4)).collect() };
        for _ in 0..50 {
            let (l, l2, m) = (lattice(&mut rng), lattice(&mut rng), lattice(&mut rng));
            let sum: Vec<i64> = l.iter().zip(&l2).map(|(x, y)| x + y).collect();
            t.check(nc.sigma(&sum, &m) == &nc.sigma(&l, &m) * &nc.sigma(&l2, &m), || {
                format!("σ is not additive at {l:?} + {l2:?}, {m:?}")
            });
            t.check((&nc.sigma(&l, &m) * &nc.sigma(&m, &l)).is_one(), || format!("σ({l:?},{m:?})σ({m:?},{l:?}) ≠ 1"));
        }
        for _ in 0..100 {
            let (x, y) = (nc_element(&mut rng, 2, 2, 0), nc_element(&mut rng, 2, 2, 0));
            let (xy, yx) = (nc_trace(&a, &a.multiply(&x, &y))?, nc_trace(&a, &a.multiply(&y, &x))?);
            t.check(xy == yx, || format!("τ(xy) = {xy} ≠ τ(yx) = {yx}"));
        }
        let key = |w: [i64; 2]| AElement::basis(BasisKey::nc(w.to_vec(), 0));
        let comm = [key([1, 0]), key([0, 1]), key([-1, 0]), key([0, -1])]
            .iter()
            .fold(a.unit(), |p, x| a.multiply(&p, x));
        let tau = nc_trace(&a, &comm)?;
        t.check(tau == Scalar::zeta(3, 2), || format!("τ(UVU⁻¹V⁻¹) = {tau}"));
        notes.push(format!("τ(UVU⁻¹V⁻¹) = {tau}"));
        for _ in 0..20 {
            let x = nc_element(&mut rng, 2, 3, 0);
            for i in 0..2 {
                let v = nc_trace(&a, &nc_derivation(&x, i))?;
                t.check(v.is_zero(), || format!("τ(ξ_{i} x) = {v}"));
            }
        }
        let d = nc_dualizing_data(&a)?;
        for _ in 0..20 {
            let x = nc_element(&mut rng, 2, 3, 0);
            let v = d.integral_of_connection(&x);
            t.check(v.is_zero(), || format!("∫𝔻x = {v}"));
        }
        let o = Arc::new(CohesiveModule::rank_one("O", a.clone(), 0));
        for radius in 1..=3 {
            let w = weight_cohomology(&o, radius)?;
            t.check(w.cohomology.dims == BTreeMap::from([(0, 1), (1, 1)]) && w.stable, || {
                format!("H^(0,•) at radius {radius}: {:?}, stable {}", w.cohomology.dims, w.stable)
            });
        }
        notes.push("H^(0,•) = (1,1) at radii 1..=3 and 4".into());
        let tab = pairing_table_torus(&d, &o, &o, 3)?;
        t.check(tab.perfect(), || format!("torus pairing blocks {:?}", tab.blocks.keys().collect::<Vec<_>>()));
        notes.push("pairing full rank at radius 3".into());
        Ok(())
    };
    if let Err(e) = run(&mut t) {
        t.error("torus", e);
    }
    let summary = format!("{} exact checks; {}", t.cases, notes.join("; "));
    t.result(5, "nc-torus", summary)
}

/// sl₂ with [e,f] = h + e, which violates the Jacobi identity.
pub fn jacobi_violating() -> LieAlgebraData {
    let mut c = LieAlgebraData::sl2().constants;
    c[1][2][1] = q(1);
    c[2][1][1] = q(-1);
    LieAlgebraData::new("sl2-broken", LieAlgebraData::sl2().basis, c, true).expect("antisymmetric")
}

fn negative_controls() -> CriterionResult {
    let mut t = Tally::default();
    let broken = chevalley_eilenberg(&jacobi_violating());
    let r = broken.validate();
    let d2 = r.get("d2_equals_curvature_commutator").map(|c| c.passed);
    t.check(d2 == Some(false), || format!("Jacobi violation not detected: {r}"));
    let data = NcTorusData::rank_two(BigRational::new(1.into(), 3.into()), false);
    let shell = nc_torus_dga(&data, Flavor::DeRham, None);
    let curv = shell.as_ref().ok().and_then(|a| a.parse_element("[1,0]\u{b7}v1^v2").ok());
    match curv.map(|c| nc_torus_dga(&data, Flavor::DeRham, Some(c))) {
        Some(Err(Error::NonCentralCurvature(_))) => t.check(true, String::new),
        other => t.check(false, || format!("non-central curvature gave {other:?}")),
    }
    let s = transfer_scenarios().into_iter().find(|s| s.name == "mixing-aff1").expect("bundled");
    let zero = AMatrix::zeros(s.map0.rows(), s.map0.cols());
    match cohesify(&s.x, &s.e0, &zero) {
        Err(Error::NotQuasiIso(_)) => t.check(true, String::new),
        other => t.check(false, || format!("non-quasi-iso input gave {:?}", other.map(|o| o.steps))),
    }
    t.result(6, "negative-controls", "Jacobi violation, non-central curvature, non-quasi-iso input".into())
}

/// Criteria 1–6 with the time each took.
pub fn run_criteria(cfg: &SuiteConfig) -> (AcceptanceReport, Vec<Duration>) {
    let mut report = AcceptanceReport::default();
    let mut times = Vec::new();
    let steps: [&dyn Fn() -> CriterionResult; 6] = [
        &|| axiom_suite(cfg),
        &|| criterion_equivalence(cfg),
        &transfer_criterion,
        &|| duality_criterion(cfg),
        &|| torus_criterion(cfg),
        &negative_controls,
    ];
    for step in steps {
        let start = Instant::now();
        report.criteria.push(step());
        times.push(start.elapsed());
    }
    (report, times)
}

/// Runs criteria 1–6 twice and adds criterion 7, byte-identical reports.
pub fn selftest(cfg: &SuiteConfig) -> (AcceptanceReport, Vec<Duration>) {
    let (mut first, times) = run_criteria(cfg);
    let (second, _) = run_criteria(cfg);
    let same = first.to_string() == second.to_string();
    first.criteria.push(CriterionResult {
        id: 7,
        name: "determinism".into(),
        passed: same,
        detail: if same { "two runs produce byte-identical reports".into() } else { "reports differ between runs".into() },
    });
    (first, times)
}

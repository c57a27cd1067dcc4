//! One function per command. Each turns a built model and string arguments
//! into a `Report`; core errors become `Status::Error` reports.

use crate::report::{Report, Table};
use cohesive_core::cohesive::{check_cohesive, dualize};
use cohesive_core::functors::{pairing_table, pairing_table_torus, serre_functor, PairingTable};
use cohesive_core::hom::{cone, hom_cohomology, hom_complex, is_homotopy_equivalence, null_homotopy_solve, HomCohomology};
use cohesive_core::models::weight_cohomology;
use cohesive_core::schema::{JobSpec, Model};
use cohesive_core::transfer::{check_quasi_cohesive, cohesify};
use cohesive_core::{CohesiveModule, Error, HomMorphism, Kernel, Result, ValidationReport};
use std::collections::BTreeMap;
use std::sync::Arc;

pub const SUPPORT_BOX_VAR: &str = "COHESIVE_DG_SUPPORT_BOX";

/// Settings shared by every job of one invocation.
#[derive(Clone, Debug, Default)]
pub struct Options {
    /// `--box`, which beats a job's own `box` argument.
    pub support_box: Option<i64>,
    /// The environment default, used when neither is given.
    pub env_box: Option<String>,
    pub cohomology: bool,
}

pub fn run_job(model: &Model, job: &JobSpec, opts: &Options) -> Report {
    let mut report = Report::new(&job.name, &job.command);
    let outcome = match job.command.as_str() {
        "validate" => validate(model, &mut report),
        "cohom" => cohom(model, &job.args, opts, &mut report),
        "hom" => hom(model, &job.args, opts, &mut report),
        "cone" => cone_job(model, &job.args, &mut report),
        "dual" => dual(model, &job.args, &mut report),
        "transfer" => transfer(model, &mut report),
        "serre" => serre(model, &job.args, opts, &mut report),
        other => Err(Error::Unsupported(format!("unknown command {other}"))),
    };
    match outcome {
        Ok(()) => report,
        Err(e) => Report::error(&job.name, &job.command, e.to_string()),
    }
}

fn arg<'a>(args: &'a BTreeMap<String, String>, key: &str) -> Result<&'a str> {
    args.get(key)
        .map(String::as_str)
        .ok_or_else(|| Error::Schema { path: format!("args.{key}"), message: "missing argument".into() })
}

fn module(model: &Model, args: &BTreeMap<String, String>, key: &str) -> Result<Arc<CohesiveModule>> {
    let name = arg(args, key)?;
    model.modules.get(name).cloned().ok_or_else(|| Error::Schema {
        path: format!("args.{key}"),
        message: format!("undefined module {name}"),
    })
}

fn morphism<'a>(model: &'a Model, args: &BTreeMap<String, String>) -> Result<&'a HomMorphism> {
    let name = arg(args, "morphism")?;
    model.morphisms.get(name).ok_or_else(|| Error::Schema {
        path: "args.morphism".into(),
        message: format!("undefined morphism {name}"),
    })
}

fn parse_box(text: &str, origin: &str) -> Result<i64> {
    text.trim()
        .parse::<i64>()
        .ok()
        .filter(|r| *r >= 0)
        .ok_or_else(|| Error::Schema { path: origin.into(), message: format!("support box {text:?} is not a radius") })
}

/// The support box radius for torus kernels: `--box`, then the job's `box`
/// argument, then the environment. Table kernels need none.
fn radius(model: &Model, args: &BTreeMap<String, String>, opts: &Options) -> Result<Option<i64>> {
    if !matches!(model.algebra.kernel, Kernel::NcTorus(_)) {
        return Ok(None);
    }
    if let Some(r) = opts.support_box {
        return Ok(Some(r));
    }
    if let Some(t) = args.get("box") {
        return parse_box(t, "args.box").map(Some);
    }
    match &opts.env_box {
        Some(t) => parse_box(t, SUPPORT_BOX_VAR).map(Some),
        None => Err(Error::InfiniteDimensional(format!(
            "the torus kernel needs a support box: pass --box or set {SUPPORT_BOX_VAR}"
        ))),
    }
}

fn module_tables(title: &str, e: &CohesiveModule) -> Vec<Table> {
    let mut gens = Table::new(format!("{title} generators"), &["generator", "degree"]);
    for (g, d) in e.generators.iter().zip(&e.degrees) {
        gens.row(vec![g.clone(), d.to_string()]);
    }
    let mut cols = vec!["row"];
    cols.extend(e.generators.iter().map(String::as_str));
    let mut conn = Table::new(format!("{title} connection"), &cols);
    for (g, row) in e.generators.iter().zip(e.connection.format(&e.algebra)) {
        let mut cells = vec![g.clone()];
        cells.extend(row);
        conn.row(cells);
    }
    vec![gens, conn]
}

fn dims_table(title: &str, dims: &BTreeMap<i32, usize>) -> Table {
    let mut t = Table::new(title, &["degree", "dim"]);
    for (k, d) in dims {
        t.row(vec![k.to_string(), d.to_string()]);
    }
    t
}

fn weight_table(title: &str, h: &HomCohomology) -> Table {
    let mut t = Table::new(title, &["weight", "degree", "dim"]);
    for (w, dims) in &h.by_weight {
        let wt: Vec<String> = w.iter().map(i64::to_string).collect();
        for (k, d) in dims.iter().filter(|(_, d)| **d > 0) {
            t.row(vec![format!("({})", wt.join(",")), k.to_string(), d.to_string()]);
        }
    }
    t
}

fn checked(report: &mut Report, title: &str, v: &ValidationReport) {
    report.require(v.passed());
    report.push(Table::from_checks(title, v));
}

fn validate(model: &Model, report: &mut Report) -> Result<()> {
    checked(report, &format!("algebra {}", model.algebra.name), &model.algebra.validate());
    for (name, e) in &model.modules {
        checked(report, &format!("module {name}"), &check_cohesive(e));
    }
    for (name, phi) in &model.morphisms {
        let mut v = ValidationReport::new();
        v.record("closed", (!phi.is_closed()).then(|| "d(φ) ≠ 0".to_string()));
        checked(report, &format!("morphism {name}"), &v);
    }
    if let Some(d) = &model.dualizing {
        checked(report, "dualizing data", &d.check());
    }
    if let Some(s) = &model.transfer {
        checked(report, &format!("transfer input {}", s.x.name), &check_quasi_cohesive(&s.x));
        checked(report, &format!("transfer target {}", s.e0.name), &check_cohesive(&s.e0));
    }
    Ok(())
}

fn cohom(model: &Model, args: &BTreeMap<String, String>, opts: &Options, report: &mut Report) -> Result<()> {
    let e = module(model, args, "module")?;
    match radius(model, args, opts)? {
        None => {
            let o = Arc::new(CohesiveModule::rank_one("O", model.algebra.clone(), 0));
            let h = hom_cohomology(&o, &e, None)?;
            report.push(dims_table(&format!("H({})", e.name), &h.dims));
        }
        Some(r) => {
            let w = weight_cohomology(&e, r)?;
            report.push(dims_table(&format!("H({}) in box {r}", e.name), &w.cohomology.dims));
            report.push(weight_table("nonzero weights", &w.cohomology));
            let mut s = Table::new("box enlargement", &["radius", "stable"]);
            s.row(vec![format!("{r} -> {}", r + 1), if w.stable { "yes" } else { "no" }.into()]);
            report.push(s);
        }
    }
    Ok(())
}

fn hom(model: &Model, args: &BTreeMap<String, String>, opts: &Options, report: &mut Report) -> Result<()> {
    let (e, f) = (module(model, args, "src")?, module(model, args, "dst")?);
    let title = format!("P({}, {})", e.name, f.name);
    match radius(model, args, opts)? {
        None => {
            let hc = hom_complex(&e, &f)?;
            let dims: BTreeMap<i32, usize> = hc.complex.degrees().map(|k| (k, hc.dim(k))).collect();
            report.push(dims_table(&format!("{title} cochains"), &dims));
            if opts.cohomology {
                report.push(dims_table(&format!("H {title}"), &hc.cohomology_dims()?));
            }
        }
        Some(r) => {
            let h = hom_cohomology(&e, &f, Some(r))?;
            report.push(dims_table(&format!("H {title} in box {r}"), &h.dims));
            report.push(weight_table("nonzero weights", &h));
        }
    }
    Ok(())
}

fn cone_job(model: &Model, args: &BTreeMap<String, String>, report: &mut Report) -> Result<()> {
    let phi = morphism(model, args)?;
    let tri = cone(phi)?;
    report.tables.extend(module_tables(&tri.cone.name, &tri.cone));
    checked(report, &format!("{} is cohesive", tri.cone.name), &check_cohesive(&tri.cone));
    let by_criterion = is_homotopy_equivalence(phi)?;
    let contractible = null_homotopy_solve(&tri.cone)?.is_some();
    let mut t = Table::new("homotopy equivalence", &["test", "result"]);
    t.row(vec!["degree-0 part is a quasi-isomorphism".into(), by_criterion.to_string()]);
    t.row(vec!["cone is contractible".into(), contractible.to_string()]);
    report.require(by_criterion == contractible);
    report.push(t);
    Ok(())
}

fn dual(model: &Model, args: &BTreeMap<String, String>, report: &mut Report) -> Result<()> {
    let e = module(model, args, "module")?;
    let ev = dualize(&e)?;
    report.tables.extend(module_tables(&ev.name, &ev));
    checked(report, &format!("{} is cohesive", ev.name), &check_cohesive(&ev));
    if let Some(d) = &model.dualizing {
        let s = serre_functor(d, &e)?;
        report.tables.extend(module_tables(&s.name, &s));
        checked(report, &format!("{} is cohesive", s.name), &check_cohesive(&s));
    }
    Ok(())
}

fn transfer(model: &Model, report: &mut Report) -> Result<()> {
    let s = model
        .transfer
        .as_ref()
        .ok_or_else(|| Error::Schema { path: "transfer".into(), message: "the model has no transfer data".into() })?;
    let out = cohesify(&s.x, &s.e0, &s.map0)?;
    let mut steps = Table::new("inductive steps", &["form degree", "invariant"]);
    for st in &out.steps {
        steps.row(vec![st.form_degree.to_string(), if st.invariant_holds { "holds" } else { "fails" }.into()]);
    }
    report.push(steps);
    report.tables.extend(module_tables(&out.module.name, &out.module));
    checked(report, "transfer checks", &out.report);
    Ok(())
}

fn pairing_tables(report: &mut Report, tab: &PairingTable) {
    let mut t = Table::new("pairing ranks", &["degree", "left dim", "right dim", "rank"]);
    for (k, b) in &tab.blocks {
        t.row(vec![k.to_string(), b.left_dim.to_string(), b.right_dim.to_string(), b.rank.to_string()]);
    }
    report.push(t);
    for (k, b) in &tab.blocks {
        if b.matrix.rows() == 0 || b.matrix.cols() == 0 {
            continue;
        }
        let names: Vec<String> = (0..b.matrix.cols()).map(|j| format!("psi{j}")).collect();
        let mut cols = vec!["row"];
        cols.extend(names.iter().map(String::as_str));
        let mut m = Table::new(format!("pairing matrix in degree {k}"), &cols);
        for (i, row) in b.matrix.to_dense().iter().enumerate() {
            let mut cells = vec![format!("phi{i}")];
            cells.extend(row.iter().map(|x| x.to_string()));
            m.row(cells);
        }
        report.push(m);
    }
    report.require(tab.perfect());
}

fn serre(model: &Model, args: &BTreeMap<String, String>, opts: &Options, report: &mut Report) -> Result<()> {
    let d = model
        .dualizing
        .as_ref()
        .ok_or_else(|| Error::Schema { path: "dualizing".into(), message: "the model has no dualizing data".into() })?;
    let (e, f) = (module(model, args, "E")?, module(model, args, "F")?);
    let tab = match radius(model, args, opts)? {
        None => pairing_table(d, &e, &f)?,
        Some(r) => pairing_table_torus(d, &e, &f, r)?,
    };
    pairing_tables(report, &tab);
    Ok(())
}

/// A failed load as a report, so that it renders like any other outcome.
pub fn load_error(e: &Error) -> Report {
    Report::error("load", "parse", e.to_string())
}

//! The JSON model file: one curved dga plus named modules, morphisms,
//! dualizing data, an optional transfer problem and a list of jobs.

use crate::algebra::{AElement, BasisKey, Flavor, Kernel, TableAlgebra};
use crate::amatrix::AMatrix;
use crate::cohesive::CohesiveModule;
use crate::dga::{AlgebraMap, CurvedDga};
use crate::error::{Error, Result};
use crate::functors::{CohesiveBimodule, DualizingData, IntegralKind, LeftAction};
use crate::hom::HomMorphism;
use crate::models::{
    chevalley_eilenberg, generalized_higgs_algebroid, lie_dualizing_data, nc_dualizing_data, nc_torus_dga, q,
    LieAlgebraData, NcTorusData,
};
use crate::scalar::Scalar;
use crate::transfer::{transfer_scenarios, QuasiCohesiveModule, TransferScenario};
use num_integer::Integer;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::Arc;

pub const BUNDLED_MODELS: [&str; 6] =
    ["ce-abelian-1", "ce-aff1", "ce-sl2", "higgs-aff1", "nctorus-theta-1-3", "nctorus-dolbeault-g1"];

/// Commands a job may name.
pub const JOB_COMMANDS: [&str; 7] = ["validate", "cohom", "hom", "cone", "dual", "transfer", "serre"];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub name: String,
    /// "Q" or "Q(zeta_N)"; every scalar in the file must lie in this field.
    pub field: String,
    pub algebra: AlgebraSpec,
    /// Basis name ↦ d(basis element); omitted entries are zero.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub differential: BTreeMap<String, String>,
    #[serde(default = "zero_text")]
    pub curvature: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub modules: BTreeMap<String, ModuleSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub morphisms: BTreeMap<String, MorphismSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dualizing: Option<DualizingSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transfer: Option<TransferSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub jobs: Vec<JobSpec>,
}

fn zero_text() -> String {
    "0".into()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kernel", rename_all = "snake_case", deny_unknown_fields)]
pub enum AlgebraSpec {
    Table {
        basis: Vec<GeneratorSpec>,
        unit: String,
        /// Nonzero products of basis elements.
        products: Vec<ProductSpec>,
    },
    NcTorus {
        rank: usize,
        #[serde(rename = "B")]
        b: Vec<Vec<String>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        complex_structure: Option<Vec<Vec<String>>>,
        /// "de_rham" or "dolbeault".
        flavor: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub name: String,
    pub degree: i32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductSpec {
    pub left: String,
    pub right: String,
    pub value: String,
}

/// The form-degree k part of a matrix over the algebra.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockSpec {
    pub k: u32,
    pub matrix: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleSpec {
    pub generators: Vec<GeneratorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub idempotent: Option<Vec<Vec<String>>>,
    #[serde(default)]
    pub connection: Vec<BlockSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismSpec {
    pub source: String,
    pub target: String,
    pub degree: i32,
    #[serde(default)]
    pub blocks: Vec<BlockSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegralSpec {
    /// Coefficient of the named top-degree basis element.
    Top(String),
    TorusTrace,
}

/// Rank-one dualizing module with A acting along the identity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DualizingSpec {
    pub generator: String,
    pub dimension: u32,
    pub connection: String,
    pub integral: IntegralSpec,
}

/// A quasi-cohesive X over a base with A⁰ = k, the module E⁰ by name, and e⁰.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransferSpec {
    pub x: ModuleSpec,
    pub e0: String,
    pub map: Vec<BlockSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub name: String,
    pub command: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub args: BTreeMap<String, String>,
}

/// A parsed model file with every object built.
#[derive(Clone, Debug)]
pub struct Model {
    pub file: ModelFile,
    pub algebra: Arc<CurvedDga>,
    pub modules: BTreeMap<String, Arc<CohesiveModule>>,
    pub morphisms: BTreeMap<String, HomMorphism>,
    pub dualizing: Option<DualizingData>,
    pub transfer: Option<TransferScenario>,
}

fn schema(path: &str, message: impl Into<String>) -> Error {
    Error::Schema { path: path.into(), message: message.into() }
}

fn field_conductor(text: &str) -> Result<u32> {
    let t = text.trim();
    if t == "Q" {
        return Ok(1);
    }
    t.strip_prefix("Q(zeta_")
        .and_then(|r| r.strip_suffix(')'))
        .and_then(|n| n.parse::<u32>().ok())
        .filter(|&n| n > 0)
        .ok_or_else(|| schema("field", format!("expected \"Q\" or \"Q(zeta_N)\", found {t:?}")))
}

fn field_text(n: u32) -> String {
    if n == 1 {
        "Q".into()
    } else {
        format!("Q(zeta_{n})")
    }
}

/// Parses element texts at a document path and checks the declared field.
struct Reader<'a> {
    algebra: &'a CurvedDga,
    conductor: u32,
}

impl Reader<'_> {
    fn element(&self, path: &str, text: &str) -> Result<AElement> {
        let x = self.algebra.parse_element(text).map_err(|e| match e {
            Error::Schema { message, .. } => schema(path, message),
            Error::ScalarParse(m) => Error::ScalarParse(format!("{path}: {m}")),
            other => schema(path, other.to_string()),
        })?;
        for (_, c) in x.terms() {
            if self.conductor % c.conductor() != 0 {
                return Err(schema(path, format!("scalar {c} lies outside {}", field_text(self.conductor))));
            }
        }
        Ok(x)
    }

    fn matrix(&self, path: &str, rows: usize, cols: usize, m: &[Vec<String>]) -> Result<AMatrix> {
        if m.len() != rows || m.iter().any(|r| r.len() != cols) {
            return Err(schema(path, format!("expected a {rows}×{cols} matrix")));
        }
        let mut out = AMatrix::zeros(rows, cols);
        for (i, row) in m.iter().enumerate() {
            for (j, t) in row.iter().enumerate() {
                out.set(i, j, self.element(&format!("{path}[{i}][{j}]"), t)?);
            }
        }
        Ok(out)
    }

    fn blocks(&self, path: &str, rows: usize, cols: usize, blocks: &[BlockSpec]) -> Result<AMatrix> {
        let mut out = AMatrix::zeros(rows, cols);
        for (b, block) in blocks.iter().enumerate() {
            let p = format!("{path}[{b}].matrix");
            let m = self.matrix(&p, rows, cols, &block.matrix)?;
            if m.max_form_degree(self.algebra).is_some_and(|d| d != block.k)
                || m.form_component(self.algebra, block.k) != m
            {
                return Err(schema(&p, format!("entries must have form degree {}", block.k)));
            }
            out = out.add(&m)?;
        }
        Ok(out)
    }

    fn module(&self, name: &str, path: &str, spec: &ModuleSpec, algebra: &Arc<CurvedDga>) -> Result<CohesiveModule> {
        let n = spec.generators.len();
        let conn = self.blocks(&format!("{path}.connection"), n, n, &spec.connection)?;
        let (gens, degs) = spec.generators.iter().map(|g| (g.name.clone(), g.degree)).unzip();
        let m = CohesiveModule::new(name, algebra.clone(), gens, degs, conn).map_err(|e| schema(path, e.to_string()))?;
        match &spec.idempotent {
            None => Ok(m),
            Some(p) => {
                let p = self.matrix(&format!("{path}.idempotent"), n, n, p)?;
                m.with_idempotent(p).map_err(|e| schema(path, e.to_string()))
            }
        }
    }
}

fn rational(path: &str, t: &str) -> Result<BigRational> {
    Scalar::parse(t)
        .map_err(|e| match e {
            Error::ScalarParse(m) => Error::ScalarParse(format!("{path}: {m}")),
            other => other,
        })?
        .as_rational()
        .ok_or_else(|| schema(path, "expected a rational number"))
}

fn rational_matrix(path: &str, m: &[Vec<String>]) -> Result<Vec<Vec<BigRational>>> {
    m.iter()
        .enumerate()
        .map(|(i, r)| r.iter().enumerate().map(|(j, t)| rational(&format!("{path}[{i}][{j}]"), t)).collect())
        .collect()
}

fn build_algebra(f: &ModelFile, conductor: u32) -> Result<Arc<CurvedDga>> {
    match &f.algebra {
        AlgebraSpec::Table { basis, unit, products } => {
            let names: Vec<String> = basis.iter().map(|g| g.name.clone()).collect();
            let degrees = basis
                .iter()
                .enumerate()
                .map(|(i, g)| {
                    u32::try_from(g.degree)
                        .map_err(|_| schema(&format!("algebra.basis[{i}].degree"), "degrees must be non-negative"))
                })
                .collect::<Result<Vec<u32>>>()?;
            let index = |path: &str, name: &str| {
                names.iter().position(|n| n == name).ok_or_else(|| schema(path, format!("unknown basis element {name:?}")))
            };
            let n = names.len();
            let unit = index("algebra.unit", unit)?;
            // Products are parsed in a provisional algebra that knows only the names.
            let shell = TableAlgebra {
                names: names.clone(),
                degrees: degrees.clone(),
                unit,
                mult: vec![vec![AElement::zero(); n]; n],
            };
            let shell = CurvedDga::from_table(&f.name, shell, vec![AElement::zero(); n], AElement::zero())?;
            let r = Reader { algebra: &shell, conductor };
            let mut mult = vec![vec![AElement::zero(); n]; n];
            for (p, spec) in products.iter().enumerate() {
                let path = format!("algebra.products[{p}]");
                let (i, j) = (index(&format!("{path}.left"), &spec.left)?, index(&format!("{path}.right"), &spec.right)?);
                mult[i][j] = r.element(&format!("{path}.value"), &spec.value)?;
            }
            let table = TableAlgebra { names: names.clone(), degrees, unit, mult };
            let mut d = vec![AElement::zero(); n];
            for (name, text) in &f.differential {
                let path = format!("differential.{name}");
                d[index(&path, name)?] = r.element(&path, text)?;
            }
            let c = r.element("curvature", &f.curvature)?;
            Ok(Arc::new(CurvedDga::from_table(&f.name, table, d, c)?))
        }
        AlgebraSpec::NcTorus { rank, b, complex_structure, flavor } => {
            if b.len() != *rank {
                return Err(schema("algebra.B", format!("expected {rank} rows")));
            }
            if !f.differential.is_empty() {
                return Err(schema("differential", "the torus differential is determined by the kernel"));
            }
            let flavor = match flavor.as_str() {
                "de_rham" => Flavor::DeRham,
                "dolbeault" => Flavor::Dolbeault,
                other => return Err(schema("algebra.flavor", format!("unknown flavor {other:?}"))),
            };
            let b = rational_matrix("algebra.B", b)?;
            let j = complex_structure.as_ref().map(|m| rational_matrix("algebra.complex_structure", m)).transpose()?;
            let data = NcTorusData::new(b, j).map_err(|e| schema("algebra", e.to_string()))?;
            let plain = nc_torus_dga(&data, flavor, None)?;
            let c = Reader { algebra: &plain, conductor: conductor.lcm(&torus_conductor(plain.nc().expect("torus"))) }
                .element("curvature", &f.curvature)?;
            let mut a = if c.is_zero() { plain } else { nc_torus_dga(&data, flavor, Some(c))? };
            a.name = f.name.clone();
            Ok(Arc::new(a))
        }
    }
}

/// The field generated by σ and the derivative directions of the torus.
fn torus_conductor(nc: &crate::algebra::NcTorus) -> u32 {
    nc.dvec.iter().flatten().fold(nc.conductor, |n, c| n.lcm(&c.conductor()))
}

fn resolve<'m, T>(map: &'m BTreeMap<String, T>, path: &str, name: &str, what: &str) -> Result<&'m T> {
    map.get(name).ok_or_else(|| schema(path, format!("undefined {what} {name:?}")))
}

impl ModelFile {
    pub fn from_json(text: &str) -> Result<ModelFile> {
        serde_json::from_str(text).map_err(|e| {
            schema(&format!("line {} column {}", e.line(), e.column()), e.to_string())
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }

    /// Builds every object; names that do not resolve are schema errors
    /// naming the missing object.
    pub fn build(&self) -> Result<Model> {
        let conductor = field_conductor(&self.field)?;
        let algebra = build_algebra(self, conductor)?;
        let conductor = match &algebra.kernel {
            Kernel::NcTorus(nc) => conductor.lcm(&torus_conductor(nc)),
            Kernel::Table(_) => conductor,
        };
        let r = Reader { algebra: &algebra, conductor };
        let mut modules = BTreeMap::new();
        for (name, spec) in &self.modules {
            let m = r.module(name, &format!("modules.{name}"), spec, &algebra)?;
            modules.insert(name.clone(), Arc::new(m));
        }
        let mut morphisms = BTreeMap::new();
        for (name, spec) in &self.morphisms {
            let path = format!("morphisms.{name}");
            let s = resolve(&modules, &format!("{path}.source"), &spec.source, "module")?.clone();
            let t = resolve(&modules, &format!("{path}.target"), &spec.target, "module")?.clone();
            let m = r.blocks(&format!("{path}.blocks"), t.rank(), s.rank(), &spec.blocks)?;
            let phi = HomMorphism::new(s, t, spec.degree, m).map_err(|e| schema(&path, e.to_string()))?;
            morphisms.insert(name.clone(), phi);
        }
        let dualizing = self.dualizing.as_ref().map(|d| build_dualizing(&r, &algebra, d)).transpose()?;
        let transfer = match &self.transfer {
            None => None,
            Some(t) => {
                let e0 = resolve(&modules, "transfer.e0", &t.e0, "module")?;
                let n = t.x.generators.len();
                let conn = r.blocks("transfer.x.connection", n, n, &t.x.connection)?;
                let (gens, degs) = t.x.generators.iter().map(|g| (g.name.clone(), g.degree)).unzip();
                let x = QuasiCohesiveModule::over_field("X", algebra.clone(), gens, degs, conn)
                    .map_err(|e| schema("transfer.x", e.to_string()))?;
                let map0 = r.blocks("transfer.map", n, e0.rank(), &t.map)?;
                Some(TransferScenario { name: self.name.clone(), x, e0: (**e0).clone(), map0 })
            }
        };
        for (i, job) in self.jobs.iter().enumerate() {
            let path = format!("jobs[{i}]");
            if !JOB_COMMANDS.contains(&job.command.as_str()) {
                return Err(schema(&format!("{path}.command"), format!("unknown command {:?}", job.command)));
            }
            for (key, value) in &job.args {
                let p = format!("{path}.args.{key}");
                match key.as_str() {
                    "src" | "dst" | "E" | "F" | "module" => {
                        resolve(&modules, &p, value, "module")?;
                    }
                    "morphism" => {
                        resolve(&morphisms, &p, value, "morphism")?;
                    }
                    "box" => {
                        value.parse::<i64>().map_err(|_| schema(&p, "expected an integer radius"))?;
                    }
                    _ => return Err(schema(&p, format!("unknown argument {key:?}"))),
                }
            }
        }
        Ok(Model { file: self.clone(), algebra, modules, morphisms, dualizing, transfer })
    }
}

fn build_dualizing(r: &Reader, a: &Arc<CurvedDga>, d: &DualizingSpec) -> Result<DualizingData> {
    let mut c = AMatrix::zeros(1, 1);
    c.set(0, 0, r.element("dualizing.connection", &d.connection)?);
    let module = CohesiveModule::new("D", a.clone(), vec![d.generator.clone()], vec![0], c)
        .map_err(|e| schema("dualizing.connection", e.to_string()))?;
    let integral = match &d.integral {
        IntegralSpec::TorusTrace => {
            if a.nc().is_none() {
                return Err(schema("dualizing.integral", "torus_trace needs the torus kernel"));
            }
            IntegralKind::TorusTrace
        }
        IntegralSpec::Top(name) => {
            let x = r.element("dualizing.integral.top", name)?;
            let key = match x.terms().next() {
                Some((k, c)) if x.len() == 1 && c.is_one() && a.degree(k) == d.dimension => k.clone(),
                _ => return Err(schema("dualizing.integral.top", "expected one basis element of top degree")),
            };
            IntegralKind::TopCoefficient(key)
        }
    };
    Ok(DualizingData {
        bimodule: CohesiveBimodule {
            name: "D".into(),
            left: a.clone(),
            module,
            action: LeftAction::Along(AlgebraMap::Identity),
        },
        dimension: d.dimension,
        integral,
    })
}

/// Collects the smallest cyclotomic field containing every emitted scalar.
struct Writer<'a> {
    algebra: &'a CurvedDga,
    conductor: u32,
}

impl Writer<'_> {
    fn element(&mut self, x: &AElement) -> String {
        for (_, c) in x.terms() {
            self.conductor = self.conductor.lcm(&c.conductor());
        }
        self.algebra.format_element(x)
    }

    fn matrix(&mut self, m: &AMatrix) -> Vec<Vec<String>> {
        (0..m.rows()).map(|i| (0..m.cols()).map(|j| self.element(m.get(i, j))).collect()).collect()
    }

    fn blocks(&mut self, m: &AMatrix) -> Vec<BlockSpec> {
        (0..=self.algebra.top_degree())
            .map(|k| (k, m.form_component(self.algebra, k)))
            .filter(|(_, b)| !b.is_zero())
            .map(|(k, b)| BlockSpec { k, matrix: self.matrix(&b) })
            .collect()
    }

    fn module(&mut self, e: &CohesiveModule) -> ModuleSpec {
        ModuleSpec {
            generators: e
                .generators
                .iter()
                .zip(&e.degrees)
                .map(|(n, &d)| GeneratorSpec { name: n.clone(), degree: d })
                .collect(),
            idempotent: e.idempotent.as_ref().map(|p| self.matrix(p)),
            connection: self.blocks(&e.connection),
        }
    }
}

fn ratio_text(r: &BigRational) -> String {
    Scalar::from_rational(r.clone()).to_string()
}

fn ratio_matrix(m: &[Vec<BigRational>]) -> Vec<Vec<String>> {
    m.iter().map(|r| r.iter().map(ratio_text).collect()).collect()
}

/// Objects to place in a model file next to its algebra.
#[derive(Clone, Debug, Default)]
pub struct ModelParts {
    pub modules: Vec<Arc<CohesiveModule>>,
    pub morphisms: Vec<(String, HomMorphism)>,
    pub dualizing: Option<DualizingData>,
    pub transfer: Option<TransferScenario>,
    pub jobs: Vec<JobSpec>,
}

/// Writes an algebra and named objects as a model file. Modules are keyed
/// by their names.
pub fn emit_model(a: &CurvedDga, parts: &ModelParts) -> ModelFile {
    let mut w = Writer { algebra: a, conductor: 1 };
    let (algebra, differential) = match &a.kernel {
        Kernel::Table(t) => {
            let basis =
                t.names.iter().zip(&t.degrees).map(|(n, &d)| GeneratorSpec { name: n.clone(), degree: d as i32 }).collect();
            let mut products = Vec::new();
            for (i, row) in t.mult.iter().enumerate() {
                for (j, x) in row.iter().enumerate() {
                    if !x.is_zero() {
                        products.push(ProductSpec {
                            left: t.names[i].clone(),
                            right: t.names[j].clone(),
                            value: w.element(x),
                        });
                    }
                }
            }
            let differential = a
                .d_values()
                .iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(i, x)| (t.names[i].clone(), w.element(x)))
                .collect();
            (AlgebraSpec::Table { basis, unit: t.names[t.unit].clone(), products }, differential)
        }
        Kernel::NcTorus(nc) => {
            w.conductor = w.conductor.lcm(&torus_conductor(nc));
            let flavor = match nc.flavor {
                Flavor::DeRham => "de_rham",
                Flavor::Dolbeault => "dolbeault",
            };
            let spec = AlgebraSpec::NcTorus {
                rank: nc.rank,
                b: ratio_matrix(&nc.b),
                complex_structure: nc.complex_structure.as_deref().map(ratio_matrix),
                flavor: flavor.into(),
            };
            (spec, BTreeMap::new())
        }
    };
    let curvature = w.element(&a.curvature);
    let modules = parts.modules.iter().map(|e| (e.name.clone(), w.module(e))).collect();
    let morphisms = parts
        .morphisms
        .iter()
        .map(|(n, phi)| {
            let spec = MorphismSpec {
                source: phi.source.name.clone(),
                target: phi.target.name.clone(),
                degree: phi.degree,
                blocks: w.blocks(&phi.matrix),
            };
            (n.clone(), spec)
        })
        .collect();
    let dualizing = parts.dualizing.as_ref().map(|d| DualizingSpec {
        generator: d.bimodule.module.generators[0].clone(),
        dimension: d.dimension,
        connection: w.element(d.bimodule.module.connection.get(0, 0)),
        integral: match &d.integral {
            IntegralKind::TopCoefficient(k) => IntegralSpec::Top(a.key_name(k)),
            IntegralKind::TorusTrace => IntegralSpec::TorusTrace,
        },
    });
    let transfer = parts.transfer.as_ref().map(|t| TransferSpec {
        x: w.module(&t.x.as_free_module().expect("transfer data lives over A⁰ = k")),
        e0: t.e0.name.clone(),
        map: w.blocks(&t.map0),
    });
    ModelFile {
        name: a.name.clone(),
        field: field_text(w.conductor),
        algebra,
        differential,
        curvature,
        modules,
        morphisms,
        dualizing,
        transfer,
        jobs: parts.jobs.clone(),
    }
}

fn job(name: &str, command: &str, args: &[(&str, &str)]) -> JobSpec {
    JobSpec {
        name: name.into(),
        command: command.into(),
        args: args.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
    }
}

fn rank_one(name: &str, a: &Arc<CurvedDga>, conn: AElement) -> Arc<CohesiveModule> {
    let mut c = AMatrix::zeros(1, 1);
    c.set(0, 0, conn);
    Arc::new(CohesiveModule::new(name, a.clone(), vec!["e".into()], vec![0], c).expect("degree one entry"))
}

fn ce_model(l: &LieAlgebraData, name: &str) -> (Arc<CurvedDga>, ModelParts) {
    let mut a = chevalley_eilenberg(l);
    a.name = name.into();
    let a = Arc::new(a);
    let mut d = lie_dualizing_data(l);
    d.bimodule.left = a.clone();
    d.bimodule.module.algebra = a.clone();
    let triv = rank_one("triv", &a, AElement::zero());
    let parts = ModelParts {
        modules: vec![triv.clone()],
        morphisms: vec![("id_triv".into(), HomMorphism::identity(&triv))],
        dualizing: Some(d),
        transfer: None,
        jobs: vec![
            job("axioms", "validate", &[]),
            job("end_triv", "hom", &[("src", "triv"), ("dst", "triv")]),
            job("serre_triv", "serre", &[("E", "triv"), ("F", "triv")]),
        ],
    };
    (a, parts)
}

/// One of the bundled models, in file form.
pub fn bundled_model(name: &str) -> Result<ModelFile> {
    let (a, parts) = match name {
        "ce-abelian-1" => ce_model(&LieAlgebraData::abelian(1), name),
        "ce-aff1" => {
            let (a, mut parts) = ce_model(&LieAlgebraData::aff1(), name);
            let theta = parts.dualizing.as_ref().expect("present").bimodule.module.connection.get(0, 0).clone();
            parts.modules.push(rank_one("twisted", &a, theta));
            // The mixing transfer scenario, rebased onto this algebra.
            let s = transfer_scenarios().into_iter().find(|s| s.name == "mixing-aff1").expect("bundled");
            let e0 = CohesiveModule { name: "E0".into(), algebra: a.clone(), ..s.e0 };
            let x = QuasiCohesiveModule { algebra: a.clone(), ..s.x };
            parts.modules.push(Arc::new(e0.clone()));
            parts.transfer = Some(TransferScenario { name: name.into(), x, e0, map0: s.map0 });
            parts.jobs.push(job("twisted_pairing", "serre", &[("E", "triv"), ("F", "twisted")]));
            parts.jobs.push(job("transfer", "transfer", &[]));
            (a, parts)
        }
        "ce-sl2" => ce_model(&LieAlgebraData::sl2(), name),
        "higgs-aff1" => {
            let act = vec![vec![vec![q(1)]], vec![vec![q(0)]]];
            let l = generalized_higgs_algebroid(&LieAlgebraData::aff1(), &act)?;
            let (a, mut parts) = ce_model(&l, name);
            // ℍ₀ = diag(a1, 0) and Higgs field Φ = a3 in the corner.
            let mut c = AMatrix::zeros(2, 2);
            c.set(0, 0, a.parse_element("a1")?);
            c.set(0, 1, a.parse_element("a3")?);
            let h = CohesiveModule::new("H", a.clone(), vec!["h1".into(), "h2".into()], vec![0, 0], c)?;
            parts.modules.push(Arc::new(h));
            parts.jobs.push(job("end_h", "hom", &[("src", "H"), ("dst", "H")]));
            (a, parts)
        }
        "nctorus-theta-1-3" | "nctorus-dolbeault-g1" => {
            let dolbeault = name == "nctorus-dolbeault-g1";
            let t = NcTorusData::rank_two(BigRational::new(1.into(), 3.into()), dolbeault);
            let flavor = if dolbeault { Flavor::Dolbeault } else { Flavor::DeRham };
            let mut a = nc_torus_dga(&t, flavor, None)?;
            a.name = name.into();
            let a = Arc::new(a);
            let triv = rank_one("triv", &a, AElement::zero());
            let mut jobs = vec![
                job("axioms", "validate", &[]),
                job("cohomology", "cohom", &[("module", "triv"), ("box", "2")]),
            ];
            let dualizing = if dolbeault {
                jobs.push(job("serre_triv", "serre", &[("E", "triv"), ("F", "triv"), ("box", "2")]));
                Some(nc_dualizing_data(&a)?)
            } else {
                None
            };
            (a, ModelParts { modules: vec![triv], morphisms: Vec::new(), dualizing, transfer: None, jobs })
        }
        other => return Err(Error::Unsupported(format!("no bundled model named {other:?}"))),
    };
    Ok(emit_model(&a, &parts))
}

/// A bundled model, built.
pub fn bundled(name: &str) -> Result<Model> {
    bundled_model(name)?.build()
}

/// A basis key by table name, for tests and callers that know the names.
pub fn table_key(a: &CurvedDga, name: &str) -> Option<BasisKey> {
    a.table().and_then(|t| t.index_of(name)).map(BasisKey::table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hom::hom_complex;

    #[test]
    fn bundled_models_round_trip() {
        for name in BUNDLED_MODELS {
            let f = bundled_model(name).unwrap();
            let text = f.to_json();
            let back = ModelFile::from_json(&text).unwrap();
            assert_eq!(back, f, "{name}");
            let m = back.build().unwrap();
            let again = emit_model(
                &m.algebra,
                &ModelParts {
                    modules: m.modules.values().cloned().collect(),
                    morphisms: m.morphisms.clone().into_iter().collect(),
                    dualizing: m.dualizing.clone(),
                    transfer: m.transfer.clone(),
                    jobs: m.file.jobs.clone(),
                },
            );
            assert_eq!(again.to_json(), text, "{name}");
        }
    }

    #[test]
    fn built_ce_model_matches_constructor() {
        let m = bundled("ce-aff1").unwrap();
        let mut direct = chevalley_eilenberg(&LieAlgebraData::aff1());
        direct.name = "ce-aff1".into();
        assert_eq!(*m.algebra, direct);
        let triv = &m.modules["triv"];
        let dims = hom_complex(triv, triv).unwrap().cohomology_dims().unwrap();
        assert_eq!(dims, BTreeMap::from([(0, 1), (1, 1), (2, 0)]));
        assert!(m.dualizing.unwrap().check().passed());
    }

    #[test]
    fn higgs_model_module_is_cohesive() {
        let m = bundled("higgs-aff1").unwrap();
        let h = &m.modules["H"];
        assert!(h.check().passed());
        assert!(crate::models::higgs_module_check(h, 2).passed());
    }

    #[test]
    fn zero_denominator_is_a_scalar_error() {
        let mut f = bundled_model("ce-aff1").unwrap();
        f.curvature = "1/0*a1^a2".into();
        assert!(matches!(f.build(), Err(Error::ScalarParse(_))));
    }

    #[test]
    fn undefined_module_is_named() {
        let mut f = bundled_model("ce-aff1").unwrap();
        f.morphisms.get_mut("id_triv").unwrap().target = "E9".into();
        match f.build() {
            Err(Error::Schema { path, message }) => {
                assert!(message.contains("E9"), "{message}");
                assert_eq!(path, "morphisms.id_triv.target");
            }
            other => panic!("{other:?}"),
        }
        let mut f = bundled_model("ce-aff1").unwrap();
        f.jobs[1].args.insert("src".into(), "E9".into());
        assert!(matches!(f.build(), Err(Error::Schema { message, .. }) if message.contains("E9")));
    }

    #[test]
    fn syntax_errors_report_a_line() {
        let err = ModelFile::from_json("{\n  \"name\": 3\n}").unwrap_err();
        assert!(matches!(err, Error::Schema { path, .. } if path.starts_with("line 2")));
    }

    #[test]
    fn scalars_must_lie_in_the_declared_field() {
        let mut f = bundled_model("ce-aff1").unwrap();
        f.curvature = "[0,1]@3*a1^a2".into();
        assert!(matches!(f.build(), Err(Error::Schema { path, .. }) if path == "curvature"));
    }

    #[test]
    fn wrong_form_degree_block_is_rejected() {
        let mut f = bundled_model("ce-aff1").unwrap();
        let spec = f.modules.get_mut("twisted").unwrap();
        spec.connection[0].k = 2;
        assert!(matches!(f.build(), Err(Error::Schema { .. })));
    }

    #[test]
    fn torus_models_build() {
        let m = bundled("nctorus-dolbeault-g1").unwrap();
        assert_eq!(m.file.field, "Q(zeta_12)");
        assert!(m.algebra.validate().passed());
        assert!(m.dualizing.unwrap().check().passed());
        let m = bundled("nctorus-theta-1-3").unwrap();
        assert_eq!(m.file.field, "Q(zeta_3)");
    }
}

use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_cohesive-dg"));
    c.env_remove("COHESIVE_DG_SUPPORT_BOX");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 output")
}

fn emitted(name: &str) -> String {
    let o = run(&["models", "emit", name]);
    assert_eq!(o.status.code(), Some(0));
    stdout(&o)
}

fn write_model(file: &str, text: &str) -> String {
    let path: PathBuf = [env!("CARGO_TARGET_TMPDIR"), file].iter().collect();
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn bundled_file(name: &str) -> String {
    write_model(&format!("{name}.json"), &emitted(name))
}

fn edited(name: &str, file: &str, edit: impl FnOnce(&mut Value)) -> String {
    let mut v: Value = serde_json::from_str(&emitted(name)).unwrap();
    edit(&mut v);
    write_model(file, &serde_json::to_string_pretty(&v).unwrap())
}

fn json(args: &[&str]) -> (Option<i32>, Value) {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let o = run(&full);
    (o.status.code(), serde_json::from_str(&stdout(&o)).expect("json output"))
}

/// Rows of the first table whose title starts with `prefix`.
fn table(report: &Value, prefix: &str) -> Vec<Vec<String>> {
    let t = report["reports"][0]["tables"]
        .as_array()
        .unwrap()
        .iter()
        .find(|t| t["title"].as_str().unwrap().starts_with(prefix))
        .unwrap_or_else(|| panic!("no table {prefix} in {report}"));
    serde_json::from_value(t["rows"].clone()).unwrap()
}

#[test]
fn validate_sl2_passes() {
    let o = run(&["validate", &bundled_file("ce-sl2")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("d2_equals_curvature_commutator  pass"));
}

#[test]
fn aff1_endomorphism_cohomology() {
    let (code, v) = json(&["hom", &bundled_file("ce-aff1"), "--src", "triv", "--dst", "triv", "--cohomology"]);
    assert_eq!(code, Some(0));
    let rows = table(&v, "H P(triv, triv)");
    assert_eq!(rows, vec![vec!["0", "1"], vec!["1", "1"], vec!["2", "0"]]);
}

#[test]
fn aff1_serre_pairing_has_full_rank() {
    let (code, v) = json(&["serre", &bundled_file("ce-aff1"), "--E", "triv", "--F", "triv"]);
    assert_eq!(code, Some(0));
    for row in table(&v, "pairing ranks") {
        assert_eq!(row[1], row[2]);
        assert_eq!(row[1], row[3]);
    }
}

#[test]
fn failing_axioms_exit_one() {
    let path = edited("ce-aff1", "broken-twist.json", |v| {
        v["modules"]["twisted"]["connection"][0]["matrix"][0][0] = "1*a2".into();
    });
    let o = run(&["validate", &path]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("job validate (validate): fail"));
}

#[test]
fn errors_exit_two() {
    let path = edited("ce-aff1", "zero-denominator.json", |v| {
        v["differential"]["a2"] = "1/0*a1^a2".into();
    });
    let (code, v) = json(&["validate", &path]);
    assert_eq!(code, Some(2));
    assert!(v["reports"][0]["message"].as_str().unwrap().contains("scalar parse error"));

    let o = run(&["hom", &bundled_file("ce-aff1"), "--src", "E9", "--dst", "triv"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("E9"));

    assert_eq!(run(&["validate", "/nonexistent/model.json"]).status.code(), Some(2));
    assert_eq!(run(&["transfer", &bundled_file("ce-sl2")]).status.code(), Some(2));
}

#[test]
fn torus_box_comes_from_flag_or_environment() {
    let path = bundled_file("nctorus-theta-1-3");
    assert_eq!(run(&["cohom", &path, "--module", "triv"]).status.code(), Some(2));
    let with_env = bin().args(["cohom", &path, "--module", "triv"]).env("COHESIVE_DG_SUPPORT_BOX", "1").output().unwrap();
    assert_eq!(with_env.status.code(), Some(0));
    assert!(stdout(&with_env).contains("in box 1"));
    let both = bin()
        .args(["cohom", &path, "--module", "triv", "--box", "2"])
        .env("COHESIVE_DG_SUPPORT_BOX", "1")
        .output()
        .unwrap();
    assert!(stdout(&both).contains("in box 2"));
}

#[test]
fn run_executes_every_job() {
    for name in ["ce-aff1", "higgs-aff1", "nctorus-dolbeault-g1"] {
        let o = run(&["run", &bundled_file(name)]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    }
    let (code, v) = json(&["run", &bundled_file("ce-aff1")]);
    assert_eq!(code, Some(0));
    let jobs: Vec<&str> = v["reports"].as_array().unwrap().iter().map(|r| r["job"].as_str().unwrap()).collect();
    assert_eq!(jobs, ["axioms", "end_triv", "serre_triv", "twisted_pairing", "transfer"]);
}

#[test]
fn empty_job_list_gives_a_skeleton() {
    let path = edited("ce-abelian-1", "no-jobs.json", |v| {
        v["jobs"] = Value::Array(Vec::new());
    });
    let o = run(&["run", &path]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), format!("source: {path}\nstatus: pass\n"));
}

#[test]
fn cone_of_identity_is_contractible() {
    let o = run(&["cone", &bundled_file("ce-aff1"), "--morphism", "id_triv"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("cone is contractible                  true"));
}

#[test]
fn emission_is_stable() {
    assert_eq!(emitted("ce-sl2"), emitted("ce-sl2"));
    let o = run(&["models", "emit", "nope"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn selftest_is_deterministic_and_renders_cyclotomic_scalars() {
    let (a, b) = (run(&["selftest"]), run(&["selftest"]));
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert_eq!(text.lines().filter(|l| l.starts_with("job criterion")).count(), 7);
    assert!(text.contains("τ(UVU⁻¹V⁻¹) = [-1,-1]@3"), "{text}");
}

#[test]
fn koszul_mutation_fails_the_axiom_suite() {
    let o = run(&["selftest", "--mutate", "koszul"]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("job criterion 1 axiom-suite (selftest): fail"), "{text}");
    assert!(text.contains("d²φ ≠ 0"));
}

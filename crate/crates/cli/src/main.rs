mod commands;
mod report;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cohesive_core::acceptance::{selftest, Mutation, SuiteConfig};
use cohesive_core::schema::{bundled_model, JobSpec, ModelFile, BUNDLED_MODELS};
use cohesive_core::Error;
use commands::{load_error, run_job, Options, SUPPORT_BOX_VAR};
use report::{overall, render, Format, Report, Status, Table, Timings};
use std::process::ExitCode;

/// Exact computations with cohesive modules over curved dgas.
///
/// Exit status: 0 success, 1 a validation failed, 2 an error.
#[derive(Parser)]
#[command(name = "cohesive-dg", version)]
struct Cli {
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    /// Support box radius for torus kernels; overrides COHESIVE_DG_SUPPORT_BOX.
    #[arg(long = "box", global = true, value_name = "R")]
    support_box: Option<i64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ModelArg {
    /// Path to a model file.
    file: String,
}

#[derive(Subcommand)]
enum Command {
    /// Check the dga axioms and every object the model defines.
    Validate(ModelArg),
    /// Cohomology of a module, H(P(O, E)).
    Cohom {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long)]
        module: String,
    },
    /// The hom complex between two modules.
    Hom {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long)]
        src: String,
        #[arg(long)]
        dst: String,
        /// Also compute cohomology dimensions.
        #[arg(long)]
        cohomology: bool,
    },
    /// The mapping cone of a closed degree-0 morphism.
    Cone {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long)]
        morphism: String,
    },
    /// The dual module and, with dualizing data, the Serre functor image.
    Dual {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long)]
        module: String,
    },
    /// Replace the model's transfer input by a cohesive module.
    Transfer(ModelArg),
    /// The Serre pairing table between H(P(E, F)) and H(P(F, E⊗D)).
    Serre {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long = "E", value_name = "MODULE")]
        e: String,
        #[arg(long = "F", value_name = "MODULE")]
        f: String,
    },
    /// Run every job listed in the model file.
    Run(ModelArg),
    /// Bundled models.
    Models {
        #[command(subcommand)]
        action: ModelsAction,
    },
    /// Run the acceptance suite.
    Selftest {
        #[arg(long, value_enum)]
        mutate: Option<MutationArg>,
        #[arg(long, default_value_t = SuiteConfig::default().seed)]
        seed: u64,
        /// Append wall-clock times, outside the comparable output.
        #[arg(long)]
        timings: bool,
    },
}

#[derive(Subcommand)]
enum ModelsAction {
    /// List the bundled model names.
    List,
    /// Print a bundled model as a model file.
    Emit { name: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum MutationArg {
    /// Flip the sign of φ∘𝔼 in the hom differential.
    Koszul,
}

fn job(command: &str, args: &[(&str, &str)]) -> JobSpec {
    JobSpec {
        name: command.into(),
        command: command.into(),
        args: args.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
    }
}

fn load(path: &str) -> Result<cohesive_core::schema::Model, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Schema { path: path.into(), message: format!("cannot read file: {e}") })?;
    ModelFile::from_json(&text)?.build()
}

/// Loads the model and runs the jobs against it.
fn run_model(path: &str, jobs: impl FnOnce(&ModelFile) -> Vec<JobSpec>, opts: &Options) -> Vec<Report> {
    match load(path) {
        Ok(model) => jobs(&model.file).iter().map(|j| run_job(&model, j, opts)).collect(),
        Err(e) => vec![load_error(&e)],
    }
}

fn selftest_reports(mutate: Option<MutationArg>, seed: u64) -> (Vec<Report>, Timings) {
    let mutation = match mutate {
        None => Mutation::None,
        Some(MutationArg::Koszul) => Mutation::KoszulFlip,
    };
    let (report, times) = selftest(&SuiteConfig { seed, mutation });
    let timings = report.criteria.iter().zip(&times).map(|(c, t)| (format!("criterion {}", c.id), t.as_secs_f64())).collect();
    let reports = report
        .criteria
        .iter()
        .map(|c| Report {
            status: if c.passed { Status::Pass } else { Status::Fail },
            message: Some(c.detail.clone()),
            ..Report::new(&format!("criterion {} {}", c.id, c.name), "selftest")
        })
        .collect();
    (reports, timings)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = Options {
        support_box: cli.support_box,
        env_box: std::env::var(SUPPORT_BOX_VAR).ok(),
        cohomology: false,
    };
    let one = |file: &str, j: JobSpec, opts: &Options| run_model(file, |_| vec![j], opts);
    let (source, reports, timings) = match &cli.command {
        Command::Validate(m) => (m.file.clone(), one(&m.file, job("validate", &[]), &opts), None),
        Command::Cohom { model, module } => {
            (model.file.clone(), one(&model.file, job("cohom", &[("module", module)]), &opts), None)
        }
        Command::Hom { model, src, dst, cohomology } => {
            let o = Options { cohomology: *cohomology, ..opts.clone() };
            (model.file.clone(), one(&model.file, job("hom", &[("src", src), ("dst", dst)]), &o), None)
        }
        Command::Cone { model, morphism } => {
            (model.file.clone(), one(&model.file, job("cone", &[("morphism", morphism)]), &opts), None)
        }
        Command::Dual { model, module } => {
            (model.file.clone(), one(&model.file, job("dual", &[("module", module)]), &opts), None)
        }
        Command::Transfer(m) => (m.file.clone(), one(&m.file, job("transfer", &[]), &opts), None),
        Command::Serre { model, e, f } => {
            (model.file.clone(), one(&model.file, job("serre", &[("E", e), ("F", f)]), &opts), None)
        }
        Command::Run(m) => {
            let o = Options { cohomology: true, ..opts.clone() };
            (m.file.clone(), run_model(&m.file, |f| f.jobs.clone(), &o), None)
        }
        Command::Models { action: ModelsAction::List } => {
            let mut t = Table::new("bundled models", &["name"]);
            for n in BUNDLED_MODELS {
                t.row(vec![n.to_string()]);
            }
            let mut r = Report::new("models", "list");
            r.push(t);
            ("bundled".to_string(), vec![r], None)
        }
        Command::Models { action: ModelsAction::Emit { name } } => match bundled_model(name) {
            Ok(file) => {
                print!("{}", file.to_json());
                return ExitCode::SUCCESS;
            }
            Err(e) => ("bundled".to_string(), vec![Report::error("emit", "models emit", e.to_string())], None),
        },
        Command::Selftest { mutate, seed, timings } => {
            let (reports, t) = selftest_reports(*mutate, *seed);
            ("selftest".to_string(), reports, timings.then_some(t))
        }
    };
    let status = overall(&reports);
    print!("{}", render(&source, &reports, timings.as_ref(), cli.format));
    if status == Status::Error {
        for r in reports.iter().filter(|r| r.status == Status::Error) {
            eprintln!("error: {}: {}", r.job, r.message.as_deref().unwrap_or(""));
        }
    }
    ExitCode::from(status.exit_code() as u8)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    #[test]
    fn every_bundled_model_runs_its_jobs() {
        let mut expected = BTreeMap::new();
        for name in BUNDLED_MODELS {
            let model = bundled_model(name).unwrap().build().unwrap();
            let opts = Options { cohomology: true, ..Options::default() };
            for j in &model.file.jobs {
                let r = run_job(&model, j, &opts);
                expected.insert(format!("{name}/{}", j.name), r.status);
            }
        }
        let failing: Vec<_> = expected.iter().filter(|(_, s)| **s != Status::Pass).collect();
        assert!(failing.is_empty(), "{failing:?}");
    }
}

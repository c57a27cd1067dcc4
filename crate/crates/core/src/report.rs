use serde::Serialize;
use std::fmt;

/// Outcome of one named axiom or condition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Counterexample or residual when the check fails; scope notes otherwise.
    pub detail: Option<String>,
}

/// Per-axiom pass/fail list; failures are data, not errors.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn pass(&mut self, name: &str) {
        self.checks.push(Check { name: name.into(), passed: true, detail: None });
    }

    pub fn pass_with(&mut self, name: &str, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), passed: true, detail: Some(detail.into()) });
    }

    pub fn fail(&mut self, name: &str, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), passed: false, detail: Some(detail.into()) });
    }

    /// Records `name` as passed when `failure` is `None`.
    pub fn record(&mut self, name: &str, failure: Option<String>) {
        match failure {
            None => self.pass(name),
            Some(d) => self.fail(name, d),
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn extend(&mut self, prefix: &str, other: ValidationReport) {
        for mut c in other.checks {
            c.name = format!("{prefix}{}", c.name);
            self.checks.push(c);
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let mark = if c.passed { "pass" } else { "FAIL" };
            match &c.detail {
                Some(d) => writeln!(f, "{mark}  {}  ({d})", c.name)?,
                None => writeln!(f, "{mark}  {}", c.name)?,
            }
        }
        Ok(())
    }
}

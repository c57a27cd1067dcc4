//! Job reports and their text and JSON renderings. Both renderings are pure
//! functions of the report, so identical inputs give identical bytes.

use cohesive_core::ValidationReport;
use serde_json::{json, Map, Value};
use std::fmt::Write;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Pass,
    Fail,
    Error,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Error => "error",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Error => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table {
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(title: impl Into<String>, columns: &[&str]) -> Table {
        Table { title: title.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    /// One row per check: name, pass/fail, detail.
    pub fn from_checks(title: impl Into<String>, report: &ValidationReport) -> Table {
        let mut t = Table::new(title, &["check", "status", "detail"]);
        for c in &report.checks {
            let status = if c.passed { "pass" } else { "fail" };
            t.row(vec![c.name.clone(), status.into(), c.detail.clone().unwrap_or_default()]);
        }
        t
    }

    fn render_text(&self, out: &mut String) {
        let _ = writeln!(out, "  [{}]", self.title);
        let mut width: Vec<usize> = self.columns.iter().map(|c| c.chars().count()).collect();
        for r in &self.rows {
            for (w, cell) in width.iter_mut().zip(r) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let padded: Vec<String> = cells
                .iter()
                .zip(&width)
                .map(|(c, &w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
                .collect();
            format!("    {}", padded.join("  ").trim_end())
        };
        let _ = writeln!(out, "{}", line(&self.columns));
        for r in &self.rows {
            let _ = writeln!(out, "{}", line(r));
        }
    }

    fn to_json(&self) -> Value {
        json!({ "title": self.title, "columns": self.columns, "rows": self.rows })
    }
}

/// The outcome of one job.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub job: String,
    pub command: String,
    pub status: Status,
    pub tables: Vec<Table>,
    pub message: Option<String>,
}

impl Report {
    pub fn new(job: &str, command: &str) -> Report {
        Report { job: job.into(), command: command.into(), status: Status::Pass, tables: Vec::new(), message: None }
    }

    pub fn error(job: &str, command: &str, message: impl Into<String>) -> Report {
        Report { status: Status::Error, message: Some(message.into()), ..Report::new(job, command) }
    }

    /// Lowers the status to `Fail` unless `ok`.
    pub fn require(&mut self, ok: bool) {
        if !ok {
            self.status = self.status.max(Status::Fail);
        }
    }

    pub fn push(&mut self, t: Table) {
        self.tables.push(t);
    }

    fn render_text(&self, out: &mut String) {
        let _ = writeln!(out, "job {} ({}): {}", self.job, self.command, self.status.as_str());
        if let Some(m) = &self.message {
            let _ = writeln!(out, "  {m}");
        }
        for t in &self.tables {
            t.render_text(out);
        }
    }

    fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("job".into(), json!(self.job));
        m.insert("command".into(), json!(self.command));
        m.insert("status".into(), json!(self.status.as_str()));
        if let Some(msg) = &self.message {
            m.insert("message".into(), json!(msg));
        }
        m.insert("tables".into(), Value::Array(self.tables.iter().map(Table::to_json).collect()));
        Value::Object(m)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// Wall-clock times, kept out of the compared part of the output.
pub type Timings = Vec<(String, f64)>;

/// The worst status across reports; an empty list passes.
pub fn overall(reports: &[Report]) -> Status {
    reports.iter().map(|r| r.status).max().unwrap_or(Status::Pass)
}

pub fn render(source: &str, reports: &[Report], timings: Option<&Timings>, format: Format) -> String {
    match format {
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "source: {source}");
            for r in reports {
                r.render_text(&mut out);
            }
            let _ = writeln!(out, "status: {}", overall(reports).as_str());
            if let Some(t) = timings {
                let _ = writeln!(out, "timings (not compared):");
                for (name, secs) in t {
                    let _ = writeln!(out, "  {name}: {secs:.3}s");
                }
            }
            out
        }
        Format::Json => {
            let mut m = Map::new();
            m.insert("source".into(), json!(source));
            m.insert("status".into(), json!(overall(reports).as_str()));
            m.insert("reports".into(), Value::Array(reports.iter().map(Report::to_json).collect()));
            if let Some(t) = timings {
                let obj: Map<String, Value> = t.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
                m.insert("timings".into(), Value::Object(obj));
            }
            let mut s = serde_json::to_string_pretty(&Value::Object(m)).expect("plain values serialize");
            s.push('\n');
            s
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_job_list_renders_a_skeleton() {
        assert_eq!(render("m.json", &[], None, Format::Text), "source: m.json\nstatus: pass\n");
        let v: Value = serde_json::from_str(&render("m.json", &[], None, Format::Json)).unwrap();
        assert_eq!(v, json!({"source": "m.json", "status": "pass", "reports": []}));
    }

    #[test]
    fn worst_status_wins() {
        let mut a = Report::new("a", "hom");
        a.require(false);
        let b = Report::error("b", "hom", "boom");
        assert_eq!(overall(&[a.clone()]), Status::Fail);
        assert_eq!(overall(&[a, b]), Status::Error);
    }

    #[test]
    fn text_tables_align_columns() {
        let mut t = Table::new("cohomology", &["degree", "dim"]);
        t.row(vec!["0".into(), "1".into()]);
        t.row(vec!["10".into(), "12".into()]);
        let mut r = Report::new("j", "cohom");
        r.push(t);
        let text = render("s", &[r], None, Format::Text);
        assert!(text.contains("    degree  dim\n    0       1\n    10      12\n"), "{text}");
    }
}

//! Structured verification reports, rendered as JSON or markdown.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// informational; never fails a run
    Finding,
}

impl Status {
    pub fn from_bool(ok: bool) -> Status {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Finding => "finding",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    /// where the checked statement lives in the source mathematics
    #[serde(rename = "paper_anchor")]
    pub anchor: String,
    pub status: Status,
    pub details: String,
}

impl Check {
    pub fn new(id: &str, anchor: &str, status: Status, details: impl Into<String>) -> Check {
        Check { id: id.to_string(), anchor: anchor.to_string(), status, details: details.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Suite {
    pub name: String,
    pub checks: Vec<Check>,
}

impl Suite {
    pub fn new(name: &str) -> Suite {
        Suite { name: name.to_string(), checks: Vec::new() }
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn failed(&self) -> bool {
        self.checks.iter().any(|c| c.status == Status::Fail)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub p: u64,
    pub q: u64,
    pub precision: u32,
    pub radius: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub config: ReportConfig,
    pub suites: Vec<Suite>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Format {
    Json,
    Markdown,
}

impl Report {
    pub fn new(config: ReportConfig) -> Report {
        Report { config, suites: Vec::new() }
    }

    pub fn failed(&self) -> bool {
        self.suites.iter().any(Suite::failed)
    }

    pub fn count(&self, s: Status) -> usize {
        self.suites.iter().flat_map(|x| &x.checks).filter(|c| c.status == s).count()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> serde_json::Result<Report> {
        serde_json::from_str(s)
    }

    pub fn to_markdown(&self) -> String {
        let c = &self.config;
        let mut out = String::new();
        writeln!(out, "# Verification report").unwrap();
        writeln!(out).unwrap();
        writeln!(out, "p = {}, q = {}, precision = {}, radius = {}", c.p, c.q, c.precision, c.radius).unwrap();
        writeln!(
            out,
            "\n{} pass, {} fail, {} finding",
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::Finding)
        )
        .unwrap();
        for suite in &self.suites {
            writeln!(out, "\n## {}\n", suite.name).unwrap();
            writeln!(out, "| id | status | anchor | details |").unwrap();
            writeln!(out, "|---|---|---|---|").unwrap();
            for ch in &suite.checks {
                writeln!(
                    out,
                    "| {} | {} | {} | {} |",
                    ch.id,
                    ch.status.label(),
                    escape(&ch.anchor),
                    escape(&ch.details)
                )
                .unwrap();
            }
        }
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Markdown => self.to_markdown(),
        }
    }

    pub fn write(&self, path: &Path, format: Format) -> std::io::Result<()> {
        std::fs::write(path, self.render(format))
    }
}

fn escape(s: &str) -> String {
    s.replace('|', "\\|").replace('\n', "<br>")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new(ReportConfig { p: 2, q: 2, precision: 12, radius: 3 });
        let mut s = Suite::new("demo");
        s.push(Check::new("a", "anchor a", Status::Pass, "ok | fine"));
        s.push(Check::new("b", "anchor b", Status::Finding, "line one\nline two"));
        r.suites.push(s);
        r
    }

    #[test]
    fn empty_report_is_valid() {
        let r = Report::new(ReportConfig { p: 3, q: 3, precision: 10, radius: 2 });
        let j = r.to_json();
        assert_eq!(Report::from_json(&j).unwrap(), r);
        assert!(j.contains("\"suites\": []"));
        assert!(!r.failed());
    }

    #[test]
    fn json_round_trip_is_byte_identical() {
        let r = sample();
        let j = r.to_json();
        let back = Report::from_json(&j).unwrap();
        assert_eq!(back.to_json(), j);
        assert!(j.contains("\"paper_anchor\""));
        assert!(j.contains("\"finding\""));
    }

    #[test]
    fn markdown_escapes_cells() {
        let md = sample().to_markdown();
        assert!(md.contains("ok \\| fine"));
        assert!(md.contains("line one<br>line two"));
        assert!(md.contains("1 pass, 0 fail, 1 finding"));
    }

    #[test]
    fn findings_do_not_fail() {
        let mut r = sample();
        assert!(!r.failed());
        r.suites[0].push(Check::new("c", "x", Status::Fail, ""));
        assert!(r.failed());
    }
}

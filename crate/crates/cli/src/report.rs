//! Suite reports and their serialized form.
//!
//! A report is a flat list of named checks with pass flags and rendered
//! detail. Serialization is deterministic by construction: field order is
//! fixed by the struct definitions, collections are vectors in insertion
//! order, and nothing records wall-clock time, so two runs over the same
//! configuration produce byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::RunConfig;
use suq2_core::scalar::format_rat;

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub q: String,
    pub c: String,
    pub windows: Vec<u32>,
    pub passed: bool,
    pub checks: Vec<CheckReport>,
}

impl SuiteReport {
    pub fn new(suite: &str, cfg: &RunConfig) -> Self {
        SuiteReport {
            suite: suite.to_string(),
            q: format_rat(&cfg.q),
            c: format_rat(&cfg.c),
            windows: cfg.windows.clone(),
            passed: true,
            checks: Vec::new(),
        }
    }

    /// Records one named check; any failure latches the suite flag.
    pub fn push(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.passed &= passed;
        self.checks.push(CheckReport {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        });
    }

    /// Records a check that could not even be evaluated.
    pub fn push_error(&mut self, name: &str, err: impl std::fmt::Display) {
        self.push(name, false, format!("error: {err}"));
    }

    pub fn failed_names(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name.as_str())
            .collect()
    }

    /// Human-readable rendering, one line per check.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(
            out,
            "[{verdict}] suite {} (q = {}, c = {}, windows = {:?})",
            self.suite, self.q, self.c, self.windows
        );
        for c in &self.checks {
            let mark = if c.passed { "ok  " } else { "FAIL" };
            let _ = writeln!(out, "  {mark} {}: {}", c.name, c.detail);
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Writes one `<suite>.json` per report under `dir`, creating it if
/// needed, in the order given. Returns the written paths.
pub fn write_reports(dir: &Path, reports: &[SuiteReport]) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    for r in reports {
        let path = dir.join(format!("{}.json", r.suite));
        fs::write(&path, r.to_json())?;
        paths.push(path);
    }
    Ok(paths)
}

/// Fixed-precision float rendering so report bytes do not depend on the
/// shortest-representation printer.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.6e}")
}

/// Renders a tail-norm ladder for check detail strings.
pub fn fmt_profile(profile: &[f64]) -> String {
    let parts: Vec<String> = profile.iter().map(|x| fmt_f64(*x)).collect();
    format!("[{}]", parts.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failure_latches_and_names_survive() {
        let cfg = RunConfig::default();
        let mut r = SuiteReport::new("algebra", &cfg);
        r.push("first", true, "fine");
        r.push("second", false, "broken");
        r.push("third", true, "fine");
        assert!(!r.passed);
        assert_eq!(r.failed_names(), vec!["second"]);
        assert!(r.render_text().contains("FAIL second"));
    }

    #[test]
    fn json_bytes_are_stable_across_renders() {
        let cfg = RunConfig::default();
        let mut r = SuiteReport::new("dirac", &cfg);
        r.push("gate", true, fmt_profile(&[1.0, 0.25]));
        assert_eq!(r.to_json(), r.to_json());
        assert!(r.to_json().contains("2.500000e-1"));
    }
}

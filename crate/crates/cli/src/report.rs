//! Structured run report: every numeric entry carries the tolerance it was
//! checked against, plus a machine-readable check summary that drives the
//! exit code.

use std::fmt::Write as _;

#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: String,
    pub passed: bool,
}

#[derive(Debug, Clone, Default)]
pub struct Section {
    pub title: String,
    pub lines: Vec<String>,
}

#[derive(Debug, Clone, Default)]
pub struct RunReport {
    pub config_echo: String,
    pub sections: Vec<Section>,
    pub checks: Vec<Check>,
    /// (stage, milliseconds); excluded from the deterministic payload.
    pub timings: Vec<(String, f64)>,
}

impl RunReport {
    pub fn section(&mut self, title: &str) -> &mut Section {
        self.sections.push(Section {
            title: title.to_string(),
            lines: Vec::new(),
        });
        self.sections.last_mut().unwrap()
    }

    pub fn check(&mut self, name: &str, value: f64, tolerance: &str, passed: bool) {
        self.checks.push(Check {
            name: name.to_string(),
            value,
            tolerance: tolerance.to_string(),
            passed,
        });
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# run report");
        let _ = writeln!(out);
        let _ = writeln!(out, "## configuration");
        out.push_str(&self.config_echo);
        for s in &self.sections {
            let _ = writeln!(out);
            let _ = writeln!(out, "## {}", s.title);
            for l in &s.lines {
                let _ = writeln!(out, "{l}");
            }
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "## checks");
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{} {} = {:.12e} [{}]",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.value,
                c.tolerance
            );
        }
        let _ = writeln!(
            out,
            "overall: {}",
            if self.all_passed() { "PASS" } else { "FAIL" }
        );
        let _ = writeln!(out);
        let _ = writeln!(out, "## timings (informational)");
        for (stage, ms) in &self.timings {
            let _ = writeln!(out, "{stage}: {ms:.1} ms");
        }
        out
    }
}

impl Section {
    pub fn kv(&mut self, key: &str, value: impl std::fmt::Display) {
        self.lines.push(format!("{key} = {value}"));
    }

    pub fn kv_e(&mut self, key: &str, value: f64) {
        self.lines.push(format!("{key} = {value:.12e}"));
    }
}

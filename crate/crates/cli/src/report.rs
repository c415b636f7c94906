//! The structured report and its plain-text rendering.

use std::fmt::Write as _;

use jetcartan::identities::{ArbiterSummary, Domain, IdentityReport, Verdict};
use serde::Serialize;

use crate::config::Task;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Relation {
    pub name: String,
    pub holds: bool,
}

/// One torsion or curvature d-tensor after simplification.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableRecord {
    pub name: String,
    pub signature: String,
    pub components: usize,
    /// Components that do not simplify to 0.
    pub nonzero: usize,
    pub symbolic_zero: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub group: String,
    #[serde(flatten)]
    pub result: IdentityReport,
    /// Whether both sides agree after simplification, where that was tried.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symbolic: Option<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Suspect,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub checks: usize,
    pub pass: usize,
    pub fail: usize,
    pub suspect: usize,
    pub relations_hold: bool,
    pub status: Status,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub scenario: String,
    pub dim: usize,
    pub connection: String,
    pub seed: u64,
    pub points: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub domain: Domain,
    pub tasks: Vec<Task>,
    pub relations: Vec<Relation>,
    pub tables: Vec<TableRecord>,
    pub checks: Vec<CheckRecord>,
    pub arbiter: Option<ArbiterSummary>,
    pub summary: Summary,
}

impl Report {
    pub fn summarize(checks: &[CheckRecord], relations: &[Relation]) -> Summary {
        let count = |v: Verdict| checks.iter().filter(|c| c.result.verdict == v).count();
        let (pass, fail, suspect) = (count(Verdict::Pass), count(Verdict::Fail), count(Verdict::Suspect));
        let relations_hold = relations.iter().all(|r| r.holds);
        let status = if fail > 0 || !relations_hold {
            Status::Fail
        } else if suspect > 0 {
            Status::Suspect
        } else {
            Status::Pass
        };
        Summary { checks: checks.len(), pass, fail, suspect, relations_hold, status }
    }

    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.result.name == name)
    }

    pub fn group(&self, group: &str) -> impl Iterator<Item = &CheckRecord> + '_ {
        let group = group.to_string();
        self.checks.iter().filter(move |c| c.group == group)
    }

    /// 0 when everything passes (suspects allowed on request), 1 otherwise.
    pub fn exit_code(&self, allow_suspect: bool) -> i32 {
        match self.summary.status {
            Status::Pass => 0,
            Status::Suspect if allow_suspect => 0,
            _ => 1,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let tasks: Vec<&str> = self.tasks.iter().map(|t| t.name()).collect();
        let _ = writeln!(
            s,
            "scenario {} (n = {}, {} connection), seed {}, {} points, tol abs {:e} rel {:e}",
            self.scenario, self.dim, self.connection, self.seed, self.points, self.abs_tol, self.rel_tol
        );
        let _ = writeln!(s, "tasks: {}", tasks.join(", "));
        for r in &self.relations {
            let _ = writeln!(s, "relation {:<26} {}", r.name, if r.holds { "holds" } else { "FAILS" });
        }
        if !self.tables.is_empty() {
            let zero: Vec<&str> = self.tables.iter().filter(|t| t.symbolic_zero).map(|t| t.name.as_str()).collect();
            let _ = writeln!(
                s,
                "tables identically zero: {}",
                if zero.is_empty() { "none".into() } else { zero.join(", ") }
            );
        }
        let _ =
            writeln!(s, "{:<13} {:<24} {:>6} {:>11} {:>11}  verdict", "group", "check", "comps", "max_abs", "max_rel");
        for c in &self.checks {
            let r = &c.result;
            let verdict = match r.verdict {
                Verdict::Pass => "pass",
                Verdict::Fail => "FAIL",
                Verdict::Suspect => "SUSPECT",
            };
            let _ = writeln!(
                s,
                "{:<13} {:<24} {:>6} {:>11.3e} {:>11.3e}  {}",
                c.group, r.name, r.components, r.max_abs, r.max_rel, verdict
            );
        }
        if let Some(a) = &self.arbiter {
            let _ = writeln!(
                s,
                "general identities {}; suspects: {}",
                if a.general_pass { "pass" } else { "FAIL" },
                if a.suspects.is_empty() { "none".into() } else { a.suspects.join(", ") }
            );
        }
        let m = &self.summary;
        let _ = writeln!(
            s,
            "{} checks: {} pass, {} fail, {} suspect; status {:?}",
            m.checks, m.pass, m.fail, m.suspect, m.status
        );
        s
    }
}

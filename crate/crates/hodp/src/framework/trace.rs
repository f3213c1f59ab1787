use std::fmt::Write as _;

use serde::Serialize;

use super::{DpProblem, Processor};
use crate::afsm::Afsm;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceStatus {
    Finite,
    Infinite,
    Open,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProblemSummary {
    pub pairs: Vec<String>,
    pub rules: Vec<String>,
    pub m_flag: String,
    pub f_flag: String,
}

impl ProblemSummary {
    pub fn of(p: &DpProblem) -> ProblemSummary {
        ProblemSummary {
            pairs: p.pairs.iter().map(|d| d.to_string()).collect(),
            rules: p.rules.iter().map(|r| r.to_string()).collect(),
            m_flag: p.m_flag.to_string(),
            f_flag: p.f_flag.to_string(),
        }
    }
}

/// What was read and how it was prepared for the framework.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InputSummary {
    pub sorts: Vec<String>,
    pub symbols: Vec<String>,
    pub rules: Vec<String>,
    pub properly_applied: bool,
    pub eta_expanded: bool,
    pub sort_ordering: Option<String>,
    pub dependency_pairs: Vec<String>,
    pub error: Option<String>,
}

impl InputSummary {
    pub fn of(m: &Afsm) -> InputSummary {
        InputSummary {
            sorts: m.all_sorts().iter().map(|s| s.to_string()).collect(),
            symbols: m
                .signature
                .iter()
                .map(|f| format!("{} : {}", f.name, f.ty))
                .collect(),
            rules: m.rules.iter().map(|r| r.to_string()).collect(),
            properly_applied: true,
            eta_expanded: false,
            sort_ordering: None,
            dependency_pairs: Vec::new(),
            error: None,
        }
    }
}

/// One processor application (or an open leaf) and what became of its children.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProofTrace {
    pub processor: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theorem: Option<String>,
    pub complete: bool,
    pub status: TraceStatus,
    pub problem: ProblemSummary,
    pub witness: Vec<String>,
    pub children: Vec<ProofTrace>,
}

impl ProofTrace {
    pub(crate) fn node(
        p: &DpProblem,
        proc: &dyn Processor,
        witness: Vec<String>,
        status: TraceStatus,
        children: Vec<ProofTrace>,
    ) -> ProofTrace {
        ProofTrace {
            processor: proc.name().to_string(),
            theorem: Some(proc.theorem().to_string()),
            complete: proc.is_complete(),
            status,
            problem: ProblemSummary::of(p),
            witness,
            children,
        }
    }

    pub(crate) fn open(p: &DpProblem, reason: &str) -> ProofTrace {
        ProofTrace {
            processor: "open".to_string(),
            theorem: None,
            complete: true,
            status: TraceStatus::Open,
            problem: ProblemSummary::of(p),
            witness: vec![reason.to_string()],
            children: Vec::new(),
        }
    }

    /// Reason attached to the first open leaf, if any.
    pub fn open_reason(&self) -> Option<String> {
        if self.processor == "open" {
            return self.witness.first().cloned();
        }
        self.children.iter().find_map(|c| c.open_reason())
    }

    /// Drops the theorem names from every node.
    pub fn forget_theorems(&mut self) {
        self.theorem = None;
        for c in &mut self.children {
            c.forget_theorems();
        }
    }

    /// Pre-order list of processor names.
    pub fn processors(&self) -> Vec<&str> {
        let mut out = vec![self.processor.as_str()];
        for c in &self.children {
            out.extend(c.processors());
        }
        out
    }

    /// Nodes from the root to the first leaf reporting non-termination.
    pub fn path_to_infinite(&self) -> Option<Vec<&ProofTrace>> {
        if self.children.is_empty() {
            return (self.status == TraceStatus::Infinite && self.processor != "open")
                .then(|| vec![self]);
        }
        for c in &self.children {
            if let Some(mut path) = c.path_to_infinite() {
                path.insert(0, self);
                return Some(path);
            }
        }
        None
    }

    /// Indented plain-text rendering.
    pub fn render(&self, explain: bool) -> String {
        let mut out = String::new();
        self.render_into(&mut out, 0, explain);
        out
    }

    fn render_into(&self, out: &mut String, depth: usize, explain: bool) {
        let pad = "  ".repeat(depth);
        let p = &self.problem;
        let _ = writeln!(
            out,
            "{pad}* {} on ({} pairs, {} rules, {}, {})",
            self.processor,
            p.pairs.len(),
            p.rules.len(),
            p.m_flag,
            p.f_flag
        );
        if explain {
            if let Some(t) = &self.theorem {
                let _ = writeln!(out, "{pad}    by: {t}");
            }
        }
        for w in &self.witness {
            let _ = writeln!(out, "{pad}    {w}");
        }
        if self.processor != "open" && self.children.is_empty() {
            let _ = match self.status {
                TraceStatus::Infinite => writeln!(out, "{pad}    => infinite"),
                _ => writeln!(out, "{pad}    => no problems remain"),
            };
        }
        for c in &self.children {
            c.render_into(out, depth + 1, explain);
        }
    }
}

/// True iff every processor on `path` is complete.
pub fn check_completeness_path(path: &[&ProofTrace]) -> bool {
    path.iter().all(|n| n.complete)
}

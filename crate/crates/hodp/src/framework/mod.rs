//! DP problems, the processor contract and the strategy loop.

mod trace;

use std::fmt;
use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use crate::afsm::{afp_failure, eta_expand, find_afp_ordering, minarity, Afsm, Rule, SortOrdering};
use crate::dp::{generate_sdp, DependencyPair};

pub use trace::{check_completeness_path, InputSummary, ProblemSummary, ProofTrace, TraceStatus};

/// How much the chains of a problem may be assumed to satisfy.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum MFlag {
    Arbitrary,
    Minimal,
    Computable(Vec<Rule>),
}

impl MFlag {
    pub fn rank(&self) -> u8 {
        match self {
            MFlag::Arbitrary => 0,
            MFlag::Minimal => 1,
            MFlag::Computable(_) => 2,
        }
    }

    /// `self ⪰ minimal`
    pub fn at_least_minimal(&self) -> bool {
        self.rank() >= 1
    }
}

impl fmt::Display for MFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MFlag::Arbitrary => write!(f, "arbitrary"),
            MFlag::Minimal => write!(f, "minimal"),
            MFlag::Computable(u) => write!(f, "computable({} rules)", u.len()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FFlag {
    Formative,
    All,
}

impl fmt::Display for FFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FFlag::Formative => write!(f, "formative"),
            FFlag::All => write!(f, "all"),
        }
    }
}

/// `(P, R, m, f)`
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DpProblem {
    pub pairs: Vec<DependencyPair>,
    pub rules: Vec<Rule>,
    pub m_flag: MFlag,
    pub f_flag: FFlag,
}

impl DpProblem {
    pub fn with_pairs(&self, pairs: Vec<DependencyPair>) -> DpProblem {
        DpProblem {
            pairs,
            ..self.clone()
        }
    }

    pub fn with_rules(&self, rules: Vec<Rule>) -> DpProblem {
        DpProblem {
            rules,
            ..self.clone()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProcessorResult {
    No(String),
    Children(Vec<DpProblem>),
    NotApplicable,
}

/// A processor application: its result plus human-readable witness lines.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub result: ProcessorResult,
    pub witness: Vec<String>,
}

impl Outcome {
    pub fn not_applicable() -> Outcome {
        Outcome {
            result: ProcessorResult::NotApplicable,
            witness: Vec::new(),
        }
    }

    pub fn children(children: Vec<DpProblem>, witness: Vec<String>) -> Outcome {
        Outcome {
            result: ProcessorResult::Children(children),
            witness,
        }
    }
}

/// Information shared by all problems derived from one input.
#[derive(Clone, Debug)]
pub struct Context {
    /// Sort ordering under which the input is accessible function passing.
    pub ordering: SortOrdering,
    /// False once the input was η-expanded: NO answers are then unsound.
    pub nontermination_allowed: bool,
    /// Maximal chain length for loop search; `None` means twice the number of pairs.
    pub loop_depth: Option<usize>,
    pub deadline: Option<Instant>,
}

impl Default for Context {
    fn default() -> Context {
        Context {
            ordering: SortOrdering::flat(),
            nontermination_allowed: true,
            loop_depth: None,
            deadline: None,
        }
    }
}

impl Context {
    fn expired(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }
}

pub trait Processor: Send + Sync {
    fn name(&self) -> &'static str;
    /// The result this processor instantiates, shown with `--explain`.
    fn theorem(&self) -> &'static str;
    /// Complete processors preserve infiniteness, so NO may pass through them.
    fn is_complete(&self) -> bool;
    fn apply(&self, problem: &DpProblem, ctx: &Context) -> Outcome;
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrameworkError {
    #[error("the system is not properly applied: {0}")]
    NotProperlyApplied(String),
    #[error("the system is not accessible function passing: no sort ordering makes meta-variable {meta} of rule {rule} accessible")]
    NotAfp { rule: usize, meta: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EtaPolicy {
    Auto,
    Force,
    Forbid,
}

/// The initial problem together with everything derived from the input.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub afsm: Afsm,
    pub problem: DpProblem,
    pub ordering: SortOrdering,
    pub eta_expanded: bool,
    pub summary: InputSummary,
}

/// `(SDP(R), R, computable_R, formative)` for a properly applied AFP system.
pub fn initial_problem(m: &Afsm) -> Result<DpProblem, FrameworkError> {
    let arities = minarity(m);
    if let Some(w) = arities.witness {
        return Err(FrameworkError::NotProperlyApplied(w));
    }
    let Some(_) = find_afp_ordering(m) else {
        return Err(not_afp(m));
    };
    Ok(DpProblem {
        pairs: generate_sdp(m),
        rules: m.rules.clone(),
        m_flag: MFlag::Computable(m.rules.clone()),
        f_flag: FFlag::Formative,
    })
}

fn not_afp(m: &Afsm) -> FrameworkError {
    match afp_failure(m, &SortOrdering::flat()) {
        Some((rule, z)) => FrameworkError::NotAfp {
            rule: rule + 1,
            meta: z.name.to_string(),
        },
        None => FrameworkError::NotAfp {
            rule: 0,
            meta: String::new(),
        },
    }
}

/// Validates the input, η-expanding according to `eta`, and builds the
/// initial problem. The summary is returned even when validation fails.
pub fn prepare(m: &Afsm, eta: EtaPolicy) -> (InputSummary, Result<Prepared, FrameworkError>) {
    let mut summary = InputSummary::of(m);
    let pa = minarity(m);
    summary.properly_applied = pa.properly_applied;
    let expand = match eta {
        EtaPolicy::Force => true,
        EtaPolicy::Forbid => false,
        EtaPolicy::Auto => !pa.properly_applied,
    };
    if !expand {
        if let Some(w) = pa.witness {
            let err = FrameworkError::NotProperlyApplied(w);
            summary.error = Some(err.to_string());
            return (summary, Err(err));
        }
    }
    let afsm = if expand { eta_expand(m) } else { m.clone() };
    summary.eta_expanded = expand;
    let Some(ordering) = find_afp_ordering(&afsm) else {
        let err = not_afp(&afsm);
        summary.error = Some(err.to_string());
        return (summary, Err(err));
    };
    summary.sort_ordering = Some(ordering.describe(&afsm.all_sorts()));
    let problem = match initial_problem(&afsm) {
        Ok(p) => p,
        Err(err) => {
            summary.error = Some(err.to_string());
            return (summary, Err(err));
        }
    };
    summary.dependency_pairs = problem.pairs.iter().map(|d| d.to_string()).collect();
    let prepared = Prepared {
        afsm,
        problem,
        ordering,
        eta_expanded: expand,
        summary: summary.clone(),
    };
    (summary, Ok(prepared))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Yes(ProofTrace),
    No(ProofTrace),
    Maybe {
        reason: String,
        trace: Option<ProofTrace>,
    },
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Yes(_) => "YES",
            Verdict::No(_) => "NO",
            Verdict::Maybe { .. } => "MAYBE",
        }
    }

    pub fn trace(&self) -> Option<&ProofTrace> {
        match self {
            Verdict::Yes(t) | Verdict::No(t) => Some(t),
            Verdict::Maybe { trace, .. } => trace.as_ref(),
        }
    }
}

/// Runs `strategy` on `p0` until every problem is discharged or no
/// processor makes progress.
pub fn solve(
    p0: &DpProblem,
    strategy: &[Box<dyn Processor>],
    ctx: &Context,
    jobs: usize,
) -> Verdict {
    let run = || solve_from(p0, 0, strategy, ctx, jobs > 1);
    let trace = if jobs > 1 {
        match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
            Ok(pool) => pool.install(run),
            Err(_) => solve_from(p0, 0, strategy, ctx, false),
        }
    } else {
        run()
    };
    match trace.status {
        TraceStatus::Finite => Verdict::Yes(trace),
        TraceStatus::Infinite if ctx.nontermination_allowed => Verdict::No(trace),
        _ => Verdict::Maybe {
            reason: trace
                .open_reason()
                .unwrap_or_else(|| "no processor applies".into()),
            trace: Some(trace),
        },
    }
}

fn solve_from(
    p: &DpProblem,
    start: usize,
    strategy: &[Box<dyn Processor>],
    ctx: &Context,
    parallel: bool,
) -> ProofTrace {
    for (i, proc) in strategy.iter().enumerate().skip(start) {
        if ctx.expired() {
            return ProofTrace::open(p, "time limit reached");
        }
        let outcome = proc.apply(p, ctx);
        match outcome.result {
            ProcessorResult::NotApplicable => continue,
            ProcessorResult::No(w) => {
                let mut witness = outcome.witness;
                if witness.is_empty() {
                    witness.push(w);
                }
                return ProofTrace::node(p, proc.as_ref(), witness, TraceStatus::Infinite, vec![]);
            }
            ProcessorResult::Children(children) => {
                if children.len() == 1 && children[0] == *p {
                    let rest = solve_from(p, i + 1, strategy, ctx, parallel);
                    let status = rest.status;
                    return ProofTrace::node(p, proc.as_ref(), outcome.witness, status, vec![rest]);
                }
                let sub: Vec<ProofTrace> = if parallel {
                    children
                        .par_iter()
                        .map(|c| solve_from(c, 0, strategy, ctx, parallel))
                        .collect()
                } else {
                    children
                        .iter()
                        .map(|c| solve_from(c, 0, strategy, ctx, parallel))
                        .collect()
                };
                let status = combine(proc.is_complete(), &sub);
                return ProofTrace::node(p, proc.as_ref(), outcome.witness, status, sub);
            }
        }
    }
    ProofTrace::open(p, "no processor applies")
}

fn combine(complete: bool, children: &[ProofTrace]) -> TraceStatus {
    if children.iter().any(|c| c.status == TraceStatus::Infinite) {
        if complete {
            TraceStatus::Infinite
        } else {
            TraceStatus::Open
        }
    } else if children.iter().all(|c| c.status == TraceStatus::Finite) {
        TraceStatus::Finite
    } else {
        TraceStatus::Open
    }
}

//! Reduction triples from polynomial interpretations over the naturals.

mod csp;
mod interp;
mod poly;

use std::collections::BTreeSet;
use std::time::Instant;

pub use csp::{solve as solve_coefficients, Ineq, DOMAIN_MAX};
pub use interp::{ArgValue, Interpretation};
pub use poly::{compare, Arg, Atom, CPoly, Head, Monomial, Poly};

use crate::dp::DependencyPair;
use crate::framework::{Context, DpProblem, MFlag, Outcome, Processor};
use crate::term::{Name, Symbol, Term, Type};

/// How dependency pairs are compared.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TripleMode {
    /// Both sides at their native type, which must coincide.
    Basic,
    /// `ℓ Z1..Zm` against `p ⊥..⊥`, both of base type.
    BaseType,
}

/// `lhs ≥ rhs`, or `lhs > rhs` when strict, as polynomials in unknown
/// coefficients.
#[derive(Clone, Debug)]
pub struct Constraint {
    pub label: String,
    pub lhs: Poly,
    pub rhs: Poly,
    pub strict: bool,
}

impl Constraint {
    fn ineqs(&self) -> Vec<Ineq> {
        let mut monomials: BTreeSet<&Monomial> = self.lhs.terms().map(|(m, _)| m).collect();
        monomials.extend(self.rhs.terms().map(|(m, _)| m));
        let constant: Monomial = Vec::new();
        if self.strict {
            monomials.insert(&constant);
        }
        monomials
            .into_iter()
            .map(|m| Ineq {
                lhs: self.lhs.coefficient_of(m),
                rhs: self.rhs.coefficient_of(m),
                gap: u64::from(self.strict && m.is_empty()),
            })
            .collect()
    }

    /// The constraint with coefficients filled in from `j`.
    pub fn instantiate(&self, j: &Interpretation) -> Constraint {
        let v = j.value_fn();
        Constraint {
            label: self.label.clone(),
            lhs: self.lhs.instantiate(&v),
            rhs: self.rhs.instantiate(&v),
            strict: self.strict,
        }
    }
}

fn fresh_args(ty: &Type) -> Vec<ArgValue> {
    ty.flatten()
        .0
        .iter()
        .enumerate()
        .map(|(i, t)| ArgValue::Fresh(i as u32, (*t).clone()))
        .collect()
}

fn bottom_args(ty: &Type) -> Vec<ArgValue> {
    ty.flatten()
        .0
        .iter()
        .map(|t| ArgValue::Bottom((*t).clone()))
        .collect()
}

/// Every symbol occurring in a pair or rule, with repetitions.
pub fn problem_symbols(problem: &DpProblem) -> Vec<Symbol> {
    let mut out = Vec::new();
    for d in &problem.pairs {
        out.extend(d.lhs().symbols());
        out.extend(d.rhs().symbols());
    }
    for r in &problem.rules {
        out.extend(r.lhs().symbols());
        out.extend(r.rhs().symbols());
    }
    out
}

fn pair_sides(d: &DependencyPair, mode: TripleMode, j: &Interpretation) -> Option<(Poly, Poly)> {
    let lt = d.lhs().type_of().ok()?;
    let rt = d.rhs().type_of().ok()?;
    match mode {
        TripleMode::Basic => {
            if lt != rt {
                return None;
            }
            let args = fresh_args(&lt);
            Some((
                j.evaluate_applied(d.lhs(), &args),
                j.evaluate_applied(d.rhs(), &args),
            ))
        }
        TripleMode::BaseType => Some((
            j.evaluate_applied(d.lhs(), &fresh_args(&lt)),
            j.evaluate_applied(d.rhs(), &bottom_args(&rt)),
        )),
    }
}

/// Ordering requirements for a split of the pairs: rules weakly, pairs in
/// `strict` strictly and the others weakly. `None` if some pair cannot be
/// compared in this mode.
pub fn generate_constraints(
    problem: &DpProblem,
    strict: &BTreeSet<usize>,
    mode: TripleMode,
    j: &Interpretation,
) -> Option<Vec<Constraint>> {
    let mut out = Vec::new();
    for r in &problem.rules {
        let args = fresh_args(&r.ty());
        out.push(Constraint {
            label: format!("{} => {}", r.lhs(), r.rhs()),
            lhs: j.evaluate_applied(r.lhs(), &args),
            rhs: j.evaluate_applied(r.rhs(), &args),
            strict: false,
        });
    }
    for (i, d) in problem.pairs.iter().enumerate() {
        let (lhs, rhs) = pair_sides(d, mode, j)?;
        out.push(Constraint {
            label: format!("({}) {} =>> {}", i + 1, d.lhs(), d.rhs()),
            lhs,
            rhs,
            strict: strict.contains(&i),
        });
    }
    Some(out)
}

/// A successful orientation.
#[derive(Clone, Debug)]
pub struct OrderingProof {
    pub interpretation: Interpretation,
    /// Indices of the strictly oriented pairs.
    pub strict: BTreeSet<usize>,
    /// Requirements with unknown coefficients, before instantiation.
    pub constraints: Vec<Constraint>,
}

const NODE_BUDGET: usize = 200_000;
const SPLIT_CAP: usize = 64;

/// Candidate strict sets, largest first, lexicographic within a size.
fn splits(n: usize) -> Vec<BTreeSet<usize>> {
    fn extend(
        start: usize,
        n: usize,
        left: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<BTreeSet<usize>>,
    ) {
        if out.len() >= SPLIT_CAP {
            return;
        }
        if left == 0 {
            out.push(cur.iter().copied().collect());
            return;
        }
        for i in start..=n - left {
            cur.push(i);
            extend(i + 1, n, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for size in (1..=n).rev() {
        extend(0, n, size, &mut Vec::new(), &mut out);
    }
    out
}

/// Searches for an interpretation orienting at least one pair strictly.
pub fn find_ordering(
    problem: &DpProblem,
    mode: TripleMode,
    deadline: Option<Instant>,
) -> Option<OrderingProof> {
    if problem.pairs.is_empty() {
        return None;
    }
    let template = Interpretation::for_symbols(&problem_symbols(problem));
    for strict in splits(problem.pairs.len()) {
        if deadline.is_some_and(|d| Instant::now() >= d) {
            return None;
        }
        let constraints = generate_constraints(problem, &strict, mode, &template)?;
        let ineqs: Vec<Ineq> = constraints.iter().flat_map(Constraint::ineqs).collect();
        let Some(values) = solve_coefficients(&ineqs, template.unknowns(), NODE_BUDGET) else {
            continue;
        };
        let j = template.with_values(values);
        let verified = constraints.iter().all(|c| {
            let c = c.instantiate(&j);
            compare(&c.lhs, &c.rhs, c.strict)
        });
        if verified {
            return Some(OrderingProof {
                interpretation: j,
                strict,
                constraints,
            });
        }
    }
    None
}

fn witness(problem: &DpProblem, proof: &OrderingProof) -> Vec<String> {
    let shown: BTreeSet<(Name, bool)> = problem_symbols(problem)
        .into_iter()
        .filter(|f| !f.is_bottom())
        .map(|f| (f.name, f.marked))
        .collect();
    let mut out = proof.interpretation.describe(&shown);
    let removed: Vec<String> = proof
        .strict
        .iter()
        .map(|i| format!("({})", i + 1))
        .collect();
    out.push(format!("strictly oriented: {}", removed.join(", ")));
    out
}

fn remaining(problem: &DpProblem, strict: &BTreeSet<usize>) -> Vec<DependencyPair> {
    problem
        .pairs
        .iter()
        .enumerate()
        .filter(|(i, _)| !strict.contains(i))
        .map(|(_, d)| d.clone())
        .collect()
}

/// Removes strictly oriented pairs; keeps rules and flags.
pub struct ReductionTripleProcessor {
    pub mode: TripleMode,
}

impl Processor for ReductionTripleProcessor {
    fn name(&self) -> &'static str {
        match self.mode {
            TripleMode::Basic => "reduction-triple",
            TripleMode::BaseType => "base-type-reduction-triple",
        }
    }

    fn theorem(&self) -> &'static str {
        match self.mode {
            TripleMode::Basic => {
                "basic reduction triple processor: rules weakly, some pairs strictly, at their own types (sound and complete)"
            }
            TripleMode::BaseType => {
                "reduction triple processor: pair sides compared at base type, lhs applied to fresh meta-variables and rhs to bottom constants (sound and complete)"
            }
        }
    }

    fn is_complete(&self) -> bool {
        true
    }

    fn apply(&self, problem: &DpProblem, ctx: &Context) -> Outcome {
        let Some(proof) = find_ordering(problem, self.mode, ctx.deadline) else {
            return Outcome::not_applicable();
        };
        let child = problem.with_pairs(remaining(problem, &proof.strict));
        Outcome::children(vec![child], witness(problem, &proof))
    }
}

/// Base-type triple on the usable rules only; the child carries the usable
/// rules and loses both flags.
pub struct UsableTripleProcessor;

impl Processor for UsableTripleProcessor {
    fn name(&self) -> &'static str {
        "usable-rules-reduction-triple"
    }

    fn theorem(&self) -> &'static str {
        "reduction triple processor with usable rules: only usable rules are oriented, for minimal problems (sound, not complete)"
    }

    fn is_complete(&self) -> bool {
        false
    }

    fn apply(&self, problem: &DpProblem, ctx: &Context) -> Outcome {
        if !problem.m_flag.at_least_minimal() {
            return Outcome::not_applicable();
        }
        let ur = crate::processors::usable::usable_rules(problem);
        if ur.len() == problem.rules.len() {
            return Outcome::not_applicable();
        }
        let restricted = DpProblem {
            pairs: problem.pairs.clone(),
            rules: ur,
            m_flag: MFlag::Arbitrary,
            f_flag: crate::framework::FFlag::All,
        };
        let Some(proof) = find_ordering(&restricted, TripleMode::BaseType, ctx.deadline) else {
            return Outcome::not_applicable();
        };
        let mut w = vec![format!(
            "usable rules: {} of {}",
            restricted.rules.len(),
            problem.rules.len()
        )];
        w.extend(witness(&restricted, &proof));
        let child = restricted.with_pairs(remaining(&restricted, &proof.strict));
        Outcome::children(vec![child], w)
    }
}

/// Terms that mention a symbol without a template cannot be interpreted.
pub fn has_template(j: &Interpretation, t: &Term) -> bool {
    t.symbols().iter().all(|f| f.is_bottom() || j.covers(f))
}

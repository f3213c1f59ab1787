use std::collections::BTreeSet;

use crate::afsm::Rule;
use crate::framework::{Context, DpProblem, FFlag, MFlag, Outcome, Processor};
use crate::term::{Name, Term};

/// Does `r` contain an applied meta-variable or one with non-variable arguments?
fn has_collapsing_meta(r: &Term) -> bool {
    let mut found = false;
    r.visit(&mut |t| match t {
        Term::App(..) => {
            if let Term::Meta(_) = t.head() {
                found = true;
            }
        }
        Term::Meta(m) if !crate::term::distinct_variables(m.args()) => found = true,
        _ => {}
    });
    found
}

fn unmarked_symbols(t: &Term, out: &mut BTreeSet<Name>) {
    t.visit(&mut |u| {
        if let Term::Fun(f) = u {
            if !f.marked {
                out.insert(f.name.clone());
            }
        }
    });
}

/// `UR(P, R)`, in the order of `R`.
pub fn usable_rules(problem: &DpProblem) -> Vec<Rule> {
    let rules = &problem.rules;
    if problem.pairs.iter().any(|d| has_collapsing_meta(d.rhs())) {
        return rules.clone();
    }
    let mut symbols = BTreeSet::new();
    for d in &problem.pairs {
        unmarked_symbols(d.rhs(), &mut symbols);
    }
    let mut usable = vec![false; rules.len()];
    loop {
        let mut changed = false;
        for (i, r) in rules.iter().enumerate() {
            if !usable[i] && symbols.contains(&r.root_symbol().name) {
                usable[i] = true;
                changed = true;
                if has_collapsing_meta(r.rhs()) {
                    return rules.clone();
                }
                unmarked_symbols(r.rhs(), &mut symbols);
            }
        }
        if !changed {
            break;
        }
    }
    rules
        .iter()
        .zip(usable)
        .filter(|(_, u)| *u)
        .map(|(r, _)| r.clone())
        .collect()
}

/// Rules that are not usable are dropped, at the price of both flags.
pub struct UsableRulesProcessor;

impl Processor for UsableRulesProcessor {
    fn name(&self) -> &'static str {
        "usable-rules"
    }

    fn theorem(&self) -> &'static str {
        "usable rules processor: minimal chains only use rules reachable from the pairs (sound, not complete)"
    }

    fn is_complete(&self) -> bool {
        false
    }

    fn apply(&self, problem: &DpProblem, _: &Context) -> Outcome {
        if !problem.m_flag.at_least_minimal() {
            return Outcome::not_applicable();
        }
        let ur = usable_rules(problem);
        let child = DpProblem {
            pairs: problem.pairs.clone(),
            rules: ur.clone(),
            m_flag: MFlag::Arbitrary,
            f_flag: FFlag::All,
        };
        if child == *problem {
            return Outcome::not_applicable();
        }
        Outcome::children(
            vec![child],
            vec![format!(
                "usable rules: {} of {}",
                ur.len(),
                problem.rules.len()
            )],
        )
    }
}

use std::collections::BTreeSet;

use crate::afsm::Rule;
use crate::framework::{Context, DpProblem, FFlag, Outcome, Processor};
use crate::term::{Name, Term};

/// Indices of the rules that may be needed to produce an instance of `l`.
fn formative(l: &Term, rules: &[Rule], output_sorts: &BTreeSet<Name>, out: &mut BTreeSet<usize>) {
    if let Term::Meta(_) = l {
        return;
    }
    let (head, args) = l.spine();
    if let Term::Fun(f) = head {
        let (dom, iota) = f.ty.flatten();
        if dom.len() == args.len() && !output_sorts.contains(iota) {
            for a in args {
                formative(a, rules, output_sorts, out);
            }
            return;
        }
    }
    out.extend(0..rules.len());
}

/// `FR(P, R)` using the three-clause approximation, in the order of `R`.
pub fn formative_rules(problem: &DpProblem) -> Vec<Rule> {
    let rules = &problem.rules;
    let output_sorts: BTreeSet<Name> = rules.iter().map(|r| r.ty().output_sort().clone()).collect();
    let mut keep = BTreeSet::new();
    for d in &problem.pairs {
        for a in d.lhs().spine().1 {
            formative(a, rules, &output_sorts, &mut keep);
        }
    }
    keep.into_iter().map(|i| rules[i].clone()).collect()
}

pub struct FormativeRulesProcessor;

impl Processor for FormativeRulesProcessor {
    fn name(&self) -> &'static str {
        "formative-rules"
    }

    fn theorem(&self) -> &'static str {
        "formative rules processor: formative chains only need rules that can build the pair left-hand sides (sound and complete)"
    }

    fn is_complete(&self) -> bool {
        true
    }

    fn apply(&self, problem: &DpProblem, _: &Context) -> Outcome {
        if problem.f_flag != FFlag::Formative {
            return Outcome::not_applicable();
        }
        let fr = formative_rules(problem);
        if fr.len() == problem.rules.len() {
            return Outcome::not_applicable();
        }
        let w = format!("formative rules: {} of {}", fr.len(), problem.rules.len());
        Outcome::children(vec![problem.with_rules(fr)], vec![w])
    }
}

use std::collections::BTreeSet;

use super::{Afsm, Rule};
use crate::term::{MetaVar, Name, NameSupply, Term, Var};

/// The η-expanded system: each rule is applied to fresh meta-variables up to
/// base type, and both sides are η-long-ified.
pub fn eta_expand(m: &Afsm) -> Afsm {
    let rules = m.rules.iter().map(expand_rule).collect();
    Afsm {
        sorts: m.sorts.clone(),
        signature: m.signature.clone(),
        rules,
    }
}

fn expand_rule(rule: &Rule) -> Rule {
    let ty = rule.ty();
    let (arg_types, _) = ty.flatten();
    let mut taken: BTreeSet<Name> = rule.lhs().metas().into_iter().map(|z| z.name).collect();
    let mut fresh = Vec::new();
    let mut n = 1;
    for t in arg_types {
        let name = loop {
            let candidate: Name = Name::from(format!("Z{n}").as_str());
            n += 1;
            if !taken.contains(&candidate) {
                break candidate;
            }
        };
        taken.insert(name.clone());
        let z = MetaVar::new(&name, t.clone(), 0).expect("arity 0");
        fresh.push(Term::meta(&z, vec![]).expect("arity 0"));
    }
    let lhs = Term::apps(rule.lhs().clone(), fresh.iter().cloned());
    let rhs = Term::apps(rule.rhs().clone(), fresh);
    let mut names = NameSupply::avoiding([&lhs, &rhs]);
    let lhs = up(&lhs, &mut names);
    let rhs = up(&rhs, &mut names);
    Rule::new(lhs, rhs).expect("η-expansion preserves rule invariants")
}

/// `s↑`: expand applications, variables and symbols to base type.
fn up(s: &Term, names: &mut NameSupply) -> Term {
    match s {
        Term::App(..) | Term::Var(_) | Term::Fun(_) => {
            let ty = s.type_of().expect("well-typed");
            let (args, _) = ty.flatten();
            let xs: Vec<Var> = args
                .iter()
                .map(|t| names.fresh_var("x", (*t).clone()))
                .collect();
            let body = Term::apps(
                circ(s, names),
                xs.iter()
                    .map(|x| up(&Term::var(x), names))
                    .collect::<Vec<_>>(),
            );
            Term::lams(&xs, &body)
        }
        _ => circ(s, names),
    }
}

/// `s°`: expand all proper subterms, but not `s` itself.
fn circ(s: &Term, names: &mut NameSupply) -> Term {
    match s {
        Term::Var(_) | Term::Fun(_) | Term::Bound(_) => s.clone(),
        Term::Meta(m) => {
            let args = m.args().iter().map(|a| circ(a, names)).collect();
            Term::meta(m.var(), args).expect("same arity")
        }
        Term::Abs(..) => {
            let (x, body) = s.unbind(names).expect("abstraction");
            Term::lam(&x, &up(&body, names))
        }
        Term::App(l, r) => Term::app(circ(l, names), up(r, names)),
    }
}

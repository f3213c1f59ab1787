use std::collections::BTreeMap;
use std::sync::Arc;

use super::Afsm;
use crate::term::{beta_step, MetaVar, NameSupply, Substitution, Term, Var};

/// Pattern matching in the Miller fragment: returns `δ` with `ℓδ = s`.
pub fn match_pattern(pattern: &Term, s: &Term) -> Option<Substitution> {
    let mut names = NameSupply::avoiding([pattern, s]);
    let mut bindings = BTreeMap::new();
    let mut locals = Vec::new();
    if !go(pattern, s, &mut bindings, &mut names, &mut locals) {
        return None;
    }
    let mut delta = Substitution::new();
    for (z, image) in bindings {
        delta.insert_meta(z, image).ok()?;
    }
    Some(delta)
}

fn go(
    l: &Term,
    s: &Term,
    delta: &mut BTreeMap<MetaVar, Term>,
    names: &mut NameSupply,
    locals: &mut Vec<Var>,
) -> bool {
    match l {
        Term::Meta(m) => {
            let xs: Vec<Var> = m
                .args()
                .iter()
                .map(|a| match a {
                    Term::Var(v) => v.clone(),
                    _ => unreachable!("pattern argument"),
                })
                .collect();
            if s.free_vars()
                .iter()
                .any(|v| locals.contains(v) && !xs.contains(v))
            {
                return false;
            }
            let image = Term::lams(&xs, s);
            match delta.get(m.var()) {
                Some(old) => *old == image,
                None => {
                    if image.type_of().ok().as_ref() != Some(&m.var().ty) {
                        return false;
                    }
                    delta.insert(m.var().clone(), image);
                    true
                }
            }
        }
        Term::Abs(b, _) => match s {
            Term::Abs(b2, _) if b.ty == b2.ty => {
                let x = names.fresh_var(&b.hint.0, b.ty.clone());
                let lb = match l {
                    Term::Abs(_, body) => body.open(&Term::Var(x.clone())),
                    _ => unreachable!(),
                };
                let sb = match s {
                    Term::Abs(_, body) => body.open(&Term::Var(x.clone())),
                    _ => unreachable!(),
                };
                locals.push(x);
                let ok = go(&lb, &sb, delta, names, locals);
                locals.pop();
                ok
            }
            _ => false,
        },
        Term::App(..) => {
            let (lh, largs) = l.spine();
            let (sh, sargs) = s.spine();
            largs.len() == sargs.len()
                && lh == sh
                && largs
                    .iter()
                    .zip(sargs.iter())
                    .all(|(a, b)| go(a, b, delta, names, locals))
        }
        Term::Var(_) | Term::Fun(_) | Term::Bound(_) => l == s,
    }
}

/// All one-step reducts of `s` (rule steps and β-steps), outermost-leftmost.
pub fn rewrite_step(m: &Afsm, s: &Term) -> Vec<Term> {
    let mut names = NameSupply::avoiding([s]);
    steps(m, s, &mut names)
}

fn steps(m: &Afsm, s: &Term, names: &mut NameSupply) -> Vec<Term> {
    let mut out = Vec::new();
    for rule in &m.rules {
        if rule.lhs().head_symbol().map(|f| &f.name) != s.head_symbol().map(|f| &f.name) {
            continue;
        }
        if let Some(delta) = match_pattern(rule.lhs(), s) {
            out.push(delta.apply(rule.rhs()));
        }
    }
    if let Term::App(l, _) = s {
        if let Term::Abs(..) = l.as_ref() {
            out.extend(beta_step(s).into_iter().take(1));
        }
    }
    match s {
        Term::App(l, r) => {
            for red in steps(m, l, names) {
                out.push(Term::App(Arc::new(red), r.clone()));
            }
            for red in steps(m, r, names) {
                out.push(Term::App(l.clone(), Arc::new(red)));
            }
        }
        Term::Abs(b, _) => {
            let (x, body) = s.unbind(names).expect("abstraction");
            for red in steps(m, &body, names) {
                out.push(Term::Abs(b.clone(), Arc::new(red.close(&x))));
            }
        }
        Term::Meta(mm) => {
            for (i, a) in mm.args().iter().enumerate() {
                for red in steps(m, a, names) {
                    let mut args = mm.args().to_vec();
                    args[i] = red;
                    out.push(Term::meta(mm.var(), args).expect("same arity"));
                }
            }
        }
        _ => {}
    }
    out
}

use std::sync::Arc;

use super::{MetaApp, NameSupply, Term};

/// All one-step β-reducts, outermost-leftmost first.
pub fn beta_step(s: &Term) -> Vec<Term> {
    let mut names = NameSupply::avoiding([s]);
    beta_in(s, &mut names)
}

fn beta_in(s: &Term, names: &mut NameSupply) -> Vec<Term> {
    let mut out = Vec::new();
    match s {
        Term::App(l, r) => {
            if let Term::Abs(_, body) = l.as_ref() {
                out.push(body.open(r));
            }
            for red in beta_in(l, names) {
                out.push(Term::App(Arc::new(red), r.clone()));
            }
            for red in beta_in(r, names) {
                out.push(Term::App(l.clone(), Arc::new(red)));
            }
        }
        Term::Abs(b, _) => {
            let (x, body) = s.unbind(names).expect("abstraction");
            for red in beta_in(&body, names) {
                out.push(Term::Abs(b.clone(), Arc::new(red.close(&x))));
            }
        }
        Term::Meta(m) => {
            for (i, a) in m.args.iter().enumerate() {
                for red in beta_in(a, names) {
                    let mut args = m.args.clone();
                    args[i] = red;
                    out.push(Term::Meta(MetaApp {
                        var: m.var.clone(),
                        args,
                    }));
                }
            }
        }
        Term::Var(_) | Term::Bound(_) | Term::Fun(_) => {}
    }
    out
}

fn push_unique(out: &mut Vec<Term>, t: Term) {
    if !out.contains(&t) {
        out.push(t);
    }
}

/// Every `t` with `s ⊵ t`, pre-order. Variables bound above `t` are
/// opened to fresh free variables. Meta-variable arguments are not entered.
pub fn subterms(s: &Term) -> Vec<Term> {
    let mut names = NameSupply::avoiding([s]);
    let mut out = Vec::new();
    subterms_in(s, &mut names, &mut out);
    out
}

/// Every `t` with `s ▷ t`.
pub fn strict_subterms(s: &Term) -> Vec<Term> {
    let mut names = NameSupply::avoiding([s]);
    let mut out = Vec::new();
    match s {
        Term::App(l, r) => {
            subterms_in(l, &mut names, &mut out);
            subterms_in(r, &mut names, &mut out);
        }
        Term::Abs(..) => {
            let (_, body) = s.unbind(&mut names).expect("abstraction");
            subterms_in(&body, &mut names, &mut out);
        }
        _ => {}
    }
    out.retain(|t| t != s);
    out
}

fn subterms_in(s: &Term, names: &mut NameSupply, out: &mut Vec<Term>) {
    push_unique(out, s.clone());
    match s {
        Term::App(l, r) => {
            subterms_in(l, names, out);
            subterms_in(r, names, out);
        }
        Term::Abs(..) => {
            let (_, body) = s.unbind(names).expect("abstraction");
            subterms_in(&body, names, out);
        }
        _ => {}
    }
}

/// Every `t` with `s ⊵̲ t`: partial applications on the head path are
/// skipped. Arguments of meta-variable applications are included.
pub fn fully_applied_subterms(s: &Term) -> Vec<Term> {
    let mut names = NameSupply::avoiding([s]);
    let mut out = Vec::new();
    fully_applied_in(s, &mut names, &mut out);
    out
}

fn fully_applied_in(s: &Term, names: &mut NameSupply, out: &mut Vec<Term>) {
    push_unique(out, s.clone());
    match s {
        Term::App(..) => {
            let (head, args) = s.spine();
            if let Term::Abs(..) | Term::Meta(_) = head {
                fully_applied_below(head, names, out);
            }
            for a in args {
                fully_applied_in(a, names, out);
            }
        }
        _ => fully_applied_below(s, names, out),
    }
}

fn fully_applied_below(s: &Term, names: &mut NameSupply, out: &mut Vec<Term>) {
    match s {
        Term::Abs(..) => {
            let (_, body) = s.unbind(names).expect("abstraction");
            fully_applied_in(&body, names, out);
        }
        Term::Meta(m) => {
            for a in &m.args {
                fully_applied_in(a, names, out);
            }
        }
        _ => {}
    }
}

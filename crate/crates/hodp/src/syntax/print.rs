use std::collections::HashSet;
use std::fmt;

use crate::term::{Name, Term, Var};

#[derive(Clone, Copy, PartialEq, Eq)]
enum Slot {
    Top,
    Head,
    Arg,
}

struct Printer {
    taken: HashSet<Name>,
}

impl Printer {
    fn binder_name(&mut self, hint: &str) -> Name {
        let valid = hint.starts_with(|c: char| c.is_ascii_alphabetic())
            && hint.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        let base = if valid { hint } else { "x" };
        let mut candidate = Name::from(base);
        let stem = base.trim_end_matches(|c: char| c.is_ascii_digit());
        let stem = if stem.is_empty() { "x" } else { stem };
        let mut n = 1;
        while self.taken.contains(&candidate) {
            candidate = Name::from(format!("{stem}{n}").as_str());
            n += 1;
        }
        candidate
    }

    fn go(&mut self, s: &Term, slot: Slot, out: &mut String) {
        match s {
            Term::Var(x) => out.push_str(&x.name),
            Term::Bound(i) => out.push_str(&format!("?{i}")),
            Term::Fun(f) => out.push_str(&f.to_string()),
            Term::Meta(m) => {
                let name = &m.var().name;
                out.push_str(name);
                let capital = name.starts_with(|c: char| c.is_ascii_uppercase());
                if !m.args().is_empty() || !capital {
                    out.push('[');
                    for (i, a) in m.args().iter().enumerate() {
                        if i > 0 {
                            out.push(',');
                        }
                        self.go(a, Slot::Top, out);
                    }
                    out.push(']');
                }
            }
            Term::App(l, r) => {
                let paren = slot == Slot::Arg;
                if paren {
                    out.push('(');
                }
                self.go(l, Slot::Head, out);
                out.push(' ');
                self.go(r, Slot::Arg, out);
                if paren {
                    out.push(')');
                }
            }
            Term::Abs(..) => {
                let paren = slot != Slot::Top;
                if paren {
                    out.push('(');
                }
                out.push_str("/\\");
                let mut body = s.clone();
                let mut added = Vec::new();
                while let Term::Abs(b, inner) = &body {
                    let name = self.binder_name(&b.hint.0);
                    self.taken.insert(name.clone());
                    added.push(name.clone());
                    out.push_str(&name);
                    if matches!(inner.as_ref(), Term::Abs(..)) {
                        out.push(' ');
                    }
                    body = inner.open(&Term::Var(Var::new(&name, b.ty.clone())));
                }
                out.push_str(". ");
                self.go(&body, Slot::Top, out);
                for n in added {
                    self.taken.remove(&n);
                }
                if paren {
                    out.push(')');
                }
            }
        }
    }
}

/// Renders a meta-term in the concrete syntax accepted by the parser.
pub fn print_term(s: &Term) -> String {
    let mut taken = HashSet::new();
    s.visit(&mut |u| match u {
        Term::Var(x) => {
            taken.insert(x.name.clone());
        }
        Term::Fun(f) => {
            taken.insert(f.name.clone());
        }
        Term::Meta(m) => {
            taken.insert(m.var().name.clone());
        }
        _ => {}
    });
    let mut out = String::new();
    Printer { taken }.go(s, Slot::Top, &mut out);
    out
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_term(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{MetaVar, Symbol, Type};

    #[test]
    fn lambda_and_meta() {
        let nat = Type::sort("nat");
        let sin = Symbol::new("sin", Type::arrow(nat.clone(), nat.clone()));
        let f = MetaVar::new("F", Type::arrow(nat.clone(), nat.clone()), 1).unwrap();
        let x = Var::new("x", nat.clone());
        let t = Term::lam(
            &x,
            &Term::app(
                Term::fun(&sin),
                Term::meta(&f, vec![Term::var(&x)]).unwrap(),
            ),
        );
        assert_eq!(print_term(&t), "/\\x. sin F[x]");
        assert_eq!(print_term(&Term::fun(&sin.marked_twin())), "sin#");
    }

    #[test]
    fn binder_clashing_with_free_variable_is_renamed() {
        let nat = Type::sort("nat");
        let g = Symbol::new("g", Type::arrows([nat.clone(), nat.clone()], nat.clone()));
        let x = Var::new("x", nat.clone());
        let inner = Term::apps(Term::fun(&g), [Term::var(&x), Term::var(&x)]);
        let t = Term::apps(
            Term::fun(&g),
            [
                Term::var(&x),
                Term::app(Term::lam(&x, &inner), Term::var(&x)),
            ],
        );
        assert!(print_term(&t).contains("(/\\x1. g x1 x1) x"));
    }
}

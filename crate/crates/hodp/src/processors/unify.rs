//! Unification of meta-terms: Miller patterns plus a first-order fallback
//! for applied meta-variables.

use std::collections::BTreeMap;

use crate::term::{MetaVar, NameSupply, Substitution, Term, Var};

/// An idempotent meta-variable substitution.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Unifier {
    bindings: BTreeMap<MetaVar, Term>,
}

impl Unifier {
    pub fn new() -> Unifier {
        Unifier::default()
    }

    pub fn substitution(&self) -> Substitution {
        let mut s = Substitution::new();
        for (z, t) in &self.bindings {
            s.insert_meta(z.clone(), t.clone())
                .expect("well-typed binding");
        }
        s
    }

    pub fn apply(&self, t: &Term) -> Term {
        if self.bindings.is_empty() {
            return t.clone();
        }
        self.substitution().apply(t)
    }

    pub fn bindings(&self) -> &BTreeMap<MetaVar, Term> {
        &self.bindings
    }

    /// Adds `z := image`; `image` must already be normal for `self` and
    /// free of `z`.
    pub fn bind(&mut self, z: MetaVar, image: Term) -> bool {
        let mut single = Substitution::new();
        if single.insert_meta(z.clone(), image.clone()).is_err() {
            return false;
        }
        for t in self.bindings.values_mut() {
            *t = single.apply(t);
        }
        self.bindings.insert(z, image);
        true
    }
}

fn pattern_args(args: &[Term], locals: &[Var]) -> Option<Vec<Var>> {
    let mut xs = Vec::new();
    for a in args {
        match a {
            Term::Var(x) if locals.contains(x) && !xs.contains(x) => xs.push(x.clone()),
            _ => return None,
        }
    }
    Some(xs)
}

/// Extends `u` so that `a u = b u`, or returns `false`.
pub fn unify(a: &Term, b: &Term, u: &mut Unifier) -> bool {
    let mut names = NameSupply::avoiding([a, b]);
    for t in u.bindings.values() {
        names.avoid_term(t);
    }
    go(a, b, u, &mut names, &mut Vec::new())
}

fn flex(m: &crate::term::MetaApp, t: &Term, u: &mut Unifier, locals: &[Var]) -> Option<bool> {
    let xs = pattern_args(m.args(), locals)?;
    if let Term::Meta(n) = t {
        if n.var() == m.var() && n.args() == m.args() {
            return Some(true);
        }
    }
    if t.metas().contains(m.var()) {
        return Some(false);
    }
    if t.free_vars()
        .iter()
        .any(|v| locals.contains(v) && !xs.contains(v))
    {
        return Some(false);
    }
    let image = Term::lams(&xs, t);
    if image.type_of().ok().as_ref() != Some(&m.var().ty) {
        return Some(false);
    }
    Some(u.bind(m.var().clone(), image))
}

fn go(a: &Term, b: &Term, u: &mut Unifier, names: &mut NameSupply, locals: &mut Vec<Var>) -> bool {
    let a = u.apply(a);
    let b = u.apply(b);
    if a == b {
        return true;
    }
    if let Term::Meta(m) = &a {
        if let Some(r) = flex(m, &b, u, locals) {
            return r;
        }
    }
    if let Term::Meta(m) = &b {
        if let Some(r) = flex(m, &a, u, locals) {
            return r;
        }
    }
    match (&a, &b) {
        (Term::Abs(x, _), Term::Abs(y, _)) if x.ty == y.ty => {
            let (v, ab) = a.unbind(names).expect("abstraction");
            let bb = match &b {
                Term::Abs(_, body) => body.open(&Term::Var(v.clone())),
                _ => unreachable!(),
            };
            locals.push(v);
            let ok = go(&ab, &bb, u, names, locals);
            locals.pop();
            ok
        }
        (Term::App(..), Term::App(..)) => {
            let (ha, aa) = a.spine();
            let (hb, ab) = b.spine();
            let rigid = |h: &Term| matches!(h, Term::Fun(_) | Term::Var(_));
            if rigid(ha) && rigid(hb) {
                if ha != hb || aa.len() != ab.len() {
                    return false;
                }
                return aa.iter().zip(ab).all(|(x, y)| go(x, y, u, names, locals));
            }
            match (&a, &b) {
                (Term::App(l1, r1), Term::App(l2, r2)) => {
                    go(l1, l2, u, names, locals) && go(r1, r2, u, names, locals)
                }
                _ => unreachable!(),
            }
        }
        _ => false,
    }
}

/// First-order instance check: some substitution on the free variables of
/// `pattern` maps it to `t`.
pub fn var_instance(pattern: &Term, t: &Term) -> Option<Substitution> {
    let mut map: BTreeMap<Var, Term> = BTreeMap::new();
    if !instance(pattern, t, &mut map) {
        return None;
    }
    let mut s = Substitution::new();
    for (x, img) in map {
        s.insert_var(x, img).ok()?;
    }
    Some(s)
}

fn instance(p: &Term, t: &Term, map: &mut BTreeMap<Var, Term>) -> bool {
    match (p, t) {
        (Term::Var(x), _) => {
            if !t.is_locally_closed() {
                return false;
            }
            if t.type_of().ok().as_ref() != Some(&x.ty) {
                return false;
            }
            match map.get(x) {
                Some(old) => old == t,
                None => {
                    map.insert(x.clone(), t.clone());
                    true
                }
            }
        }
        (Term::App(a, b), Term::App(c, d)) => instance(a, c, map) && instance(b, d, map),
        (Term::Abs(x, a), Term::Abs(y, b)) => x.ty == y.ty && instance(a, b, map),
        (Term::Meta(m), Term::Meta(n)) => {
            m.var() == n.var()
                && m.args()
                    .iter()
                    .zip(n.args())
                    .all(|(a, b)| instance(a, b, map))
        }
        _ => p == t,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{Symbol, Type};

    #[test]
    fn meta_binds_to_application() {
        let o = Type::sort("o");
        let oo = Type::arrow(o.clone(), o.clone());
        let g = Symbol::new("g", oo.clone());
        let f = MetaVar::new("F", oo.clone(), 0).unwrap();
        let x = MetaVar::new("X", o.clone(), 0).unwrap();
        let y = MetaVar::new("Y", o.clone(), 0).unwrap();
        let fx = Term::app(
            Term::meta(&f, vec![]).unwrap(),
            Term::meta(&x, vec![]).unwrap(),
        );
        let a = Term::app(Term::fun(&g), fx.clone());
        let b = Term::app(Term::fun(&g), Term::meta(&y, vec![]).unwrap());
        let mut u = Unifier::new();
        assert!(unify(&a, &b, &mut u));
        assert_eq!(u.apply(&b), a);
    }

    #[test]
    fn occurs_check_fails() {
        let o = Type::sort("o");
        let s = Symbol::new("s", Type::arrow(o.clone(), o.clone()));
        let x = MetaVar::new("X", o.clone(), 0).unwrap();
        let xm = Term::meta(&x, vec![]).unwrap();
        let mut u = Unifier::new();
        assert!(!unify(&xm, &Term::app(Term::fun(&s), xm.clone()), &mut u));
    }
}

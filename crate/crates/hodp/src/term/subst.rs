use std::collections::BTreeMap;
use std::sync::Arc;

use super::{MetaApp, MetaVar, NameSupply, Term, TermError, Var};

/// A type-preserving map on variables and meta-variables.
///
/// Images are locally closed meta-terms. Entries that would act as the
/// identity are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Substitution {
    vars: BTreeMap<Var, Term>,
    metas: BTreeMap<MetaVar, Term>,
}

impl Substitution {
    pub fn new() -> Substitution {
        Substitution::default()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty() && self.metas.is_empty()
    }

    pub fn var_image(&self, x: &Var) -> Option<&Term> {
        self.vars.get(x)
    }

    pub fn meta_image(&self, z: &MetaVar) -> Option<&Term> {
        self.metas.get(z)
    }

    pub fn var_entries(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.vars.iter()
    }

    pub fn meta_entries(&self) -> impl Iterator<Item = (&MetaVar, &Term)> {
        self.metas.iter()
    }

    pub fn insert_var(&mut self, x: Var, image: Term) -> Result<(), TermError> {
        let found = image.type_of()?;
        if found != x.ty {
            return Err(TermError::TypeMismatch {
                key: x.name.to_string(),
                expected: x.ty.clone(),
                found,
            });
        }
        if image == Term::Var(x.clone()) {
            self.vars.remove(&x);
        } else {
            self.vars.insert(x, image);
        }
        Ok(())
    }

    pub fn insert_meta(&mut self, z: MetaVar, image: Term) -> Result<(), TermError> {
        let found = image.type_of()?;
        if found != z.ty {
            return Err(TermError::TypeMismatch {
                key: z.name.to_string(),
                expected: z.ty.clone(),
                found,
            });
        }
        if is_identity_image(&z, &image) {
            self.metas.remove(&z);
        } else {
            self.metas.insert(z, image);
        }
        Ok(())
    }

    pub fn remove_meta(&mut self, z: &MetaVar) -> Option<Term> {
        self.metas.remove(z)
    }

    pub fn apply(&self, s: &Term) -> Term {
        if self.is_empty() {
            return s.clone();
        }
        let mut names = NameSupply::avoiding(
            std::iter::once(s)
                .chain(self.vars.values())
                .chain(self.metas.values()),
        );
        for x in self.vars.keys() {
            names.avoid(&x.name);
        }
        self.apply_with(s, &mut names)
    }

    fn apply_with(&self, s: &Term, names: &mut NameSupply) -> Term {
        match s {
            Term::Var(x) => self.vars.get(x).cloned().unwrap_or_else(|| s.clone()),
            Term::Bound(_) | Term::Fun(_) => s.clone(),
            Term::App(l, r) => Term::app(self.apply_with(l, names), self.apply_with(r, names)),
            Term::Abs(b, _) => {
                let (x, body) = s.unbind(names).expect("abstraction");
                let body = self.apply_with(&body, names);
                Term::Abs(b.clone(), Arc::new(body.close(&x)))
            }
            Term::Meta(m) => {
                let args: Vec<Term> = m.args.iter().map(|a| self.apply_with(a, names)).collect();
                match self.metas.get(&m.var) {
                    Some(image) => meta_apply(image, &args),
                    None => Term::Meta(MetaApp {
                        var: m.var.clone(),
                        args,
                    }),
                }
            }
        }
    }

    /// `self` followed by `other`: `s(self ∘ other) = (s self) other`.
    pub fn then(&self, other: &Substitution) -> Substitution {
        let mut out = Substitution::new();
        for (x, t) in &self.vars {
            out.vars.insert(x.clone(), other.apply(t));
        }
        for (z, t) in &self.metas {
            out.metas.insert(z.clone(), other.apply(t));
        }
        for (x, t) in &other.vars {
            out.vars.entry(x.clone()).or_insert_with(|| t.clone());
        }
        for (z, t) in &other.metas {
            out.metas.entry(z.clone()).or_insert_with(|| t.clone());
        }
        out.vars.retain(|x, t| *t != Term::Var(x.clone()));
        out.metas.retain(|z, t| !is_identity_image(z, t));
        out
    }
}

fn is_identity_image(z: &MetaVar, image: &Term) -> bool {
    let k = z.arity();
    let mut t = image;
    for _ in 0..k {
        match t {
            Term::Abs(_, b) => t = b,
            _ => return false,
        }
    }
    match t {
        Term::Meta(m) if m.var == *z => m
            .args
            .iter()
            .enumerate()
            .all(|(i, a)| *a == Term::Bound(k - 1 - i)),
        _ => false,
    }
}

/// `image⟨|args|⟩`: consumes as many leading abstractions as there are
/// arguments, then applies whatever arguments remain.
pub fn meta_apply(image: &Term, args: &[Term]) -> Term {
    let mut body = image.clone();
    let mut used = 0;
    while used < args.len() {
        match body {
            Term::Abs(_, b) => {
                body = b.open(&args[used]);
                used += 1;
            }
            _ => break,
        }
    }
    Term::apps(body, args[used..].iter().cloned())
}

pub fn apply_substitution(s: &Term, gamma: &Substitution) -> Term {
    gamma.apply(s)
}

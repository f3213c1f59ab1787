//! Simply-typed meta-terms in locally nameless form.
//!
//! Bound variables are de Bruijn indices, free variables carry names. Binder
//! names survive only as printing hints that take no part in equality, so
//! α-equivalent terms are structurally equal and hash identically.

mod ops;
mod subst;
mod types;

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use thiserror::Error;

pub use ops::{beta_step, fully_applied_subterms, strict_subterms, subterms};
pub use subst::{apply_substitution, meta_apply, Substitution};
pub use types::{Name, Type};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("ill-typed term: {0}")]
    IllTyped(String),
    #[error("meta-variable {name} has arity {arity} but was given {given} arguments")]
    MetaArity {
        name: Name,
        arity: usize,
        given: usize,
    },
    #[error("meta-variable {name} of type {ty} cannot take {arity} arguments")]
    ArityExceedsType { name: Name, ty: Type, arity: usize },
    #[error("type mismatch: {key} has type {expected} but its image has type {found}")]
    TypeMismatch {
        key: String,
        expected: Type,
        found: Type,
    },
}

/// A function symbol; `marked` distinguishes `f#` from `f`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Symbol {
    pub name: Name,
    pub ty: Type,
    pub marked: bool,
}

impl Symbol {
    pub fn new(name: &str, ty: Type) -> Symbol {
        Symbol {
            name: Name::from(name),
            ty,
            marked: false,
        }
    }

    pub fn marked_twin(&self) -> Symbol {
        Symbol {
            marked: true,
            ..self.clone()
        }
    }

    pub fn unmarked_twin(&self) -> Symbol {
        Symbol {
            marked: false,
            ..self.clone()
        }
    }

    /// The all-zero constant `⊥σ` used to fill missing arguments.
    pub fn bottom(ty: Type) -> Symbol {
        Symbol {
            name: Name::from(format!("{BOTTOM_PREFIX}{ty}").as_str()),
            ty,
            marked: false,
        }
    }

    pub fn is_bottom(&self) -> bool {
        self.name.starts_with(BOTTOM_PREFIX)
    }
}

const BOTTOM_PREFIX: &str = "⊥";

/// A free variable.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Var {
    pub name: Name,
    pub ty: Type,
}

impl Var {
    pub fn new(name: &str, ty: Type) -> Var {
        Var {
            name: Name::from(name),
            ty,
        }
    }
}

/// A meta-variable `Z : σ` with a fixed arity.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct MetaVar {
    pub name: Name,
    pub ty: Type,
    arity: usize,
}

impl MetaVar {
    pub fn new(name: &str, ty: Type, arity: usize) -> Result<MetaVar, TermError> {
        if arity > ty.arity() {
            return Err(TermError::ArityExceedsType {
                name: Name::from(name),
                ty,
                arity,
            });
        }
        Ok(MetaVar {
            name: Name::from(name),
            ty,
            arity,
        })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Type of `Z⟨s1..sk⟩`.
    pub fn result_type(&self) -> &Type {
        self.ty
            .after_args(self.arity)
            .expect("arity checked at construction")
    }

    pub fn with_name(&self, name: &str) -> MetaVar {
        MetaVar {
            name: Name::from(name),
            ..self.clone()
        }
    }
}

/// Binder name kept for printing only; never compared.
#[derive(Clone, Debug)]
pub struct Hint(pub Name);

impl PartialEq for Hint {
    fn eq(&self, _: &Hint) -> bool {
        true
    }
}
impl Eq for Hint {}
impl Hash for Hint {
    fn hash<H: Hasher>(&self, _: &mut H) {}
}
impl PartialOrd for Hint {
    fn partial_cmp(&self, other: &Hint) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Hint {
    fn cmp(&self, _: &Hint) -> Ordering {
        Ordering::Equal
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Binder {
    pub hint: Hint,
    pub ty: Type,
}

/// `Z⟨s1,…,sk⟩`; only constructible with exactly `arity(Z)` arguments.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct MetaApp {
    var: MetaVar,
    args: Vec<Term>,
}

impl MetaApp {
    pub fn var(&self) -> &MetaVar {
        &self.var
    }

    pub fn args(&self) -> &[Term] {
        &self.args
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Term {
    Var(Var),
    /// de Bruijn index; only appears under an enclosing `Abs`.
    Bound(usize),
    Fun(Symbol),
    App(Arc<Term>, Arc<Term>),
    Abs(Binder, Arc<Term>),
    Meta(MetaApp),
}

impl Term {
    pub fn var(v: &Var) -> Term {
        Term::Var(v.clone())
    }

    pub fn fun(f: &Symbol) -> Term {
        Term::Fun(f.clone())
    }

    pub fn app(s: Term, t: Term) -> Term {
        Term::App(Arc::new(s), Arc::new(t))
    }

    pub fn apps<I: IntoIterator<Item = Term>>(head: Term, args: I) -> Term {
        args.into_iter().fold(head, Term::app)
    }

    /// `λx.body`, binding every free occurrence of `x` in `body`.
    pub fn lam(x: &Var, body: &Term) -> Term {
        Term::Abs(
            Binder {
                hint: Hint(x.name.clone()),
                ty: x.ty.clone(),
            },
            Arc::new(body.close(x)),
        )
    }

    pub fn lams(xs: &[Var], body: &Term) -> Term {
        xs.iter()
            .rev()
            .fold(body.clone(), |acc, x| Term::lam(x, &acc))
    }

    pub fn meta(z: &MetaVar, args: Vec<Term>) -> Result<Term, TermError> {
        if args.len() != z.arity {
            return Err(TermError::MetaArity {
                name: z.name.clone(),
                arity: z.arity,
                given: args.len(),
            });
        }
        Ok(Term::Meta(MetaApp {
            var: z.clone(),
            args,
        }))
    }

    /// Splits `h s1 … sn` into its head and arguments.
    pub fn spine(&self) -> (&Term, Vec<&Term>) {
        let mut args = Vec::new();
        let mut t = self;
        while let Term::App(l, r) = t {
            args.push(r.as_ref());
            t = l;
        }
        args.reverse();
        (t, args)
    }

    pub fn head(&self) -> &Term {
        self.spine().0
    }

    pub fn head_symbol(&self) -> Option<&Symbol> {
        match self.head() {
            Term::Fun(f) => Some(f),
            _ => None,
        }
    }

    pub fn is_term(&self) -> bool {
        match self {
            Term::Var(_) | Term::Bound(_) | Term::Fun(_) => true,
            Term::App(l, r) => l.is_term() && r.is_term(),
            Term::Abs(_, b) => b.is_term(),
            Term::Meta(_) => false,
        }
    }

    /// Replaces the loose index of an abstraction body by `value`.
    /// `value` must be locally closed.
    pub fn open(&self, value: &Term) -> Term {
        self.open_at(0, value)
    }

    fn open_at(&self, depth: usize, value: &Term) -> Term {
        match self {
            Term::Bound(i) if *i == depth => value.clone(),
            Term::Var(_) | Term::Bound(_) | Term::Fun(_) => self.clone(),
            Term::App(l, r) => Term::app(l.open_at(depth, value), r.open_at(depth, value)),
            Term::Abs(b, body) => Term::Abs(b.clone(), Arc::new(body.open_at(depth + 1, value))),
            Term::Meta(m) => Term::Meta(MetaApp {
                var: m.var.clone(),
                args: m.args.iter().map(|a| a.open_at(depth, value)).collect(),
            }),
        }
    }

    /// Abstracts the free variable `x` into the loose index.
    pub fn close(&self, x: &Var) -> Term {
        self.close_at(0, x)
    }

    fn close_at(&self, depth: usize, x: &Var) -> Term {
        match self {
            Term::Var(v) if v == x => Term::Bound(depth),
            Term::Var(_) | Term::Bound(_) | Term::Fun(_) => self.clone(),
            Term::App(l, r) => Term::app(l.close_at(depth, x), r.close_at(depth, x)),
            Term::Abs(b, body) => Term::Abs(b.clone(), Arc::new(body.close_at(depth + 1, x))),
            Term::Meta(m) => Term::Meta(MetaApp {
                var: m.var.clone(),
                args: m.args.iter().map(|a| a.close_at(depth, x)).collect(),
            }),
        }
    }

    /// Opens an abstraction with a fresh variable drawn from `names`.
    pub fn unbind(&self, names: &mut NameSupply) -> Option<(Var, Term)> {
        match self {
            Term::Abs(b, body) => {
                let x = names.fresh_var(&b.hint.0, b.ty.clone());
                let opened = body.open(&Term::Var(x.clone()));
                Some((x, opened))
            }
            _ => None,
        }
    }

    pub fn is_locally_closed(&self) -> bool {
        fn go(t: &Term, depth: usize) -> bool {
            match t {
                Term::Bound(i) => *i < depth,
                Term::Var(_) | Term::Fun(_) => true,
                Term::App(l, r) => go(l, depth) && go(r, depth),
                Term::Abs(_, b) => go(b, depth + 1),
                Term::Meta(m) => m.args.iter().all(|a| go(a, depth)),
            }
        }
        go(self, 0)
    }

    pub fn type_of(&self) -> Result<Type, TermError> {
        self.type_in(&mut Vec::new())
    }

    fn type_in(&self, ctx: &mut Vec<Type>) -> Result<Type, TermError> {
        match self {
            Term::Var(v) => Ok(v.ty.clone()),
            Term::Bound(i) => ctx
                .len()
                .checked_sub(i + 1)
                .map(|k| ctx[k].clone())
                .ok_or_else(|| TermError::IllTyped(format!("dangling bound index {i}"))),
            Term::Fun(f) => Ok(f.ty.clone()),
            Term::App(l, r) => {
                let lt = l.type_in(ctx)?;
                let rt = r.type_in(ctx)?;
                match lt {
                    Type::Arrow(d, c) if *d == rt => Ok((*c).clone()),
                    Type::Arrow(d, _) => Err(TermError::IllTyped(format!(
                        "argument of type {rt} where {d} was expected"
                    ))),
                    Type::Sort(s) => Err(TermError::IllTyped(format!(
                        "application of a term of base type {s}"
                    ))),
                }
            }
            Term::Abs(b, body) => {
                ctx.push(b.ty.clone());
                let bt = body.type_in(ctx);
                ctx.pop();
                Ok(Type::arrow(b.ty.clone(), bt?))
            }
            Term::Meta(m) => {
                let mut t = &m.var.ty;
                for a in &m.args {
                    let at = a.type_in(ctx)?;
                    match t {
                        Type::Arrow(d, c) if **d == at => t = c,
                        _ => {
                            return Err(TermError::IllTyped(format!(
                                "meta-variable {} applied to an argument of type {at}",
                                m.var.name
                            )))
                        }
                    }
                }
                Ok(t.clone())
            }
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.visit(&mut |t| {
            if let Term::Var(v) = t {
                out.insert(v.clone());
            }
        });
        out
    }

    pub fn has_free_var(&self, x: &Var) -> bool {
        let mut found = false;
        self.visit(&mut |t| {
            if let Term::Var(v) = t {
                found |= v == x;
            }
        });
        found
    }

    /// Free variables in left-to-right order of first occurrence.
    pub fn free_vars_ordered(&self) -> Vec<Var> {
        let mut out: Vec<Var> = Vec::new();
        self.visit(&mut |t| {
            if let Term::Var(v) = t {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
        });
        out
    }

    pub fn metas(&self) -> BTreeSet<MetaVar> {
        self.metas_ordered().into_iter().collect()
    }

    /// Meta-variables in left-to-right order of first occurrence.
    pub fn metas_ordered(&self) -> Vec<MetaVar> {
        let mut out: Vec<MetaVar> = Vec::new();
        self.visit(&mut |t| {
            if let Term::Meta(m) = t {
                if !out.contains(&m.var) {
                    out.push(m.var.clone());
                }
            }
        });
        out
    }

    pub fn symbols(&self) -> Vec<Symbol> {
        let mut out: Vec<Symbol> = Vec::new();
        self.visit(&mut |t| {
            if let Term::Fun(f) = t {
                if !out.contains(f) {
                    out.push(f.clone());
                }
            }
        });
        out
    }

    /// Pre-order traversal over every node, including meta-arguments.
    pub fn visit<F: FnMut(&Term)>(&self, f: &mut F) {
        f(self);
        match self {
            Term::App(l, r) => {
                l.visit(f);
                r.visit(f);
            }
            Term::Abs(_, b) => b.visit(f),
            Term::Meta(m) => m.args.iter().for_each(|a| a.visit(f)),
            _ => {}
        }
    }

    /// Rebuilds the term bottom-up through `f`.
    pub fn map_symbols(&self, f: &impl Fn(&Symbol) -> Symbol) -> Term {
        match self {
            Term::Fun(s) => Term::Fun(f(s)),
            Term::Var(_) | Term::Bound(_) => self.clone(),
            Term::App(l, r) => Term::app(l.map_symbols(f), r.map_symbols(f)),
            Term::Abs(b, body) => Term::Abs(b.clone(), Arc::new(body.map_symbols(f))),
            Term::Meta(m) => Term::Meta(MetaApp {
                var: m.var.clone(),
                args: m.args.iter().map(|a| a.map_symbols(f)).collect(),
            }),
        }
    }

    /// Renames meta-variables; `f` must preserve type and arity.
    pub fn map_metas(&self, f: &impl Fn(&MetaVar) -> MetaVar) -> Term {
        match self {
            Term::Fun(_) | Term::Var(_) | Term::Bound(_) => self.clone(),
            Term::App(l, r) => Term::app(l.map_metas(f), r.map_metas(f)),
            Term::Abs(b, body) => Term::Abs(b.clone(), Arc::new(body.map_metas(f))),
            Term::Meta(m) => {
                let var = f(&m.var);
                debug_assert_eq!(var.arity, m.var.arity);
                Term::Meta(MetaApp {
                    var,
                    args: m.args.iter().map(|a| a.map_metas(f)).collect(),
                })
            }
        }
    }

    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    /// Is this `Z⟨x1..xk⟩` with pairwise distinct variables as arguments?
    pub fn is_meta_pattern(&self) -> bool {
        match self {
            Term::Meta(m) => distinct_variables(&m.args),
            _ => false,
        }
    }

    pub fn is_pattern(&self) -> bool {
        match self {
            Term::Meta(_) => self.is_meta_pattern(),
            Term::Abs(_, b) => b.is_pattern(),
            _ => {
                let (h, args) = self.spine();
                matches!(h, Term::Var(_) | Term::Bound(_) | Term::Fun(_))
                    && args.iter().all(|a| a.is_pattern())
            }
        }
    }
}

pub(crate) fn distinct_variables(args: &[Term]) -> bool {
    args.iter()
        .enumerate()
        .all(|(i, a)| matches!(a, Term::Var(_) | Term::Bound(_)) && !args[..i].contains(a))
}

/// Deterministic supply of variable names avoiding a fixed set.
#[derive(Clone, Debug, Default)]
pub struct NameSupply {
    used: HashSet<Name>,
}

impl NameSupply {
    pub fn new() -> NameSupply {
        NameSupply::default()
    }

    /// Avoids every free variable of the given terms.
    pub fn avoiding<'a, I: IntoIterator<Item = &'a Term>>(terms: I) -> NameSupply {
        let mut s = NameSupply::new();
        for t in terms {
            s.avoid_term(t);
        }
        s
    }

    pub fn avoid_term(&mut self, t: &Term) {
        t.visit(&mut |u| {
            if let Term::Var(v) = u {
                self.used.insert(v.name.clone());
            }
        });
    }

    pub fn avoid(&mut self, name: &str) {
        self.used.insert(Name::from(name));
    }

    pub fn fresh_name(&mut self, hint: &str) -> Name {
        let base = hint.trim_end_matches(|c: char| c.is_ascii_digit());
        let base = if base.is_empty() { "x" } else { base };
        let mut candidate = Name::from(hint);
        let mut n = 1;
        while self.used.contains(&candidate) {
            candidate = Name::from(format!("{base}{n}").as_str());
            n += 1;
        }
        self.used.insert(candidate.clone());
        candidate
    }

    pub fn fresh_var(&mut self, hint: &str, ty: Type) -> Var {
        Var {
            name: self.fresh_name(hint),
            ty,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.marked {
            write!(f, "{}#", self.name)
        } else {
            write!(f, "{}", self.name)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nat() -> Type {
        Type::sort("nat")
    }

    #[test]
    fn alpha_equivalent_terms_are_equal() {
        let x = Var::new("x", nat());
        let y = Var::new("y", nat());
        let s = Symbol::new("s", Type::arrow(nat(), nat()));
        let a = Term::lam(&x, &Term::app(Term::fun(&s), Term::var(&x)));
        let b = Term::lam(&y, &Term::app(Term::fun(&s), Term::var(&y)));
        assert_eq!(a, b);
        let c = Term::lam(&y, &Term::app(Term::fun(&s), Term::var(&x)));
        assert_ne!(a, c);
    }

    #[test]
    fn meta_arity_is_enforced() {
        let z = MetaVar::new("Z", Type::arrow(nat(), nat()), 1).unwrap();
        assert!(Term::meta(&z, vec![]).is_err());
        assert!(MetaVar::new("Z", nat(), 1).is_err());
        let zero = Symbol::new("0", nat());
        let t = Term::meta(&z, vec![Term::fun(&zero)]).unwrap();
        assert_eq!(t.type_of().unwrap(), nat());
    }

    #[test]
    fn pattern_shapes() {
        let x = Var::new("x", nat());
        let z = MetaVar::new("Z", Type::arrow(nat(), nat()), 1).unwrap();
        let zx = Term::meta(&z, vec![Term::var(&x)]).unwrap();
        assert!(Term::lam(&x, &zx).is_pattern());
        let z2 = MetaVar::new("Z", Type::arrows([nat(), nat()], nat()), 2).unwrap();
        let zxx = Term::meta(&z2, vec![Term::var(&x), Term::var(&x)]).unwrap();
        assert!(!zxx.is_pattern());
        let z0 = MetaVar::new("Z", Type::arrow(nat(), nat()), 0).unwrap();
        let zero = Symbol::new("0", nat());
        let applied = Term::app(Term::meta(&z0, vec![]).unwrap(), Term::fun(&zero));
        assert!(!applied.is_pattern());
    }

    #[test]
    fn name_supply_is_deterministic() {
        let mut s = NameSupply::new();
        s.avoid("x");
        assert_eq!(&*s.fresh_name("x"), "x1");
        assert_eq!(&*s.fresh_name("x"), "x2");
        assert_eq!(&*s.fresh_name("y"), "y");
    }
}

//! Rewrite systems with meta-variables: rules, the rewrite relation, the
//! properly-applied check, η-expansion and accessibility.

mod accessibility;
mod eta;
mod matching;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::term::{fully_applied_subterms, Name, Symbol, Term, TermError, Type};

pub use accessibility::{
    acc_positions, acc_positions_of_variable, acc_reachable, acc_subterm, afp_failure,
    find_afp_ordering, SortOrdering,
};
pub use eta::eta_expand;
pub use matching::{match_pattern, rewrite_step};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("left-hand side is not a pattern")]
    NotPattern,
    #[error("left-hand side must be headed by an unmarked function symbol")]
    BadHead,
    #[error("rule sides must be closed")]
    NotClosed,
    #[error("meta-variable {0} occurs on the right but not on the left")]
    UnboundMeta(Name),
    #[error("sides have different types: {0} and {1}")]
    TypeMismatch(Type, Type),
    #[error(transparent)]
    Term(#[from] TermError),
}

/// A rule `ℓ ⇒ r` between closed meta-terms.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Rule {
    lhs: Term,
    rhs: Term,
}

impl Rule {
    pub fn new(lhs: Term, rhs: Term) -> Result<Rule, RuleError> {
        let lt = lhs.type_of()?;
        let rt = rhs.type_of()?;
        if lt != rt {
            return Err(RuleError::TypeMismatch(lt, rt));
        }
        match lhs.head() {
            Term::Fun(f) if !f.marked => {}
            _ => return Err(RuleError::BadHead),
        }
        if !lhs.is_pattern() {
            return Err(RuleError::NotPattern);
        }
        if !lhs.free_vars().is_empty() || !rhs.free_vars().is_empty() {
            return Err(RuleError::NotClosed);
        }
        let lm = lhs.metas();
        if let Some(z) = rhs.metas().into_iter().find(|z| !lm.contains(z)) {
            return Err(RuleError::UnboundMeta(z.name));
        }
        Ok(Rule { lhs, rhs })
    }

    pub fn lhs(&self) -> &Term {
        &self.lhs
    }

    pub fn rhs(&self) -> &Term {
        &self.rhs
    }

    pub fn root_symbol(&self) -> &Symbol {
        self.lhs
            .head_symbol()
            .expect("rule head checked at construction")
    }

    pub fn ty(&self) -> Type {
        self.lhs.type_of().expect("rule typed at construction")
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} => {}", self.lhs, self.rhs)
    }
}

/// A signature together with a finite set of rules.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Afsm {
    pub sorts: Vec<Name>,
    pub signature: Vec<Symbol>,
    pub rules: Vec<Rule>,
}

impl Afsm {
    pub fn symbol(&self, name: &str) -> Option<&Symbol> {
        self.signature.iter().find(|f| &*f.name == name)
    }

    /// Root symbols of left-hand sides, in rule order.
    pub fn defined_symbols(&self) -> Vec<Symbol> {
        defined_symbols(&self.rules)
    }

    /// Declared sorts, plus any sort that only appears inside a type.
    pub fn all_sorts(&self) -> Vec<Name> {
        let mut out = self.sorts.clone();
        fn collect(t: &Type, out: &mut Vec<Name>) {
            match t {
                Type::Sort(s) => {
                    if !out.contains(s) {
                        out.push(s.clone())
                    }
                }
                Type::Arrow(d, c) => {
                    collect(d, out);
                    collect(c, out);
                }
            }
        }
        for f in &self.signature {
            collect(&f.ty, &mut out);
        }
        out
    }
}

pub fn defined_symbols(rules: &[Rule]) -> Vec<Symbol> {
    let mut out: Vec<Symbol> = Vec::new();
    for r in rules {
        let f = r.root_symbol();
        if !out.iter().any(|g| g.name == f.name) {
            out.push(f.clone());
        }
    }
    out
}

/// Result of the properly-applied analysis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Minarity {
    pub arity: BTreeMap<Name, usize>,
    pub properly_applied: bool,
    pub witness: Option<String>,
}

impl Minarity {
    pub fn of(&self, f: &Symbol) -> Option<usize> {
        self.arity.get(&f.name).copied()
    }
}

pub fn minarity(m: &Afsm) -> Minarity {
    let mut arity: BTreeMap<Name, usize> = BTreeMap::new();
    let mut first_rule: BTreeMap<Name, usize> = BTreeMap::new();
    let mut witness = None;
    for (i, r) in m.rules.iter().enumerate() {
        let f = r.root_symbol();
        let k = r.lhs.spine().1.len();
        match arity.get(&f.name) {
            None => {
                arity.insert(f.name.clone(), k);
                first_rule.insert(f.name.clone(), i);
            }
            Some(&k0) if k0 != k && witness.is_none() => {
                witness = Some(format!(
                    "rules {} and {} give {} different numbers of arguments ({} and {})",
                    first_rule[&f.name] + 1,
                    i + 1,
                    f.name,
                    k0,
                    k
                ));
            }
            Some(_) => {}
        }
    }
    if witness.is_none() {
        'rules: for (i, r) in m.rules.iter().enumerate() {
            for t in fully_applied_subterms(&r.rhs) {
                let (h, args) = t.spine();
                if let Term::Fun(f) = h {
                    if let Some(&k) = arity.get(&f.name) {
                        if !f.marked && args.len() < k {
                            witness = Some(format!(
                                "rule {}: {} occurs with {} argument(s) but needs at least {}",
                                i + 1,
                                f.name,
                                args.len(),
                                k
                            ));
                            break 'rules;
                        }
                    }
                }
            }
        }
    }
    Minarity {
        arity,
        properly_applied: witness.is_none(),
        witness,
    }
}

//! Static dependency pairs: marking, candidates and SDP generation.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::afsm::{minarity, Afsm, Minarity};
use crate::term::{MetaVar, Name, NameSupply, Substitution, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DpError {
    #[error("{0} is not a defined symbol applied to exactly its minimal arity")]
    NotMarkable(String),
    #[error("malformed dependency pair: {0}")]
    Malformed(String),
}

/// `Z : i`: the meta-variable must regard its `i`-th argument (1-based).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MetaVarCondition {
    pub meta: MetaVar,
    pub index: usize,
}

impl fmt::Display for MetaVarCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.meta.name, self.index)
    }
}

pub type Conditions = BTreeSet<MetaVarCondition>;

/// `ℓ ⇛ p (A)` between marked meta-terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DependencyPair {
    lhs: Term,
    rhs: Term,
    conditions: Conditions,
}

impl DependencyPair {
    pub fn new(lhs: Term, rhs: Term, conditions: Conditions) -> Result<DependencyPair, DpError> {
        let marked_head = |t: &Term| matches!(t.head(), Term::Fun(f) if f.marked);
        if !marked_head(&lhs) || !lhs.is_pattern() {
            return Err(DpError::Malformed(format!("{lhs} is not a marked pattern")));
        }
        if !marked_head(&rhs) {
            return Err(DpError::Malformed(format!(
                "{rhs} is not headed by a marked symbol"
            )));
        }
        if !lhs.free_vars().is_empty() || !rhs.free_vars().is_empty() {
            return Err(DpError::Malformed("both sides must be closed".into()));
        }
        lhs.type_of()
            .map_err(|e| DpError::Malformed(e.to_string()))?;
        rhs.type_of()
            .map_err(|e| DpError::Malformed(e.to_string()))?;
        Ok(DependencyPair {
            lhs,
            rhs,
            conditions,
        })
    }

    pub fn lhs(&self) -> &Term {
        &self.lhs
    }

    pub fn rhs(&self) -> &Term {
        &self.rhs
    }

    pub fn conditions(&self) -> &Conditions {
        &self.conditions
    }

    /// Every meta-variable on the right also occurs on the left.
    pub fn conservative(&self) -> bool {
        let left = self.lhs.metas();
        self.rhs.metas().iter().all(|z| left.contains(z))
    }

    /// The pair with meta-variables renamed by order of first occurrence;
    /// α-variants have the same key.
    fn canonical(&self) -> DependencyPair {
        let mut rename: HashMap<MetaVar, MetaVar> = HashMap::new();
        for z in self
            .lhs
            .metas_ordered()
            .into_iter()
            .chain(self.rhs.metas_ordered())
        {
            let n = rename.len();
            rename
                .entry(z.clone())
                .or_insert_with(|| z.with_name(&format!("_{n}")));
        }
        let f = |z: &MetaVar| rename[z].clone();
        DependencyPair {
            lhs: self.lhs.map_metas(&f),
            rhs: self.rhs.map_metas(&f),
            conditions: self
                .conditions
                .iter()
                .map(|c| MetaVarCondition {
                    meta: rename
                        .get(&c.meta)
                        .cloned()
                        .unwrap_or_else(|| c.meta.clone()),
                    index: c.index,
                })
                .collect(),
        }
    }
}

impl fmt::Display for DependencyPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} =>> {}", self.lhs, self.rhs)?;
        if !self.conditions.is_empty() {
            let cs: Vec<String> = self.conditions.iter().map(|c| c.to_string()).collect();
            write!(f, " {{{}}}", cs.join(", "))?;
        }
        Ok(())
    }
}

/// `s♯`: replaces the head of `f s1..sk` by its marked twin.
pub fn mark(s: &Term, arities: &Minarity) -> Result<Term, DpError> {
    let (head, args) = s.spine();
    match head {
        Term::Fun(f) if !f.marked && arities.of(f) == Some(args.len()) => Ok(Term::apps(
            Term::fun(&f.marked_twin()),
            args.into_iter().cloned(),
        )),
        _ => Err(DpError::NotMarkable(s.to_string())),
    }
}

/// Every `(t, A)` with `s ⊵_A t`; binders are opened to fresh variables.
pub fn brsmt(s: &Term) -> Vec<(Term, Conditions)> {
    let mut out = Vec::new();
    descend(s, &Conditions::new(), NameSupply::avoiding([s]), &mut out);
    out
}

fn descend(s: &Term, a: &Conditions, mut names: NameSupply, out: &mut Vec<(Term, Conditions)>) {
    let entry = (s.clone(), a.clone());
    if !out.contains(&entry) {
        out.push(entry);
    }
    if let Term::Abs(..) = s {
        let (_, body) = s.unbind(&mut names).expect("abstraction");
        descend(&body, a, names, out);
        return;
    }
    let (head, args) = s.spine();
    for arg in &args {
        descend(arg, a, names.clone(), out);
    }
    match head {
        Term::Abs(_, body) => {
            let reduct = Term::apps(body.open(args[0]), args[1..].iter().map(|t| (*t).clone()));
            descend(&reduct, a, names, out);
        }
        Term::Meta(m) => {
            for (i, t) in m.args().iter().enumerate() {
                let mut b = a.clone();
                b.insert(MetaVarCondition {
                    meta: m.var().clone(),
                    index: i + 1,
                });
                descend(t, &b, names.clone(), out);
            }
        }
        _ => {}
    }
}

/// `cand(s)`: defined-symbol calls reachable in `s` with minimal condition sets.
pub fn candidates(s: &Term, arities: &Minarity) -> Vec<(Term, Conditions)> {
    let mut all: Vec<(Term, Conditions)> = Vec::new();
    for (u, a) in brsmt(s) {
        let (head, args) = u.spine();
        let Term::Fun(f) = head else { continue };
        let Some(k) = arities.of(f) else { continue };
        if f.marked || args.len() < k {
            continue;
        }
        let t = Term::apps(head.clone(), args[..k].iter().map(|t| (*t).clone()));
        if !all.contains(&(t.clone(), a.clone())) {
            all.push((t, a));
        }
    }
    all.iter()
        .filter(|(t, a)| {
            !all.iter()
                .any(|(t2, b)| t2 == t && b.len() < a.len() && b.is_subset(a))
        })
        .cloned()
        .collect()
}

/// Replaces free variables by fresh arity-0 meta-variables `X1, X2, ...`,
/// numbered by first occurrence and avoiding the names in `taken`.
pub fn metafy(t: &Term, taken: &BTreeSet<Name>) -> Term {
    let mut gamma = Substitution::new();
    let mut n = 1;
    let mut used = taken.clone();
    for x in t.free_vars_ordered() {
        let name = loop {
            let candidate = Name::from(format!("X{n}").as_str());
            n += 1;
            if !used.contains(&candidate) {
                break candidate;
            }
        };
        used.insert(name.clone());
        let z = MetaVar::new(&name, x.ty.clone(), 0).expect("arity 0");
        gamma
            .insert_var(x, Term::meta(&z, vec![]).expect("arity 0"))
            .expect("same type");
    }
    gamma.apply(t)
}

/// `SDP(R)` in rule order, then candidate order; α-variants are merged.
pub fn generate_sdp(m: &Afsm) -> Vec<DependencyPair> {
    let arities = minarity(m);
    let mut out: Vec<DependencyPair> = Vec::new();
    let mut seen = BTreeSet::new();
    for rule in &m.rules {
        let lhs = mark(rule.lhs(), &arities).expect("lhs determines the minimal arity");
        let taken: BTreeSet<Name> = rule
            .lhs()
            .metas()
            .into_iter()
            .chain(rule.rhs().metas())
            .map(|z| z.name)
            .collect();
        for (t, a) in candidates(rule.rhs(), &arities) {
            let p = metafy(&mark(&t, &arities).expect("candidate shape"), &taken);
            let dp = DependencyPair::new(lhs.clone(), p, a).expect("well-formed by construction");
            let key = format!("{}", dp.canonical());
            if seen.insert(key) {
                out.push(dp);
            }
        }
    }
    out
}

/// Leading abstractions of `image` that a meta-application of arity `arity`
/// consumes, with the remaining body.
fn consumed_binders(image: &Term, arity: usize) -> (Vec<crate::term::Var>, Term) {
    let mut names = NameSupply::avoiding([image]);
    let mut xs = Vec::new();
    let mut body = image.clone();
    while xs.len() < arity {
        match body.unbind(&mut names) {
            Some((x, b)) => {
                xs.push(x);
                body = b;
            }
            None => break,
        }
    }
    (xs, body)
}

/// `γ` respects `A`: for `Z:i`, `γ(Z) = λx1..xj.t` with `i > j` or `xi ∈ FV(t)`.
pub fn respects(gamma: &Substitution, conditions: &Conditions) -> bool {
    conditions.iter().all(|c| match gamma.meta_image(&c.meta) {
        None => true,
        Some(image) => {
            let (xs, body) = consumed_binders(image, c.meta.arity());
            c.index > xs.len() || body.has_free_var(&xs[c.index - 1])
        }
    })
}

/// Groups pairs by the name of their left-hand head symbol.
pub fn heads(pairs: &[DependencyPair]) -> BTreeMap<Name, usize> {
    let mut out = BTreeMap::new();
    for p in pairs {
        for t in [p.lhs(), p.rhs()] {
            if let Term::Fun(f) = t.head() {
                out.entry(f.name.clone()).or_insert_with(|| f.ty.arity());
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_afsm;

    const ORDREC: &str = "sort nat
sort ord
fun zero : ord
fun s : ord -> ord
fun lim : (nat -> ord) -> ord
fun rec : ord -> nat -> (ord -> nat -> nat) -> ((nat -> ord) -> (nat -> nat) -> nat) -> nat
rule rec zero K F G => K
rule rec (s X) K F G => F X (rec X K F G)
rule rec (lim H) K F G => G H (/\\m. rec (H m) K F G)
";

    #[test]
    fn ordrec_pairs() {
        let m = parse_afsm(ORDREC).unwrap();
        let dps: Vec<String> = generate_sdp(&m).iter().map(|d| d.to_string()).collect();
        assert_eq!(
            dps,
            vec![
                "rec# (s X) K F G =>> rec# X K F G",
                "rec# (lim H) K F G =>> rec# (H X1) K F G",
            ]
        );
    }

    #[test]
    fn constructor_is_not_markable() {
        let m = parse_afsm(ORDREC).unwrap();
        let a = minarity(&m);
        let t = m.rules[1].lhs().spine().1[0].clone();
        assert!(mark(&t, &a).is_err());
        assert!(mark(m.rules[0].lhs(), &a).is_ok());
    }
}

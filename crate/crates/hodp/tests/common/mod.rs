//! Shared helpers for the integration tests: corpus access, random term
//! and system generators, and brute-force oracles.
#![allow(dead_code)]

pub mod props;

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use hodp::afsm::{match_pattern, minarity, rewrite_step, Afsm, Minarity, Rule};
use hodp::dp::{respects, Conditions, MetaVarCondition};
use hodp::framework::DpProblem;
use hodp::syntax::parse_afsm;
use hodp::term::{MetaVar, Name, NameSupply, Substitution, Symbol, Term, Type, Var};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn corpus_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("corpus")
        .join(format!("{name}.afsm"))
}

pub fn load(name: &str) -> Afsm {
    let text = std::fs::read_to_string(corpus_path(name)).expect("corpus file");
    parse_afsm(&text).expect("corpus file parses")
}

pub const CORPUS: &[&str] = &[
    "map",
    "ordrec",
    "deriv",
    "differenttypes",
    "graphconditions",
    "staticgraph",
    "staticbad",
    "lambdadynamic",
    "nonterm",
];

pub fn sort(name: &str) -> Type {
    Type::sort(name)
}

pub fn nat() -> Type {
    sort("nat")
}

pub fn nn() -> Type {
    Type::arrow(nat(), nat())
}

pub fn meta0(name: &str, ty: Type) -> Term {
    Term::meta(&MetaVar::new(name, ty, 0).unwrap(), vec![]).unwrap()
}

// ---------------------------------------------------------------------------
// random terms

/// Generates well-typed terms over a signature. Variables in scope come from
/// enclosing abstractions; `free` supplies free variables of any type on
/// demand; `metas` may be used as heads when generating meta-terms.
pub struct TermGen<'a> {
    pub symbols: &'a [Symbol],
    pub metas: &'a [MetaVar],
    pub free: Vec<Var>,
    pub lambda_weight: f64,
    /// Chance of a free variable even when other heads fit.
    pub free_weight: f64,
    /// Meta-variable heads count this many times in the head lottery.
    pub meta_weight: usize,
    /// Chance of a β-redex `(λx. u) v` where the term's type allows it.
    pub redex_weight: f64,
}

impl<'a> TermGen<'a> {
    pub fn new(symbols: &'a [Symbol]) -> Self {
        TermGen {
            symbols,
            metas: &[],
            free: Vec::new(),
            lambda_weight: 0.3,
            free_weight: 0.1,
            meta_weight: 1,
            redex_weight: 0.0,
        }
    }

    pub fn with_metas(mut self, metas: &'a [MetaVar]) -> Self {
        self.metas = metas;
        self
    }

    fn free_var(&mut self, ty: &Type, rng: &mut TestRng) -> Term {
        let same: Vec<&Var> = self.free.iter().filter(|v| &v.ty == ty).collect();
        if !same.is_empty() && rng.gen_bool(0.6) {
            return Term::var(same[rng.gen_range(0..same.len())]);
        }
        let v = Var::new(&format!("y{}", self.free.len()), ty.clone());
        self.free.push(v.clone());
        Term::var(&v)
    }

    pub fn term(
        &mut self,
        ty: &Type,
        depth: usize,
        scope: &mut Vec<Var>,
        rng: &mut TestRng,
    ) -> Term {
        if let Type::Arrow(a, b) = ty {
            if depth > 0 && rng.gen_bool(self.lambda_weight) {
                let x = Var::new(&format!("x{}", scope.len()), (**a).clone());
                scope.push(x.clone());
                let body = self.term(b, depth - 1, scope, rng);
                scope.pop();
                return Term::lam(&x, &body);
            }
        }
        if depth > 0 && self.redex_weight > 0.0 && rng.gen_bool(self.redex_weight) {
            let x = Var::new(&format!("x{}", scope.len()), ty.clone());
            let arg = self.term(ty, depth - 1, scope, rng);
            scope.push(x.clone());
            let body = self.term(ty, depth - 1, scope, rng);
            scope.pop();
            return Term::app(Term::lam(&x, &body), arg);
        }
        enum H {
            Sym(Symbol),
            Var(Var),
            Meta(MetaVar),
        }
        let mut heads: Vec<(H, usize)> = Vec::new();
        let mut consider = |h: H, full: &Type, skip: usize| {
            let (dom, _) = full.flatten();
            for k in skip..=dom.len() {
                if depth == 0 && k > skip {
                    break;
                }
                if full.after_args(k) == Some(ty) {
                    heads.push((h, k));
                    return;
                }
            }
        };
        for f in self.symbols {
            consider(H::Sym(f.clone()), &f.ty, 0);
        }
        for x in scope.iter() {
            consider(H::Var(x.clone()), &x.ty, 0);
        }
        if depth > 0 {
            for z in self.metas {
                for _ in 0..self.meta_weight {
                    consider(H::Meta(z.clone()), &z.ty, z.arity());
                }
            }
        }
        if heads.is_empty() || rng.gen_bool(self.free_weight) {
            return self.free_var(ty, rng);
        }
        let (h, k) = heads.swap_remove(rng.gen_range(0..heads.len()));
        let d = depth.saturating_sub(1);
        match h {
            H::Sym(f) => {
                let (dom, _) = f.ty.flatten();
                let dom: Vec<Type> = dom.into_iter().cloned().collect();
                let args: Vec<Term> = dom[..k]
                    .iter()
                    .map(|t| self.term(t, d, scope, rng))
                    .collect();
                Term::apps(Term::fun(&f), args)
            }
            H::Var(x) => {
                let (dom, _) = x.ty.flatten();
                let dom: Vec<Type> = dom.into_iter().cloned().collect();
                let args: Vec<Term> = dom[..k]
                    .iter()
                    .map(|t| self.term(t, d, scope, rng))
                    .collect();
                Term::apps(Term::var(&x), args)
            }
            H::Meta(z) => {
                let (dom, _) = z.ty.flatten();
                let dom: Vec<Type> = dom.into_iter().cloned().collect();
                let margs: Vec<Term> = dom[..z.arity()]
                    .iter()
                    .map(|t| self.term(t, d, scope, rng))
                    .collect();
                let extra: Vec<Term> = dom[z.arity()..k]
                    .iter()
                    .map(|t| self.term(t, d, scope, rng))
                    .collect();
                Term::apps(Term::meta(&z, margs).unwrap(), extra)
            }
        }
    }

    pub fn closed(&mut self, ty: &Type, depth: usize, rng: &mut TestRng) -> Term {
        self.term(ty, depth, &mut Vec::new(), rng)
    }
}

// ---------------------------------------------------------------------------
// candidates oracle

/// Renames variables not free in `s` to `_0, _1, ...` by first occurrence,
/// so that terms reached through different fresh names compare equal.
pub fn canonical_fresh(s: &Term, t: &Term) -> Term {
    let keep = s.free_vars();
    let mut sub = Substitution::new();
    let mut n = 0;
    for v in t.free_vars_ordered() {
        if keep.contains(&v) {
            continue;
        }
        let w = Var::new(&format!("_{n}"), v.ty.clone());
        n += 1;
        sub.insert_var(v, Term::var(&w)).unwrap();
    }
    sub.apply(t)
}

/// Closure of `s ⊵_A t` by a worklist, following each clause
/// of the definition literally; at most `beta_budget` root β-steps per path.
pub fn brsmt_oracle(s: &Term, beta_budget: usize) -> BTreeSet<(Term, Conditions)> {
    let mut names = NameSupply::avoiding([s]);
    // reached term -> fewest β-steps used to reach it
    let mut seen: BTreeMap<(Term, Conditions), usize> = BTreeMap::new();
    let mut work = vec![(s.clone(), Conditions::new(), 0usize)];
    while let Some((u, a, betas)) = work.pop() {
        let key = (canonical_fresh(s, &u), a.clone());
        if seen.get(&key).is_some_and(|&b| b <= betas) {
            continue;
        }
        seen.insert(key, betas);
        let mut push = |t: Term, b: Conditions, k: usize| work.push((t, b, k));
        match &u {
            Term::Abs(..) => {
                let (_, body) = u.unbind(&mut names).unwrap();
                push(body, a.clone(), betas);
            }
            _ => {
                let (head, args) = u.spine();
                match head {
                    Term::Abs(_, body) => {
                        for arg in &args {
                            push((*arg).clone(), a.clone(), betas);
                        }
                        if betas < beta_budget {
                            let reduct = Term::apps(
                                body.open(args[0]),
                                args[1..].iter().map(|t| (*t).clone()),
                            );
                            push(reduct, a.clone(), betas + 1);
                        }
                    }
                    Term::Fun(_) | Term::Var(_) => {
                        for arg in &args {
                            push((*arg).clone(), a.clone(), betas);
                        }
                    }
                    Term::Meta(m) => {
                        for arg in &args {
                            push((*arg).clone(), a.clone(), betas);
                        }
                        for (i, ti) in m.args().iter().enumerate() {
                            let mut b = a.clone();
                            b.insert(MetaVarCondition {
                                meta: m.var().clone(),
                                index: i + 1,
                            });
                            push(ti.clone(), b, betas);
                        }
                    }
                    Term::Bound(_) | Term::App(..) => {}
                }
            }
        }
    }
    seen.into_keys().collect()
}

/// `cand(s)` computed from the oracle closure: every defined call `f s1..sk`
/// at the head of a reached term, with the minimal condition sets among all
/// ways of reaching it.
pub fn candidates_oracle(
    s: &Term,
    arities: &Minarity,
    defined: &BTreeSet<Name>,
) -> BTreeSet<(Term, Conditions)> {
    let mut reach: BTreeMap<Term, Vec<Conditions>> = BTreeMap::new();
    for (u, a) in brsmt_oracle(s, 16) {
        let (head, args) = u.spine();
        let Term::Fun(f) = head else { continue };
        if f.marked || !defined.contains(&f.name) {
            continue;
        }
        let Some(k) = arities.of(f) else { continue };
        if args.len() < k {
            continue;
        }
        let t = Term::apps(head.clone(), args[..k].iter().map(|t| (*t).clone()));
        reach.entry(t).or_default().push(a);
    }
    let mut out = BTreeSet::new();
    for (t, sets) in reach {
        for a in &sets {
            if !sets.iter().any(|b| b.len() < a.len() && b.is_subset(a)) {
                out.insert((t.clone(), a.clone()));
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// random systems for the graph oracle

/// Signature: z, s (constructors); f : nat -> nat -> nat, g : nat -> nat,
/// h : (nat -> nat) -> nat -> nat (defined).
pub fn graph_signature() -> Vec<Symbol> {
    vec![
        Symbol::new("z", nat()),
        Symbol::new("s", nn()),
        Symbol::new("f", Type::arrows([nat(), nat()], nat())),
        Symbol::new("g", nn()),
        Symbol::new("h", Type::arrows([nn(), nat()], nat())),
    ]
}

fn pattern_arg(ty: &Type, metas: &mut Vec<MetaVar>, depth: usize, rng: &mut TestRng) -> Term {
    if ty == &nn() {
        let z = MetaVar::new(&format!("F{}", metas.len()), nn(), 1).unwrap();
        metas.push(z.clone());
        let x = Var::new("x", nat());
        return Term::lam(&x, &Term::meta(&z, vec![Term::var(&x)]).unwrap());
    }
    match rng.gen_range(0..4) {
        0 => Term::fun(&Symbol::new("z", nat())),
        1 if depth > 0 => Term::app(
            Term::fun(&Symbol::new("s", nn())),
            pattern_arg(ty, metas, depth - 1, rng),
        ),
        _ => {
            let z = MetaVar::new(&format!("X{}", metas.len()), nat(), 0).unwrap();
            metas.push(z.clone());
            Term::meta(&z, vec![]).unwrap()
        }
    }
}

/// A random properly applied system with at most `max_rules` rules over
/// [`graph_signature`]; meta-variables of the right-hand sides come from
/// the left.
pub fn random_system(max_rules: usize, rng: &mut TestRng) -> Afsm {
    let sig = graph_signature();
    let defined = [&sig[2], &sig[3], &sig[4]];
    let n = rng.gen_range(1..=max_rules);
    let mut rules = Vec::new();
    for _ in 0..n {
        let f = *defined.choose(rng).unwrap();
        let (dom, _) = f.ty.flatten();
        let dom: Vec<Type> = dom.into_iter().cloned().collect();
        let mut metas = Vec::new();
        let args: Vec<Term> = dom
            .iter()
            .map(|t| pattern_arg(t, &mut metas, 1, rng))
            .collect();
        let lhs = Term::apps(Term::fun(f), args);
        let mut gen = TermGen::new(&sig).with_metas(&metas);
        gen.lambda_weight = 0.5;
        let mut rhs = gen.closed(&nat(), 3, rng);
        for _ in 0..10 {
            if rhs.free_vars().is_empty() {
                break;
            }
            gen.free.clear();
            rhs = gen.closed(&nat(), 3, rng);
        }
        if !rhs.free_vars().is_empty() {
            continue;
        }
        if let Ok(rule) = Rule::new(lhs, rhs) {
            rules.push(rule);
        }
    }
    Afsm {
        sorts: vec![Name::from("nat")],
        signature: sig,
        rules,
    }
}

/// Small ground instances for a meta-variable of the graph signature.
fn ground_instances(z: &MetaVar) -> Vec<Term> {
    let zero = Term::fun(&Symbol::new("z", nat()));
    let s = Term::fun(&Symbol::new("s", nn()));
    let g = Term::fun(&Symbol::new("g", nn()));
    let f = Term::fun(&Symbol::new("f", Type::arrows([nat(), nat()], nat())));
    let x = Var::new("x", nat());
    if z.ty == nn() {
        let body = [
            Term::var(&x),
            zero.clone(),
            Term::app(s.clone(), Term::var(&x)),
            Term::app(g.clone(), Term::var(&x)),
        ];
        return body.iter().map(|b| Term::lam(&x, b)).collect();
    }
    vec![
        zero.clone(),
        Term::app(s.clone(), zero.clone()),
        Term::app(g.clone(), zero.clone()),
        Term::apps(f, [zero.clone(), Term::app(s, zero)]),
    ]
}

fn all_instantiations(metas: &[MetaVar]) -> Vec<Substitution> {
    let mut out = vec![Substitution::new()];
    for z in metas {
        let mut next = Vec::new();
        for gamma in &out {
            for t in ground_instances(z) {
                let mut g = gamma.clone();
                g.insert_meta(z.clone(), t).unwrap();
                next.push(g);
            }
        }
        out = next;
    }
    out
}

/// Terms reachable from `t` in at most `steps` rewrite or β steps.
pub fn reachable(m: &Afsm, t: &Term, steps: usize) -> BTreeSet<Term> {
    let mut seen = BTreeSet::from([t.clone()]);
    let mut frontier = vec![t.clone()];
    for _ in 0..steps {
        let mut next = Vec::new();
        for u in &frontier {
            for r in rewrite_step(m, u) {
                if seen.insert(r.clone()) {
                    next.push(r);
                }
            }
        }
        frontier = next;
    }
    seen
}

/// Edges `(i, j)` (0-based) witnessed by a concrete two-element chain with
/// small ground instances and at most `steps` reduction steps in between.
pub fn two_step_chains(p: &DpProblem, steps: usize) -> BTreeSet<(usize, usize)> {
    let m = Afsm {
        sorts: vec![],
        signature: vec![],
        rules: p.rules.clone(),
    };
    let mut edges = BTreeSet::new();
    for (i, di) in p.pairs.iter().enumerate() {
        let mut metas: Vec<MetaVar> = di.lhs().metas_ordered();
        for z in di.rhs().metas_ordered() {
            if !metas.contains(&z) {
                metas.push(z);
            }
        }
        for gamma in all_instantiations(&metas) {
            if !respects(&gamma, di.conditions()) {
                continue;
            }
            let t = gamma.apply(di.rhs());
            for u in reachable(&m, &t, steps) {
                for (j, dj) in p.pairs.iter().enumerate() {
                    if edges.contains(&(i, j)) {
                        continue;
                    }
                    if let Some(delta) = match_pattern(dj.lhs(), &u) {
                        if respects(&delta, dj.conditions()) {
                            edges.insert((i, j));
                        }
                    }
                }
            }
        }
    }
    edges
}

pub fn arities(m: &Afsm) -> Minarity {
    minarity(m)
}

/// Checks every instantiated constraint of `proof` at `points` random
/// valuations. Atoms get random weakly monotone linear values; a functional
/// argument is valued by its body at random parameter values.
pub fn spot_check(
    proof: &hodp::ordering::OrderingProof,
    points: usize,
    rng: &mut TestRng,
) -> Result<(), String> {
    use hodp::ordering::{Arg, Atom, Head};
    fn value(
        a: &Atom,
        weights: &mut BTreeMap<Head, (u64, u64)>,
        params: &mut BTreeMap<Head, u64>,
        rng: &mut TestRng,
    ) -> u64 {
        let (base, slope) = *weights
            .entry(a.head.clone())
            .or_insert_with(|| (rng.gen_range(0..50), rng.gen_range(0..4)));
        let mut total = base;
        for arg in &a.args {
            let v = match arg {
                Arg::Base(p) => p.evaluate(&mut |b| value(b, weights, params, rng)),
                Arg::Fun { body, .. } => body.evaluate(&mut |b| value(b, weights, params, rng)),
            };
            total = total.saturating_add(slope.saturating_mul(v.unwrap_or(0)));
        }
        if let Head::Param(..) = a.head {
            return *params
                .entry(a.head.clone())
                .or_insert_with(|| rng.gen_range(0..50));
        }
        total
    }
    for _ in 0..points {
        let mut weights = BTreeMap::new();
        let mut params = BTreeMap::new();
        for c in &proof.constraints {
            let c = c.instantiate(&proof.interpretation);
            let l = c
                .lhs
                .evaluate(&mut |a| value(a, &mut weights, &mut params, rng))
                .ok_or("uninstantiated")?;
            let r = c
                .rhs
                .evaluate(&mut |a| value(a, &mut weights, &mut params, rng))
                .ok_or("uninstantiated")?;
            let ok = if c.strict { l > r } else { l >= r };
            if !ok {
                return Err(format!("{}: {l} vs {r}", c.label));
            }
        }
    }
    Ok(())
}

pub fn o() -> Type {
    Type::sort("o")
}

/// A pair parsed over `sig` with the given meta-variables in scope.
pub fn pair(sig: &[Symbol], metas: &[MetaVar], l: &str, r: &str) -> hodp::dp::DependencyPair {
    let scope = hodp::syntax::TermScope {
        vars: vec![],
        metas: metas.to_vec(),
    };
    hodp::dp::DependencyPair::new(
        hodp::syntax::parse_term(l, sig, &scope).unwrap(),
        hodp::syntax::parse_term(r, sig, &scope).unwrap(),
        Conditions::new(),
    )
    .unwrap()
}

/// `{f# F X =>> g# (F X), g# X =>> f# h X}` with the rules of the `nonterm`
/// corpus file, flags (minimal, all).
pub fn looping_problem() -> DpProblem {
    use hodp::framework::{FFlag, MFlag};
    let m = load("nonterm");
    let f = MetaVar::new("F", Type::arrow(o(), o()), 0).unwrap();
    let x = MetaVar::new("X", o(), 0).unwrap();
    let pairs = vec![
        pair(&m.signature, &[f.clone(), x.clone()], "f# F X", "g# (F X)"),
        pair(&m.signature, &[x], "g# X", "f# h X"),
    ];
    DpProblem {
        pairs,
        rules: m.rules.clone(),
        m_flag: MFlag::Minimal,
        f_flag: FFlag::All,
    }
}

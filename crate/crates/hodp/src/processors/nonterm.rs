use std::time::Instant;

use super::unify::{unify, var_instance, Unifier};
use crate::afsm::match_pattern;
use crate::dp::{respects, DependencyPair};
use crate::framework::{Context, DpProblem, Outcome, Processor, ProcessorResult};
use crate::term::{MetaVar, Name, NameSupply, Substitution, Term, Var};

/// One element `(ρ, s, t)` of a dependency chain with `s = ℓγ`, `t = pγ`.
#[derive(Clone, Debug)]
pub struct ChainStep {
    /// Index of the pair in the problem.
    pub pair: usize,
    pub dp: DependencyPair,
    pub gamma: Substitution,
    pub s: Term,
    pub t: Term,
}

/// A finite chain without rewrite steps between elements whose last `t`
/// is an instance of the first `s`.
#[derive(Clone, Debug)]
pub struct FiniteChain {
    pub steps: Vec<ChainStep>,
    /// Variable substitution with `t_n = s_0 · instance`.
    pub instance: Substitution,
}

impl FiniteChain {
    /// Re-checks every chain condition on the concrete terms.
    pub fn verify(&self) -> Result<(), String> {
        if self.steps.is_empty() {
            return Err("empty chain".into());
        }
        for (i, st) in self.steps.iter().enumerate() {
            let n = i + 1;
            if !st.dp.conservative() {
                return Err(format!("step {n}: pair is not conservative"));
            }
            if !st.s.metas().is_empty() || !st.t.metas().is_empty() {
                return Err(format!("step {n}: not a term"));
            }
            if match_pattern(st.dp.lhs(), &st.s).is_none() {
                return Err(format!("step {n}: left-hand side does not match"));
            }
            if st.gamma.apply(st.dp.lhs()) != st.s || st.gamma.apply(st.dp.rhs()) != st.t {
                return Err(format!("step {n}: substitution does not produce the step"));
            }
            if !respects(&st.gamma, st.dp.conditions()) {
                return Err(format!("step {n}: meta-variable conditions violated"));
            }
            if let Some(next) = self.steps.get(i + 1) {
                if st.t != next.s {
                    return Err(format!("step {n}: does not connect to step {}", n + 1));
                }
            }
        }
        let first = &self.steps[0].s;
        let last = &self.steps[self.steps.len() - 1].t;
        if &self.instance.apply(first) != last {
            return Err("the last term is not an instance of the first".into());
        }
        Ok(())
    }

    pub fn describe(&self) -> Vec<String> {
        let mut out = vec![format!("chain of length {}", self.steps.len())];
        for (i, st) in self.steps.iter().enumerate() {
            out.push(format!("step {}: pair ({}) {}", i + 1, st.pair + 1, st.dp));
            out.push(format!("  s{i} = {}", st.s));
            out.push(format!("  t{i} = {}", st.t));
        }
        let sub: Vec<String> = self
            .instance
            .var_entries()
            .map(|(x, t)| format!("{} := {}", x.name, t))
            .collect();
        out.push(format!(
            "t{} = s0 [{}]",
            self.steps.len() - 1,
            sub.join(", ")
        ));
        out
    }
}

struct Renamed {
    pair: usize,
    lhs: Term,
    rhs: Term,
    /// Original meta-variable and its renamed copy.
    metas: Vec<(MetaVar, MetaVar)>,
}

fn rename(pair: usize, d: &DependencyPair, pos: usize) -> Renamed {
    let f = |z: &MetaVar| z.with_name(&format!("{}_{pos}", z.name));
    let metas = d
        .lhs()
        .metas_ordered()
        .into_iter()
        .map(|z| (z.clone(), f(&z)))
        .collect();
    Renamed {
        pair,
        lhs: d.lhs().map_metas(&f),
        rhs: d.rhs().map_metas(&f),
        metas,
    }
}

const NODE_LIMIT: usize = 20_000;
const REFINE_ROUNDS: usize = 4;

struct Search<'a> {
    pairs: &'a [DependencyPair],
    usable: Vec<usize>,
    depth: usize,
    deadline: Option<Instant>,
    nodes: usize,
}

/// Depth-first search over chains of conservative pairs of length at most
/// `depth`, connected by unification.
pub fn loop_search(p: &DpProblem, depth: usize, deadline: Option<Instant>) -> Option<FiniteChain> {
    let usable: Vec<usize> = (0..p.pairs.len())
        .filter(|&i| p.pairs[i].conservative())
        .collect();
    let mut s = Search {
        pairs: &p.pairs,
        usable,
        depth,
        deadline,
        nodes: 0,
    };
    for &i in &s.usable.clone() {
        let mut seq = vec![rename(i, &p.pairs[i], 0)];
        if let Some(c) = s.dfs(&mut seq, &Unifier::new()) {
            return Some(c);
        }
    }
    None
}

impl Search<'_> {
    fn exhausted(&mut self) -> bool {
        self.nodes += 1;
        self.nodes > NODE_LIMIT || self.deadline.is_some_and(|d| Instant::now() >= d)
    }

    fn dfs(&mut self, seq: &mut Vec<Renamed>, u: &Unifier) -> Option<FiniteChain> {
        if self.exhausted() {
            return None;
        }
        if let Some(c) = close(self.pairs, seq, u) {
            return Some(c);
        }
        if seq.len() >= self.depth {
            return None;
        }
        let last = u.apply(&seq[seq.len() - 1].rhs);
        for j in self.usable.clone() {
            let next = rename(j, &self.pairs[j], seq.len());
            let mut u2 = u.clone();
            if !unify(&last, &next.lhs, &mut u2) {
                continue;
            }
            seq.push(next);
            let found = self.dfs(seq, &u2);
            seq.pop();
            if found.is_some() {
                return found;
            }
        }
        None
    }
}

/// Tries to instantiate the chain so that its end is an instance of its start.
fn close(pairs: &[DependencyPair], seq: &[Renamed], u: &Unifier) -> Option<FiniteChain> {
    let mut u = u.clone();
    let start = &seq[0].lhs;
    let end = &seq[seq.len() - 1].rhs;
    for _ in 0..REFINE_ROUNDS {
        let l0 = u.apply(start);
        let tn = u.apply(end);
        if !l0.is_pattern() {
            break;
        }
        let Some(mu) = match_pattern(&l0, &tn) else {
            break;
        };
        let ground: Vec<(MetaVar, Term)> = mu
            .meta_entries()
            .filter(|(_, t)| t.metas().is_empty())
            .map(|(z, t)| (z.clone(), t.clone()))
            .collect();
        if ground.is_empty() {
            break;
        }
        for (z, t) in ground {
            u.bind(z, t);
        }
    }
    let phi = grounding(seq, &u);
    let mut names = NameSupply::new();
    for (_, t) in phi.meta_entries() {
        names.avoid_term(t);
    }
    let mut steps = Vec::new();
    for r in seq {
        let mut gamma = Substitution::new();
        for (orig, renamed) in &r.metas {
            let (dom, _) = orig.ty.flatten();
            let xs: Vec<Var> = dom[..orig.arity()]
                .iter()
                .map(|t| names.fresh_var("x", (*t).clone()))
                .collect();
            let body = Term::meta(renamed, xs.iter().map(Term::var).collect()).ok()?;
            let image = phi.apply(&u.apply(&Term::lams(&xs, &body)));
            gamma.insert_meta(orig.clone(), image).ok()?;
        }
        steps.push(ChainStep {
            pair: r.pair,
            dp: pairs[r.pair].clone(),
            s: phi.apply(&u.apply(&r.lhs)),
            t: phi.apply(&u.apply(&r.rhs)),
            gamma,
        });
    }
    let instance = var_instance(&steps[0].s, &steps[steps.len() - 1].t)?;
    let chain = FiniteChain { steps, instance };
    chain.verify().ok()?;
    Some(chain)
}

/// Replaces every remaining meta-variable `Z` of arity `k` by
/// `λx1..xk. y x1..xk` for a fresh variable `y`.
fn grounding(seq: &[Renamed], u: &Unifier) -> Substitution {
    let mut metas = Vec::new();
    let mut names = NameSupply::new();
    for r in seq {
        for t in [u.apply(&r.lhs), u.apply(&r.rhs)] {
            names.avoid_term(&t);
            for z in t.metas_ordered() {
                if !metas.contains(&z) {
                    metas.push(z);
                }
            }
        }
    }
    let mut phi = Substitution::new();
    for z in metas {
        let hint: Name = Name::from(
            z.name
                .split('_')
                .next()
                .unwrap_or("y")
                .to_lowercase()
                .as_str(),
        );
        let y = names.fresh_var(&hint, z.ty.clone());
        let (dom, _) = z.ty.flatten();
        let xs: Vec<Var> = dom[..z.arity()]
            .iter()
            .map(|t| names.fresh_var("x", (*t).clone()))
            .collect();
        let image = Term::lams(&xs, &Term::apps(Term::var(&y), xs.iter().map(Term::var)));
        phi.insert_meta(z, image).expect("well-typed grounding");
    }
    phi
}

/// Answers NO when a looping chain of conservative pairs is found.
pub struct NonterminationProcessor;

impl Processor for NonterminationProcessor {
    fn name(&self) -> &'static str {
        "nontermination"
    }

    fn theorem(&self) -> &'static str {
        "non-termination processor: a finite chain of conservative pairs whose end is an instance of its start repeats forever (sound and complete)"
    }

    fn is_complete(&self) -> bool {
        true
    }

    fn apply(&self, problem: &DpProblem, ctx: &Context) -> Outcome {
        let depth = ctx.loop_depth.unwrap_or(2 * problem.pairs.len());
        match loop_search(problem, depth, ctx.deadline) {
            Some(chain) => Outcome {
                result: ProcessorResult::No(chain.describe().join("\n")),
                witness: chain.describe(),
            },
            None => Outcome::not_applicable(),
        }
    }
}

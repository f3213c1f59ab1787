use std::collections::BTreeMap;

use crate::afsm::{acc_reachable, SortOrdering};
use crate::dp::DependencyPair;
use crate::framework::{Context, DpProblem, MFlag, Outcome, Processor};
use crate::term::{strict_subterms, Name, Term};

/// `ν`: one argument position (1-based) per head symbol.
pub type Projection = BTreeMap<Name, usize>;

fn head_name(t: &Term) -> Option<&Name> {
    match t.head() {
        Term::Fun(f) => Some(&f.name),
        _ => None,
    }
}

/// For every head of `P`, the largest admissible projection index.
fn index_bounds(pairs: &[DependencyPair]) -> Option<BTreeMap<Name, usize>> {
    let mut bound: BTreeMap<Name, usize> = BTreeMap::new();
    for d in pairs {
        for t in [d.lhs(), d.rhs()] {
            let name = head_name(t)?;
            let n = t.spine().1.len();
            let e = bound.entry(name.clone()).or_insert(n);
            *e = (*e).min(n);
        }
    }
    Some(bound)
}

fn project<'a>(t: &'a Term, nu: &Projection) -> Option<&'a Term> {
    let i = *nu.get(head_name(t)?)?;
    t.spine().1.get(i - 1).copied()
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Cmp {
    Strict,
    Equal,
    Unrelated,
}

/// Exhaustive search in lexicographic order of index tuples; returns the
/// first projection that orients every pair and some pair strictly.
fn search(
    pairs: &[DependencyPair],
    strict: &dyn Fn(&Term, &Term) -> bool,
) -> Option<(Projection, Vec<bool>)> {
    let bounds = index_bounds(pairs)?;
    let heads: Vec<(Name, usize)> = bounds.into_iter().collect();
    if heads.iter().any(|(_, n)| *n == 0) {
        return None;
    }
    let mut nu = Projection::new();
    let mut memo: BTreeMap<(usize, Vec<usize>), Cmp> = BTreeMap::new();
    let mut cmp = |k: usize, nu: &Projection| -> Option<Cmp> {
        let d = &pairs[k];
        let (l, r) = (project(d.lhs(), nu)?, project(d.rhs(), nu)?);
        let key = (k, vec![nu[head_name(d.lhs())?], nu[head_name(d.rhs())?]]);
        Some(*memo.entry(key).or_insert_with(|| {
            if l == r {
                Cmp::Equal
            } else if strict(l, r) {
                Cmp::Strict
            } else {
                Cmp::Unrelated
            }
        }))
    };
    fn dfs(
        depth: usize,
        heads: &[(Name, usize)],
        nu: &mut Projection,
        n_pairs: usize,
        cmp: &mut dyn FnMut(usize, &Projection) -> Option<Cmp>,
    ) -> Option<Vec<bool>> {
        // prune on every pair whose heads are already assigned
        let mut result = Vec::with_capacity(n_pairs);
        for k in 0..n_pairs {
            match cmp(k, nu) {
                Some(Cmp::Unrelated) => return None,
                Some(c) => result.push(c == Cmp::Strict),
                None => result.push(false),
            }
        }
        if depth == heads.len() {
            return result.iter().any(|s| *s).then_some(result);
        }
        let (name, bound) = &heads[depth];
        for i in 1..=*bound {
            nu.insert(name.clone(), i);
            if let Some(r) = dfs(depth + 1, heads, nu, n_pairs, cmp) {
                return Some(r);
            }
        }
        nu.remove(name);
        None
    }
    let strict_flags = dfs(0, &heads, &mut nu, pairs.len(), &mut cmp)?;
    Some((nu, strict_flags))
}

/// Projection for the plain subterm criterion (`▷` / `=`).
pub fn find_subterm_projection(pairs: &[DependencyPair]) -> Option<(Projection, Vec<bool>)> {
    search(pairs, &|l, r| strict_subterms(l).contains(r))
}

/// `s ⊐ t` of the computable subterm criterion.
pub fn comp_greater(s: &Term, t: &Term, ord: &SortOrdering) -> bool {
    let base = |u: &Term| u.type_of().map(|ty| ty.is_base()).unwrap_or(false);
    if s == t || !base(s) || !base(t) {
        return false;
    }
    let reach = acc_reachable(s, ord, &[t]);
    if reach.contains(t) {
        return true;
    }
    let Term::Meta(target) = t.head() else {
        return false;
    };
    reach.iter().any(|u| match u {
        Term::Meta(m) => {
            m.var() == target.var() && m.args().iter().all(|a| matches!(a, Term::Var(_)))
        }
        _ => false,
    })
}

pub fn find_computable_projection(
    pairs: &[DependencyPair],
    ord: &SortOrdering,
) -> Option<(Projection, Vec<bool>)> {
    search(pairs, &|l, r| comp_greater(l, r, ord))
}

fn outcome(problem: &DpProblem, found: Option<(Projection, Vec<bool>)>) -> Outcome {
    let Some((nu, strict)) = found else {
        return Outcome::not_applicable();
    };
    let remaining = problem
        .pairs
        .iter()
        .zip(&strict)
        .filter(|(_, s)| !**s)
        .map(|(d, _)| d.clone())
        .collect();
    let mut witness: Vec<String> = nu.iter().map(|(f, i)| format!("nu({f}#) = {i}")).collect();
    let removed: Vec<String> = strict
        .iter()
        .enumerate()
        .filter(|(_, s)| **s)
        .map(|(i, _)| (i + 1).to_string())
        .collect();
    witness.push(format!("removed pairs: {}", removed.join(", ")));
    Outcome::children(vec![problem.with_pairs(remaining)], witness)
}

pub struct SubtermCriterion;

impl Processor for SubtermCriterion {
    fn name(&self) -> &'static str {
        "subterm-criterion"
    }

    fn theorem(&self) -> &'static str {
        "subterm criterion processor: a projection that never grows and sometimes shrinks removes the shrinking pairs (sound and complete)"
    }

    fn is_complete(&self) -> bool {
        true
    }

    fn apply(&self, problem: &DpProblem, _: &Context) -> Outcome {
        if !problem.m_flag.at_least_minimal() {
            return Outcome::not_applicable();
        }
        outcome(problem, find_subterm_projection(&problem.pairs))
    }
}

pub struct ComputableSubtermCriterion;

impl Processor for ComputableSubtermCriterion {
    fn name(&self) -> &'static str {
        "computable-subterm-criterion"
    }

    fn theorem(&self) -> &'static str {
        "computable subterm criterion processor: projections compared by accessible descent (sound and complete)"
    }

    fn is_complete(&self) -> bool {
        true
    }

    fn apply(&self, problem: &DpProblem, ctx: &Context) -> Outcome {
        if !matches!(problem.m_flag, MFlag::Computable(_)) {
            return Outcome::not_applicable();
        }
        outcome(
            problem,
            find_computable_projection(&problem.pairs, &ctx.ordering),
        )
    }
}

use std::collections::{BTreeMap, BTreeSet};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use super::Afsm;
use crate::term::{MetaVar, Name, NameSupply, Term, Type};

/// A quasi-ordering on sorts given by natural-number levels.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SortOrdering {
    pub level: BTreeMap<Name, usize>,
}

impl SortOrdering {
    /// Every sort equivalent to every other.
    pub fn flat() -> SortOrdering {
        SortOrdering {
            level: BTreeMap::new(),
        }
    }

    pub fn from_levels<I: IntoIterator<Item = (Name, usize)>>(levels: I) -> SortOrdering {
        SortOrdering {
            level: levels.into_iter().collect(),
        }
    }

    fn lvl(&self, s: &Name) -> usize {
        self.level.get(s).copied().unwrap_or(0)
    }

    pub fn geq(&self, a: &Name, b: &Name) -> bool {
        self.lvl(a) >= self.lvl(b)
    }

    pub fn gt(&self, a: &Name, b: &Name) -> bool {
        self.lvl(a) > self.lvl(b)
    }

    /// `ι ⪰₊ σ`
    pub fn positive(&self, iota: &Name, sigma: &Type) -> bool {
        let (args, kappa) = sigma.flatten();
        self.geq(iota, kappa) && args.iter().all(|s| self.negative(iota, s))
    }

    /// `ι ≻₋ σ`
    pub fn negative(&self, iota: &Name, sigma: &Type) -> bool {
        let (args, kappa) = sigma.flatten();
        self.gt(iota, kappa) && args.iter().all(|s| self.positive(iota, s))
    }

    /// Human-readable `ord > nat` style summary.
    pub fn describe(&self, sorts: &[Name]) -> String {
        if sorts.is_empty() {
            return "(no sorts)".to_string();
        }
        let mut sorted: Vec<&Name> = sorts.iter().collect();
        sorted.sort_by(|a, b| self.lvl(b).cmp(&self.lvl(a)).then(a.cmp(b)));
        let mut out = String::new();
        for (i, s) in sorted.iter().enumerate() {
            if i > 0 {
                let prev = sorted[i - 1];
                out.push_str(if self.lvl(prev) > self.lvl(s) {
                    " > "
                } else {
                    " = "
                });
            }
            out.push_str(s);
        }
        out
    }
}

/// Accessible argument positions (1-based) of a function symbol type.
pub fn acc_positions(ty: &Type, ord: &SortOrdering) -> BTreeSet<usize> {
    let (args, iota) = ty.flatten();
    args.iter()
        .enumerate()
        .filter(|(_, s)| ord.positive(iota, s))
        .map(|(i, _)| i + 1)
        .collect()
}

/// Accessible argument positions (1-based) of a variable's type.
pub fn acc_positions_of_variable(ty: &Type, ord: &SortOrdering) -> BTreeSet<usize> {
    let (args, iota) = ty.flatten();
    args.iter()
        .enumerate()
        .filter(|(_, s)| ord.geq(iota, s.output_sort()))
        .map(|(i, _)| i + 1)
        .collect()
}

/// Every `t` with `s ⊵acc t`; binders passed on the way are opened to
/// fresh variables that avoid the free variables of `avoid`.
pub fn acc_reachable(s: &Term, ord: &SortOrdering, avoid: &[&Term]) -> Vec<Term> {
    let mut names = NameSupply::avoiding(avoid.iter().copied().chain([s]));
    let mut out = Vec::new();
    reach(s, ord, &mut names, &mut out);
    out
}

fn reach(s: &Term, ord: &SortOrdering, names: &mut NameSupply, out: &mut Vec<Term>) {
    if !out.contains(s) {
        out.push(s.clone());
    }
    if let Term::Abs(..) = s {
        let (_, body) = s.unbind(names).expect("abstraction");
        reach(&body, ord, names, out);
        return;
    }
    let (head, args) = s.spine();
    let positions = match head {
        Term::Fun(f) => acc_positions(&f.ty, ord),
        Term::Var(x) => acc_positions_of_variable(&x.ty, ord),
        _ => return,
    };
    for i in positions {
        let Some(arg) = args.get(i - 1) else { continue };
        if let Term::Var(x) = head {
            if arg.has_free_var(x) {
                continue;
            }
        }
        reach(arg, ord, names, out);
    }
}

pub fn acc_subterm(s: &Term, t: &Term, ord: &SortOrdering) -> bool {
    acc_reachable(s, ord, &[t]).contains(t)
}

/// Does some lhs argument reach `Z⟨x1..xk⟩` for variables `xi`?
fn meta_accessible(args: &[&Term], z: &MetaVar, ord: &SortOrdering) -> bool {
    args.iter().any(|a| {
        acc_reachable(a, ord, &[]).iter().any(|t| match t {
            Term::Meta(m) => m.var() == z && m.args().iter().all(|x| matches!(x, Term::Var(_))),
            _ => false,
        })
    })
}

/// The first (rule index, meta-variable) violating the AFP condition.
pub fn afp_failure(m: &Afsm, ord: &SortOrdering) -> Option<(usize, MetaVar)> {
    for (i, rule) in m.rules.iter().enumerate() {
        let (_, args) = rule.lhs().spine();
        for z in rule.rhs().metas_ordered() {
            if !meta_accessible(&args, &z, ord) {
                return Some((i, z));
            }
        }
    }
    None
}

const EXHAUSTIVE_SORTS: usize = 6;
const RANDOM_RESTARTS: usize = 20_000;

/// Searches level maps for an ordering under which the system is AFP.
/// Exhaustive in lexicographic order for up to six sorts.
pub fn find_afp_ordering(m: &Afsm) -> Option<SortOrdering> {
    let sorts = m.all_sorts();
    let n = sorts.len();
    if n == 0 {
        return afp_failure(m, &SortOrdering::flat())
            .is_none()
            .then(SortOrdering::flat);
    }
    let make = |levels: &[usize]| {
        SortOrdering::from_levels(sorts.iter().cloned().zip(levels.iter().copied()))
    };
    if n <= EXHAUSTIVE_SORTS {
        let mut levels = vec![0usize; n];
        loop {
            let ord = make(&levels);
            if afp_failure(m, &ord).is_none() {
                return Some(ord);
            }
            let mut i = n;
            loop {
                if i == 0 {
                    return None;
                }
                i -= 1;
                levels[i] += 1;
                if levels[i] < n {
                    break;
                }
                levels[i] = 0;
            }
        }
    }
    let flat = vec![0usize; n];
    if afp_failure(m, &make(&flat)).is_none() {
        return Some(make(&flat));
    }
    let mut rng = StdRng::seed_from_u64(0x5eed);
    for _ in 0..RANDOM_RESTARTS {
        let levels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
        let ord = make(&levels);
        if afp_failure(m, &ord).is_none() {
            return Some(ord);
        }
    }
    None
}

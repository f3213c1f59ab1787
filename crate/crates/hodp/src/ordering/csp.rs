//! Backtracking search for coefficient values.

use std::collections::BTreeMap;

use super::poly::CPoly;

/// `lhs >= rhs + gap` over unknowns ranging over `0..=max`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ineq {
    pub lhs: CPoly,
    pub rhs: CPoly,
    pub gap: u64,
}

impl Ineq {
    fn trivial(&self) -> bool {
        self.rhs.is_zero() && self.gap == 0
    }

    /// Could still hold for some completion of the partial assignment?
    fn feasible(&self, values: &[Option<u64>], max: u64) -> bool {
        let hi = self.lhs.eval(&|k| values[k as usize].unwrap_or(max));
        let lo = self.rhs.eval(&|k| values[k as usize].unwrap_or(0));
        hi >= lo + self.gap
    }
}

pub const DOMAIN_MAX: u64 = 2;

/// Values for unknowns `0..n`, trying small values first; unknowns not
/// mentioned by any inequality are 0. `None` when unsatisfiable or when
/// the node budget runs out.
pub fn solve(ineqs: &[Ineq], n: u32, budget: usize) -> Option<Vec<u64>> {
    let ineqs: Vec<&Ineq> = ineqs.iter().filter(|i| !i.trivial()).collect();
    let mut order: Vec<u32> = Vec::new();
    let mut by_var: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    let mut ranked: Vec<usize> = (0..ineqs.len()).collect();
    ranked.sort_by_key(|&i| ineqs[i].lhs.unknowns().len() + ineqs[i].rhs.unknowns().len());
    for &i in &ranked {
        let mut vars = ineqs[i].lhs.unknowns();
        vars.extend(ineqs[i].rhs.unknowns());
        vars.sort_unstable();
        vars.dedup();
        for v in vars {
            if !by_var.contains_key(&v) {
                order.push(v);
            }
            by_var.entry(v).or_default().push(i);
        }
    }
    let mut values: Vec<Option<u64>> = vec![None; n as usize];
    if !ineqs.iter().all(|i| i.feasible(&values, DOMAIN_MAX)) {
        return None;
    }
    let mut nodes = 0usize;
    let found = search(&ineqs, &order, &by_var, 0, &mut values, &mut nodes, budget);
    found.then(|| values.into_iter().map(|v| v.unwrap_or(0)).collect())
}

fn search(
    ineqs: &[&Ineq],
    order: &[u32],
    by_var: &BTreeMap<u32, Vec<usize>>,
    pos: usize,
    values: &mut [Option<u64>],
    nodes: &mut usize,
    budget: usize,
) -> bool {
    let Some(&v) = order.get(pos) else {
        return true;
    };
    for x in 0..=DOMAIN_MAX {
        *nodes += 1;
        if *nodes > budget {
            return false;
        }
        values[v as usize] = Some(x);
        let ok = by_var[&v]
            .iter()
            .all(|&i| ineqs[i].feasible(values, DOMAIN_MAX));
        if ok && search(ineqs, order, by_var, pos + 1, values, nodes, budget) {
            return true;
        }
    }
    values[v as usize] = None;
    false
}

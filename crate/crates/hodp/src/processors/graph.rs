use std::collections::BTreeSet;
use std::fmt::Write as _;

use petgraph::algo::tarjan_scc;
use petgraph::graphmap::DiGraphMap;

use crate::dp::{Conditions, DependencyPair, MetaVarCondition};
use crate::framework::{Context, DpProblem, Outcome, Processor};
use crate::term::{NameSupply, Term};

/// Nodes are indices into the problem's pair list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DependencyGraphApprox {
    pub nodes: usize,
    pub edges: BTreeSet<(usize, usize)>,
}

impl DependencyGraphApprox {
    /// Strongly connected components with at least one edge, ordered by
    /// their smallest member.
    pub fn nontrivial_sccs(&self) -> Vec<Vec<usize>> {
        let mut g: DiGraphMap<usize, ()> = DiGraphMap::new();
        for i in 0..self.nodes {
            g.add_node(i);
        }
        for &(a, b) in &self.edges {
            g.add_edge(a, b, ());
        }
        let mut sccs: Vec<Vec<usize>> = tarjan_scc(&g)
            .into_iter()
            .map(|mut c| {
                c.sort_unstable();
                c
            })
            .filter(|c| c.len() > 1 || self.edges.contains(&(c[0], c[0])))
            .collect();
        sccs.sort();
        sccs
    }

    /// Graphviz rendering with nodes numbered from 1.
    pub fn to_dot(&self, pairs: &[DependencyPair]) -> String {
        let mut out = String::from("digraph dependency_graph {\n");
        for (i, dp) in pairs.iter().enumerate().take(self.nodes) {
            let label = format!("({}) {}", i + 1, dp)
                .replace('\\', "\\\\")
                .replace('"', "\\\"");
            let _ = writeln!(out, "  {} [label=\"{}\"];", i + 1, label);
        }
        for &(a, b) in &self.edges {
            let _ = writeln!(out, "  {} -> {};", a + 1, b + 1);
        }
        out.push_str("}\n");
        out
    }
}

/// Over-approximates the dependency graph: an edge is dropped only when the
/// head symbols differ or a required bound variable cannot appear.
pub fn graph_approx(problem: &DpProblem) -> DependencyGraphApprox {
    let pairs = &problem.pairs;
    let mut edges = BTreeSet::new();
    for (i, from) in pairs.iter().enumerate() {
        for (j, to) in pairs.iter().enumerate() {
            if may_follow(from.rhs(), to.lhs(), to.conditions()) {
                edges.insert((i, j));
            }
        }
    }
    DependencyGraphApprox {
        nodes: pairs.len(),
        edges,
    }
}

fn may_follow(rhs: &Term, lhs: &Term, conditions: &Conditions) -> bool {
    let (rh, rargs) = rhs.spine();
    let (lh, largs) = lhs.spine();
    let same_head = match (rh, lh) {
        (Term::Fun(f), Term::Fun(g)) => f.name == g.name && f.marked == g.marked,
        _ => false,
    };
    if !same_head || rargs.len() != largs.len() {
        return false;
    }
    !rargs
        .iter()
        .zip(largs.iter())
        .any(|(r, l)| lost_variable(r, l, conditions))
}

/// `l = λx1..xn.F⟨..⟩` needs some `xq` (through a condition on `F`) that the
/// abstraction `r` has already discarded.
fn lost_variable(r: &Term, l: &Term, conditions: &Conditions) -> bool {
    let mut names = NameSupply::avoiding([r, l]);
    let mut xs = Vec::new();
    let mut body = l.clone();
    while let Some((x, b)) = body.unbind(&mut names) {
        xs.push(x);
        body = b;
    }
    let Term::Meta(m) = &body else { return false };
    for (i, arg) in m.args().iter().enumerate() {
        let cond = MetaVarCondition {
            meta: m.var().clone(),
            index: i + 1,
        };
        if !conditions.contains(&cond) {
            continue;
        }
        let Term::Var(y) = arg else { continue };
        let Some(q) = xs.iter().position(|x| x == y) else {
            continue;
        };
        if discards_binder(r, q) {
            return true;
        }
    }
    false
}

/// `r` has at least `q + 1` leading abstractions and the `q`-th (0-based)
/// bound variable is not used.
fn discards_binder(r: &Term, q: usize) -> bool {
    let mut names = NameSupply::avoiding([r]);
    let mut body = r.clone();
    let mut target = None;
    for k in 0..=q {
        match body.unbind(&mut names) {
            Some((x, b)) => {
                if k == q {
                    target = Some(x);
                }
                body = b;
            }
            None => return false,
        }
    }
    target.is_some_and(|x| !body.has_free_var(&x))
}

pub struct GraphProcessor;

impl Processor for GraphProcessor {
    fn name(&self) -> &'static str {
        "graph"
    }

    fn theorem(&self) -> &'static str {
        "dependency graph processor: only pairs on a cycle of a graph approximation can occur infinitely often (sound and complete)"
    }

    fn is_complete(&self) -> bool {
        true
    }

    fn apply(&self, problem: &DpProblem, _: &Context) -> Outcome {
        let g = graph_approx(problem);
        let sccs = g.nontrivial_sccs();
        let children: Vec<DpProblem> = sccs
            .iter()
            .map(|c| problem.with_pairs(c.iter().map(|&i| problem.pairs[i].clone()).collect()))
            .collect();
        let edges: Vec<String> = g
            .edges
            .iter()
            .map(|(a, b)| format!("{}->{}", a + 1, b + 1))
            .collect();
        let comps: Vec<String> = sccs
            .iter()
            .map(|c| {
                let ids: Vec<String> = c.iter().map(|i| (i + 1).to_string()).collect();
                format!("{{{}}}", ids.join(","))
            })
            .collect();
        let witness = vec![
            format!(
                "edges: {}",
                if edges.is_empty() {
                    "none".into()
                } else {
                    edges.join(", ")
                }
            ),
            format!(
                "SCCs: {}",
                if comps.is_empty() {
                    "none".into()
                } else {
                    comps.join(", ")
                }
            ),
        ];
        Outcome::children(children, witness)
    }
}

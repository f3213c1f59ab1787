//! Single-seed property checks shared by the proptest suite and the
//! acceptance run.

use std::collections::BTreeSet;

use hodp::afsm::{minarity, rewrite_step, Afsm};
use hodp::dp::candidates;
use hodp::framework::initial_problem;
use hodp::processors::graph_approx;
use hodp::syntax::{parse_afsm, parse_term, print_term, TermScope};
use hodp::term::{MetaVar, Substitution, Term, Type, Var};

use super::*;

const SYSTEMS: &[&str] = &["map", "ordrec", "deriv", "differenttypes", "nonterm"];

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

pub fn random_term(seed: u64) -> (Afsm, Term) {
    let mut r = rng(seed);
    let m = load(SYSTEMS[(seed % SYSTEMS.len() as u64) as usize]);
    let sorts = m.all_sorts();
    let mut gen = TermGen::new(&m.signature);
    let sort = &sorts[(seed as usize / 7) % sorts.len()];
    let t = gen.closed(&Type::Sort(sort.clone()), 4, &mut r);
    (m, t)
}

pub fn rewriting_preserves_types(seed: u64) -> Result<(), String> {
    let (m, t) = random_term(seed);
    let ty = t.type_of().map_err(|e| format!("{t}: {e:?}"))?;
    for u in rewrite_step(&m, &t) {
        check(u.type_of().ok() == Some(ty.clone()), || {
            format!("{t} -> {u}")
        })?;
    }
    Ok(())
}

pub fn close_then_open_restores(seed: u64) -> Result<(), String> {
    let (_, t) = random_term(seed);
    for x in t.free_vars() {
        let closed = t.close(&x);
        check(closed.open(&Term::var(&x)) == t, || {
            format!("close/open {} in {t}", x.name)
        })?;
        check(!closed.has_free_var(&x), || {
            format!("{} still free in {closed}", x.name)
        })?;
    }
    Ok(())
}

pub fn renaming_round_trips(seed: u64) -> Result<(), String> {
    let (_, t) = random_term(seed);
    let mut there = Substitution::new();
    let mut back = Substitution::new();
    for (i, x) in t.free_vars_ordered().into_iter().enumerate() {
        let y = Var::new(&format!("fresh{i}"), x.ty.clone());
        there.insert_var(x.clone(), Term::var(&y)).unwrap();
        back.insert_var(y, Term::var(&x)).unwrap();
    }
    let renamed = there.apply(&t);
    check(back.apply(&renamed) == t, || format!("renaming {t}"))?;
    check(renamed.size() == t.size(), || format!("size of {renamed}"))
}

pub fn printing_round_trips(seed: u64) -> Result<(), String> {
    let (m, t) = random_term(seed);
    let scope = TermScope {
        vars: t.free_vars_ordered(),
        metas: vec![],
    };
    let text = print_term(&t);
    let back = parse_term(&text, &m.signature, &scope).map_err(|e| format!("{text}: {e}"))?;
    check(back == t, || format!("parsed {text} differently"))?;
    check(print_term(&back) == text, || format!("reprint of {text}"))
}

fn lhs_metas(m: &Afsm) -> Vec<MetaVar> {
    let mut out = Vec::new();
    for r in &m.rules {
        for z in r.lhs().metas_ordered() {
            if !out.contains(&z) {
                out.push(z);
            }
        }
    }
    out
}

pub fn candidates_match_oracle(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let text = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/tests/data/candidates.afsm"
    ))
    .unwrap();
    let m = parse_afsm(&text).unwrap();
    let metas = lhs_metas(&m);
    let arities = minarity(&m);
    let defined: BTreeSet<_> = m.defined_symbols().into_iter().map(|f| f.name).collect();
    let mut gen = TermGen::new(&m.signature).with_metas(&metas);
    gen.lambda_weight = 0.4;
    gen.free_weight = 0.02;
    gen.meta_weight = 2;
    gen.redex_weight = 0.15;
    let s = gen.closed(&nat(), 3, &mut r);
    let expected = candidates_oracle(&s, &arities, &defined);
    let got: BTreeSet<_> = candidates(&s, &arities)
        .into_iter()
        .map(|(t, a)| (canonical_fresh(&s, &t), a))
        .collect();
    check(got == expected, || {
        format!("s = {s}: got {got:?}, expected {expected:?}")
    })
}

pub fn graph_keeps_realised_edges(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let m = random_system(4, &mut r);
    let Ok(p) = initial_problem(&m) else {
        return Ok(());
    };
    let g = graph_approx(&p);
    for e in two_step_chains(&p, 2) {
        check(g.edges.contains(&e), || {
            let rules: Vec<String> = m.rules.iter().map(|r| r.to_string()).collect();
            format!("missing edge {e:?} in {:?}; rules {rules:?}", g.edges)
        })?;
    }
    Ok(())
}

//! Interpretation templates and symbolic evaluation of meta-terms.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::poly::{Arg, Atom, CPoly, Head, Poly};
use crate::term::{Name, Symbol, Term, Type};

/// A tuple entry passed to a functional argument in a template.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Entry {
    Zero,
    Arg(usize),
    Bottom(Type),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Part {
    Constant(u32),
    Linear {
        arg: usize,
        coef: u32,
    },
    Apply {
        arg: usize,
        tuple: Vec<Entry>,
        coef: u32,
    },
}

/// `J_f(a1..am) = c0 + Σ ci·ai + Σ d·ai(tuple)` with unknown coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Template {
    symbol: Symbol,
    parts: Vec<Part>,
}

const MAX_TUPLES: usize = 4;

impl Template {
    fn new(symbol: &Symbol, next: &mut u32) -> Template {
        let mut fresh = || {
            let k = *next;
            *next += 1;
            k
        };
        let (dom, _) = symbol.ty.flatten();
        let base_args: Vec<usize> = (0..dom.len()).filter(|&i| dom[i].is_base()).collect();
        let mut parts = vec![Part::Constant(fresh())];
        for (i, ty) in dom.iter().enumerate() {
            if ty.is_base() {
                parts.push(Part::Linear {
                    arg: i,
                    coef: fresh(),
                });
                continue;
            }
            let (inner, _) = ty.flatten();
            let choices: Vec<Vec<Entry>> = inner
                .iter()
                .map(|t| {
                    if t.is_base() {
                        std::iter::once(Entry::Zero)
                            .chain(base_args.iter().map(|&j| Entry::Arg(j)))
                            .collect()
                    } else {
                        vec![Entry::Bottom((*t).clone())]
                    }
                })
                .collect();
            let count: usize = choices.iter().map(|c| c.len()).product();
            let tuples: Vec<Vec<Entry>> = if count > MAX_TUPLES {
                vec![choices.iter().map(|c| c[0].clone()).collect()]
            } else {
                choices.iter().fold(vec![vec![]], |acc, c| {
                    acc.iter()
                        .flat_map(|prefix| {
                            c.iter().map(move |e| {
                                let mut t = prefix.clone();
                                t.push(e.clone());
                                t
                            })
                        })
                        .collect()
                })
            };
            for tuple in tuples {
                parts.push(Part::Apply {
                    arg: i,
                    tuple,
                    coef: fresh(),
                });
            }
        }
        Template {
            symbol: symbol.clone(),
            parts,
        }
    }

    fn apply(&self, args: &[Val], depth: u32) -> Poly {
        let mut out = Poly::zero();
        for part in &self.parts {
            let term = match part {
                Part::Constant(c) => Poly::coefficient(CPoly::unknown(*c)),
                Part::Linear { arg, coef } => args[*arg].as_poly().scale(&CPoly::unknown(*coef)),
                Part::Apply { arg, tuple, coef } => {
                    let mut v = args[*arg].clone();
                    for e in tuple {
                        let x = match e {
                            Entry::Zero => Val::Base(Poly::zero()),
                            Entry::Arg(j) => args[*j].clone(),
                            Entry::Bottom(t) => Val::start(PHead::Zero, t.clone(), depth),
                        };
                        v = v.apply(x, depth);
                    }
                    v.as_poly().scale(&CPoly::unknown(*coef))
                }
            };
            out = out.add(&term);
        }
        out
    }
}

/// Semantic values: numbers, closures and partially applied heads.
#[derive(Clone, Debug)]
enum Val {
    Base(Poly),
    Closure {
        body: Arc<Term>,
        env: Vec<Val>,
        templates: Arc<Templates>,
    },
    Partial {
        head: PHead,
        ty: Type,
        args: Vec<Val>,
        templates: Option<Arc<Templates>>,
    },
}

#[derive(Clone, Debug)]
enum PHead {
    Sym(Symbol),
    Unknown(Head),
    Zero,
}

type Templates = BTreeMap<(Name, bool), Template>;

impl Val {
    fn as_poly(&self) -> Poly {
        match self {
            Val::Base(p) => p.clone(),
            _ => panic!("functional value used as a number"),
        }
    }

    fn start(head: PHead, ty: Type, depth: u32) -> Val {
        Val::start_with(head, ty, None, depth)
    }

    fn start_with(head: PHead, ty: Type, templates: Option<Arc<Templates>>, depth: u32) -> Val {
        let v = Val::Partial {
            head,
            ty,
            args: Vec::new(),
            templates,
        };
        v.finish_if_base(depth)
    }

    fn finish_if_base(self, depth: u32) -> Val {
        let Val::Partial {
            head,
            ty,
            args,
            templates,
        } = &self
        else {
            return self;
        };
        let rest = ty.after_args(args.len()).expect("well-typed application");
        if !rest.is_base() {
            return self;
        }
        let poly = match head {
            PHead::Zero => Poly::zero(),
            PHead::Sym(f) => {
                let tpl = templates
                    .as_ref()
                    .and_then(|t| t.get(&(f.name.clone(), f.marked)))
                    .unwrap_or_else(|| panic!("no template for {f}"));
                tpl.apply(args, depth)
            }
            PHead::Unknown(h) => {
                let (dom, _) = ty.flatten();
                Poly::atom(Atom {
                    head: h.clone(),
                    args: args
                        .iter()
                        .zip(dom)
                        .map(|(a, t)| a.reify(t, depth))
                        .collect(),
                })
            }
        };
        Val::Base(poly)
    }

    fn apply(self, arg: Val, depth: u32) -> Val {
        match self {
            Val::Closure {
                body,
                mut env,
                templates,
            } => {
                env.push(arg);
                eval(&body, &env, &templates, depth)
            }
            Val::Partial {
                head,
                ty,
                mut args,
                templates,
            } => {
                args.push(arg);
                Val::Partial {
                    head,
                    ty,
                    args,
                    templates,
                }
                .finish_if_base(depth)
            }
            Val::Base(_) => panic!("number applied to an argument"),
        }
    }

    /// Canonical form: the body over `Param(depth, i)`.
    fn reify(&self, ty: &Type, depth: u32) -> Arg {
        if ty.is_base() {
            return Arg::Base(self.as_poly());
        }
        let (dom, _) = ty.flatten();
        let mut v = self.clone();
        for (i, t) in dom.iter().enumerate() {
            let p = Val::start(
                PHead::Unknown(Head::Param(depth, i as u32)),
                (*t).clone(),
                depth + 1,
            );
            v = v.apply(p, depth + 1);
        }
        Arg::Fun {
            level: depth,
            arity: dom.len() as u32,
            body: v.as_poly(),
        }
    }
}

fn eval(t: &Term, env: &[Val], templates: &Arc<Templates>, depth: u32) -> Val {
    match t {
        Term::Var(x) => Val::start(
            PHead::Unknown(Head::Var(x.name.clone())),
            x.ty.clone(),
            depth,
        ),
        Term::Bound(i) => env[env.len() - 1 - i].clone(),
        Term::Fun(f) if f.is_bottom() => Val::start(PHead::Zero, f.ty.clone(), depth),
        Term::Fun(f) => Val::start_with(
            PHead::Sym(f.clone()),
            f.ty.clone(),
            Some(templates.clone()),
            depth,
        ),
        Term::App(l, r) => {
            let lv = eval(l, env, templates, depth);
            let rv = eval(r, env, templates, depth);
            lv.apply(rv, depth)
        }
        Term::Abs(_, body) => Val::Closure {
            body: body.clone(),
            env: env.to_vec(),
            templates: templates.clone(),
        },
        Term::Meta(m) => {
            let mut v = Val::start(
                PHead::Unknown(Head::Meta(m.var().name.clone())),
                m.var().ty.clone(),
                depth,
            );
            for a in m.args() {
                v = v.apply(eval(a, env, templates, depth), depth);
            }
            v
        }
    }
}

/// Templates for a set of symbols, and optionally values for their unknowns.
#[derive(Clone, Debug)]
pub struct Interpretation {
    templates: Arc<Templates>,
    unknowns: u32,
    values: Option<Vec<u64>>,
}

impl Interpretation {
    /// One template per distinct (name, marked) symbol, in sorted order.
    pub fn for_symbols<'a, I: IntoIterator<Item = &'a Symbol>>(symbols: I) -> Interpretation {
        let set: BTreeSet<&Symbol> = symbols.into_iter().filter(|f| !f.is_bottom()).collect();
        let mut next = 0;
        let mut templates = Templates::new();
        for f in set {
            templates
                .entry((f.name.clone(), f.marked))
                .or_insert_with(|| Template::new(f, &mut next));
        }
        Interpretation {
            templates: Arc::new(templates),
            unknowns: next,
            values: None,
        }
    }

    pub fn unknowns(&self) -> u32 {
        self.unknowns
    }

    pub fn with_values(&self, values: Vec<u64>) -> Interpretation {
        Interpretation {
            values: Some(values),
            ..self.clone()
        }
    }

    pub fn covers(&self, f: &Symbol) -> bool {
        self.templates.contains_key(&(f.name.clone(), f.marked))
    }

    /// Assigned coefficient values, 0 where unassigned.
    pub fn value_fn(&self) -> impl Fn(u32) -> u64 + '_ {
        move |k| {
            self.values
                .as_ref()
                .and_then(|v| v.get(k as usize).copied())
                .unwrap_or(0)
        }
    }

    /// `s` applied to `args`, evaluated to a polynomial; with values set,
    /// unknown coefficients are replaced.
    pub fn evaluate_applied(&self, s: &Term, args: &[ArgValue]) -> Poly {
        let mut v = eval(s, &[], &self.templates, 0);
        for a in args {
            let x = match a {
                ArgValue::Fresh(i, ty) => {
                    Val::start(PHead::Unknown(Head::Fresh(*i)), ty.clone(), 0)
                }
                ArgValue::Bottom(ty) => Val::start(PHead::Zero, ty.clone(), 0),
            };
            v = v.apply(x, 0);
        }
        let p = v.as_poly();
        match self.values {
            Some(_) => p.instantiate(&self.value_fn()),
            None => p,
        }
    }

    /// `s` brought to base type with fresh arguments.
    pub fn interpret(&self, s: &Term) -> Poly {
        let ty = s.type_of().expect("well-typed");
        let args: Vec<ArgValue> = ty
            .flatten()
            .0
            .iter()
            .enumerate()
            .map(|(i, t)| ArgValue::Fresh(i as u32, (*t).clone()))
            .collect();
        self.evaluate_applied(s, &args)
    }

    /// One line per symbol, e.g. `J(sin)(n) = n + 1`; requires values.
    pub fn describe(&self, only: &BTreeSet<(Name, bool)>) -> Vec<String> {
        let mut out = Vec::new();
        for ((name, marked), tpl) in self.templates.iter() {
            if !only.contains(&(name.clone(), *marked)) {
                continue;
            }
            let (dom, _) = tpl.symbol.ty.flatten();
            let names: Vec<String> = dom
                .iter()
                .enumerate()
                .map(|(i, t)| {
                    let stem = if t.is_base() { "n" } else { "f" };
                    if dom.len() == 1 {
                        stem.to_string()
                    } else {
                        format!("{stem}{}", i + 1)
                    }
                })
                .collect();
            let args: Vec<Val> = dom
                .iter()
                .zip(&names)
                .map(|(t, n)| {
                    Val::start(
                        PHead::Unknown(Head::Var(Name::from(n.as_str()))),
                        (*t).clone(),
                        0,
                    )
                })
                .collect();
            let p = tpl.apply(&args, 0).instantiate(&self.value_fn());
            let shown = format!("{}{}", name, if *marked { "#" } else { "" });
            if names.is_empty() {
                out.push(format!("J({shown}) = {p}"));
            } else {
                out.push(format!("J({shown})({}) = {p}", names.join(", ")));
            }
        }
        out
    }
}

/// Extra argument used to bring a term to base type.
#[derive(Clone, Debug)]
pub enum ArgValue {
    Fresh(u32, Type),
    Bottom(Type),
}

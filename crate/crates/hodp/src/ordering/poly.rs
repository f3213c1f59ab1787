//! Polynomials over the naturals whose coefficients may themselves be
//! polynomials in unknown template coefficients.

use std::collections::BTreeMap;
use std::fmt;

use crate::term::Name;

/// Polynomial in coefficient unknowns `c0, c1, ...`; each key is a sorted
/// multiset of unknowns.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CPoly(BTreeMap<Vec<u32>, u64>);

impl CPoly {
    pub fn zero() -> CPoly {
        CPoly::default()
    }

    pub fn constant(n: u64) -> CPoly {
        let mut m = BTreeMap::new();
        if n > 0 {
            m.insert(Vec::new(), n);
        }
        CPoly(m)
    }

    pub fn unknown(k: u32) -> CPoly {
        CPoly(BTreeMap::from([(vec![k], 1)]))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// The value if no unknowns occur.
    pub fn as_constant(&self) -> Option<u64> {
        match self.0.len() {
            0 => Some(0),
            1 => self.0.get(&Vec::new()).copied(),
            _ => None,
        }
    }

    pub fn add(&self, other: &CPoly) -> CPoly {
        let mut m = self.0.clone();
        for (k, v) in &other.0 {
            *m.entry(k.clone()).or_insert(0) += v;
        }
        CPoly(m)
    }

    pub fn mul(&self, other: &CPoly) -> CPoly {
        let mut m: BTreeMap<Vec<u32>, u64> = BTreeMap::new();
        for (k1, v1) in &self.0 {
            for (k2, v2) in &other.0 {
                let mut k = k1.clone();
                k.extend(k2);
                k.sort_unstable();
                *m.entry(k).or_insert(0) += v1 * v2;
            }
        }
        CPoly(m)
    }

    pub fn unknowns(&self) -> Vec<u32> {
        let mut out: Vec<u32> = self.0.keys().flatten().copied().collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Evaluates with `value(k)` for each unknown.
    pub fn eval(&self, value: &impl Fn(u32) -> u64) -> u64 {
        self.0
            .iter()
            .map(|(k, v)| k.iter().fold(*v, |acc, u| acc.saturating_mul(value(*u))))
            .fold(0u64, |a, b| a.saturating_add(b))
    }
}

/// Head of an atom: something whose value is unknown to the interpretation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Head {
    Meta(Name),
    Var(Name),
    /// Argument `idx` of a functional reified at nesting depth `level`.
    Param(u32, u32),
    /// Argument supplied to bring a rule to base type.
    Fresh(u32),
}

impl fmt::Display for Head {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Head::Meta(n) | Head::Var(n) => write!(f, "{n}"),
            Head::Param(l, i) => write!(f, "p{l}_{i}"),
            Head::Fresh(i) => write!(f, "y{i}"),
        }
    }
}

/// Argument of an atom: a number, or a functional given by its body over
/// `Param(level, 0..arity)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Arg {
    Base(Poly),
    Fun { level: u32, arity: u32, body: Poly },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub head: Head,
    pub args: Vec<Arg>,
}

/// Sorted product of atoms; the empty product is the constant monomial.
pub type Monomial = Vec<Atom>;

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly(BTreeMap<Monomial, CPoly>);

impl Poly {
    pub fn zero() -> Poly {
        Poly::default()
    }

    pub fn constant(n: u64) -> Poly {
        Poly::coefficient(CPoly::constant(n))
    }

    pub fn coefficient(c: CPoly) -> Poly {
        let mut m = BTreeMap::new();
        if !c.is_zero() {
            m.insert(Vec::new(), c);
        }
        Poly(m)
    }

    pub fn atom(a: Atom) -> Poly {
        Poly(BTreeMap::from([(vec![a], CPoly::constant(1))]))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &CPoly)> {
        self.0.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coefficient_of(&self, m: &Monomial) -> CPoly {
        self.0.get(m).cloned().unwrap_or_default()
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut m = self.0.clone();
        for (k, v) in &other.0 {
            let e = m.entry(k.clone()).or_default();
            *e = e.add(v);
        }
        Poly(m)
    }

    pub fn scale(&self, c: &CPoly) -> Poly {
        let mut m = BTreeMap::new();
        for (k, v) in &self.0 {
            let p = v.mul(c);
            if !p.is_zero() {
                m.insert(k.clone(), p);
            }
        }
        Poly(m)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut m: BTreeMap<Monomial, CPoly> = BTreeMap::new();
        for (k1, v1) in &self.0 {
            for (k2, v2) in &other.0 {
                let mut k = k1.clone();
                k.extend(k2.iter().cloned());
                k.sort();
                let e = m.entry(k).or_default();
                *e = e.add(&v1.mul(v2));
            }
        }
        m.retain(|_, v| !v.is_zero());
        Poly(m)
    }

    /// Replaces every unknown coefficient (also inside atom arguments).
    pub fn instantiate(&self, value: &impl Fn(u32) -> u64) -> Poly {
        let mut out = Poly::zero();
        for (mono, c) in &self.0 {
            let n = c.eval(value);
            if n == 0 {
                continue;
            }
            let atoms: Vec<Poly> = mono
                .iter()
                .map(|a| Poly::atom(a.instantiate(value)))
                .collect();
            let p = atoms.iter().fold(Poly::constant(n), |acc, a| acc.mul(a));
            out = out.add(&p);
        }
        out
    }

    /// Unknown coefficients of the top-level monomials only.
    pub fn unknowns(&self) -> Vec<u32> {
        let mut out: Vec<u32> = self.0.values().flat_map(|c| c.unknowns()).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Value of a fully instantiated polynomial under an assignment of atoms.
    pub fn evaluate(&self, atom_value: &mut dyn FnMut(&Atom) -> u64) -> Option<u64> {
        let mut total: u64 = 0;
        for (mono, c) in &self.0 {
            let mut v = c.as_constant()?;
            for a in mono {
                v = v.saturating_mul(atom_value(a));
            }
            total = total.saturating_add(v);
        }
        Some(total)
    }
}

impl Atom {
    fn instantiate(&self, value: &impl Fn(u32) -> u64) -> Atom {
        Atom {
            head: self.head.clone(),
            args: self
                .args
                .iter()
                .map(|a| match a {
                    Arg::Base(p) => Arg::Base(p.instantiate(value)),
                    Arg::Fun { level, arity, body } => Arg::Fun {
                        level: *level,
                        arity: *arity,
                        body: body.instantiate(value),
                    },
                })
                .collect(),
        }
    }

    /// `self ≥ other` for all values, assuming unknown functions are weakly monotonic.
    fn dominates(&self, other: &Atom) -> bool {
        self.head == other.head
            && self.args.len() == other.args.len()
            && self
                .args
                .iter()
                .zip(&other.args)
                .all(|(a, b)| match (a, b) {
                    (Arg::Base(p), Arg::Base(q)) => compare(p, q, false),
                    (
                        Arg::Fun {
                            level: l1,
                            arity: a1,
                            body: p,
                        },
                        Arg::Fun {
                            level: l2,
                            arity: a2,
                            body: q,
                        },
                    ) => l1 == l2 && a1 == a2 && compare(p, q, false),
                    _ => false,
                })
    }
}

fn monomial_dominates(l: &Monomial, r: &Monomial) -> bool {
    if l.len() != r.len() {
        return false;
    }
    // small products: try all pairings
    fn pair(l: &[Atom], r: &[Atom], used: &mut Vec<bool>) -> bool {
        let Some((first, rest)) = r.split_first() else {
            return true;
        };
        for i in 0..l.len() {
            if !used[i] && l[i].dominates(first) {
                used[i] = true;
                if pair(l, rest, used) {
                    return true;
                }
                used[i] = false;
            }
        }
        false
    }
    pair(l, r, &mut vec![false; l.len()])
}

/// Sufficient check that `l ≥ r` (or `l > r` when `strict`) on the naturals
/// for fully instantiated polynomials: every monomial of `r` is paid for by
/// dominating monomials of `l`, and strictness comes from the constant part.
pub fn compare(l: &Poly, r: &Poly, strict: bool) -> bool {
    let constant = |p: &Poly| {
        p.0.get(&Vec::new())
            .and_then(|c| c.as_constant())
            .unwrap_or(0)
    };
    let mut budget: Vec<(Monomial, u64)> = Vec::new();
    for (m, c) in &l.0 {
        match c.as_constant() {
            Some(n) => budget.push((m.clone(), n)),
            None => return false,
        }
    }
    for (m, c) in &r.0 {
        let Some(mut need) = c.as_constant() else {
            return false;
        };
        if m.is_empty() {
            continue;
        }
        // exact matches first, then any dominating monomial
        let order: Vec<usize> = (0..budget.len())
            .filter(|&i| budget[i].0 == *m)
            .chain((0..budget.len()).filter(|&i| budget[i].0 != *m))
            .collect();
        for i in order {
            if need == 0 {
                break;
            }
            if budget[i].1 == 0 || budget[i].0.is_empty() || !monomial_dominates(&budget[i].0, m) {
                continue;
            }
            let take = need.min(budget[i].1);
            budget[i].1 -= take;
            need -= take;
        }
        if need > 0 {
            return false;
        }
    }
    let (lc, rc) = (constant(l), constant(r));
    if strict {
        lc > rc
    } else {
        lc >= rc
    }
}

fn fmt_args(args: &[Arg], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    write!(f, "(")?;
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        match a {
            Arg::Base(p) => write!(f, "{p}")?,
            Arg::Fun { level, arity, body } => {
                write!(f, "/\\")?;
                for k in 0..*arity {
                    if k > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{}", Head::Param(*level, k))?;
                }
                write!(f, ". {body}")?;
            }
        }
    }
    write!(f, ")")
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        if !self.args.is_empty() {
            fmt_args(&self.args, f)?;
        }
        Ok(())
    }
}

impl fmt::Display for CPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(k, v)| {
                let mut s: Vec<String> = k.iter().map(|u| format!("c{u}")).collect();
                if *v != 1 || s.is_empty() {
                    s.insert(0, v.to_string());
                }
                s.join("*")
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        // constant part last, as in `n + 1`
        let mut parts = Vec::new();
        for (m, c) in self.0.iter().filter(|(m, _)| !m.is_empty()) {
            let atoms: Vec<String> = m.iter().map(|a| a.to_string()).collect();
            let prod = atoms.join("*");
            parts.push(match c.as_constant() {
                Some(1) => prod,
                Some(n) => format!("{n}*{prod}"),
                None => format!("({c})*{prod}"),
            });
        }
        if let Some(c) = self.0.get(&Vec::new()) {
            parts.push(match c.as_constant() {
                Some(n) => n.to_string(),
                None => format!("({c})"),
            });
        }
        write!(f, "{}", parts.join(" + "))
    }
}

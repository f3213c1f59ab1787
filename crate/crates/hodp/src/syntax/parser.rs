use std::collections::HashMap;

use super::lexer::{lex_line, Tok, Token};
use super::{SourceSpan, SyntaxError};
use crate::afsm::{Afsm, Rule, RuleError};
use crate::term::{MetaVar, Name, Symbol, Term, Type, Var};

/// Variables and meta-variables that may occur free in a parsed term.
#[derive(Clone, Debug, Default)]
pub struct TermScope {
    pub vars: Vec<Var>,
    pub metas: Vec<MetaVar>,
}

#[derive(Clone, Debug)]
enum Ast {
    Name {
        name: String,
        marked: bool,
        span: SourceSpan,
    },
    MetaApp {
        name: String,
        args: Vec<Ast>,
        span: SourceSpan,
    },
    App(Box<Ast>, Box<Ast>, SourceSpan),
    Lam {
        vars: Vec<(String, SourceSpan)>,
        body: Box<Ast>,
        span: SourceSpan,
    },
}

impl Ast {
    fn span(&self) -> SourceSpan {
        match self {
            Ast::Name { span, .. } | Ast::MetaApp { span, .. } | Ast::Lam { span, .. } => *span,
            Ast::App(_, _, span) => *span,
        }
    }
}

fn join(a: SourceSpan, b: SourceSpan) -> SourceSpan {
    if a.line != b.line {
        return a;
    }
    let end = (b.column + b.length).max(a.column + a.length);
    SourceSpan {
        line: a.line,
        column: a.column,
        length: end - a.column,
    }
}

struct Cursor<'a> {
    toks: &'a [Token],
    pos: usize,
    eol: SourceSpan,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<&'a Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn span(&self) -> SourceSpan {
        self.toks.get(self.pos).map(|t| t.span).unwrap_or(self.eol)
    }

    fn next(&mut self) -> Option<&'a Token> {
        let t = self.toks.get(self.pos);
        self.pos += 1;
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, SyntaxError> {
        Err(SyntaxError::Parse {
            span: self.span(),
            message: message.into(),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<SourceSpan, SyntaxError> {
        if self.peek() == Some(&tok) {
            let s = self.span();
            self.pos += 1;
            Ok(s)
        } else {
            self.error(format!("expected {what}"))
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, SourceSpan), SyntaxError> {
        match self.peek() {
            Some(Tok::Ident {
                name,
                marked: false,
            }) => {
                let s = self.span();
                self.pos += 1;
                Ok((name.clone(), s))
            }
            _ => self.error(format!("expected {what}")),
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn finish(&self) -> Result<(), SyntaxError> {
        if self.at_end() {
            Ok(())
        } else {
            self.error("unexpected trailing input")
        }
    }

    fn ty(&mut self, sorts: &[Name]) -> Result<Type, SyntaxError> {
        let dom = match self.peek() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let t = self.ty(sorts)?;
                self.expect(Tok::RParen, "')'")?;
                t
            }
            _ => {
                let (name, span) = self.ident("a sort")?;
                if !sorts.iter().any(|s| **s == *name) {
                    return Err(SyntaxError::Parse {
                        span,
                        message: format!("undeclared sort {name}"),
                    });
                }
                Type::sort(&name)
            }
        };
        if self.peek() == Some(&Tok::Arrow) {
            self.pos += 1;
            Ok(Type::arrow(dom, self.ty(sorts)?))
        } else {
            Ok(dom)
        }
    }

    fn term(&mut self) -> Result<Ast, SyntaxError> {
        if self.peek() == Some(&Tok::Lambda) {
            self.lambda()
        } else {
            self.application()
        }
    }

    fn lambda(&mut self) -> Result<Ast, SyntaxError> {
        let start = self.expect(Tok::Lambda, "'/\\'")?;
        let mut vars = Vec::new();
        while let Some(Tok::Ident { .. }) = self.peek() {
            vars.push(self.ident("a variable")?);
        }
        if vars.is_empty() {
            return self.error("expected a bound variable");
        }
        self.expect(Tok::Dot, "'.'")?;
        let body = self.term()?;
        let span = join(start, body.span());
        Ok(Ast::Lam {
            vars,
            body: Box::new(body),
            span,
        })
    }

    fn starts_atom(&self) -> bool {
        matches!(self.peek(), Some(Tok::Ident { .. }) | Some(Tok::LParen))
    }

    fn application(&mut self) -> Result<Ast, SyntaxError> {
        if !self.starts_atom() {
            return self.error("expected a term");
        }
        let mut acc = self.atom()?;
        loop {
            let arg = if self.starts_atom() {
                self.atom()?
            } else if self.peek() == Some(&Tok::Lambda) {
                self.lambda()?
            } else {
                break;
            };
            let span = join(acc.span(), arg.span());
            acc = Ast::App(Box::new(acc), Box::new(arg), span);
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Ast, SyntaxError> {
        let span = self.span();
        match self.next().map(|t| &t.tok) {
            Some(Tok::Ident { name, marked }) => {
                if self.peek() == Some(&Tok::LBracket) {
                    if *marked {
                        return Err(SyntaxError::Parse {
                            span,
                            message: "a marked symbol cannot take meta-arguments".into(),
                        });
                    }
                    self.pos += 1;
                    let mut args = Vec::new();
                    if self.peek() != Some(&Tok::RBracket) {
                        args.push(self.term()?);
                        while self.peek() == Some(&Tok::Comma) {
                            self.pos += 1;
                            args.push(self.term()?);
                        }
                    }
                    let end = self.expect(Tok::RBracket, "']'")?;
                    Ok(Ast::MetaApp {
                        name: name.clone(),
                        args,
                        span: join(span, end),
                    })
                } else {
                    Ok(Ast::Name {
                        name: name.clone(),
                        marked: *marked,
                        span,
                    })
                }
            }
            Some(Tok::LParen) => {
                let inner = self.term()?;
                let end = self.expect(Tok::RParen, "')'")?;
                Ok(match inner {
                    Ast::App(l, r, _) => Ast::App(l, r, join(span, end)),
                    Ast::Lam { vars, body, .. } => Ast::Lam {
                        vars,
                        body,
                        span: join(span, end),
                    },
                    other => other,
                })
            }
            _ => {
                self.pos -= 1;
                self.error("expected a term")
            }
        }
    }
}

/// Simple types with unification variables.
#[derive(Clone, Debug)]
enum IType {
    V(usize),
    S(Name),
    A(Box<IType>, Box<IType>),
}

impl IType {
    fn from_type(t: &Type) -> IType {
        match t {
            Type::Sort(s) => IType::S(s.clone()),
            Type::Arrow(d, c) => {
                IType::A(Box::new(IType::from_type(d)), Box::new(IType::from_type(c)))
            }
        }
    }
}

#[derive(Default)]
struct Infer {
    sub: Vec<Option<IType>>,
}

impl Infer {
    fn fresh(&mut self) -> IType {
        self.sub.push(None);
        IType::V(self.sub.len() - 1)
    }

    fn shallow(&self, t: &IType) -> IType {
        let mut t = t.clone();
        while let IType::V(v) = t {
            match &self.sub[v] {
                Some(u) => t = u.clone(),
                None => return IType::V(v),
            }
        }
        t
    }

    fn occurs(&self, v: usize, t: &IType) -> bool {
        match self.shallow(t) {
            IType::V(w) => v == w,
            IType::S(_) => false,
            IType::A(d, c) => self.occurs(v, &d) || self.occurs(v, &c),
        }
    }

    fn unify(&mut self, a: &IType, b: &IType) -> bool {
        match (self.shallow(a), self.shallow(b)) {
            (IType::V(v), IType::V(w)) if v == w => true,
            (IType::V(v), t) | (t, IType::V(v)) => {
                if self.occurs(v, &t) {
                    return false;
                }
                self.sub[v] = Some(t);
                true
            }
            (IType::S(x), IType::S(y)) => x == y,
            (IType::A(d1, c1), IType::A(d2, c2)) => self.unify(&d1, &d2) && self.unify(&c1, &c2),
            _ => false,
        }
    }

    fn resolve(&self, t: &IType) -> Option<Type> {
        match self.shallow(t) {
            IType::V(_) => None,
            IType::S(s) => Some(Type::Sort(s)),
            IType::A(d, c) => Some(Type::arrow(self.resolve(&d)?, self.resolve(&c)?)),
        }
    }

    fn show(&self, t: &IType) -> String {
        match self.shallow(t) {
            IType::V(v) => format!("?{v}"),
            IType::S(s) => s.to_string(),
            IType::A(d, c) => {
                let d = match self.shallow(&d) {
                    IType::A(..) => format!("({})", self.show(&d)),
                    _ => self.show(&d),
                };
                format!("{d} -> {}", self.show(&c))
            }
        }
    }
}

enum Elab {
    Bound(usize),
    Free(Var),
    Fun(Symbol),
    Meta(usize, Vec<Elab>),
    App(Box<Elab>, Box<Elab>),
    Lam(usize, Box<Elab>),
}

struct MetaInfo {
    name: String,
    ty: IType,
    arity: usize,
    span: SourceSpan,
    fixed: Option<MetaVar>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    Lhs,
    Rhs,
    Free,
}

struct Elaborator<'a> {
    symbols: &'a HashMap<String, Symbol>,
    meta_decls: &'a HashMap<String, MetaVar>,
    free_vars: HashMap<String, Var>,
    inf: Infer,
    metas: Vec<MetaInfo>,
    binders: Vec<(String, IType, SourceSpan)>,
    scope: Vec<usize>,
    side: Side,
}

impl<'a> Elaborator<'a> {
    fn new(symbols: &'a HashMap<String, Symbol>, meta_decls: &'a HashMap<String, MetaVar>) -> Self {
        Elaborator {
            symbols,
            meta_decls,
            free_vars: HashMap::new(),
            inf: Infer::default(),
            metas: Vec::new(),
            binders: Vec::new(),
            scope: Vec::new(),
            side: Side::Free,
        }
    }

    fn type_error<T>(&self, span: SourceSpan, message: String) -> Result<T, SyntaxError> {
        Err(SyntaxError::Type { span, message })
    }

    fn meta_index(
        &mut self,
        name: &str,
        arity: usize,
        span: SourceSpan,
    ) -> Result<usize, SyntaxError> {
        if let Some(i) = self.metas.iter().position(|m| m.name == name) {
            if self.metas[i].arity != arity {
                return Err(SyntaxError::Parse {
                    span,
                    message: format!(
                        "meta-variable {name} used with {arity} argument(s) but earlier with {}",
                        self.metas[i].arity
                    ),
                });
            }
            return Ok(i);
        }
        let (ty, fixed) = match self.meta_decls.get(name) {
            Some(z) => {
                if z.arity() != arity {
                    return Err(SyntaxError::Parse {
                        span,
                        message: format!(
                            "meta-variable {name} is declared with arity {} but used with {arity}",
                            z.arity()
                        ),
                    });
                }
                (IType::from_type(&z.ty), Some(z.clone()))
            }
            None => {
                let mut t = self.inf.fresh();
                for _ in 0..arity {
                    let d = self.inf.fresh();
                    t = IType::A(Box::new(d), Box::new(t));
                }
                (t, None)
            }
        };
        self.metas.push(MetaInfo {
            name: name.to_string(),
            ty,
            arity,
            span,
            fixed,
        });
        Ok(self.metas.len() - 1)
    }

    fn elab(&mut self, ast: &Ast) -> Result<(Elab, IType), SyntaxError> {
        match ast {
            Ast::Name { name, marked, span } => {
                if !*marked {
                    if let Some(&b) = self
                        .scope
                        .iter()
                        .rev()
                        .find(|&&b| self.binders[b].0 == *name)
                    {
                        return Ok((Elab::Bound(b), self.binders[b].1.clone()));
                    }
                }
                if let Some(f) = self.symbols.get(name.as_str()) {
                    let f = if *marked {
                        if self.side != Side::Free {
                            return Err(SyntaxError::Parse {
                                span: *span,
                                message: "marked symbols may not occur in rules".into(),
                            });
                        }
                        f.marked_twin()
                    } else {
                        f.clone()
                    };
                    let t = IType::from_type(&f.ty);
                    return Ok((Elab::Fun(f), t));
                }
                if *marked {
                    return Err(SyntaxError::Parse {
                        span: *span,
                        message: format!("unknown function symbol {name}"),
                    });
                }
                if let Some(x) = self.free_vars.get(name.as_str()) {
                    return Ok((Elab::Free(x.clone()), IType::from_type(&x.ty)));
                }
                let capital = name.starts_with(|c: char| c.is_ascii_uppercase());
                if capital || self.meta_decls.contains_key(name.as_str()) {
                    let i = self.meta_index(name, 0, *span)?;
                    return Ok((Elab::Meta(i, vec![]), self.metas[i].ty.clone()));
                }
                match self.side {
                    Side::Lhs => Err(SyntaxError::Pattern {
                        span: *span,
                        message: format!("{name} is not bound; the left-hand side must be closed"),
                    }),
                    _ => Err(SyntaxError::Parse {
                        span: *span,
                        message: format!("unknown identifier {name}"),
                    }),
                }
            }
            Ast::MetaApp { name, args, span } => {
                if self.symbols.contains_key(name.as_str())
                    || self.scope.iter().any(|&b| self.binders[b].0 == *name)
                {
                    return Err(SyntaxError::Parse {
                        span: *span,
                        message: format!("{name} is not a meta-variable"),
                    });
                }
                let i = self.meta_index(name, args.len(), *span)?;
                let mut t = self.metas[i].ty.clone();
                let mut out = Vec::new();
                for a in args {
                    let (e, at) = self.elab(a)?;
                    let r = self.inf.fresh();
                    if !self
                        .inf
                        .unify(&t, &IType::A(Box::new(at.clone()), Box::new(r.clone())))
                    {
                        return self.type_error(
                            a.span(),
                            format!(
                                "argument of type {} does not fit {name}",
                                self.inf.show(&at)
                            ),
                        );
                    }
                    t = r;
                    out.push(e);
                }
                Ok((Elab::Meta(i, out), t))
            }
            Ast::App(l, r, span) => {
                let (el, lt) = self.elab(l)?;
                let (er, rt) = self.elab(r)?;
                let res = self.inf.fresh();
                if !self
                    .inf
                    .unify(&lt, &IType::A(Box::new(rt.clone()), Box::new(res.clone())))
                {
                    return self.type_error(
                        *span,
                        format!(
                            "cannot apply a term of type {} to an argument of type {}",
                            self.inf.show(&lt),
                            self.inf.show(&rt)
                        ),
                    );
                }
                Ok((Elab::App(Box::new(el), Box::new(er)), res))
            }
            Ast::Lam { vars, body, .. } => {
                let mut ids = Vec::new();
                for (v, s) in vars {
                    let t = self.inf.fresh();
                    self.binders.push((v.clone(), t, *s));
                    let id = self.binders.len() - 1;
                    self.scope.push(id);
                    ids.push(id);
                }
                let (mut e, mut t) = self.elab(body)?;
                for &id in ids.iter().rev() {
                    self.scope.pop();
                    t = IType::A(Box::new(self.binders[id].1.clone()), Box::new(t));
                    e = Elab::Lam(id, Box::new(e));
                }
                Ok((e, t))
            }
        }
    }

    /// Resolves all inferred types; ambiguity is an error.
    fn finish(&self) -> Result<(Vec<Var>, Vec<MetaVar>), SyntaxError> {
        let mut vars = Vec::new();
        for (name, t, span) in &self.binders {
            match self.inf.resolve(t) {
                Some(ty) => vars.push(Var::new(name, ty)),
                None => {
                    return self.type_error(
                        *span,
                        format!("cannot determine the type of variable {name}"),
                    )
                }
            }
        }
        let mut metas = Vec::new();
        for m in &self.metas {
            if let Some(z) = &m.fixed {
                metas.push(z.clone());
                continue;
            }
            match self.inf.resolve(&m.ty) {
                Some(ty) => metas.push(MetaVar::new(&m.name, ty, m.arity).map_err(|e| {
                    SyntaxError::Type {
                        span: m.span,
                        message: e.to_string(),
                    }
                })?),
                None => {
                    return self.type_error(
                        m.span,
                        format!("cannot determine the type of meta-variable {}", m.name),
                    )
                }
            }
        }
        Ok((vars, metas))
    }
}

fn build(e: &Elab, vars: &[Var], metas: &[MetaVar]) -> Term {
    match e {
        Elab::Bound(b) => Term::var(&vars[*b]),
        Elab::Free(x) => Term::var(x),
        Elab::Fun(f) => Term::fun(f),
        Elab::Meta(i, args) => Term::meta(
            &metas[*i],
            args.iter().map(|a| build(a, vars, metas)).collect(),
        )
        .expect("arity checked during elaboration"),
        Elab::App(l, r) => Term::app(build(l, vars, metas), build(r, vars, metas)),
        Elab::Lam(b, body) => Term::lam(&vars[*b], &build(body, vars, metas)),
    }
}

fn line_end(line: usize, text: &str) -> SourceSpan {
    SourceSpan {
        line,
        column: text.chars().count() + 1,
        length: 1,
    }
}

/// Parses the line-oriented AFSM format.
pub fn parse_afsm(text: &str) -> Result<Afsm, SyntaxError> {
    let mut sorts: Vec<Name> = Vec::new();
    let mut signature: Vec<Symbol> = Vec::new();
    let mut symbols: HashMap<String, Symbol> = HashMap::new();
    let mut meta_decls: HashMap<String, MetaVar> = HashMap::new();
    let mut rule_lines: Vec<(Vec<Token>, SourceSpan)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let toks = lex_line(raw, line)?;
        if toks.is_empty() {
            continue;
        }
        let mut c = Cursor {
            toks: &toks,
            pos: 0,
            eol: line_end(line, raw),
        };
        let (kw, kw_span) = c.ident("a declaration keyword (sort, fun, meta, rule)")?;
        match kw.as_str() {
            "sort" => {
                let (name, span) = c.ident("a sort name")?;
                c.finish()?;
                if sorts.iter().any(|s| **s == *name) {
                    return Err(SyntaxError::Parse {
                        span,
                        message: format!("sort {name} declared twice"),
                    });
                }
                sorts.push(Name::from(name.as_str()));
            }
            "fun" => {
                let (name, span) = c.ident("a function symbol name")?;
                c.expect(Tok::Colon, "':'")?;
                let ty = c.ty(&sorts)?;
                c.finish()?;
                if symbols.contains_key(&name) {
                    return Err(SyntaxError::Parse {
                        span,
                        message: format!("function symbol {name} declared twice"),
                    });
                }
                let f = Symbol::new(&name, ty);
                symbols.insert(name, f.clone());
                signature.push(f);
            }
            "meta" => {
                let (name, span) = c.ident("a meta-variable name")?;
                c.expect(Tok::Colon, "':'")?;
                let ty = c.ty(&sorts)?;
                c.expect(Tok::LBracket, "'[' followed by the arity")?;
                let arity = match c.next().map(|t| &t.tok) {
                    Some(Tok::Number(k)) => *k,
                    _ => {
                        c.pos -= 1;
                        return c.error("expected the arity");
                    }
                };
                c.expect(Tok::RBracket, "']'")?;
                c.finish()?;
                let z = MetaVar::new(&name, ty, arity).map_err(|e| SyntaxError::Type {
                    span,
                    message: e.to_string(),
                })?;
                meta_decls.insert(name, z);
            }
            "rule" => {
                let rest = toks[1..].to_vec();
                rule_lines.push((rest, join(kw_span, line_end(line, raw))));
            }
            other => {
                return Err(SyntaxError::Parse {
                    span: kw_span,
                    message: format!("unknown declaration '{other}'"),
                })
            }
        }
    }

    let mut rules = Vec::new();
    for (toks, rule_span) in &rule_lines {
        let eol = SourceSpan {
            line: rule_span.line,
            column: rule_span.column + rule_span.length,
            length: 1,
        };
        let mut c = Cursor { toks, pos: 0, eol };
        let lhs_ast = c.term()?;
        c.expect(Tok::RuleArrow, "'=>'")?;
        let rhs_ast = c.term()?;
        c.finish()?;
        rules.push(elaborate_rule(&lhs_ast, &rhs_ast, &symbols, &meta_decls)?);
    }

    Ok(Afsm {
        sorts,
        signature,
        rules,
    })
}

fn elaborate_rule(
    lhs_ast: &Ast,
    rhs_ast: &Ast,
    symbols: &HashMap<String, Symbol>,
    meta_decls: &HashMap<String, MetaVar>,
) -> Result<Rule, SyntaxError> {
    let mut el = Elaborator::new(symbols, meta_decls);
    el.side = Side::Lhs;
    let (le, lt) = el.elab(lhs_ast)?;
    let lhs_metas = el.metas.len();
    el.side = Side::Rhs;
    let (re, rt) = el.elab(rhs_ast)?;
    if let Some(m) = el.metas.get(lhs_metas) {
        return Err(SyntaxError::Pattern {
            span: m.span,
            message: format!(
                "meta-variable {} does not occur on the left-hand side",
                m.name
            ),
        });
    }
    if !el.inf.unify(&lt, &rt) {
        return Err(SyntaxError::Type {
            span: rhs_ast.span(),
            message: format!(
                "right-hand side has type {} but the left-hand side has type {}",
                el.inf.show(&rt),
                el.inf.show(&lt)
            ),
        });
    }
    let (vars, metas) = el.finish()?;
    let lhs = build(&le, &vars, &metas);
    let rhs = build(&re, &vars, &metas);
    Rule::new(lhs, rhs).map_err(|e| match e {
        RuleError::TypeMismatch(..) | RuleError::Term(_) => SyntaxError::Type {
            span: lhs_ast.span(),
            message: e.to_string(),
        },
        _ => SyntaxError::Pattern {
            span: lhs_ast.span(),
            message: e.to_string(),
        },
    })
}

/// Parses a single term over `signature`; `name#` denotes a marked symbol.
pub fn parse_term(
    text: &str,
    signature: &[Symbol],
    scope: &TermScope,
) -> Result<Term, SyntaxError> {
    let toks = lex_line(text, 1)?;
    let mut c = Cursor {
        toks: &toks,
        pos: 0,
        eol: line_end(1, text),
    };
    let ast = c.term()?;
    c.finish()?;
    let symbols: HashMap<String, Symbol> = signature
        .iter()
        .map(|f| (f.name.to_string(), f.unmarked_twin()))
        .collect();
    let meta_decls: HashMap<String, MetaVar> = scope
        .metas
        .iter()
        .map(|z| (z.name.to_string(), z.clone()))
        .collect();
    let mut el = Elaborator::new(&symbols, &meta_decls);
    el.free_vars = scope
        .vars
        .iter()
        .map(|x| (x.name.to_string(), x.clone()))
        .collect();
    let (e, _) = el.elab(&ast)?;
    let (vars, metas) = el.finish()?;
    Ok(build(&e, &vars, &metas))
}

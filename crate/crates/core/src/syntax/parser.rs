use std::collections::{BTreeSet, HashMap};

use super::lexer::{tokenize, Sexp, Tok, Token};
use super::numeral::{BIT0, BIT1, NUMERAL, ZERO};
use super::ParseError;
use crate::kernel::term::{CONJ, DISJ, EQ, IMP, NEG, STRING_TY};
use crate::kernel::{HolType, Name, Signature, Term, TySubst, TypeNode};
use crate::unify::is_fresh_name;

pub const NIL: &str = "NIL";
pub const CONS: &str = "CONS";
pub const PAIR: &str = ",";
pub const SYMBOL: &str = "Symbol";
pub const LIST: &str = "List";
pub const SEXP_TY: &str = "sexp";
pub const NUM_TY: &str = "num";

#[derive(Clone, Copy, Debug, Default)]
pub struct ParseOptions {
    /// Accept identifiers in the machine namespace `_N` as free variables.
    pub allow_reserved: bool,
}

/// Infix operators: token, constant name, precedence, right associative.
const INFIXES: &[(&str, &str, u8, bool)] = &[
    ("==>", IMP, 1, true),
    ("\\/", DISJ, 2, true),
    ("/\\", CONJ, 3, true),
    ("=", EQ, 4, true),
    ("<", "<", 4, true),
    ("<=", "<=", 4, true),
    (">", ">", 4, true),
    (">=", ">=", 4, true),
    (",", PAIR, 5, true),
    ("::", CONS, 6, true),
    ("+", "+", 7, false),
];

const NEG_OPERAND_PREC: u8 = 5;

fn infix(tok: &Tok) -> Option<(&'static str, u8, bool)> {
    match tok {
        Tok::Sym(s) => INFIXES.iter().find(|(t, ..)| t == s).map(|&(_, c, p, r)| (c, p, r)),
        _ => None,
    }
}

/// Parses a type such as `A list -> num # bool`.
pub fn parse_type(src: &str, sig: &Signature) -> Result<HolType, ParseError> {
    let toks = tokenize(src)?;
    let mut p = Parser::new(&toks, sig, ParseOptions::default());
    let ty = p.ty()?;
    p.expect_eof()?;
    Ok(ty)
}

pub fn parse_term(src: &str, sig: &Signature) -> Result<Term, ParseError> {
    parse_term_with(src, sig, ParseOptions::default())
}

pub fn parse_term_with(src: &str, sig: &Signature, opts: ParseOptions) -> Result<Term, ParseError> {
    let toks = tokenize(src)?;
    let mut p = Parser::new(&toks, sig, opts);
    let pre = p.expr(0)?;
    p.expect_eof()?;
    Elab::new(sig, opts).run(&pre)
}

/// A parsed `??v1 ... vn. body` query.
#[derive(Clone, Debug)]
pub struct Query {
    pub vars: Vec<Term>,
    pub body: Term,
}

pub fn parse_query(src: &str, sig: &Signature) -> Result<Query, ParseError> {
    let t = parse_term(src, sig)?;
    let mut vars = Vec::new();
    let mut body = t;
    while let Some((v, b)) = body.dest_exists_meta() {
        vars.push(v.clone());
        let b = b.clone();
        body = b;
    }
    if vars.is_empty() {
        let pos = src.len() - src.trim_start().len();
        return Err(ParseError::new(pos, "query must start with the ?? binder"));
    }
    Ok(Query { vars, body })
}

#[derive(Debug, Clone)]
enum Pre {
    Ident(String, usize),
    Num(u64, usize),
    Str(String, usize),
    Quote(Sexp, usize),
    List(Vec<Pre>, usize),
    Op(&'static str, usize),
    App(Box<Pre>, Box<Pre>, usize),
    Binder(&'static str, String, Option<HolType>, Box<Pre>, usize),
    Typed(Box<Pre>, HolType, usize),
}

impl Pre {
    fn pos(&self) -> usize {
        match self {
            Pre::Ident(_, p)
            | Pre::Num(_, p)
            | Pre::Str(_, p)
            | Pre::Quote(_, p)
            | Pre::List(_, p)
            | Pre::Op(_, p)
            | Pre::App(_, _, p)
            | Pre::Binder(.., p)
            | Pre::Typed(_, _, p) => *p,
        }
    }
}

pub(super) struct Parser<'a> {
    toks: &'a [Token],
    at: usize,
    sig: &'a Signature,
    #[allow(dead_code)]
    opts: ParseOptions,
}

impl<'a> Parser<'a> {
    pub(super) fn new(toks: &'a [Token], sig: &'a Signature, opts: ParseOptions) -> Parser<'a> {
        Parser { toks, at: 0, sig, opts }
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.at + k).min(self.toks.len() - 1)].tok
    }

    fn pos(&self) -> usize {
        self.toks[self.at].pos
    }

    fn advance(&mut self) -> &Tok {
        let t = &self.toks[self.at].tok;
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn eat(&mut self, sym: &str) -> bool {
        if matches!(self.peek(), Tok::Sym(s) if *s == sym) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, sym: &str) -> Result<(), ParseError> {
        if self.eat(sym) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("expected `{sym}`")))
        }
    }

    fn unexpected(&self, what: &str) -> ParseError {
        let found = match self.peek() {
            Tok::Eof => "end of input".to_string(),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Num(n) => format!("`{n}`"),
            Tok::Str(s) => format!("{s:?}"),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Quote(_) => "quotation".to_string(),
        };
        ParseError::new(self.pos(), format!("{what}, found {found}"))
    }

    pub(super) fn expect_eof(&self) -> Result<(), ParseError> {
        if matches!(self.peek(), Tok::Eof) {
            Ok(())
        } else {
            Err(self.unexpected("expected end of input"))
        }
    }

    // ---- types ----

    pub(super) fn ty(&mut self) -> Result<HolType, ParseError> {
        let dom = self.ty_prod()?;
        if self.eat("->") {
            Ok(HolType::fun(dom, self.ty()?))
        } else {
            Ok(dom)
        }
    }

    fn ty_prod(&mut self) -> Result<HolType, ParseError> {
        let left = self.ty_postfix()?;
        if self.eat("#") {
            let right = self.ty_prod()?;
            self.tycon("prod", vec![left, right], self.pos())
        } else {
            Ok(left)
        }
    }

    fn ty_postfix(&mut self) -> Result<HolType, ParseError> {
        let pos = self.pos();
        let mut args = if self.eat("(") {
            let mut args = vec![self.ty()?];
            while self.eat(",") {
                args.push(self.ty()?);
            }
            self.expect(")")?;
            args
        } else {
            match self.peek().clone() {
                Tok::Ident(name) => {
                    self.advance();
                    vec![self.ty_atom(&name, pos)?]
                }
                _ => return Err(self.unexpected("expected a type")),
            }
        };
        loop {
            let Tok::Ident(name) = self.peek().clone() else { break };
            match self.sig.tycon_arity(&name) {
                Some(n) if n > 0 => {
                    let pos = self.pos();
                    self.advance();
                    args = vec![self.tycon(&name, args, pos)?];
                }
                _ => break,
            }
        }
        match <[HolType; 1]>::try_from(args) {
            Ok([ty]) => Ok(ty),
            Err(_) => Err(ParseError::new(pos, "type tuple must be followed by a type constructor")),
        }
    }

    fn ty_atom(&self, name: &str, pos: usize) -> Result<HolType, ParseError> {
        match self.sig.tycon_arity(name) {
            Some(0) => Ok(HolType::con(name, vec![])),
            Some(n) => Err(ParseError::new(pos, format!("type constructor {name} expects {n} arguments"))),
            None if name.starts_with(|c: char| c.is_ascii_uppercase()) => Ok(HolType::var(name)),
            None => Err(ParseError::new(pos, format!("unknown type {name}"))),
        }
    }

    fn tycon(&self, name: &str, args: Vec<HolType>, pos: usize) -> Result<HolType, ParseError> {
        match self.sig.tycon_arity(name) {
            Some(n) if n == args.len() => Ok(HolType::con(name, args)),
            Some(n) => Err(ParseError::new(pos, format!("type constructor {name} expects {n} arguments, found {}", args.len()))),
            None => Err(ParseError::new(pos, format!("unknown type constructor {name}"))),
        }
    }

    // ---- terms ----

    fn expr(&mut self, min: u8) -> Result<Pre, ParseError> {
        let mut lhs = self.prefix()?;
        while let Some((op, prec, right)) = infix(self.peek()) {
            if prec < min {
                break;
            }
            let pos = self.pos();
            self.advance();
            let rhs = self.expr(if right { prec } else { prec + 1 })?;
            lhs = app(app(Pre::Op(op, pos), lhs), rhs);
        }
        Ok(lhs)
    }

    fn prefix(&mut self) -> Result<Pre, ParseError> {
        let pos = self.pos();
        match self.peek() {
            Tok::Sym("~") => {
                self.advance();
                let t = self.expr(NEG_OPERAND_PREC)?;
                Ok(app(Pre::Op(NEG, pos), t))
            }
            Tok::Sym(q @ ("\\" | "!" | "?" | "??")) => {
                let q: &'static str = q;
                self.advance();
                let mut vars = Vec::new();
                loop {
                    let vpos = self.pos();
                    if self.eat("(") {
                        let name = self.ident()?;
                        self.expect(":")?;
                        let ty = self.ty()?;
                        self.expect(")")?;
                        vars.push((name, Some(ty), vpos));
                    } else if let Tok::Ident(_) = self.peek() {
                        let name = self.ident()?;
                        let ty = if self.eat(":") { Some(self.ty()?) } else { None };
                        vars.push((name, ty, vpos));
                    } else {
                        break;
                    }
                }
                if vars.is_empty() {
                    return Err(self.unexpected("expected a bound variable"));
                }
                self.expect(".")?;
                let body = self.expr(0)?;
                Ok(vars
                    .into_iter()
                    .rev()
                    .fold(body, |b, (n, ty, p)| Pre::Binder(q, n, ty, Box::new(b), p)))
            }
            _ => {
                let mut f = self.atom()?;
                while self.starts_atom() {
                    let a = self.atom()?;
                    f = app(f, a);
                }
                Ok(f)
            }
        }
    }

    fn starts_atom(&self) -> bool {
        match self.peek() {
            Tok::Ident(_) | Tok::Num(_) | Tok::Str(_) | Tok::Quote(_) => true,
            Tok::Sym(s) => matches!(*s, "(" | "["),
            Tok::Eof => false,
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.advance();
                Ok(s)
            }
            _ => Err(self.unexpected("expected an identifier")),
        }
    }

    fn atom(&mut self) -> Result<Pre, ParseError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.advance();
                let id = Pre::Ident(name, pos);
                if self.eat(":") {
                    let ty = self.ty()?;
                    Ok(Pre::Typed(Box::new(id), ty, pos))
                } else {
                    Ok(id)
                }
            }
            Tok::Num(n) => {
                self.advance();
                Ok(Pre::Num(n, pos))
            }
            Tok::Str(s) => {
                self.advance();
                Ok(Pre::Str(s, pos))
            }
            Tok::Quote(sx) => {
                self.advance();
                Ok(Pre::Quote(sx, pos))
            }
            Tok::Sym("[") => {
                self.advance();
                let mut items = Vec::new();
                if !self.eat("]") {
                    loop {
                        items.push(self.expr(0)?);
                        if self.eat("]") {
                            break;
                        }
                        self.expect(";")?;
                    }
                }
                Ok(Pre::List(items, pos))
            }
            Tok::Sym("(") => {
                self.advance();
                // operator section such as `(<=)`
                if let (Some((op, ..)), Tok::Sym(")")) = (infix(self.peek()), self.peek_at(1)) {
                    self.advance();
                    self.advance();
                    return Ok(Pre::Op(op, pos));
                }
                if matches!(self.peek(), Tok::Sym("~")) && matches!(self.peek_at(1), Tok::Sym(")")) {
                    self.advance();
                    self.advance();
                    return Ok(Pre::Op(NEG, pos));
                }
                let e = self.expr(0)?;
                let e = if self.eat(":") { Pre::Typed(Box::new(e), self.ty()?, pos) } else { e };
                self.expect(")")?;
                Ok(e)
            }
            _ => Err(self.unexpected("expected a term")),
        }
    }
}

fn app(f: Pre, a: Pre) -> Pre {
    let pos = f.pos();
    Pre::App(Box::new(f), Box::new(a), pos)
}

// ---- elaboration with type inference ----

enum Tt {
    Var(Name, HolType),
    Const(Name, HolType),
    App(Box<Tt>, Box<Tt>),
    Abs(Name, HolType, Box<Tt>),
}

const META: &str = "'";

struct Elab<'a> {
    sig: &'a Signature,
    opts: ParseOptions,
    subst: TySubst,
    counter: usize,
    frees: HashMap<String, HolType>,
    scope: Vec<(String, HolType)>,
}

impl<'a> Elab<'a> {
    fn new(sig: &'a Signature, opts: ParseOptions) -> Elab<'a> {
        Elab { sig, opts, subst: TySubst::new(), counter: 0, frees: HashMap::new(), scope: Vec::new() }
    }

    fn run(mut self, pre: &Pre) -> Result<Term, ParseError> {
        let (tt, _) = self.elab(pre)?;
        // name leftover type metavariables A, B, ... in order of appearance
        let mut used = BTreeSet::new();
        let mut order = Vec::new();
        self.collect_tyvars(&tt, &mut used, &mut order);
        let mut fresh_names = (0..).map(type_var_name).filter(|n| !used.contains(n.as_str()));
        let naming: TySubst = order
            .into_iter()
            .map(|m| (m, HolType::var(fresh_names.next().expect("infinite names"))))
            .collect();
        self.build(&tt, &naming)
    }

    fn fresh_meta(&mut self) -> HolType {
        self.counter += 1;
        HolType::var(format!("{META}{}", self.counter))
    }

    fn resolve(&self, ty: &HolType) -> HolType {
        match ty.node() {
            TypeNode::Var(n) => match self.subst.get(n) {
                Some(t) => self.resolve(t),
                None => ty.clone(),
            },
            TypeNode::Con(n, args) => {
                if !ty.has_tyvars() {
                    return ty.clone();
                }
                HolType::con(n.clone(), args.iter().map(|a| self.resolve(a)).collect())
            }
        }
    }

    fn is_meta(n: &str) -> bool {
        n.starts_with(META)
    }

    fn unify(&mut self, a: &HolType, b: &HolType, pos: usize) -> Result<(), ParseError> {
        let (a, b) = (self.resolve(a), self.resolve(b));
        if self.unify_inner(&a, &b) {
            Ok(())
        } else {
            let (a, b) = (self.resolve(&a), self.resolve(&b));
            Err(ParseError::new(pos, format!("type error: cannot unify {} with {}", self.show(&a), self.show(&b))))
        }
    }

    fn show(&self, ty: &HolType) -> String {
        ty.to_string().replace(META, "?")
    }

    fn unify_inner(&mut self, a: &HolType, b: &HolType) -> bool {
        let (a, b) = (self.resolve(a), self.resolve(b));
        match (a.node(), b.node()) {
            (TypeNode::Var(x), TypeNode::Var(y)) if x == y => true,
            (TypeNode::Var(x), _) if Self::is_meta(x) => self.bind(x.clone(), b),
            (_, TypeNode::Var(y)) if Self::is_meta(y) => self.bind(y.clone(), a),
            (TypeNode::Con(f, xs), TypeNode::Con(g, ys)) if f == g && xs.len() == ys.len() => {
                xs.iter().zip(ys.iter()).all(|(x, y)| self.unify_inner(x, y))
            }
            _ => false,
        }
    }

    fn bind(&mut self, v: Name, ty: HolType) -> bool {
        if ty.occurs(&v) {
            return false;
        }
        self.subst.insert(v, ty);
        true
    }

    fn constant(&mut self, name: &str, pos: usize) -> Result<(Tt, HolType), ParseError> {
        let generic = self
            .sig
            .const_type(name)
            .ok_or_else(|| ParseError::new(pos, format!("unknown constant {name}")))?
            .clone();
        let renaming: TySubst = generic.tyvars().into_iter().map(|a| (a, self.fresh_meta())).collect();
        let ty = generic.subst(&renaming);
        Ok((Tt::Const(name.into(), ty.clone()), ty))
    }

    fn apply(&mut self, f: (Tt, HolType), a: (Tt, HolType), pos: usize) -> Result<(Tt, HolType), ParseError> {
        let r = self.fresh_meta();
        let want = HolType::fun(a.1.clone(), r.clone());
        let (ft, fty) = f;
        let fty = self.resolve(&fty);
        if let Some((dom, _)) = fty.dest_fun() {
            let dom = dom.clone();
            self.unify(&dom, &a.1, pos)?;
        }
        if !self.unify_inner(&fty, &want) {
            let fty = self.resolve(&fty);
            let msg = match fty.dest_fun() {
                None => format!("type error: {} is not a function", self.show(&fty)),
                Some(_) => format!("type error: cannot apply {} to {}", self.show(&fty), self.show(&self.resolve(&a.1))),
            };
            return Err(ParseError::new(pos, msg));
        }
        Ok((Tt::App(Box::new(ft), Box::new(a.0)), r))
    }

    fn mk_app(&mut self, name: &str, args: Vec<(Tt, HolType)>, pos: usize) -> Result<(Tt, HolType), ParseError> {
        let mut f = self.constant(name, pos)?;
        for a in args {
            f = self.apply(f, a, pos)?;
        }
        Ok(f)
    }

    fn elab(&mut self, pre: &Pre) -> Result<(Tt, HolType), ParseError> {
        match pre {
            Pre::Ident(name, pos) => {
                if let Some((_, ty)) = self.scope.iter().rev().find(|(n, _)| n == name) {
                    return Ok((Tt::Var(name.as_str().into(), ty.clone()), ty.clone()));
                }
                if self.sig.const_type(name).is_some() {
                    return self.constant(name, *pos);
                }
                if is_fresh_name(name) && !self.opts.allow_reserved {
                    return Err(ParseError::new(*pos, format!("identifier {name} is reserved for generated variables")));
                }
                let ty = match self.frees.get(name) {
                    Some(ty) => ty.clone(),
                    None => {
                        let ty = self.fresh_meta();
                        self.frees.insert(name.clone(), ty.clone());
                        ty
                    }
                };
                Ok((Tt::Var(name.as_str().into(), ty.clone()), ty))
            }
            Pre::Num(n, pos) => self.numeral(*n, *pos),
            Pre::Str(s, _) => {
                let ty = HolType::con(STRING_TY, vec![]);
                Ok((Tt::Const(format!("{s:?}").into(), ty.clone()), ty))
            }
            Pre::Quote(sx, pos) => self.sexp(sx, *pos),
            Pre::List(items, pos) => {
                let mut acc = self.constant(NIL, *pos)?;
                for item in items.iter().rev() {
                    let h = self.elab(item)?;
                    acc = self.mk_app(CONS, vec![h, acc], item.pos())?;
                }
                Ok(acc)
            }
            Pre::Op(name, pos) => self.constant(name, *pos),
            Pre::App(f, a, pos) => {
                let f = self.elab(f)?;
                let a = self.elab(a)?;
                self.apply(f, a, *pos)
            }
            Pre::Binder(q, name, ann, body, pos) => {
                let ty = match ann {
                    Some(t) => t.clone(),
                    None => self.fresh_meta(),
                };
                self.scope.push((name.clone(), ty.clone()));
                let b = self.elab(body);
                self.scope.pop();
                let (bt, bty) = b?;
                let lam = (Tt::Abs(name.as_str().into(), ty.clone(), Box::new(bt)), HolType::fun(ty, bty.clone()));
                if *q == "\\" {
                    Ok(lam)
                } else {
                    self.unify(&bty, &HolType::bool(), body.pos())?;
                    self.mk_app(q, vec![lam], *pos)
                }
            }
            Pre::Typed(e, ty, pos) => {
                let (t, ety) = self.elab(e)?;
                self.unify(&ety, ty, *pos)?;
                Ok((t, ety))
            }
        }
    }

    fn numeral(&mut self, n: u64, pos: usize) -> Result<(Tt, HolType), ParseError> {
        let mut bits = Vec::new();
        let mut m = n;
        while m > 0 {
            bits.push(m & 1 == 1);
            m >>= 1;
        }
        let mut acc = self.constant(ZERO, pos)?;
        for bit in bits.into_iter().rev() {
            acc = self.mk_app(if bit { BIT1 } else { BIT0 }, vec![acc], pos)?;
        }
        self.mk_app(NUMERAL, vec![acc], pos)
    }

    fn sexp(&mut self, sx: &Sexp, pos: usize) -> Result<(Tt, HolType), ParseError> {
        match sx {
            Sexp::Atom(a) => {
                let ty = HolType::con(STRING_TY, vec![]);
                let lit = (Tt::Const(format!("{a:?}").into(), ty.clone()), ty);
                self.mk_app(SYMBOL, vec![lit], pos)
            }
            Sexp::List(items) => {
                let mut acc = self.constant(NIL, pos)?;
                for item in items.iter().rev() {
                    let h = self.sexp(item, pos)?;
                    acc = self.mk_app(CONS, vec![h, acc], pos)?;
                }
                self.mk_app(LIST, vec![acc], pos)
            }
        }
    }

    fn collect_tyvars(&self, tt: &Tt, used: &mut BTreeSet<Name>, order: &mut Vec<Name>) {
        let mut visit = |ty: &HolType| {
            for v in self.resolve(ty).tyvars() {
                if Self::is_meta(&v) {
                    if !order.contains(&v) {
                        order.push(v);
                    }
                } else {
                    used.insert(v);
                }
            }
        };
        match tt {
            Tt::Var(_, ty) | Tt::Const(_, ty) => visit(ty),
            Tt::Abs(_, ty, b) => {
                visit(ty);
                self.collect_tyvars(b, used, order);
            }
            Tt::App(f, a) => {
                self.collect_tyvars(f, used, order);
                self.collect_tyvars(a, used, order);
            }
        }
    }

    fn build(&self, tt: &Tt, naming: &TySubst) -> Result<Term, ParseError> {
        let fix = |ty: &HolType| self.resolve(ty).subst(naming);
        let err = |e: crate::kernel::KernelError| ParseError::new(0, e.to_string());
        match tt {
            Tt::Var(n, ty) => Ok(Term::var(n.clone(), fix(ty))),
            Tt::Const(n, ty) => Ok(Term::constant(n.clone(), fix(ty))),
            Tt::App(f, a) => Term::comb(self.build(f, naming)?, self.build(a, naming)?).map_err(err),
            Tt::Abs(n, ty, b) => Term::abs(Term::var(n.clone(), fix(ty)), self.build(b, naming)?).map_err(err),
        }
    }
}

fn type_var_name(i: usize) -> String {
    let letter = (b'A' + (i % 26) as u8) as char;
    if i < 26 {
        letter.to_string()
    } else {
        format!("{letter}{}", i / 26)
    }
}

use std::fmt::Write;

use super::lexer::is_sexp_delim;
use super::numeral::numeral_decode;
use super::parser::{CONS, LIST, NIL, PAIR, SYMBOL};
use crate::kernel::term::{CONJ, DISJ, EQ, EXISTS, FORALL, IMP, META_EXISTS, NEG};
use crate::kernel::{Term, TermNode};

// Precedence levels, loosest first. Must agree with the parser's table.
const BINDER: u8 = 0;
const NEGATION: u8 = 4;
const APP: u8 = 8;
const ATOM: u8 = 9;

fn infix_info(name: &str) -> Option<(&'static str, u8, bool)> {
    Some(match name {
        IMP => ("==>", 1, true),
        DISJ => ("\\/", 2, true),
        CONJ => ("/\\", 3, true),
        EQ => ("=", 4, false),
        "<" => ("<", 4, false),
        "<=" => ("<=", 4, false),
        ">" => (">", 4, false),
        ">=" => (">=", 4, false),
        PAIR => (",", 5, true),
        "+" => ("+", 7, false),
        _ => return None,
    })
}

fn binder_symbol(name: &str) -> Option<&'static str> {
    match name {
        FORALL => Some("!"),
        EXISTS => Some("?"),
        META_EXISTS => Some("??"),
        _ => None,
    }
}

/// Renders a term in the concrete syntax accepted by the parser.
pub fn print_term(t: &Term) -> String {
    let mut out = String::new();
    pr(t, 0, &mut out);
    out
}

fn paren(out: &mut String, need: bool, f: impl FnOnce(&mut String)) {
    if need {
        out.push('(');
    }
    f(out);
    if need {
        out.push(')');
    }
}

fn pr(t: &Term, min: u8, out: &mut String) {
    if let Some(n) = numeral_decode(t) {
        let _ = write!(out, "{n}");
        return;
    }
    match t.node() {
        TermNode::Var(n, _) => out.push_str(n),
        TermNode::Const(n, _) => {
            if infix_info(n).is_some() || n.as_ref() == NEG || binder_symbol(n).is_some() {
                let sym = infix_info(n).map(|i| i.0).or(binder_symbol(n)).unwrap_or(NEG);
                let _ = write!(out, "({sym})");
            } else if n.as_ref() == NIL {
                out.push_str("[]");
            } else {
                out.push_str(n);
            }
        }
        TermNode::Abs(..) => binder(t, "\\", min, out),
        TermNode::Comb(f, a) => {
            if let Some(s) = quoted_sexp(t) {
                out.push('\'');
                out.push_str(&s);
                return;
            }
            if let Some(items) = list_items(t) {
                out.push('[');
                for (i, x) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str("; ");
                    }
                    pr(x, 0, out);
                }
                out.push(']');
                return;
            }
            if let (Some(q), Some(_)) = (f.name().and_then(|n| binder_symbol(n)), a.dest_abs()) {
                if f.is_const() {
                    return binder(t, q, min, out);
                }
            }
            if f.is_const_named(NEG) {
                paren(out, min > NEGATION, |out| {
                    out.push('~');
                    pr(a, NEGATION + 1, out);
                });
                return;
            }
            let (head, args) = t.strip_comb();
            if args.len() == 2 {
                if head.is_const_named(CONS) {
                    return infix(args[0], args[1], "::", 6, true, min, out);
                }
                if let Some((sym, prec, right)) = head.name().filter(|_| head.is_const()).and_then(|n| infix_info(n)) {
                    if sym == "," {
                        // pairs are always parenthesised
                        out.push('(');
                        pr(args[0], prec + 1, out);
                        out.push_str(", ");
                        pr(args[1], prec, out);
                        out.push(')');
                        return;
                    }
                    return infix(args[0], args[1], sym, prec, right, min, out);
                }
            }
            paren(out, min > APP, |out| {
                pr(f, APP, out);
                out.push(' ');
                pr(a, ATOM, out);
            });
        }
    }
}

fn infix(l: &Term, r: &Term, sym: &str, prec: u8, right: bool, min: u8, out: &mut String) {
    paren(out, min > prec, |out| {
        pr(l, prec + 1, out);
        let _ = write!(out, " {sym} ");
        pr(r, if right { prec } else { prec + 1 }, out);
    });
}

fn binder(t: &Term, sym: &str, min: u8, out: &mut String) {
    let mut vars = Vec::new();
    let mut body = t.clone();
    loop {
        let next = if sym == "\\" {
            body.dest_abs().map(|(v, b)| (v.clone(), b.clone()))
        } else {
            match body.dest_comb() {
                Some((f, a)) if f.is_const() && f.name().and_then(|n| binder_symbol(n)) == Some(sym) => {
                    a.dest_abs().map(|(v, b)| (v.clone(), b.clone()))
                }
                _ => None,
            }
        };
        match next {
            Some((v, b)) => {
                vars.push(v);
                body = b;
            }
            None => break,
        }
    }
    paren(out, min > BINDER, |out| {
        out.push_str(sym);
        for (i, v) in vars.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            pr(v, ATOM, out);
        }
        out.push_str(". ");
        pr(&body, BINDER, out);
    });
}

/// Elements of a `CONS`-chain terminated by `NIL`.
pub fn list_items(t: &Term) -> Option<Vec<&Term>> {
    let mut items = Vec::new();
    let mut cur = t;
    loop {
        if cur.is_const_named(NIL) {
            return Some(items);
        }
        let (head, args) = cur.strip_comb();
        if !head.is_const_named(CONS) || args.len() != 2 {
            return None;
        }
        items.push(args[0]);
        cur = args[1];
    }
}

/// `'(...)` form of a fully concrete `List` term.
fn quoted_sexp(t: &Term) -> Option<String> {
    let (f, _) = t.dest_comb()?;
    if !f.is_const_named(LIST) {
        return None;
    }
    let mut out = String::new();
    sexp_body(t, &mut out)?;
    Some(out)
}

fn sexp_body(t: &Term, out: &mut String) -> Option<()> {
    let (f, a) = t.dest_comb()?;
    if f.is_const_named(SYMBOL) {
        let s = a.dest_string_lit()?;
        if s.is_empty() || s.chars().any(is_sexp_delim) {
            return None;
        }
        out.push_str(s);
        return Some(());
    }
    if !f.is_const_named(LIST) {
        return None;
    }
    out.push('(');
    for (i, x) in list_items(a)?.into_iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        sexp_body(x, out)?;
    }
    out.push(')');
    Some(())
}

//! The solver expression language:
//! `expr := name | name '(' args ')' | '[' expr,* ']'`.

use std::fmt;

use super::lexer::{is_ident_char, is_ident_start};
use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolverExpr {
    /// A solver defined in the active theory.
    Named(String, usize),
    Accept(String, usize),
    Rule(String, usize),
    Conj,
    SplitConj,
    Refl,
    All,
    No,
    StringNe,
    Relassoc,
    Concat(Box<SolverExpr>, Box<SolverExpr>),
    Collect(Vec<SolverExpr>),
    Then(Box<SolverExpr>, Box<SolverExpr>),
    Every(Vec<SolverExpr>),
    Repeat(Box<SolverExpr>),
    Interleave(Vec<SolverExpr>),
    Prolog(Vec<(String, usize)>),
    Valid(Box<SolverExpr>),
}

/// Combinator keywords with their long aliases.
const VOCAB: &[(&str, &str)] = &[
    ("accept", "ACCEPT_SLV"),
    ("rule", "RULE_SLV"),
    ("conj", "CONJ_SLV"),
    ("splitconj", "SPLIT_CONJ_SLV"),
    ("refl", "REFL_SLV"),
    ("all", "ALL_SLV"),
    ("no", "NO_SLV"),
    ("stringne", "STRING_NE_SLV"),
    ("relassoc", "RELASSOC_SLV"),
    ("concat", "CONCAT_SLV"),
    ("collect", "COLLECT_SLV"),
    ("then", "THEN_SLV"),
    ("every", "EVERY_SLV"),
    ("repeat", "REPEAT_SLV"),
    ("interleave", "INTERLEAVE_SLV"),
    ("prolog", "PROLOG_SLV"),
    ("valid", "VALID"),
];

/// Combinator keywords, for completion in front ends.
pub fn vocabulary() -> impl Iterator<Item = &'static str> {
    VOCAB.iter().map(|(k, _)| *k)
}

fn keyword(name: &str) -> Option<&'static str> {
    VOCAB.iter().find(|(k, alias)| *k == name || *alias == name).map(|(k, _)| *k)
}

#[derive(Debug)]
enum Raw {
    Name(String, usize),
    Call(String, Vec<Raw>, usize),
    List(Vec<Raw>, usize),
}

impl Raw {
    fn pos(&self) -> usize {
        match self {
            Raw::Name(_, p) | Raw::Call(_, _, p) | Raw::List(_, p) => *p,
        }
    }
}

pub fn parse_solver(src: &str) -> Result<SolverExpr, ParseError> {
    let mut p = RawParser { src, pos: 0 };
    let raw = p.expr()?;
    p.skip_ws();
    if p.pos < src.len() {
        return Err(ParseError::new(p.pos, "unexpected input after solver expression"));
    }
    convert(raw)
}

struct RawParser<'a> {
    src: &'a str,
    pos: usize,
}

impl RawParser<'_> {
    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(char::is_whitespace) {
            self.pos += self.src[self.pos..].chars().next().map_or(1, char::len_utf8);
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Raw, ParseError> {
        self.skip_ws();
        let start = self.pos;
        if self.eat('[') {
            let items = self.args(']')?;
            return Ok(Raw::List(items, start));
        }
        let rest = &self.src[self.pos..];
        if !rest.starts_with(is_ident_start) {
            let what = rest.chars().next().map_or("end of input".to_string(), |c| format!("{c:?}"));
            return Err(ParseError::new(self.pos, format!("expected a solver, found {what}")));
        }
        let len = rest.find(|c: char| !is_ident_char(c)).unwrap_or(rest.len());
        let name = rest[..len].to_string();
        self.pos += len;
        if self.eat('(') {
            let args = self.args(')')?;
            Ok(Raw::Call(name, args, start))
        } else {
            Ok(Raw::Name(name, start))
        }
    }

    fn args(&mut self, close: char) -> Result<Vec<Raw>, ParseError> {
        let mut items = Vec::new();
        if self.eat(close) {
            return Ok(items);
        }
        loop {
            items.push(self.expr()?);
            if self.eat(close) {
                return Ok(items);
            }
            if !self.eat(',') {
                self.skip_ws();
                return Err(ParseError::new(self.pos, format!("expected `,` or `{close}`")));
            }
        }
    }
}

fn convert(raw: Raw) -> Result<SolverExpr, ParseError> {
    match raw {
        Raw::List(items, _) => Ok(SolverExpr::Collect(items.into_iter().map(convert).collect::<Result<_, _>>()?)),
        Raw::Name(name, pos) => match keyword(&name) {
            Some("conj") => Ok(SolverExpr::Conj),
            Some("splitconj") => Ok(SolverExpr::SplitConj),
            Some("refl") => Ok(SolverExpr::Refl),
            Some("all") => Ok(SolverExpr::All),
            Some("no") => Ok(SolverExpr::No),
            Some("stringne") => Ok(SolverExpr::StringNe),
            Some("relassoc") => Ok(SolverExpr::Relassoc),
            Some(k) => Err(ParseError::new(pos, format!("{k} expects arguments"))),
            None => Ok(SolverExpr::Named(name, pos)),
        },
        Raw::Call(name, args, pos) => {
            let Some(k) = keyword(&name) else {
                return Err(ParseError::new(pos, format!("unknown combinator {name}")));
            };
            let arity = |n: usize| -> Result<(), ParseError> {
                if args.len() == n {
                    Ok(())
                } else {
                    Err(ParseError::new(pos, format!("{k} expects {n} argument(s), found {}", args.len())))
                }
            };
            match k {
                "accept" | "rule" => {
                    arity(1)?;
                    let Raw::Name(th, tpos) = args.into_iter().next().expect("arity checked") else {
                        return Err(ParseError::new(pos, format!("{k} expects a theorem name")));
                    };
                    Ok(if k == "accept" { SolverExpr::Accept(th, tpos) } else { SolverExpr::Rule(th, tpos) })
                }
                "concat" | "then" => {
                    arity(2)?;
                    let mut it = args.into_iter().map(convert);
                    let a = Box::new(it.next().expect("arity checked")?);
                    let b = Box::new(it.next().expect("arity checked")?);
                    Ok(if k == "concat" { SolverExpr::Concat(a, b) } else { SolverExpr::Then(a, b) })
                }
                "repeat" | "valid" => {
                    arity(1)?;
                    let a = Box::new(convert(args.into_iter().next().expect("arity checked"))?);
                    Ok(if k == "repeat" { SolverExpr::Repeat(a) } else { SolverExpr::Valid(a) })
                }
                "collect" | "every" | "interleave" => {
                    let items = list_arg(args, pos, k)?.into_iter().map(convert).collect::<Result<Vec<_>, _>>()?;
                    Ok(match k {
                        "collect" => SolverExpr::Collect(items),
                        "every" => SolverExpr::Every(items),
                        _ => SolverExpr::Interleave(items),
                    })
                }
                "prolog" => {
                    let names = list_arg(args, pos, k)?
                        .into_iter()
                        .map(|r| match r {
                            Raw::Name(n, p) => Ok((n, p)),
                            other => Err(ParseError::new(other.pos(), "prolog expects theorem names")),
                        })
                        .collect::<Result<_, _>>()?;
                    Ok(SolverExpr::Prolog(names))
                }
                _ => Err(ParseError::new(pos, format!("{k} takes no arguments"))),
            }
        }
    }
}

/// Either `f([a, b])` or `f(a, b)`.
fn list_arg(args: Vec<Raw>, pos: usize, k: &str) -> Result<Vec<Raw>, ParseError> {
    let mut args = args;
    if args.len() == 1 && matches!(args[0], Raw::List(..)) {
        let Some(Raw::List(items, _)) = args.pop() else { unreachable!() };
        return Ok(items);
    }
    if args.iter().any(|a| matches!(a, Raw::List(..))) {
        return Err(ParseError::new(pos, format!("{k} expects a list")));
    }
    Ok(args)
}

impl fmt::Display for SolverExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list(f: &mut fmt::Formatter<'_>, name: &str, items: &[SolverExpr]) -> fmt::Result {
            write!(f, "{name}([")?;
            for (i, e) in items.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{e}")?;
            }
            write!(f, "])")
        }
        match self {
            SolverExpr::Named(n, _) => write!(f, "{n}"),
            SolverExpr::Accept(n, _) => write!(f, "accept({n})"),
            SolverExpr::Rule(n, _) => write!(f, "rule({n})"),
            SolverExpr::Conj => write!(f, "conj"),
            SolverExpr::SplitConj => write!(f, "splitconj"),
            SolverExpr::Refl => write!(f, "refl"),
            SolverExpr::All => write!(f, "all"),
            SolverExpr::No => write!(f, "no"),
            SolverExpr::StringNe => write!(f, "stringne"),
            SolverExpr::Relassoc => write!(f, "relassoc"),
            SolverExpr::Concat(a, b) => write!(f, "concat({a}, {b})"),
            SolverExpr::Then(a, b) => write!(f, "then({a}, {b})"),
            SolverExpr::Repeat(a) => write!(f, "repeat({a})"),
            SolverExpr::Valid(a) => write!(f, "valid({a})"),
            SolverExpr::Collect(items) => list(f, "collect", items),
            SolverExpr::Every(items) => list(f, "every", items),
            SolverExpr::Interleave(items) => list(f, "interleave", items),
            SolverExpr::Prolog(names) => {
                write!(f, "prolog([")?;
                for (i, (n, _)) in names.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{n}")?;
                }
                write!(f, "])")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn append_solver() {
        let e = parse_solver("repeat(concat(accept(APPEND_NIL), rule(APPEND_CONS)))").unwrap();
        assert_eq!(e.to_string(), "repeat(concat(accept(APPEND_NIL), rule(APPEND_CONS)))");
    }

    #[test]
    fn aliases_and_lists() {
        let e = parse_solver("COLLECT_SLV [CONJ_SLV, ACCEPT_SLV(EVAL_QUOTED)]");
        assert!(e.is_err(), "juxtaposition is not part of the grammar");
        let e = parse_solver("COLLECT_SLV([CONJ_SLV, ACCEPT_SLV(EVAL_QUOTED), STEP])").unwrap();
        assert_eq!(e.to_string(), "collect([conj, accept(EVAL_QUOTED), STEP])");
        let e = parse_solver("[refl, all]").unwrap();
        assert_eq!(e, SolverExpr::Collect(vec![SolverExpr::Refl, SolverExpr::All]));
    }

    #[test]
    fn errors_have_positions() {
        let e = parse_solver("bogus(").unwrap_err();
        assert_eq!(e.pos, 6);
        let e = parse_solver("concat(refl)").unwrap_err();
        assert!(e.message.contains("2 argument"));
        assert!(parse_solver("accept(concat(refl, refl))").is_err());
    }
}

//! Theory files: line-oriented directives.
//!
//! ```text
//! import lists
//! tycon sexp 0
//! const Symbol : string -> sexp
//! axiom EVAL_QUOTED : !e q. EVAL e (List [Symbol "quote"; q]) q
//! theorem APPEND_HORN = conj(APPEND_NIL, APPEND_CONS)
//! solver APPEND_SLV = repeat(concat(accept(APPEND_NIL), rule(APPEND_CONS)))
//! rec solver EVAL_SLV = concat(all, then(STEP_SLV, EVAL_SLV))
//! ```
//!
//! A directive starts in column 0; indented lines continue it. Lines whose
//! first non-blank character is `#` are comments.

use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DirectiveKind {
    Import(String),
    Tycon(String, usize),
    Const(String, String),
    Axiom(String, String),
    Theorem(String, String),
    Solver { name: String, rec: bool, expr: String },
}

/// A directive with the byte offset of its payload (the text after the
/// keyword and name) in the file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Directive {
    pub kind: DirectiveKind,
    pub line: usize,
    pub offset: usize,
}

pub fn parse_directives(src: &str) -> Result<Vec<Directive>, ParseError> {
    // (first line number, offset of first char, accumulated text)
    let mut chunks: Vec<(usize, usize, String)> = Vec::new();
    let mut offset = 0;
    for (i, line) in src.split_inclusive('\n').enumerate() {
        let here = offset;
        offset += line.len();
        let trimmed = line.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if line.starts_with(char::is_whitespace) {
            match chunks.last_mut() {
                Some((_, _, text)) => text.push_str(line),
                None => return Err(ParseError::new(here, "continuation line without a directive")),
            }
        } else {
            chunks.push((i + 1, here, line.to_string()));
        }
    }
    chunks.into_iter().map(|(line, off, text)| directive(line, off, &text)).collect()
}

fn directive(line: usize, off: usize, text: &str) -> Result<Directive, ParseError> {
    let err = |at: usize, msg: String| ParseError::new(off + at, format!("line {line}: {msg}"));
    let (kw, rest) = split_word(text);
    let rest_at = text.len() - rest.len();
    let mk = |kind, payload: &str| Directive { kind, line, offset: off + (text.len() - payload.len()) };
    match kw {
        "import" => {
            let (name, tail) = split_word(rest);
            if name.is_empty() || !tail.trim().is_empty() {
                return Err(err(rest_at, "expected `import <name>`".into()));
            }
            Ok(mk(DirectiveKind::Import(name.into()), rest))
        }
        "tycon" => {
            let (name, tail) = split_word(rest);
            let arity = tail.trim().parse().map_err(|_| err(rest_at, "expected `tycon <name> <arity>`".into()))?;
            Ok(mk(DirectiveKind::Tycon(name.into(), arity), rest))
        }
        "const" | "axiom" => {
            let (name, tail) = split_word(rest);
            let tail = tail.trim_start();
            let Some(payload) = tail.strip_prefix(':').filter(|_| !name.is_empty()) else {
                return Err(err(rest_at, format!("expected `{kw} <name> : ...`")));
            };
            let kind = if kw == "const" {
                DirectiveKind::Const(name.into(), payload.trim().into())
            } else {
                DirectiveKind::Axiom(name.into(), payload.trim().into())
            };
            Ok(mk(kind, payload.trim_start()))
        }
        "theorem" | "solver" | "rec" => {
            let (rec, rest) = if kw == "rec" {
                let (k2, r2) = split_word(rest);
                if k2 != "solver" {
                    return Err(err(rest_at, "expected `rec solver`".into()));
                }
                (true, r2)
            } else {
                (false, rest)
            };
            let (name, tail) = split_word(rest);
            let Some(payload) = tail.trim_start().strip_prefix('=').filter(|_| !name.is_empty()) else {
                return Err(err(text.len() - rest.len(), "expected `<name> = ...`".into()));
            };
            let kind = if kw == "theorem" {
                DirectiveKind::Theorem(name.into(), payload.trim().into())
            } else {
                DirectiveKind::Solver { name: name.into(), rec, expr: payload.trim().into() }
            };
            Ok(mk(kind, payload.trim_start()))
        }
        other => Err(err(0, format!("unknown directive `{other}`"))),
    }
}

fn split_word(s: &str) -> (&str, &str) {
    let s = s.trim_start();
    let end = s.find(char::is_whitespace).unwrap_or(s.len());
    (&s[..end], &s[end..])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn directives() {
        let src = "# comment\nimport prelude\ntycon sexp 0\nconst APPEND : A list -> A list -> A list\naxiom X : !l.\n   APPEND [] l = l\nrec solver S = concat(all, S)\n";
        let ds = parse_directives(src).unwrap();
        assert_eq!(ds.len(), 5);
        assert_eq!(ds[0].kind, DirectiveKind::Import("prelude".into()));
        assert_eq!(ds[1].kind, DirectiveKind::Tycon("sexp".into(), 0));
        assert_eq!(ds[3].kind, DirectiveKind::Axiom("X".into(), "!l.\n   APPEND [] l = l".into()));
        assert_eq!(ds[3].line, 5);
        assert!(matches!(&ds[4].kind, DirectiveKind::Solver { rec: true, .. }));
    }

    #[test]
    fn empty_and_bad() {
        assert!(parse_directives("").unwrap().is_empty());
        assert!(parse_directives("frobnicate x").is_err());
        assert!(parse_directives("  indented first").is_err());
        assert!(parse_directives("axiom X !l. l = l").is_err());
    }
}

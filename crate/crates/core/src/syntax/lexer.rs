use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Num(u64),
    Str(String),
    Sym(&'static str),
    Quote(Sexp),
    Eof,
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub pos: usize,
}

const SYMBOLS: &[&str] = &[
    "==>", "??", "/\\", "\\/", "<=", ">=", "::", "->", "(", ")", "[", "]", ";", ",", ".", ":", "\\", "!", "?", "~",
    "=", "<", ">", "+", "#",
];

pub fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

pub fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

/// Characters that end a bare atom inside a quoted s-expression.
pub fn is_sexp_delim(c: char) -> bool {
    c.is_whitespace() || matches!(c, '(' | ')' | '\'' | '"' | '[' | ']' | ';')
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut lx = Lexer { src, pos: 0 };
    let mut out = Vec::new();
    loop {
        lx.skip_ws();
        let pos = lx.pos;
        let Some(c) = lx.peek() else {
            out.push(Token { tok: Tok::Eof, pos });
            return Ok(out);
        };
        let tok = if is_ident_start(c) {
            Tok::Ident(lx.take_while(is_ident_char).to_string())
        } else if c.is_ascii_digit() {
            let digits = lx.take_while(|c| c.is_ascii_digit());
            let n = digits.parse().map_err(|_| ParseError::new(pos, "numeral too large"))?;
            if lx.peek().is_some_and(is_ident_char) {
                return Err(ParseError::new(lx.pos, "unexpected character after numeral"));
            }
            Tok::Num(n)
        } else if c == '"' {
            Tok::Str(lx.string()?)
        } else if c == '\'' {
            lx.bump();
            Tok::Quote(lx.sexp()?)
        } else if let Some(sym) = SYMBOLS.iter().find(|s| src[pos..].starts_with(**s)) {
            lx.pos += sym.len();
            Tok::Sym(sym)
        } else {
            return Err(ParseError::new(pos, format!("unexpected character {c:?}")));
        };
        out.push(Token { tok, pos });
    }
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.bump();
        }
    }

    fn take_while(&mut self, p: impl Fn(char) -> bool) -> &'a str {
        let start = self.pos;
        while self.peek().is_some_and(&p) {
            self.bump();
        }
        &self.src[start..self.pos]
    }

    fn string(&mut self) -> Result<String, ParseError> {
        let start = self.pos;
        self.bump();
        let mut s = String::new();
        loop {
            match self.bump() {
                None => return Err(ParseError::new(start, "unterminated string literal")),
                Some('"') => return Ok(s),
                Some('\\') => match self.bump() {
                    Some('n') => s.push('\n'),
                    Some('t') => s.push('\t'),
                    Some(c @ ('"' | '\\')) => s.push(c),
                    _ => return Err(ParseError::new(self.pos, "bad escape in string literal")),
                },
                Some(c) => s.push(c),
            }
        }
    }

    fn sexp(&mut self) -> Result<Sexp, ParseError> {
        self.skip_ws();
        let pos = self.pos;
        match self.peek() {
            None => Err(ParseError::new(pos, "expected s-expression")),
            Some('(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_ws();
                    match self.peek() {
                        None => return Err(ParseError::new(self.pos, "unclosed s-expression")),
                        Some(')') => {
                            self.bump();
                            return Ok(Sexp::List(items));
                        }
                        _ => items.push(self.sexp()?),
                    }
                }
            }
            Some('\'') => {
                self.bump();
                let inner = self.sexp()?;
                Ok(Sexp::List(vec![Sexp::Atom("quote".into()), inner]))
            }
            Some(c) if is_sexp_delim(c) => Err(ParseError::new(pos, format!("unexpected {c:?} in s-expression"))),
            Some(_) => Ok(Sexp::Atom(self.take_while(|c| !is_sexp_delim(c)).to_string())),
        }
    }
}

//! Theories: signatures, named theorems and named solvers loaded from
//! theory files. The built-in theories are embedded in the library.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use indexmap::IndexMap;
use thiserror::Error;

use crate::kernel::{set_tracing, HolType, Instantiation, KernelError, Signature, Term, Theorem};
use crate::solver::{self, Solver};
use crate::stream::Stream;
use crate::syntax::theory::{parse_directives, DirectiveKind};
use crate::syntax::{parse_query, parse_solver, parse_term, parse_type, ParseError, Query, SolverExpr, SEXP_TY, SYMBOL};

const BUILTINS: &[(&str, &str)] = &[
    ("prelude", include_str!("prelude.thy")),
    ("lists", include_str!("lists.thy")),
    ("arith", include_str!("arith.thy")),
    ("lisp", include_str!("lisp.thy")),
    ("sort", include_str!("sort.thy")),
    ("lock", include_str!("lock.thy")),
];

#[derive(Debug, Clone, Error)]
pub enum TheoryError {
    #[error("{theory}:{line}:{col}: {message}")]
    Syntax { theory: String, line: usize, col: usize, message: String },
    #[error("{theory}:{line}: {source}")]
    Kernel { theory: String, line: usize, source: KernelError },
    #[error("unknown theory {0}")]
    UnknownTheory(String),
    #[error("unknown theorem {0}")]
    UnknownTheorem(String),
    #[error("unknown solver {0}")]
    UnknownSolver(String),
    #[error("{0}")]
    Invalid(String),
}

/// A solver together with the expression it was built from.
#[derive(Clone)]
pub struct NamedSolver {
    pub expr: SolverExpr,
    pub solver: Solver,
}

impl fmt::Debug for NamedSolver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.expr)
    }
}

#[derive(Clone, Debug)]
pub struct Theory {
    name: String,
    sig: Signature,
    theorems: IndexMap<String, Theorem>,
    solvers: IndexMap<String, NamedSolver>,
}

pub fn builtin_names() -> impl Iterator<Item = &'static str> {
    BUILTINS.iter().map(|(n, _)| *n)
}

pub fn builtin_source(name: &str) -> Option<&'static str> {
    BUILTINS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

/// Loads a built-in theory. Theories are built once and shared.
pub fn load_builtin(name: &str) -> Result<Arc<Theory>, TheoryError> {
    static CACHE: OnceLock<Mutex<HashMap<String, Arc<Theory>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(th) = cache.lock().unwrap_or_else(|e| e.into_inner()).get(name) {
        return Ok(th.clone());
    }
    let src = builtin_source(name).ok_or_else(|| TheoryError::UnknownTheory(name.to_string()))?;
    let th = Arc::new(Theory::from_source(name, src)?);
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    Ok(guard.entry(name.to_string()).or_insert(th).clone())
}

/// The signature of the prelude: numbers, lists and pairs.
pub fn prelude_signature() -> Signature {
    load_builtin("prelude").expect("prelude theory is well formed").signature().clone()
}

struct TraceGuard(bool);

impl Drop for TraceGuard {
    fn drop(&mut self) {
        set_tracing(self.0);
    }
}

fn line_col(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, col)
}

impl Theory {
    /// An empty theory over the logical core signature.
    pub fn empty(name: &str) -> Theory {
        Theory { name: name.to_string(), sig: Signature::new(), theorems: IndexMap::new(), solvers: IndexMap::new() }
    }

    /// Parses a theory file. Imports are resolved against the built-in
    /// theories. Theorems derived while loading always record their proofs.
    pub fn from_source(name: &str, src: &str) -> Result<Theory, TheoryError> {
        let _trace = TraceGuard(set_tracing(true));
        let syntax = |offset: usize, e: ParseError| {
            let (line, col) = line_col(src, offset + e.pos);
            TheoryError::Syntax { theory: name.to_string(), line, col, message: e.message }
        };
        let directives = parse_directives(src).map_err(|e| syntax(0, e))?;
        let mut th = Theory::empty(name);
        for d in directives {
            let kernel = |source: KernelError| TheoryError::Kernel { theory: name.to_string(), line: d.line, source };
            match d.kind {
                DirectiveKind::Import(other) => {
                    let imported = load_builtin(&other)?;
                    th.import(&imported).map_err(kernel)?;
                }
                DirectiveKind::Tycon(n, arity) => th.sig.new_type(&n, arity).map_err(kernel)?,
                DirectiveKind::Const(n, ty) => {
                    let ty = parse_type(&ty, &th.sig).map_err(|e| syntax(d.offset, e))?;
                    th.sig.new_const(&n, ty).map_err(kernel)?;
                }
                DirectiveKind::Axiom(n, body) => {
                    let t = parse_term(&body, &th.sig).map_err(|e| syntax(d.offset, e))?;
                    let thm = th.sig.new_axiom(&n, t).map_err(kernel)?;
                    th.add_theorem(&n, thm).map_err(kernel)?;
                }
                DirectiveKind::Theorem(n, expr) => {
                    let thm = th.theorem_expr(&expr).map_err(|e| match e {
                        TheoryError::Syntax { message, .. } => {
                            let (line, col) = line_col(src, d.offset);
                            TheoryError::Syntax { theory: name.to_string(), line, col, message }
                        }
                        TheoryError::Kernel { source, .. } => kernel(source),
                        other => other,
                    })?;
                    th.add_theorem(&n, thm).map_err(kernel)?;
                }
                DirectiveKind::Solver { name: n, rec, expr } => {
                    let e = parse_solver(&expr).map_err(|e| syntax(d.offset, e))?;
                    th.define_solver(&n, rec, e)?;
                }
            }
        }
        Ok(th)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn theorem(&self, name: &str) -> Option<&Theorem> {
        self.theorems.get(name)
    }

    pub fn theorems(&self) -> impl Iterator<Item = (&str, &Theorem)> {
        self.theorems.iter().map(|(n, t)| (n.as_str(), t))
    }

    pub fn solver(&self, name: &str) -> Option<&NamedSolver> {
        self.solvers.get(name)
    }

    pub fn solvers(&self) -> impl Iterator<Item = (&str, &NamedSolver)> {
        self.solvers.iter().map(|(n, s)| (n.as_str(), s))
    }

    /// Merges the declarations, theorems and solvers of `other`.
    pub fn import(&mut self, other: &Theory) -> Result<(), KernelError> {
        self.sig.absorb(&other.sig)?;
        for (n, t) in &other.theorems {
            self.add_theorem(n, t.clone())?;
        }
        for (n, s) in &other.solvers {
            self.solvers.entry(n.clone()).or_insert_with(|| s.clone());
        }
        Ok(())
    }

    /// Adds a named theorem; re-adding an alpha-equivalent theorem is a no-op.
    pub fn add_theorem(&mut self, name: &str, th: Theorem) -> Result<(), KernelError> {
        match self.theorems.get(name) {
            Some(old) if old.alpha_eq(&th) => Ok(()),
            Some(_) => Err(KernelError::Duplicate(format!("theorem {name}"))),
            None => {
                self.theorems.insert(name.to_string(), th);
                Ok(())
            }
        }
    }

    /// Defines a named solver. A recursive solver may refer to itself; each
    /// self reference is applied lazily.
    pub fn define_solver(&mut self, name: &str, rec: bool, expr: SolverExpr) -> Result<(), TheoryError> {
        if self.solvers.contains_key(name) {
            return Err(TheoryError::Invalid(format!("solver {name} is already defined")));
        }
        let solver = if rec {
            let cell: Arc<OnceLock<Solver>> = Arc::new(OnceLock::new());
            let knot = cell.clone();
            let placeholder: Solver = Arc::new(move |g: &solver::Goal| {
                let knot = knot.clone();
                let g = g.clone();
                Stream::lazy(move || knot.get().expect("recursive solver is initialised")(&g))
            });
            self.solvers.insert(name.to_string(), NamedSolver { expr: expr.clone(), solver: placeholder });
            let compiled = self.compile(&expr);
            match compiled {
                Ok(s) => {
                    let _ = cell.set(s.clone());
                    s
                }
                Err(e) => {
                    self.solvers.shift_remove(name);
                    return Err(e);
                }
            }
        } else {
            self.compile(&expr)?
        };
        self.solvers.insert(name.to_string(), NamedSolver { expr, solver });
        Ok(())
    }

    fn lookup_theorem(&self, name: &str) -> Result<Theorem, TheoryError> {
        self.theorems.get(name).cloned().ok_or_else(|| TheoryError::UnknownTheorem(name.to_string()))
    }

    /// Builds a solver from an expression over this theory's names.
    pub fn compile(&self, expr: &SolverExpr) -> Result<Solver, TheoryError> {
        let many = |es: &[SolverExpr]| es.iter().map(|e| self.compile(e)).collect::<Result<Vec<_>, _>>();
        Ok(match expr {
            SolverExpr::Named(n, _) => {
                self.solvers.get(n).map(|s| s.solver.clone()).ok_or_else(|| TheoryError::UnknownSolver(n.clone()))?
            }
            SolverExpr::Accept(n, _) => solver::accept(self.lookup_theorem(n)?),
            SolverExpr::Rule(n, _) => {
                let th = self.lookup_theorem(n)?;
                if th.concl().strip_forall().1.dest_imp().is_none() {
                    return Err(TheoryError::Invalid(format!("rule({n}): {n} is not an implication")));
                }
                solver::rule(th)
            }
            SolverExpr::Conj => solver::conj(),
            SolverExpr::SplitConj => solver::split_conj(),
            SolverExpr::Refl => solver::refl(),
            SolverExpr::All => solver::all(),
            SolverExpr::No => solver::no(),
            SolverExpr::StringNe => solver::string_ne(),
            SolverExpr::Relassoc => {
                solver::relassoc(self.lookup_theorem("RELASSOC_HEAD")?, self.lookup_theorem("RELASSOC_TAIL")?)
            }
            SolverExpr::Concat(a, b) => solver::concat(self.compile(a)?, self.compile(b)?),
            SolverExpr::Collect(es) => solver::collect(many(es)?),
            SolverExpr::Then(a, b) => solver::then(self.compile(a)?, self.compile(b)?),
            SolverExpr::Every(es) => solver::every(many(es)?),
            SolverExpr::Repeat(a) => solver::repeat(self.compile(a)?),
            SolverExpr::Interleave(es) => solver::interleave(many(es)?),
            SolverExpr::Prolog(names) => {
                solver::prolog(names.iter().map(|(n, _)| self.lookup_theorem(n)).collect::<Result<_, _>>()?)
            }
            SolverExpr::Valid(a) => solver::valid(a.to_string(), self.compile(a)?),
        })
    }

    /// Parses and compiles a solver expression.
    pub fn eval_solver(&self, src: &str) -> Result<Solver, TheoryError> {
        let e = parse_solver(src).map_err(|e| TheoryError::Syntax {
            theory: "solver".into(),
            line: 1,
            col: e.pos + 1,
            message: e.message,
        })?;
        self.compile(&e)
    }

    pub fn parse_term(&self, src: &str) -> Result<Term, TheoryError> {
        parse_term(src, &self.sig).map_err(|e| input_error("term", e))
    }

    pub fn parse_query(&self, src: &str) -> Result<Query, TheoryError> {
        parse_query(src, &self.sig).map_err(|e| input_error("query", e))
    }

    /// Evaluates `name`, `conj(e1, e2)` or `inst_type(e, A := ty, ...)`.
    pub fn theorem_expr(&self, src: &str) -> Result<Theorem, TheoryError> {
        let src = src.trim();
        let bad = |msg: String| TheoryError::Syntax { theory: self.name.clone(), line: 0, col: 0, message: msg };
        let Some(open) = src.find('(') else {
            return self.lookup_theorem(src);
        };
        let Some(inner) = src[open + 1..].strip_suffix(')') else {
            return Err(bad(format!("unbalanced parentheses in `{src}`")));
        };
        let args = split_args(inner).ok_or_else(|| bad(format!("unbalanced parentheses in `{src}`")))?;
        let kernel = |source| TheoryError::Kernel { theory: self.name.clone(), line: 0, source };
        match src[..open].trim() {
            "conj" => {
                let mut it = args.iter().map(|a| self.theorem_expr(a));
                let first = it.next().ok_or_else(|| bad("conj expects arguments".into()))??;
                it.try_fold(first, |acc, th| Theorem::conj(&acc, &th?).map_err(kernel))
            }
            "inst_type" => {
                let (first, rest) = args.split_first().ok_or_else(|| bad("inst_type expects arguments".into()))?;
                let th = self.theorem_expr(first)?;
                let mut inst = Instantiation::new();
                for a in rest {
                    let (var, ty) = a.split_once(":=").ok_or_else(|| bad(format!("expected `A := type`, found `{a}`")))?;
                    let ty = parse_type(ty, &self.sig).map_err(|e| bad(e.message))?;
                    inst.ty.insert(var.trim().into(), ty);
                }
                Theorem::inst(&inst, &th).map_err(kernel)
            }
            other => Err(bad(format!("unknown theorem operator `{other}`"))),
        }
    }
}

fn input_error(what: &str, e: ParseError) -> TheoryError {
    TheoryError::Syntax { theory: what.to_string(), line: 1, col: e.pos + 1, message: e.message }
}

/// Splits at top-level commas.
fn split_args(s: &str) -> Option<Vec<&str>> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => {
                depth -= 1;
                if depth < 0 {
                    return None;
                }
            }
            ',' if depth == 0 => {
                out.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return None;
    }
    let last = s[start..].trim();
    if !last.is_empty() || !out.is_empty() {
        out.push(last);
    }
    Some(out)
}

/// Replaces the first free variable of `t` by a concrete value named `name`:
/// a string literal for `string` variables, `Symbol "name"` for `sexp`
/// variables.
pub fn rename_fresh(t: &Term, name: &str) -> Result<Term, TheoryError> {
    let v = t.frees().into_iter().next().ok_or_else(|| TheoryError::Invalid("term has no free variables".into()))?;
    let ty = v.type_of();
    let value = match ty.dest_con() {
        Some((n, [])) if &**n == crate::kernel::term::STRING_TY => Term::string_lit(name),
        Some((n, [])) if &**n == SEXP_TY => {
            let sym = Term::constant(SYMBOL, HolType::fun(HolType::con(crate::kernel::term::STRING_TY, vec![]), ty.clone()));
            Term::comb(sym, Term::string_lit(name)).map_err(|e| TheoryError::Invalid(e.to_string()))?
        }
        _ => return Err(TheoryError::Invalid(format!("cannot rename variable `{v}` of type {ty}"))),
    };
    Ok(t.vsubst(&[(v, value)].into_iter().collect()))
}

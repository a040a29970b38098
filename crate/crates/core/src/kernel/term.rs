//! Typed lambda-calculus terms.
//!
//! Terms are immutable and reference counted. Every constructor reachable
//! from outside the kernel checks types, so a `Term` is always well typed.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeSet, HashSet};
use std::hash::{Hash, Hasher};
use std::fmt;
use std::sync::Arc;

use indexmap::IndexMap;

use super::types::{HolType, TySubst};
use super::{KernelError, Name};

#[derive(Clone)]
pub struct Term(Arc<TermInner>);

struct TermInner {
    node: TermNode,
    flags: u8,
    hash: u64,
}

impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.hash == other.0.hash && self.0.flags == other.0.flags && self.0.node == other.0.node)
    }
}

impl Eq for Term {}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

fn node_hash(node: &TermNode) -> u64 {
    let mut h = DefaultHasher::new();
    match node {
        TermNode::Var(n, ty) => (0u8, n, ty).hash(&mut h),
        TermNode::Const(n, ty) => (1u8, n, ty).hash(&mut h),
        TermNode::Comb(a, b) => (2u8, a.0.hash, b.0.hash).hash(&mut h),
        TermNode::Abs(a, b) => (3u8, a.0.hash, b.0.hash).hash(&mut h),
    }
    h.finish()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TermNode {
    Var(Name, HolType),
    Const(Name, HolType),
    Comb(Term, Term),
    Abs(Term, Term),
}

const HAS_VARS: u8 = 1;
const HAS_TYVARS: u8 = 2;

/// Term substitution, keyed by variables. Insertion order is kept so that
/// printed instantiations are deterministic.
pub type TmSubst = IndexMap<Term, Term>;

pub const EQ: &str = "=";
pub const CONJ: &str = "/\\";
pub const DISJ: &str = "\\/";
pub const IMP: &str = "==>";
pub const NEG: &str = "~";
pub const FORALL: &str = "!";
pub const EXISTS: &str = "?";
pub const META_EXISTS: &str = "??";
pub const STRING_TY: &str = "string";

impl Term {
    fn from_node(node: TermNode) -> Term {
        let flags = match &node {
            TermNode::Var(_, ty) => HAS_VARS | if ty.has_tyvars() { HAS_TYVARS } else { 0 },
            TermNode::Const(_, ty) => {
                if ty.has_tyvars() {
                    HAS_TYVARS
                } else {
                    0
                }
            }
            TermNode::Comb(a, b) | TermNode::Abs(a, b) => a.0.flags | b.0.flags,
        };
        let hash = node_hash(&node);
        Term(Arc::new(TermInner { node, flags, hash }))
    }

    pub fn var(name: impl Into<Name>, ty: HolType) -> Term {
        Term::from_node(TermNode::Var(name.into(), ty))
    }

    /// Builds a constant without consulting a signature. Use
    /// [`Signature::mk_const`](super::Signature::mk_const) for checked construction.
    pub fn constant(name: impl Into<Name>, ty: HolType) -> Term {
        Term::from_node(TermNode::Const(name.into(), ty))
    }

    /// A string literal, a constant of type `string` whose name is the quoted text.
    pub fn string_lit(text: &str) -> Term {
        Term::constant(format!("{text:?}"), HolType::con(STRING_TY, vec![]))
    }

    pub fn comb(f: Term, a: Term) -> Result<Term, KernelError> {
        let fty = f.type_of();
        match fty.dest_fun() {
            Some((dom, _)) if *dom == a.type_of() => Ok(Term::comb_unchecked(f, a)),
            Some((dom, _)) => Err(KernelError::TypeMismatch {
                expected: dom.clone(),
                found: a.type_of(),
                context: format!("applying {f}"),
            }),
            None => Err(KernelError::NotAFunction(f.to_string())),
        }
    }

    pub(crate) fn comb_unchecked(f: Term, a: Term) -> Term {
        Term::from_node(TermNode::Comb(f, a))
    }

    pub fn list_comb(f: Term, args: impl IntoIterator<Item = Term>) -> Result<Term, KernelError> {
        args.into_iter().try_fold(f, Term::comb)
    }

    pub fn abs(v: Term, body: Term) -> Result<Term, KernelError> {
        if !v.is_var() {
            return Err(KernelError::Shape("abstraction over a non-variable"));
        }
        Ok(Term::from_node(TermNode::Abs(v, body)))
    }

    pub fn node(&self) -> &TermNode {
        &self.0.node
    }

    pub fn ptr_eq(&self, other: &Term) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub fn has_vars(&self) -> bool {
        self.0.flags & HAS_VARS != 0
    }

    pub fn has_tyvars(&self) -> bool {
        self.0.flags & HAS_TYVARS != 0
    }

    pub fn type_of(&self) -> HolType {
        let mut t = self;
        let mut depth = 0usize;
        loop {
            match t.node() {
                TermNode::Var(_, ty) | TermNode::Const(_, ty) => {
                    let mut ty = ty.clone();
                    for _ in 0..depth {
                        ty = ty.dest_fun().expect("well-typed application").1.clone();
                    }
                    return ty;
                }
                TermNode::Comb(f, _) => {
                    depth += 1;
                    t = f;
                }
                TermNode::Abs(v, b) => {
                    let mut ty = HolType::fun(v.type_of(), b.type_of());
                    for _ in 0..depth {
                        ty = ty.dest_fun().expect("well-typed application").1.clone();
                    }
                    return ty;
                }
            }
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self.node(), TermNode::Var(..))
    }

    pub fn is_const(&self) -> bool {
        matches!(self.node(), TermNode::Const(..))
    }

    pub fn dest_var(&self) -> Option<(&Name, &HolType)> {
        match self.node() {
            TermNode::Var(n, ty) => Some((n, ty)),
            _ => None,
        }
    }

    pub fn dest_const(&self) -> Option<(&Name, &HolType)> {
        match self.node() {
            TermNode::Const(n, ty) => Some((n, ty)),
            _ => None,
        }
    }

    pub fn dest_comb(&self) -> Option<(&Term, &Term)> {
        match self.node() {
            TermNode::Comb(f, a) => Some((f, a)),
            _ => None,
        }
    }

    pub fn dest_abs(&self) -> Option<(&Term, &Term)> {
        match self.node() {
            TermNode::Abs(v, b) => Some((v, b)),
            _ => None,
        }
    }

    pub fn name(&self) -> Option<&Name> {
        match self.node() {
            TermNode::Var(n, _) | TermNode::Const(n, _) => Some(n),
            _ => None,
        }
    }

    pub fn is_const_named(&self, name: &str) -> bool {
        matches!(self.node(), TermNode::Const(n, _) if &**n == name)
    }

    /// Head and arguments of an iterated application.
    pub fn strip_comb(&self) -> (&Term, Vec<&Term>) {
        let mut args = Vec::new();
        let mut t = self;
        while let TermNode::Comb(f, a) = t.node() {
            args.push(a);
            t = f;
        }
        args.reverse();
        (t, args)
    }

    /// `op l r` with `op` the named constant.
    pub fn dest_binop(&self, op: &str) -> Option<(&Term, &Term)> {
        let (fl, r) = self.dest_comb()?;
        let (f, l) = fl.dest_comb()?;
        f.is_const_named(op).then_some((l, r))
    }

    pub fn dest_eq(&self) -> Option<(&Term, &Term)> {
        self.dest_binop(EQ)
    }

    pub fn dest_conj(&self) -> Option<(&Term, &Term)> {
        self.dest_binop(CONJ)
    }

    pub fn dest_imp(&self) -> Option<(&Term, &Term)> {
        self.dest_binop(IMP)
    }

    pub fn dest_neg(&self) -> Option<&Term> {
        let (f, a) = self.dest_comb()?;
        f.is_const_named(NEG).then_some(a)
    }

    /// `q (\v. body)` for the binder constant `q`.
    pub fn dest_binder(&self, q: &str) -> Option<(&Term, &Term)> {
        let (f, a) = self.dest_comb()?;
        if f.is_const_named(q) {
            a.dest_abs()
        } else {
            None
        }
    }

    pub fn dest_forall(&self) -> Option<(&Term, &Term)> {
        self.dest_binder(FORALL)
    }

    pub fn dest_exists_meta(&self) -> Option<(&Term, &Term)> {
        self.dest_binder(META_EXISTS)
    }

    pub fn strip_forall(&self) -> (Vec<Term>, Term) {
        strip_binder(self, FORALL)
    }

    /// Flattens a right-nested conjunction.
    pub fn conjuncts(&self) -> Vec<Term> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            match t.dest_conj() {
                Some((l, r)) => {
                    stack.push(r);
                    stack.push(l);
                }
                None => out.push(t.clone()),
            }
        }
        out
    }

    pub fn dest_string_lit(&self) -> Option<&str> {
        match self.node() {
            TermNode::Const(n, ty)
                if n.starts_with('"') && ty.dest_con().is_some_and(|(c, _)| &**c == STRING_TY) =>
            {
                Some(&n[1..n.len() - 1])
            }
            _ => None,
        }
    }

    /// Free variables in order of first occurrence.
    pub fn frees(&self) -> Vec<Term> {
        let mut acc = Vec::new();
        let mut seen = HashSet::new();
        collect_frees(self, &mut Vec::new(), &mut seen, &mut acc);
        acc
    }

    /// Whether the variable `v` occurs free in `self`.
    pub fn free_in(&self, v: &Term) -> bool {
        fn go(t: &Term, v: &Term) -> bool {
            if !t.has_vars() {
                return false;
            }
            match t.node() {
                TermNode::Var(..) => t == v,
                TermNode::Const(..) => false,
                TermNode::Comb(f, a) => go(f, v) || go(a, v),
                TermNode::Abs(bv, b) => bv != v && go(b, v),
            }
        }
        go(self, v)
    }

    pub fn tyvars(&self) -> BTreeSet<Name> {
        let mut acc = BTreeSet::new();
        fn go(t: &Term, acc: &mut BTreeSet<Name>) {
            if !t.has_tyvars() {
                return;
            }
            match t.node() {
                TermNode::Var(_, ty) | TermNode::Const(_, ty) => ty.collect_tyvars(acc),
                TermNode::Comb(a, b) | TermNode::Abs(a, b) => {
                    go(a, acc);
                    go(b, acc)
                }
            }
        }
        go(self, &mut acc);
        acc
    }

    /// Every constant occurring in the term, with its type instance.
    pub fn constants(&self) -> Vec<(Name, HolType)> {
        let mut acc = Vec::new();
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            match t.node() {
                TermNode::Const(n, ty) => acc.push((n.clone(), ty.clone())),
                TermNode::Var(..) => {}
                TermNode::Comb(a, b) | TermNode::Abs(a, b) => {
                    stack.push(b);
                    stack.push(a);
                }
            }
        }
        acc
    }

    /// Equality up to renaming of bound variables.
    pub fn alpha_eq(&self, other: &Term) -> bool {
        alpha_eq_env(self, other, &mut Vec::new())
    }

    /// Capture-avoiding simultaneous substitution of free variables.
    pub fn vsubst(&self, theta: &TmSubst) -> Term {
        if theta.is_empty() {
            return self.clone();
        }
        vsubst_rec(self, theta, &mut Vec::new())
    }

    /// Instantiates type variables throughout the term.
    pub fn inst_type(&self, theta: &TySubst) -> Term {
        if theta.is_empty() || !self.has_tyvars() {
            return self.clone();
        }
        inst_type_rec(self, theta)
    }

    /// Renames `v` to a primed variant not among `avoid`.
    pub fn variant(avoid: &[Term], v: &Term) -> Term {
        let (name, ty) = v.dest_var().expect("variant of a variable");
        let taken: HashSet<&str> = avoid.iter().filter_map(|t| t.name()).map(|n| &**n).collect();
        let mut candidate = name.to_string();
        while taken.contains(candidate.as_str()) {
            candidate.push('\'');
        }
        Term::var(candidate, ty.clone())
    }
}

fn strip_binder(t: &Term, q: &str) -> (Vec<Term>, Term) {
    let mut vars = Vec::new();
    let mut body = t;
    while let Some((v, b)) = body.dest_binder(q) {
        vars.push(v.clone());
        body = b;
    }
    (vars, body.clone())
}

fn collect_frees(t: &Term, bound: &mut Vec<Term>, seen: &mut HashSet<Term>, acc: &mut Vec<Term>) {
    if !t.has_vars() {
        return;
    }
    match t.node() {
        TermNode::Var(..) => {
            if !bound.contains(t) && seen.insert(t.clone()) {
                acc.push(t.clone());
            }
        }
        TermNode::Const(..) => {}
        TermNode::Comb(f, a) => {
            collect_frees(f, bound, seen, acc);
            collect_frees(a, bound, seen, acc);
        }
        TermNode::Abs(v, b) => {
            bound.push(v.clone());
            collect_frees(b, bound, seen, acc);
            bound.pop();
        }
    }
}

fn alpha_eq_env(a: &Term, b: &Term, env: &mut Vec<(Term, Term)>) -> bool {
    if env.is_empty() && a.ptr_eq(b) {
        return true;
    }
    match (a.node(), b.node()) {
        (TermNode::Var(..), TermNode::Var(..)) => {
            for (x, y) in env.iter().rev() {
                let ax = x == a;
                let by = y == b;
                if ax || by {
                    return ax && by;
                }
            }
            a == b
        }
        (TermNode::Const(..), TermNode::Const(..)) => a == b,
        (TermNode::Comb(f1, x1), TermNode::Comb(f2, x2)) => {
            alpha_eq_env(f1, f2, env) && alpha_eq_env(x1, x2, env)
        }
        (TermNode::Abs(v1, b1), TermNode::Abs(v2, b2)) => {
            if v1.type_of() != v2.type_of() {
                return false;
            }
            env.push((v1.clone(), v2.clone()));
            let r = alpha_eq_env(b1, b2, env);
            env.pop();
            r
        }
        _ => false,
    }
}

fn vsubst_rec(t: &Term, theta: &TmSubst, shadow: &mut Vec<Term>) -> Term {
    if !t.has_vars() {
        return t.clone();
    }
    match t.node() {
        TermNode::Var(..) => {
            if shadow.contains(t) {
                return t.clone();
            }
            theta.get(t).cloned().unwrap_or_else(|| t.clone())
        }
        TermNode::Const(..) => t.clone(),
        TermNode::Comb(f, a) => {
            let f2 = vsubst_rec(f, theta, shadow);
            let a2 = vsubst_rec(a, theta, shadow);
            if f2.ptr_eq(f) && a2.ptr_eq(a) {
                t.clone()
            } else {
                Term::comb_unchecked(f2, a2)
            }
        }
        TermNode::Abs(v, b) => {
            // A binding x |-> s captures when x is free in the body and v is free in s.
            let captures = theta.iter().any(|(x, s)| {
                x != v && !shadow.contains(x) && s.free_in(v) && b.free_in(x)
            });
            if captures {
                let mut avoid = b.frees();
                for (x, s) in theta.iter() {
                    avoid.push(x.clone());
                    if b.free_in(x) {
                        avoid.extend(s.frees());
                    }
                }
                let fresh = Term::variant(&avoid, v);
                let mut renamed = TmSubst::new();
                renamed.insert(v.clone(), fresh.clone());
                let b1 = vsubst_rec(b, &renamed, &mut Vec::new());
                let b2 = vsubst_rec(&b1, theta, shadow);
                Term::from_node(TermNode::Abs(fresh, b2))
            } else {
                shadow.push(v.clone());
                let b2 = vsubst_rec(b, theta, shadow);
                shadow.pop();
                if b2.ptr_eq(b) {
                    t.clone()
                } else {
                    Term::from_node(TermNode::Abs(v.clone(), b2))
                }
            }
        }
    }
}

fn inst_type_rec(t: &Term, theta: &TySubst) -> Term {
    if !t.has_tyvars() {
        return t.clone();
    }
    match t.node() {
        TermNode::Var(n, ty) => Term::var(n.clone(), ty.subst(theta)),
        TermNode::Const(n, ty) => Term::constant(n.clone(), ty.subst(theta)),
        TermNode::Comb(f, a) => Term::comb_unchecked(inst_type_rec(f, theta), inst_type_rec(a, theta)),
        TermNode::Abs(v, b) => {
            let (vn, vty) = v.dest_var().expect("bound variable");
            let new_ty = vty.subst(theta);
            // Two distinct variables may become identical once their types agree;
            // rename the binder first if a free variable would be captured.
            let clash = b.frees().iter().any(|w| {
                w != v && w.name() == Some(vn) && w.dest_var().unwrap().1.subst(theta) == new_ty
            });
            if clash {
                let mut avoid = b.frees();
                avoid.push(v.clone());
                let fresh = Term::variant(&avoid, v);
                let mut renamed = TmSubst::new();
                renamed.insert(v.clone(), fresh.clone());
                let b1 = vsubst_rec(b, &renamed, &mut Vec::new());
                inst_type_rec(&Term::from_node(TermNode::Abs(fresh, b1)), theta)
            } else {
                Term::from_node(TermNode::Abs(
                    Term::var(vn.clone(), new_ty),
                    inst_type_rec(b, theta),
                ))
            }
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{self}`")
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::print_term(self))
    }
}

/// Builders for the logical constants every signature provides.
pub mod mk {
    use super::*;

    fn bool_op(name: &str) -> Term {
        let b = HolType::bool();
        Term::constant(name, HolType::funs([b.clone(), b.clone()], b))
    }

    pub fn eq(l: Term, r: Term) -> Result<Term, KernelError> {
        let ty = l.type_of();
        let op = Term::constant(EQ, HolType::funs([ty.clone(), ty], HolType::bool()));
        Term::list_comb(op, [l, r])
    }

    pub fn conj(l: Term, r: Term) -> Result<Term, KernelError> {
        Term::list_comb(bool_op(CONJ), [l, r])
    }

    pub fn imp(l: Term, r: Term) -> Result<Term, KernelError> {
        Term::list_comb(bool_op(IMP), [l, r])
    }

    pub fn neg(t: Term) -> Result<Term, KernelError> {
        let b = HolType::bool();
        Term::comb(Term::constant(NEG, HolType::fun(b.clone(), b)), t)
    }

    pub fn binder(q: &str, v: Term, body: Term) -> Result<Term, KernelError> {
        let vty = v.type_of();
        let qty = HolType::fun(HolType::fun(vty, HolType::bool()), HolType::bool());
        Term::comb(Term::constant(q, qty), Term::abs(v, body)?)
    }

    pub fn forall(v: Term, body: Term) -> Result<Term, KernelError> {
        binder(FORALL, v, body)
    }

    pub fn list_forall(vs: impl IntoIterator<Item = Term>, body: Term) -> Result<Term, KernelError> {
        let vs: Vec<_> = vs.into_iter().collect();
        vs.into_iter().rev().try_fold(body, |acc, v| forall(v, acc))
    }

    pub fn list_conj(ts: Vec<Term>) -> Result<Term, KernelError> {
        let mut it = ts.into_iter().rev();
        let last = it.next().ok_or(KernelError::Shape("empty conjunction"))?;
        it.try_fold(last, |acc, t| conj(t, acc))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn num() -> HolType {
        HolType::con("num", vec![])
    }

    fn v(n: &str) -> Term {
        Term::var(n, num())
    }

    fn lam(x: &Term, b: &Term) -> Term {
        Term::abs(x.clone(), b.clone()).unwrap()
    }

    #[test]
    fn type_of_examples() {
        let nl = HolType::con("list", vec![num()]);
        let app = Term::constant("APPEND", HolType::funs([nl.clone(), nl.clone()], nl.clone()));
        let one = Term::var("l", nl.clone());
        let t = Term::comb(app, one).unwrap();
        assert_eq!(t.type_of(), HolType::fun(nl.clone(), nl));
        assert_eq!(Term::var("x", HolType::bool()).type_of(), HolType::bool());
        assert_eq!(lam(&v("x"), &v("x")).type_of(), HolType::fun(num(), num()));
    }

    #[test]
    fn alpha_eq_examples() {
        let (x, y, z) = (v("x"), v("y"), v("z"));
        assert!(lam(&x, &x).alpha_eq(&lam(&y, &y)));
        assert!(lam(&x, &z).alpha_eq(&lam(&y, &z)));
        assert!(!lam(&x, &x).alpha_eq(&lam(&x, &z)));
        // \x. y vs \y. y: free y against bound y
        assert!(!lam(&x, &y).alpha_eq(&lam(&y, &y)));
    }

    #[test]
    fn vsubst_avoids_capture() {
        let (x, y) = (v("x"), v("y"));
        let t = lam(&y, &x);
        let mut theta = TmSubst::new();
        theta.insert(x.clone(), y.clone());
        let r = t.vsubst(&theta);
        let (bv, body) = r.dest_abs().unwrap();
        assert_eq!(bv.name().unwrap().as_ref(), "y'");
        assert_eq!(body, &y);
        assert!(r.alpha_eq(&lam(&v("w"), &y)));
    }

    #[test]
    fn vsubst_respects_shadowing() {
        let x = v("x");
        let t = lam(&x, &x);
        let mut theta = TmSubst::new();
        theta.insert(x.clone(), v("q"));
        assert!(t.vsubst(&theta).ptr_eq(&t));
    }

    #[test]
    fn destructors() {
        let b = HolType::bool();
        let (a, bb, c) = (Term::var("A", b.clone()), Term::var("B", b.clone()), Term::var("C", b));
        let ab = mk::conj(a.clone(), bb.clone()).unwrap();
        assert_eq!(ab.dest_conj(), Some((&a, &bb)));
        assert!(ab.dest_eq().is_none());
        let abc = mk::conj(a.clone(), mk::conj(bb.clone(), c.clone()).unwrap()).unwrap();
        assert_eq!(abc.conjuncts(), vec![a, bb, c]);
        let p = Term::constant("P", HolType::funs([num(), num()], HolType::bool()));
        let (x, y) = (v("x"), v("y"));
        let body = Term::list_comb(p, [x.clone(), y.clone()]).unwrap();
        let all = mk::list_forall([x.clone(), y.clone()], body.clone()).unwrap();
        assert_eq!(all.strip_forall(), (vec![x, y], body));
    }

    #[test]
    fn inst_type_renames_on_type_clash() {
        // \x:A. x:num  must not become  \x:num. x:num
        let a = HolType::var("A");
        let xa = Term::var("x", a);
        let xn = v("x");
        let t = lam(&xa, &xn);
        let theta: TySubst = [("A".into(), num())].into_iter().collect();
        let r = t.inst_type(&theta);
        let (bv, body) = r.dest_abs().unwrap();
        assert_ne!(bv, body);
        assert_eq!(body, &xn);
    }

    #[test]
    fn ill_typed_comb_rejected() {
        let f = Term::constant("SUC", HolType::fun(num(), num()));
        assert!(Term::comb(f.clone(), Term::var("b", HolType::bool())).is_err());
        assert!(Term::comb(v("x"), v("y")).is_err());
        assert!(Term::comb(f, v("y")).is_ok());
    }
}

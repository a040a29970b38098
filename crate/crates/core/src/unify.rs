//! First-order unification and matching over kernel terms.
//!
//! Only variables whose names are in the supplied metavariable set may be
//! bound. Type variables are always instantiable; types are unified alongside
//! terms. Terms under binders are compared up to α-conversion only.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::kernel::{HolType, Instantiation, Name, Term, TermNode, Theorem, TmSubst, TySubst, TypeNode};

/// Set of unifiable variable names.
pub type MetaSet = im::HashSet<Name>;

/// Generator of machine variables `_N` and type variables `?N`.
///
/// User identifiers of the form `_N` are rejected by the parser, so generated
/// names never collide with parsed ones.
#[derive(Clone, Debug, Default)]
pub struct FreshSource(Arc<AtomicU64>);

impl FreshSource {
    pub fn new() -> FreshSource {
        FreshSource(Arc::new(AtomicU64::new(1)))
    }

    fn next(&self) -> u64 {
        self.0.fetch_add(1, Ordering::Relaxed)
    }

    pub fn fresh_var(&self, ty: HolType) -> Term {
        Term::var(format!("_{}", self.next()), ty)
    }

    pub fn fresh_tyvar(&self) -> HolType {
        HolType::var(format!("?{}", self.next()))
    }

    /// Number of names handed out so far.
    pub fn issued(&self) -> u64 {
        self.0.load(Ordering::Relaxed) - 1
    }
}

/// Whether `name` lies in the reserved machine-variable namespace `_[0-9]+`.
pub fn is_fresh_name(name: &str) -> bool {
    name.len() > 1 && name.starts_with('_') && name[1..].bytes().all(|b| b.is_ascii_digit())
}

pub fn occurs_in(v: &Term, t: &Term) -> bool {
    t.free_in(v)
}

const LOCAL_PREFIX: &str = "%";

struct Unifier<'a> {
    metas: &'a MetaSet,
    ty: TySubst,
    // name -> (variable as written, bound value)
    tm: HashMap<Name, (Term, Term)>,
    order: Vec<Name>,
    locals: u32,
}

impl<'a> Unifier<'a> {
    fn new(metas: &'a MetaSet) -> Self {
        Unifier { metas, ty: TySubst::new(), tm: HashMap::new(), order: Vec::new(), locals: 0 }
    }

    fn is_meta<'t>(&self, t: &'t Term) -> Option<&'t Name> {
        match t.node() {
            TermNode::Var(n, _) if self.metas.contains(n) => Some(n),
            _ => None,
        }
    }

    fn walk_ty(&self, ty: &HolType) -> HolType {
        let mut ty = ty.clone();
        while let TypeNode::Var(n) = ty.node() {
            match self.ty.get(n) {
                Some(t) => ty = t.clone(),
                None => break,
            }
        }
        ty
    }

    fn ty_occurs(&self, v: &str, ty: &HolType) -> bool {
        let ty = self.walk_ty(ty);
        match ty.node() {
            TypeNode::Var(n) => &**n == v,
            TypeNode::Con(_, args) => args.iter().any(|a| self.ty_occurs(v, a)),
        }
    }

    fn unify_types(&mut self, a: &HolType, b: &HolType) -> bool {
        if a.ptr_eq(b) {
            return true;
        }
        let a = self.walk_ty(a);
        let b = self.walk_ty(b);
        match (a.node(), b.node()) {
            (TypeNode::Var(x), TypeNode::Var(y)) if x == y => true,
            (TypeNode::Var(x), _) => {
                if self.ty_occurs(x, &b) {
                    return false;
                }
                self.ty.insert(x.clone(), b.clone());
                true
            }
            (_, TypeNode::Var(y)) => {
                if self.ty_occurs(y, &a) {
                    return false;
                }
                self.ty.insert(y.clone(), a.clone());
                true
            }
            (TypeNode::Con(n1, a1), TypeNode::Con(n2, a2)) => {
                n1 == n2 && a1.len() == a2.len() && a1.iter().zip(a2).all(|(x, y)| self.unify_types(x, y))
            }
        }
    }

    fn walk(&self, t: &Term) -> Term {
        let mut t = t.clone();
        while let TermNode::Var(n, _) = t.node() {
            match self.tm.get(n) {
                Some((_, v)) => t = v.clone(),
                None => break,
            }
        }
        t
    }

    fn occurs(&self, name: &Name, t: &Term) -> bool {
        if !t.has_vars() {
            return false;
        }
        match t.node() {
            TermNode::Var(n, _) => {
                if n == name {
                    return true;
                }
                match self.tm.get(n) {
                    Some((_, v)) => self.occurs(name, v),
                    None => false,
                }
            }
            TermNode::Const(..) => false,
            TermNode::Comb(f, a) => self.occurs(name, f) || self.occurs(name, a),
            TermNode::Abs(_, b) => self.occurs(name, b),
        }
    }

    fn bind(&mut self, var: &Term, t: &Term) -> bool {
        let (name, vty) = var.dest_var().expect("binding a variable");
        if self.occurs(name, t) {
            return false;
        }
        if !self.unify_types(vty, &t.type_of()) {
            return false;
        }
        self.order.push(name.clone());
        self.tm.insert(name.clone(), (var.clone(), t.clone()));
        true
    }

    fn unify(&mut self, a: &Term, b: &Term) -> bool {
        if a.ptr_eq(b) {
            return true;
        }
        let a = self.walk(a);
        let b = self.walk(b);
        if a.ptr_eq(&b) {
            return true;
        }
        match (a.node(), b.node()) {
            (TermNode::Var(x, tx), TermNode::Var(y, ty)) if x == y => self.unify_types(tx, ty),
            _ if self.is_meta(&a).is_some() => self.bind(&a, &b),
            _ if self.is_meta(&b).is_some() => self.bind(&b, &a),
            (TermNode::Const(c1, t1), TermNode::Const(c2, t2)) => c1 == c2 && self.unify_types(t1, t2),
            (TermNode::Comb(f1, x1), TermNode::Comb(f2, x2)) => self.unify(f1, f2) && self.unify(x1, x2),
            (TermNode::Abs(v1, b1), TermNode::Abs(v2, b2)) => {
                if !self.unify_types(&v1.type_of(), &v2.type_of()) {
                    return false;
                }
                self.locals += 1;
                let local = Term::var(format!("{LOCAL_PREFIX}{}", self.locals), v1.type_of());
                let s1: TmSubst = [(v1.clone(), local.clone())].into_iter().collect();
                let s2: TmSubst = [(v2.clone(), local.clone())].into_iter().collect();
                self.unify(&b1.vsubst(&s1), &b2.vsubst(&s2))
            }
            _ => false,
        }
    }

    fn resolve_ty(&self, ty: &HolType) -> HolType {
        if !ty.has_tyvars() || self.ty.is_empty() {
            return ty.clone();
        }
        match ty.node() {
            TypeNode::Var(n) => match self.ty.get(n) {
                Some(t) => self.resolve_ty(t),
                None => ty.clone(),
            },
            TypeNode::Con(n, args) => HolType::con(n.clone(), args.iter().map(|a| self.resolve_ty(a)).collect()),
        }
    }

    fn resolve(&self, t: &Term, memo: &mut HashMap<Name, Term>, theta: &TySubst) -> Term {
        match t.node() {
            TermNode::Var(n, _) if self.tm.contains_key(n) => {
                if let Some(done) = memo.get(n) {
                    return done.clone();
                }
                let v = self.tm[n].1.clone();
                let r = self.resolve(&v, memo, theta);
                memo.insert(n.clone(), r.clone());
                r
            }
            _ if !t.has_vars() => t.inst_type(theta),
            TermNode::Var(..) | TermNode::Const(..) => t.inst_type(theta),
            TermNode::Comb(f, a) => {
                let f2 = self.resolve(f, memo, theta);
                let a2 = self.resolve(a, memo, theta);
                if f2.ptr_eq(f) && a2.ptr_eq(a) {
                    t.clone()
                } else {
                    Term::comb_unchecked(f2, a2)
                }
            }
            TermNode::Abs(v, b) => {
                Term::abs(v.inst_type(theta), self.resolve(b, memo, theta)).expect("variable binder")
            }
        }
    }

    fn finish(self) -> Option<Instantiation> {
        let theta: TySubst = self
            .ty
            .keys()
            .map(|k| (k.clone(), self.resolve_ty(&HolType::var(k.clone()))))
            .collect();
        let mut memo = HashMap::new();
        let mut tm = TmSubst::with_capacity(self.order.len());
        for name in &self.order {
            let (var, _) = &self.tm[name];
            let value = self.resolve(var, &mut memo, &theta);
            if value.frees().iter().any(|v| v.name().is_some_and(|n| n.starts_with(LOCAL_PREFIX))) {
                return None;
            }
            tm.insert(var.inst_type(&theta), value);
        }
        Some(Instantiation { ty: theta, tm }.normalize())
    }
}

/// Most general unifier of `t1` and `t2`, binding only variables named in `metas`.
pub fn unify(t1: &Term, t2: &Term, metas: &MetaSet) -> Option<Instantiation> {
    let mut u = Unifier::new(metas);
    if u.unify(t1, t2) {
        u.finish()
    } else {
        None
    }
}

/// Unifies several pairs simultaneously.
pub fn unify_all<'t>(pairs: impl IntoIterator<Item = (&'t Term, &'t Term)>, metas: &MetaSet) -> Option<Instantiation> {
    let mut u = Unifier::new(metas);
    for (a, b) in pairs {
        if !u.unify(a, b) {
            return None;
        }
    }
    u.finish()
}

/// One-sided matching: binds only pattern-side metavariables, leaving `t` unchanged.
pub fn match_pat(pattern: &Term, t: &Term, metas: &MetaSet) -> Option<Instantiation> {
    fn go(p: &Term, t: &Term, metas: &MetaSet, ty: &mut TySubst, tm: &mut TmSubst, env: &mut Vec<(Term, Term)>) -> bool {
        match (p.node(), t.node()) {
            (TermNode::Var(n, pty), _) if metas.contains(n) && !env.iter().any(|(b, _)| b == p) => {
                if !pty.match_into(&t.type_of(), ty) {
                    return false;
                }
                if env.iter().any(|(_, local)| t.free_in(local)) {
                    return false;
                }
                match tm.get(p) {
                    Some(bound) => bound.alpha_eq(t),
                    None => {
                        tm.insert(p.clone(), t.clone());
                        true
                    }
                }
            }
            (TermNode::Var(..), TermNode::Var(..)) => {
                for (a, b) in env.iter().rev() {
                    if a == p || b == t {
                        return a == p && b == t;
                    }
                }
                p == t
            }
            (TermNode::Const(c1, t1), TermNode::Const(c2, t2)) => c1 == c2 && t1.match_into(t2, ty),
            (TermNode::Comb(f1, a1), TermNode::Comb(f2, a2)) => {
                go(f1, f2, metas, ty, tm, env) && go(a1, a2, metas, ty, tm, env)
            }
            (TermNode::Abs(v1, b1), TermNode::Abs(v2, b2)) => {
                if !v1.type_of().match_into(&v2.type_of(), ty) {
                    return false;
                }
                env.push((v1.clone(), v2.clone()));
                let r = go(b1, b2, metas, ty, tm, env);
                env.pop();
                r
            }
            _ => false,
        }
    }
    let mut ty = TySubst::new();
    let mut tm = TmSubst::new();
    if !go(pattern, t, metas, &mut ty, &mut tm, &mut Vec::new()) {
        return None;
    }
    if tm.keys().any(|v| t.free_in(v)) {
        return None;
    }
    let tm = tm.into_iter().map(|(k, v)| (k.inst_type(&ty), v)).collect();
    Some(Instantiation { ty, tm }.normalize())
}

/// Composition of substitutions: `apply(compose(o, i), t) = apply(o, apply(i, t))`.
pub fn compose(outer: &Instantiation, inner: &Instantiation) -> Instantiation {
    Instantiation::compose(outer, inner)
}

/// A clause with its quantifiers replaced by fresh variables.
#[derive(Clone, Debug)]
pub struct RuleInstance {
    pub tyinst: TySubst,
    pub fresh: Vec<Term>,
    pub antecedent: Option<Term>,
    pub conclusion: Term,
}

impl RuleInstance {
    /// `SPECL fresh (INST_TYPE tyinst th)`, the theorem whose conclusion is
    /// `antecedent ==> conclusion` (or just `conclusion`).
    pub fn specialize(&self, th: &Theorem) -> Result<Theorem, crate::kernel::KernelError> {
        let inst = Instantiation { ty: self.tyinst.clone(), tm: TmSubst::new() };
        Theorem::specl(&self.fresh, &Theorem::inst(&inst, th)?)
    }
}

/// Strips `!xs. [A ==>] C` with fresh term and type variables.
pub fn instantiate_rule(th: &Theorem, src: &FreshSource) -> RuleInstance {
    let tyinst: TySubst = th.concl().tyvars().into_iter().map(|a| (a, src.fresh_tyvar())).collect();
    let concl = th.concl().inst_type(&tyinst);
    let (vars, body) = concl.strip_forall();
    let fresh: Vec<Term> = vars.iter().map(|v| src.fresh_var(v.type_of())).collect();
    let theta: TmSubst = vars.into_iter().zip(fresh.iter().cloned()).collect();
    let body = body.vsubst(&theta);
    let (antecedent, conclusion) = match body.dest_imp() {
        Some((a, c)) => (Some(a.clone()), c.clone()),
        None => (None, body),
    };
    RuleInstance { tyinst, fresh, antecedent, conclusion }
}

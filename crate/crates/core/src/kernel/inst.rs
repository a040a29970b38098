use std::fmt;

use super::term::{Term, TmSubst};
use super::types::{HolType, TySubst};

/// A type substitution paired with a term substitution.
///
/// Keys of `tm` carry types that already have `ty` applied, so application is
/// `vsubst(tm, inst_type(ty, t))`.
#[derive(Clone, Default)]
pub struct Instantiation {
    pub ty: TySubst,
    pub tm: TmSubst,
}

impl Instantiation {
    pub fn new() -> Instantiation {
        Instantiation::default()
    }

    pub fn from_terms(pairs: impl IntoIterator<Item = (Term, Term)>) -> Instantiation {
        Instantiation { ty: TySubst::new(), tm: pairs.into_iter().collect() }
    }

    pub fn is_empty(&self) -> bool {
        self.ty.is_empty() && self.tm.is_empty()
    }

    pub fn apply(&self, t: &Term) -> Term {
        t.inst_type(&self.ty).vsubst(&self.tm)
    }

    pub fn apply_type(&self, ty: &HolType) -> HolType {
        ty.subst(&self.ty)
    }

    /// Image of a variable, looked up after retyping.
    pub fn lookup(&self, v: &Term) -> Option<&Term> {
        if self.ty.is_empty() || !v.has_tyvars() {
            self.tm.get(v)
        } else {
            self.tm.get(&v.inst_type(&self.ty))
        }
    }

    /// `outer ∘ inner`: applying the result equals applying `inner` then `outer`.
    pub fn compose(outer: &Instantiation, inner: &Instantiation) -> Instantiation {
        if inner.is_empty() {
            return outer.clone();
        }
        if outer.is_empty() {
            return inner.clone();
        }
        let mut ty: TySubst = inner
            .ty
            .iter()
            .map(|(a, t)| (a.clone(), t.subst(&outer.ty)))
            .filter(|(a, t)| t.dest_var() != Some(a))
            .collect();
        for (a, t) in outer.ty.iter() {
            ty.entry(a.clone()).or_insert_with(|| t.clone());
        }
        let mut tm = TmSubst::with_capacity(inner.tm.len() + outer.tm.len());
        for (v, t) in inner.tm.iter() {
            let key = v.inst_type(&outer.ty);
            let val = outer.apply(t);
            if key != val {
                tm.insert(key, val);
            }
        }
        for (v, t) in outer.tm.iter() {
            if !tm.contains_key(v) {
                tm.insert(v.clone(), t.clone());
            }
        }
        Instantiation { ty, tm }
    }

    /// Drops identity bindings.
    pub fn normalize(mut self) -> Instantiation {
        self.tm.retain(|k, v| k != v);
        self.ty.retain(|k, v| v.dest_var() != Some(k));
        self
    }
}

impl fmt::Debug for Instantiation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "([")?;
        let mut tys: Vec<_> = self.ty.iter().collect();
        tys.sort_by(|a, b| a.0.cmp(b.0));
        for (i, (a, t)) in tys.into_iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "(`:{t}`, `:{a}`)")?;
        }
        write!(f, "], [")?;
        for (i, (v, t)) in self.tm.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "(`{t}`, `{v}`)")?;
        }
        write!(f, "])")
    }
}

//! Simple types: type variables and applied type constructors.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use super::Name;

/// A HOL type. Cheap to clone; equality is structural.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HolType(Arc<TypeNode>);

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TypeNode {
    Var(Name),
    Con(Name, Vec<HolType>),
}

/// Type substitution, keyed by type-variable name.
pub type TySubst = HashMap<Name, HolType>;

pub const FUN: &str = "fun";
pub const BOOL: &str = "bool";

impl HolType {
    pub fn var(name: impl Into<Name>) -> HolType {
        HolType(Arc::new(TypeNode::Var(name.into())))
    }

    pub fn con(name: impl Into<Name>, args: Vec<HolType>) -> HolType {
        HolType(Arc::new(TypeNode::Con(name.into(), args)))
    }

    pub fn fun(dom: HolType, ran: HolType) -> HolType {
        HolType::con(FUN, vec![dom, ran])
    }

    /// Right-nested function type `a1 -> a2 -> ... -> ran`.
    pub fn funs(args: impl IntoIterator<Item = HolType>, ran: HolType) -> HolType {
        let args: Vec<_> = args.into_iter().collect();
        args.into_iter().rev().fold(ran, |acc, a| HolType::fun(a, acc))
    }

    pub fn bool() -> HolType {
        thread_local!(static BOOL_TY: HolType = HolType::con(BOOL, vec![]));
        BOOL_TY.with(|t| t.clone())
    }

    pub fn node(&self) -> &TypeNode {
        &self.0
    }

    pub fn ptr_eq(&self, other: &HolType) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub fn is_bool(&self) -> bool {
        matches!(self.node(), TypeNode::Con(n, args) if &**n == BOOL && args.is_empty())
    }

    pub fn dest_var(&self) -> Option<&Name> {
        match self.node() {
            TypeNode::Var(n) => Some(n),
            TypeNode::Con(..) => None,
        }
    }

    pub fn dest_con(&self) -> Option<(&Name, &[HolType])> {
        match self.node() {
            TypeNode::Con(n, args) => Some((n, args)),
            TypeNode::Var(_) => None,
        }
    }

    pub fn dest_fun(&self) -> Option<(&HolType, &HolType)> {
        match self.node() {
            TypeNode::Con(n, args) if &**n == FUN && args.len() == 2 => Some((&args[0], &args[1])),
            _ => None,
        }
    }

    pub fn has_tyvars(&self) -> bool {
        match self.node() {
            TypeNode::Var(_) => true,
            TypeNode::Con(_, args) => args.iter().any(HolType::has_tyvars),
        }
    }

    pub fn tyvars(&self) -> BTreeSet<Name> {
        let mut acc = BTreeSet::new();
        self.collect_tyvars(&mut acc);
        acc
    }

    pub(crate) fn collect_tyvars(&self, acc: &mut BTreeSet<Name>) {
        match self.node() {
            TypeNode::Var(n) => {
                acc.insert(n.clone());
            }
            TypeNode::Con(_, args) => args.iter().for_each(|a| a.collect_tyvars(acc)),
        }
    }

    pub fn occurs(&self, var: &str) -> bool {
        match self.node() {
            TypeNode::Var(n) => &**n == var,
            TypeNode::Con(_, args) => args.iter().any(|a| a.occurs(var)),
        }
    }

    /// Simultaneous substitution of type variables. Shares unchanged subtrees.
    pub fn subst(&self, theta: &TySubst) -> HolType {
        if theta.is_empty() {
            return self.clone();
        }
        match self.node() {
            TypeNode::Var(n) => theta.get(n).cloned().unwrap_or_else(|| self.clone()),
            TypeNode::Con(n, args) => {
                let mut changed = false;
                let new_args: Vec<_> = args
                    .iter()
                    .map(|a| {
                        let b = a.subst(theta);
                        changed |= !b.ptr_eq(a);
                        b
                    })
                    .collect();
                if changed {
                    HolType::con(n.clone(), new_args)
                } else {
                    self.clone()
                }
            }
        }
    }

    /// One-sided matching of `self` (pattern) against `target`, extending `theta`.
    pub fn match_into(&self, target: &HolType, theta: &mut TySubst) -> bool {
        match (self.node(), target.node()) {
            (TypeNode::Var(n), _) => match theta.get(n) {
                Some(bound) => bound == target,
                None => {
                    theta.insert(n.clone(), target.clone());
                    true
                }
            },
            (TypeNode::Con(n1, a1), TypeNode::Con(n2, a2)) => {
                n1 == n2
                    && a1.len() == a2.len()
                    && a1.iter().zip(a2).all(|(p, t)| p.match_into(t, theta))
            }
            _ => false,
        }
    }
}

impl fmt::Display for HolType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_type(self, f, 0)
    }
}

impl fmt::Debug for HolType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, ":{self}")
    }
}

// prec: 0 = top, 1 = left of an arrow, 2 = left of a product, 3 = argument of a postfix constructor
fn fmt_type(ty: &HolType, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
    match ty.node() {
        TypeNode::Var(n) => write!(f, "{n}"),
        TypeNode::Con(n, args) => {
            if let Some((d, r)) = ty.dest_fun() {
                if prec > 0 {
                    write!(f, "(")?;
                }
                fmt_type(d, f, 1)?;
                write!(f, " -> ")?;
                fmt_type(r, f, 0)?;
                if prec > 0 {
                    write!(f, ")")?;
                }
                return Ok(());
            }
            if &**n == "prod" && args.len() == 2 {
                if prec > 1 {
                    write!(f, "(")?;
                }
                fmt_type(&args[0], f, 2)?;
                write!(f, " # ")?;
                fmt_type(&args[1], f, 1)?;
                if prec > 1 {
                    write!(f, ")")?;
                }
                return Ok(());
            }
            match args.len() {
                0 => write!(f, "{n}"),
                1 => {
                    fmt_type(&args[0], f, 3)?;
                    write!(f, " {n}")
                }
                _ => {
                    write!(f, "(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            write!(f, ", ")?;
                        }
                        fmt_type(a, f, 0)?;
                    }
                    write!(f, ") {n}")
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn num() -> HolType {
        HolType::con("num", vec![])
    }

    #[test]
    fn display_nests_arrows_and_postfix() {
        let a = HolType::var("A");
        let la = HolType::con("list", vec![a.clone()]);
        let t = HolType::funs([la.clone(), la.clone()], la);
        assert_eq!(t.to_string(), "A list -> A list -> A list");
        let f = HolType::fun(HolType::fun(num(), num()), num());
        assert_eq!(f.to_string(), "(num -> num) -> num");
        let p = HolType::con("list", vec![HolType::con("prod", vec![num(), a])]);
        assert_eq!(p.to_string(), "(num # A) list");
    }

    #[test]
    fn subst_shares_untouched() {
        let t = HolType::fun(num(), num());
        let theta: TySubst = [("A".into(), num())].into_iter().collect();
        assert!(t.subst(&theta).ptr_eq(&t));
        let v = HolType::con("list", vec![HolType::var("A")]);
        assert_eq!(v.subst(&theta), HolType::con("list", vec![num()]));
    }

    #[test]
    fn type_matching() {
        let pat = HolType::fun(HolType::var("A"), HolType::var("A"));
        let mut th = TySubst::new();
        assert!(pat.match_into(&HolType::fun(num(), num()), &mut th));
        let mut th = TySubst::new();
        assert!(!pat.match_into(&HolType::fun(num(), HolType::bool()), &mut th));
    }
}

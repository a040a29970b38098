use indexmap::IndexMap;

use super::term::{Term, TermNode, CONJ, DISJ, EQ, EXISTS, FORALL, IMP, META_EXISTS, NEG, STRING_TY};
use super::thm::Theorem;
use super::types::{HolType, TySubst, TypeNode, BOOL, FUN};
use super::{KernelError, Name};

/// Declared type constructors, constants and axioms.
///
/// Registration takes `&mut self`; once a signature is shared it is read-only.
#[derive(Clone, Debug)]
pub struct Signature {
    tycons: IndexMap<Name, usize>,
    consts: IndexMap<Name, HolType>,
    axioms: IndexMap<Name, Theorem>,
}

impl Default for Signature {
    fn default() -> Self {
        Signature::new()
    }
}

impl Signature {
    /// The logical core: `bool`, `fun`, `string` and the connectives.
    pub fn new() -> Signature {
        let mut sig = Signature { tycons: IndexMap::new(), consts: IndexMap::new(), axioms: IndexMap::new() };
        sig.tycons.insert(BOOL.into(), 0);
        sig.tycons.insert(FUN.into(), 2);
        sig.tycons.insert(STRING_TY.into(), 0);
        let b = HolType::bool();
        let a = HolType::var("A");
        let bin = HolType::funs([b.clone(), b.clone()], b.clone());
        let quant = HolType::fun(HolType::fun(a.clone(), b.clone()), b.clone());
        for (name, ty) in [
            (EQ, HolType::funs([a.clone(), a.clone()], b.clone())),
            (CONJ, bin.clone()),
            (DISJ, bin.clone()),
            (IMP, bin),
            (NEG, HolType::fun(b.clone(), b.clone())),
            (FORALL, quant.clone()),
            (EXISTS, quant.clone()),
            (META_EXISTS, quant),
            ("T", b.clone()),
            ("F", b),
        ] {
            sig.consts.insert(name.into(), ty);
        }
        sig
    }

    pub fn new_type(&mut self, name: &str, arity: usize) -> Result<(), KernelError> {
        if self.tycons.contains_key(name) {
            return Err(KernelError::Duplicate(format!("type {name}")));
        }
        self.tycons.insert(name.into(), arity);
        Ok(())
    }

    pub fn new_const(&mut self, name: &str, ty: HolType) -> Result<(), KernelError> {
        if self.consts.contains_key(name) || name.starts_with('"') {
            return Err(KernelError::Duplicate(format!("constant {name}")));
        }
        self.check_type(&ty)?;
        self.consts.insert(name.into(), ty);
        Ok(())
    }

    pub fn tycon_arity(&self, name: &str) -> Option<usize> {
        self.tycons.get(name).copied()
    }

    pub fn const_type(&self, name: &str) -> Option<&HolType> {
        self.consts.get(name)
    }

    pub fn constants(&self) -> impl Iterator<Item = (&Name, &HolType)> {
        self.consts.iter()
    }

    pub fn axiom(&self, name: &str) -> Option<&Theorem> {
        self.axioms.get(name)
    }

    pub fn axioms(&self) -> impl Iterator<Item = (&Name, &Theorem)> {
        self.axioms.iter()
    }

    /// Builds a constant, checking that `ty` instantiates its declared type.
    pub fn mk_const(&self, name: &str, ty: HolType) -> Result<Term, KernelError> {
        if name.starts_with('"') {
            let string = HolType::con(STRING_TY, vec![]);
            if ty != string {
                return Err(KernelError::TypeMismatch { expected: string, found: ty, context: name.into() });
            }
            return Ok(Term::constant(name, ty));
        }
        let generic = self.consts.get(name).ok_or_else(|| KernelError::UnknownName(name.into()))?;
        let mut theta = TySubst::new();
        if !generic.match_into(&ty, &mut theta) {
            return Err(KernelError::TypeMismatch {
                expected: generic.clone(),
                found: ty,
                context: format!("constant {name}"),
            });
        }
        self.check_type(&ty)?;
        Ok(Term::constant(name, ty))
    }

    pub fn check_type(&self, ty: &HolType) -> Result<(), KernelError> {
        match ty.node() {
            TypeNode::Var(_) => Ok(()),
            TypeNode::Con(n, args) => match self.tycons.get(n) {
                Some(&arity) if arity == args.len() => args.iter().try_for_each(|a| self.check_type(a)),
                Some(&arity) => Err(KernelError::Arity { name: n.to_string(), expected: arity, found: args.len() }),
                None => Err(KernelError::UnknownName(format!("type {n}"))),
            },
        }
    }

    /// Checks every constant and type in `t` against this signature.
    pub fn check_term(&self, t: &Term) -> Result<(), KernelError> {
        let mut stack = vec![t];
        while let Some(t) = stack.pop() {
            match t.node() {
                TermNode::Var(_, ty) => self.check_type(ty)?,
                TermNode::Const(n, ty) => {
                    self.mk_const(n, ty.clone())?;
                }
                TermNode::Comb(a, b) | TermNode::Abs(a, b) => {
                    stack.push(a);
                    stack.push(b);
                }
            }
        }
        Ok(())
    }

    /// Registers `t` as an axiom. `t` must be closed, Boolean and well formed.
    pub fn new_axiom(&mut self, name: &str, t: Term) -> Result<Theorem, KernelError> {
        if self.axioms.contains_key(name) {
            return Err(KernelError::Duplicate(format!("axiom {name}")));
        }
        if !t.type_of().is_bool() {
            return Err(KernelError::NotBoolean(t.to_string()));
        }
        if let Some(v) = t.frees().first() {
            return Err(KernelError::NotClosed(v.to_string()));
        }
        self.check_term(&t)?;
        let name: Name = name.into();
        let th = Theorem::new_axiom_unchecked(&name, t);
        self.axioms.insert(name, th.clone());
        Ok(th)
    }

    /// Merges declarations from `other`; identical redeclarations are accepted.
    pub fn absorb(&mut self, other: &Signature) -> Result<(), KernelError> {
        for (n, &a) in &other.tycons {
            match self.tycons.get(n) {
                Some(&b) if a == b => {}
                Some(_) => return Err(KernelError::Duplicate(format!("type {n}"))),
                None => {
                    self.tycons.insert(n.clone(), a);
                }
            }
        }
        for (n, ty) in &other.consts {
            match self.consts.get(n) {
                Some(t2) if t2 == ty => {}
                Some(_) => return Err(KernelError::Duplicate(format!("constant {n}"))),
                None => {
                    self.consts.insert(n.clone(), ty.clone());
                }
            }
        }
        for (n, th) in &other.axioms {
            match self.axioms.get(n) {
                Some(t2) if t2.alpha_eq(th) => {}
                Some(_) => return Err(KernelError::Duplicate(format!("axiom {n}"))),
                None => {
                    self.axioms.insert(n.clone(), th.clone());
                }
            }
        }
        Ok(())
    }
}

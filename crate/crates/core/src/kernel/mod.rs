//! The trusted core: types, terms, theorems and inference rules.
//!
//! Everything outside this module builds theorems through [`Theorem`]'s rule
//! functions or [`Signature::new_axiom`].

mod inst;
mod signature;
pub mod term;
mod thm;
pub mod types;

use std::sync::Arc;

use thiserror::Error;

pub use inst::Instantiation;
pub use signature::Signature;
pub use term::{mk, Term, TermNode, TmSubst};
pub use thm::{set_tracing, tracing, Proof, Theorem};
pub use types::{HolType, TySubst, TypeNode};

pub type Name = Arc<str>;

#[derive(Debug, Clone, Error)]
pub enum KernelError {
    #[error("type mismatch in {context}: expected {expected}, found {found}")]
    TypeMismatch { expected: HolType, found: HolType, context: String },
    #[error("not a function: {0}")]
    NotAFunction(String),
    #[error("not a boolean term: {0}")]
    NotBoolean(String),
    #[error("term has free variable {0}")]
    NotClosed(String),
    #[error("wrong shape: {0}")]
    Shape(&'static str),
    #[error("{rule}: expected {expected}, found {found}")]
    Mismatch { rule: &'static str, expected: String, found: String },
    #[error("unknown name {0}")]
    UnknownName(String),
    #[error("duplicate declaration of {0}")]
    Duplicate(String),
    #[error("type constructor {name} expects {expected} arguments, found {found}")]
    Arity { name: String, expected: usize, found: usize },
    #[error("theorem has no construction trace")]
    NoTrace,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn num() -> HolType {
        HolType::con("num", vec![])
    }

    fn sig() -> Signature {
        let mut s = Signature::new();
        s.new_type("num", 0).unwrap();
        s.new_const("c", num()).unwrap();
        s.new_const("d", num()).unwrap();
        s.new_const("P", HolType::fun(num(), HolType::bool())).unwrap();
        s.new_const("Q", HolType::fun(num(), HolType::bool())).unwrap();
        s
    }

    fn app(f: &str, ty: HolType, a: Term) -> Term {
        Term::comb(Term::constant(f, ty), a).unwrap()
    }

    fn p(a: Term) -> Term {
        app("P", HolType::fun(num(), HolType::bool()), a)
    }

    fn q(a: Term) -> Term {
        app("Q", HolType::fun(num(), HolType::bool()), a)
    }

    #[test]
    fn refl_and_inst() {
        let x = Term::var("x", num());
        let th = Theorem::refl(&x).unwrap();
        assert!(th.hyps().is_empty());
        assert_eq!(th.concl().dest_eq(), Some((&x, &x)));
        let four = Term::constant("c", num());
        let i = Instantiation::from_terms([(x.clone(), four.clone())]);
        let th2 = Theorem::inst(&i, &th).unwrap();
        assert_eq!(th2.concl().dest_eq(), Some((&four, &four)));
        assert!(Theorem::inst(&Instantiation::new(), &th).unwrap().alpha_eq(&th));
    }

    #[test]
    fn inst_rejects_ill_typed() {
        let x = Term::var("x", num());
        let th = Theorem::refl(&x).unwrap();
        let i = Instantiation::from_terms([(x, Term::var("b", HolType::bool()))]);
        assert!(Theorem::inst(&i, &th).is_err());
    }

    #[test]
    fn specl_mp_chain() {
        let mut s = sig();
        let x = Term::var("x", num());
        let ax = mk::forall(x.clone(), mk::imp(p(x.clone()), q(x.clone())).unwrap()).unwrap();
        let ax = s.new_axiom("PQ", ax).unwrap();
        let pc = s.new_axiom("PC", p(Term::constant("c", num()))).unwrap();
        let spec = Theorem::specl(&[Term::constant("c", num())], &ax).unwrap();
        let qc = Theorem::mp(&spec, &pc).unwrap();
        assert!(qc.concl().alpha_eq(&q(Term::constant("c", num()))));
        let spec_d = Theorem::specl(&[Term::constant("d", num())], &ax).unwrap();
        assert!(Theorem::mp(&spec_d, &pc).is_err());
        assert!(Theorem::specl(&[Term::constant("c", num()), Term::constant("c", num())], &ax).is_err());
        assert!(Theorem::specl(&[], &ax).unwrap().ptr_eq(&ax));
    }

    #[test]
    fn conj_and_conjuncts() {
        let mut s = sig();
        let a = s.new_axiom("A", p(Term::constant("c", num()))).unwrap();
        let b = s.new_axiom("B", q(Term::constant("c", num()))).unwrap();
        let c = s.new_axiom("C", q(Term::constant("d", num()))).unwrap();
        let ab = Theorem::conj(&a, &Theorem::conj(&b, &c).unwrap()).unwrap();
        let parts = Theorem::conjuncts(&ab);
        assert_eq!(parts.len(), 3);
        assert!(parts[0].alpha_eq(&a) && parts[1].alpha_eq(&b) && parts[2].alpha_eq(&c));
    }

    #[test]
    fn beta_rule() {
        let y = Term::var("y", num());
        let lam = Term::abs(y.clone(), p(y.clone())).unwrap();
        let c = Term::constant("c", num());
        let redex = Term::comb(lam, c.clone()).unwrap();
        let th = Theorem::beta(&redex).unwrap();
        assert_eq!(th.concl().dest_eq().unwrap().1, &p(c.clone()));
        assert!(Theorem::beta(&c).is_err());
    }

    #[test]
    fn string_ne_rule() {
        let (x, y) = (Term::string_lit("x"), Term::string_lit("y"));
        let th = Theorem::string_ne(&x, &y).unwrap();
        assert_eq!(th.concl().to_string(), "~(\"x\" = \"y\")");
        assert!(Theorem::string_ne(&x, &x).is_err());
        assert!(Theorem::string_ne(&x, &Term::var("z", HolType::con("string", vec![]))).is_err());
    }

    #[test]
    fn axioms_checked() {
        let mut s = sig();
        let x = Term::var("x", num());
        assert!(matches!(s.new_axiom("OPEN", p(x.clone())), Err(KernelError::NotClosed(_))));
        assert!(matches!(s.new_axiom("NB", Term::constant("c", num())), Err(KernelError::NotBoolean(_))));
        s.new_axiom("ONE", p(Term::constant("c", num()))).unwrap();
        assert!(matches!(s.new_axiom("ONE", p(Term::constant("d", num()))), Err(KernelError::Duplicate(_))));
        let bogus = app("NOPE", HolType::fun(num(), HolType::bool()), Term::constant("c", num()));
        assert!(s.new_axiom("BOGUS", bogus).is_err());
    }

    #[test]
    fn replay_rederives() {
        let mut s = sig();
        let was = set_tracing(true);
        let x = Term::var("x", num());
        let ax = mk::forall(x.clone(), mk::imp(p(x.clone()), q(x.clone())).unwrap()).unwrap();
        let ax = s.new_axiom("PQ", ax).unwrap();
        let pc = s.new_axiom("PC", p(Term::constant("c", num()))).unwrap();
        let spec = Theorem::specl(&[Term::constant("c", num())], &ax).unwrap();
        let qc = Theorem::mp(&spec, &pc).unwrap();
        let both = Theorem::conj(&qc, &Theorem::refl(&x).unwrap()).unwrap();
        set_tracing(was);
        let again = both.replay(&s).unwrap();
        assert!(again.alpha_eq(&both));
        // an untraced theorem cannot be replayed
        let plain = Theorem::refl(&x).unwrap();
        assert!(matches!(plain.replay(&s), Err(KernelError::NoTrace)));
    }
}

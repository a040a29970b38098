//! Theorems and the primitive inference rules.
//!
//! A [`Theorem`] can only be produced by the functions in this module (and by
//! axiom registration in [`Signature`](super::Signature)). Each rule checks its
//! side conditions and fails with a [`KernelError`] otherwise.

use std::cell::Cell;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use super::inst::Instantiation;
use super::term::{mk, Term, TmSubst};
use super::{KernelError, Name, Signature};

#[derive(Clone)]
pub struct Theorem(Arc<ThmInner>);

struct ThmInner {
    hyps: Vec<Term>,
    concl: Term,
    proof: Option<Arc<Proof>>,
}

/// Construction record of a theorem, kept only while tracing is enabled.
#[derive(Clone, Debug)]
pub enum Proof {
    Axiom(Name),
    Assume(Term),
    Refl(Term),
    Inst(Instantiation, Theorem),
    Specl(Vec<Term>, Theorem),
    Mp(Theorem, Theorem),
    Conj(Theorem, Theorem),
    Conjunct(Theorem, usize),
    Beta(Term),
    StringNe(Term, Term),
}

thread_local! {
    static TRACING: Cell<bool> = const { Cell::new(false) };
}

/// Turns proof recording on or off for theorems built on this thread.
pub fn set_tracing(on: bool) -> bool {
    TRACING.with(|t| t.replace(on))
}

pub fn tracing() -> bool {
    TRACING.with(Cell::get)
}

fn union_hyps(a: &[Term], b: &[Term]) -> Vec<Term> {
    let mut out = a.to_vec();
    for h in b {
        if !out.iter().any(|x| x.alpha_eq(h)) {
            out.push(h.clone());
        }
    }
    out
}

impl Theorem {
    fn make(hyps: Vec<Term>, concl: Term, proof: impl FnOnce() -> Proof) -> Theorem {
        let proof = tracing().then(|| Arc::new(proof()));
        Theorem(Arc::new(ThmInner { hyps, concl, proof }))
    }

    pub(super) fn new_axiom_unchecked(name: &Name, concl: Term) -> Theorem {
        Theorem::make(Vec::new(), concl, || Proof::Axiom(name.clone()))
    }

    pub fn hyps(&self) -> &[Term] {
        &self.0.hyps
    }

    pub fn concl(&self) -> &Term {
        &self.0.concl
    }

    pub fn proof(&self) -> Option<&Proof> {
        self.0.proof.as_deref()
    }

    pub fn ptr_eq(&self, other: &Theorem) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    /// Same hypotheses (as sets) and α-equal conclusion.
    pub fn alpha_eq(&self, other: &Theorem) -> bool {
        self.concl().alpha_eq(other.concl())
            && self.hyps().len() == other.hyps().len()
            && self.hyps().iter().all(|h| other.hyps().iter().any(|g| g.alpha_eq(h)))
    }

    /// `{t} |- t`
    pub fn assume(t: &Term) -> Result<Theorem, KernelError> {
        if !t.type_of().is_bool() {
            return Err(KernelError::NotBoolean(t.to_string()));
        }
        Ok(Theorem::make(vec![t.clone()], t.clone(), || Proof::Assume(t.clone())))
    }

    /// `|- t = t`
    pub fn refl(t: &Term) -> Result<Theorem, KernelError> {
        let concl = mk::eq(t.clone(), t.clone())?;
        Ok(Theorem::make(Vec::new(), concl, || Proof::Refl(t.clone())))
    }

    /// Instantiates type variables and free term variables in hypotheses and conclusion.
    pub fn inst(inst: &Instantiation, th: &Theorem) -> Result<Theorem, KernelError> {
        if inst.is_empty() {
            return Ok(th.clone());
        }
        for (v, t) in inst.tm.iter() {
            let (_, vty) = v.dest_var().ok_or(KernelError::Shape("instantiation of a non-variable"))?;
            if *vty != t.type_of() {
                return Err(KernelError::TypeMismatch {
                    expected: vty.clone(),
                    found: t.type_of(),
                    context: format!("instantiating {v}"),
                });
            }
        }
        let hyps = th.hyps().iter().map(|h| inst.apply(h)).collect();
        let concl = inst.apply(th.concl());
        Ok(Theorem::make(hyps, concl, || Proof::Inst(inst.clone(), th.clone())))
    }

    /// Specializes the outermost universal quantifiers with the given terms.
    pub fn specl(ts: &[Term], th: &Theorem) -> Result<Theorem, KernelError> {
        if ts.is_empty() {
            return Ok(th.clone());
        }
        let mut body = th.concl().clone();
        for t in ts {
            let (v, b) = body.dest_forall().ok_or(KernelError::Shape("SPECL: not a universal"))?;
            if v.type_of() != t.type_of() {
                return Err(KernelError::TypeMismatch {
                    expected: v.type_of(),
                    found: t.type_of(),
                    context: "SPECL".into(),
                });
            }
            let mut theta = TmSubst::new();
            theta.insert(v.clone(), t.clone());
            body = b.vsubst(&theta);
        }
        Ok(Theorem::make(th.hyps().to_vec(), body, || Proof::Specl(ts.to_vec(), th.clone())))
    }

    /// Modus ponens: from `|- p ==> q` and `|- p` conclude `|- q`.
    pub fn mp(imp: &Theorem, ant: &Theorem) -> Result<Theorem, KernelError> {
        let (p, q) = imp.concl().dest_imp().ok_or(KernelError::Shape("MP: not an implication"))?;
        if !p.alpha_eq(ant.concl()) {
            return Err(KernelError::Mismatch {
                rule: "MP",
                expected: p.to_string(),
                found: ant.concl().to_string(),
            });
        }
        Ok(Theorem::make(union_hyps(imp.hyps(), ant.hyps()), q.clone(), || {
            Proof::Mp(imp.clone(), ant.clone())
        }))
    }

    pub fn conj(a: &Theorem, b: &Theorem) -> Result<Theorem, KernelError> {
        let concl = mk::conj(a.concl().clone(), b.concl().clone())?;
        Ok(Theorem::make(union_hyps(a.hyps(), b.hyps()), concl, || Proof::Conj(a.clone(), b.clone())))
    }

    /// Splits a (nested) conjunction into one theorem per conjunct.
    pub fn conjuncts(th: &Theorem) -> Vec<Theorem> {
        let parts = th.concl().conjuncts();
        if parts.len() == 1 {
            return vec![th.clone()];
        }
        parts
            .into_iter()
            .enumerate()
            .map(|(i, c)| Theorem::make(th.hyps().to_vec(), c, || Proof::Conjunct(th.clone(), i)))
            .collect()
    }

    /// `|- (\x. b) a = b[a/x]`
    pub fn beta(t: &Term) -> Result<Theorem, KernelError> {
        let (f, a) = t.dest_comb().ok_or(KernelError::Shape("BETA: not a redex"))?;
        let (v, b) = f.dest_abs().ok_or(KernelError::Shape("BETA: not a redex"))?;
        let mut theta = TmSubst::new();
        theta.insert(v.clone(), a.clone());
        let concl = mk::eq(t.clone(), b.vsubst(&theta))?;
        Ok(Theorem::make(Vec::new(), concl, || Proof::Beta(t.clone())))
    }

    /// `|- ~(s1 = s2)` for distinct string literals.
    pub fn string_ne(s1: &Term, s2: &Term) -> Result<Theorem, KernelError> {
        match (s1.dest_string_lit(), s2.dest_string_lit()) {
            (Some(a), Some(b)) if a != b => {
                let concl = mk::neg(mk::eq(s1.clone(), s2.clone())?)?;
                Ok(Theorem::make(Vec::new(), concl, || Proof::StringNe(s1.clone(), s2.clone())))
            }
            (Some(_), Some(_)) => Err(KernelError::Shape("STRING_NE: equal literals")),
            _ => Err(KernelError::Shape("STRING_NE: not string literals")),
        }
    }

    /// Re-runs the recorded construction of this theorem against `sig` and
    /// returns the re-derived theorem. Fails if no trace was recorded.
    pub fn replay(&self, sig: &Signature) -> Result<Theorem, KernelError> {
        let was = set_tracing(false);
        let r = Replayer { sig, memo: HashMap::new() }.run(self);
        set_tracing(was);
        r
    }
}

struct Replayer<'a> {
    sig: &'a Signature,
    memo: HashMap<*const ThmInner, Theorem>,
}

impl Replayer<'_> {
    fn run(&mut self, th: &Theorem) -> Result<Theorem, KernelError> {
        let key = Arc::as_ptr(&th.0);
        if let Some(done) = self.memo.get(&key) {
            return Ok(done.clone());
        }
        let proof = th.proof().ok_or(KernelError::NoTrace)?;
        let out = match proof {
            Proof::Axiom(name) => self
                .sig
                .axiom(name)
                .cloned()
                .ok_or_else(|| KernelError::UnknownName(name.to_string()))?,
            Proof::Assume(t) => Theorem::assume(t)?,
            Proof::Refl(t) => Theorem::refl(t)?,
            Proof::Inst(i, p) => Theorem::inst(i, &self.run(p)?)?,
            Proof::Specl(ts, p) => Theorem::specl(ts, &self.run(p)?)?,
            Proof::Mp(a, b) => Theorem::mp(&self.run(a)?, &self.run(b)?)?,
            Proof::Conj(a, b) => Theorem::conj(&self.run(a)?, &self.run(b)?)?,
            Proof::Conjunct(p, i) => Theorem::conjuncts(&self.run(p)?)
                .into_iter()
                .nth(*i)
                .ok_or(KernelError::Shape("replay: conjunct index"))?,
            Proof::Beta(t) => Theorem::beta(t)?,
            Proof::StringNe(a, b) => Theorem::string_ne(a, b)?,
        };
        if !out.alpha_eq(th) {
            return Err(KernelError::Mismatch {
                rule: "replay",
                expected: th.to_string(),
                found: out.to_string(),
            });
        }
        self.memo.insert(key, out.clone());
        Ok(out)
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, h) in self.hyps().iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{h}")?;
        }
        if !self.hyps().is_empty() {
            write!(f, " ")?;
        }
        write!(f, "|- {}", self.concl())
    }
}

impl fmt::Debug for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

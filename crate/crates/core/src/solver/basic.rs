//! Elementary solvers.

use std::sync::Arc;

use super::{Goal, Goalstate, Justification, Solver};
use crate::kernel::{mk, Instantiation, KernelError, Term, Theorem};
use crate::stream::Stream;
use crate::unify::{instantiate_rule, unify, MetaSet, RuleInstance};

fn extended(metas: &MetaSet, fresh: &[Term]) -> MetaSet {
    let mut m = metas.clone();
    for v in fresh {
        if let Some(n) = v.name() {
            m.insert(n.clone());
        }
    }
    m
}

fn body_of(ri: &RuleInstance) -> Term {
    match &ri.antecedent {
        Some(a) => mk::imp(a.clone(), ri.conclusion.clone()).expect("rule body is boolean"),
        None => ri.conclusion.clone(),
    }
}

/// Closes goals that unify with the (universally generalised) conclusion of `th`.
pub fn accept(th: Theorem) -> Solver {
    Arc::new(move |g: &Goal| {
        if !g.ctx.tick() {
            return Stream::nil();
        }
        let ri = instantiate_rule(&th, g.ctx.fresh());
        let metas = extended(&g.metavars, &ri.fresh);
        let Some(sigma) = unify(&body_of(&ri), &g.concl, &metas) else {
            return Stream::nil();
        };
        let th = th.clone();
        let full = sigma.clone();
        let justify: Justification = Arc::new(move |d, _| {
            let spec = ri.specialize(&th)?;
            Theorem::inst(&Instantiation::compose(d, &full), &spec)
        });
        Stream::single(Goalstate { metavars: metas, inst: g.restrict(&sigma), subgoals: vec![], justify })
    })
}

/// Backward chaining: reduces a goal matching the conclusion of
/// `!xs. A ==> C` to the corresponding instance of `A`.
pub fn rule(th: Theorem) -> Solver {
    Arc::new(move |g: &Goal| {
        if !g.ctx.tick() {
            return Stream::nil();
        }
        let ri = instantiate_rule(&th, g.ctx.fresh());
        let Some(antecedent) = ri.antecedent.clone() else {
            return Stream::nil();
        };
        let metas = extended(&g.metavars, &ri.fresh);
        let Some(sigma) = unify(&ri.conclusion, &g.concl, &metas) else {
            return Stream::nil();
        };
        let sub = g.derive(metas.clone(), sigma.apply(&antecedent));
        let th = th.clone();
        let full = sigma.clone();
        let justify: Justification = Arc::new(move |d, proofs| {
            let [p] = proofs else {
                return Err(KernelError::Shape("rule justification expects one proof"));
            };
            let spec = ri.specialize(&th)?;
            let imp = Theorem::inst(&Instantiation::compose(d, &full), &spec)?;
            Theorem::mp(&imp, p)
        });
        Stream::single(Goalstate { metavars: metas, inst: g.restrict(&sigma), subgoals: vec![sub], justify })
    })
}

/// Splits `A /\ B` into two subgoals.
pub fn conj() -> Solver {
    Arc::new(|g: &Goal| {
        if !g.ctx.tick() {
            return Stream::nil();
        }
        let Some((a, b)) = g.concl.dest_conj() else {
            return Stream::nil();
        };
        let subgoals = vec![g.derive(g.metavars.clone(), a.clone()), g.derive(g.metavars.clone(), b.clone())];
        let justify: Justification = Arc::new(|_, proofs| match proofs {
            [p, q] => Theorem::conj(p, q),
            _ => Err(KernelError::Shape("conjunction justification expects two proofs")),
        });
        Stream::single(Goalstate { metavars: g.metavars.clone(), inst: Instantiation::new(), subgoals, justify })
    })
}

fn rebuild(shape: &Term, proofs: &mut std::slice::Iter<'_, Theorem>) -> Result<Theorem, KernelError> {
    match shape.dest_conj() {
        Some((a, b)) => {
            let pa = rebuild(a, proofs)?;
            let pb = rebuild(b, proofs)?;
            Theorem::conj(&pa, &pb)
        }
        None => proofs.next().cloned().ok_or(KernelError::Shape("too few proofs for conjunction")),
    }
}

/// Splits a goal into all of its conjuncts; non-conjunctions pass through.
pub fn split_conj() -> Solver {
    Arc::new(|g: &Goal| {
        if !g.ctx.tick() {
            return Stream::nil();
        }
        let parts = g.concl.conjuncts();
        let subgoals = parts.into_iter().map(|c| g.derive(g.metavars.clone(), c)).collect();
        let shape = g.concl.clone();
        let justify: Justification = Arc::new(move |_, proofs| {
            let mut it = proofs.iter();
            let th = rebuild(&shape, &mut it)?;
            if it.next().is_some() {
                return Err(KernelError::Shape("too many proofs for conjunction"));
            }
            Ok(th)
        });
        Stream::single(Goalstate { metavars: g.metavars.clone(), inst: Instantiation::new(), subgoals, justify })
    })
}

/// Closes `l = r` by unifying `l` with `r`.
pub fn refl() -> Solver {
    Arc::new(|g: &Goal| {
        if !g.ctx.tick() {
            return Stream::nil();
        }
        let Some((l, r)) = g.concl.dest_eq() else {
            return Stream::nil();
        };
        let Some(sigma) = unify(l, r, &g.metavars) else {
            return Stream::nil();
        };
        let l = l.clone();
        let full = sigma.clone();
        let justify: Justification = Arc::new(move |d, _| Theorem::refl(&Instantiation::compose(d, &full).apply(&l)));
        Stream::single(Goalstate { metavars: g.metavars.clone(), inst: sigma, subgoals: vec![], justify })
    })
}

/// Closes `~(s1 = s2)` for distinct string literals.
pub fn string_ne() -> Solver {
    Arc::new(|g: &Goal| {
        if !g.ctx.tick() {
            return Stream::nil();
        }
        let Some((l, r)) = g.concl.dest_neg().and_then(Term::dest_eq) else {
            return Stream::nil();
        };
        match (l.dest_string_lit(), r.dest_string_lit()) {
            (Some(a), Some(b)) if a != b => {}
            _ => return Stream::nil(),
        }
        let (l, r) = (l.clone(), r.clone());
        let justify: Justification = Arc::new(move |_, _| Theorem::string_ne(&l, &r));
        Stream::single(Goalstate { metavars: g.metavars.clone(), inst: Instantiation::new(), subgoals: vec![], justify })
    })
}

pub fn all() -> Solver {
    Arc::new(|g: &Goal| Stream::single(Goalstate::identity(g)))
}

pub fn no() -> Solver {
    Arc::new(|_: &Goal| Stream::nil())
}

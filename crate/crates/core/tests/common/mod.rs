#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use hollog::kernel::{HolType, Instantiation, Term};
use hollog::solver::{solve, SearchContext, Solution};
use hollog::theories::{load_builtin, Theory};
use hollog::unify::{unify, MetaSet};

/// First-order terms over two constants `a`, `b`, two variables `x`, `y`, a
/// unary constructor `g` and a binary constructor `f`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum FoTerm {
    Var(u8),
    Const(u8),
    G(Box<FoTerm>),
    F(Box<FoTerm>, Box<FoTerm>),
}

use FoTerm::*;

/// All terms with at most `depth` levels; atoms have depth 1.
pub fn enumerate(depth: usize) -> Vec<FoTerm> {
    let atoms = vec![Var(0), Var(1), Const(0), Const(1)];
    if depth <= 1 {
        return atoms;
    }
    let smaller = enumerate(depth - 1);
    let mut out = atoms;
    for s in &smaller {
        out.push(G(Box::new(s.clone())));
    }
    for s in &smaller {
        for t in &smaller {
            out.push(F(Box::new(s.clone()), Box::new(t.clone())));
        }
    }
    out
}

impl FoTerm {
    pub fn occurs(&self, v: u8) -> bool {
        match self {
            Var(w) => *w == v,
            Const(_) => false,
            G(a) => a.occurs(v),
            F(a, b) => a.occurs(v) || b.occurs(v),
        }
    }

    pub fn subst(&self, s: &BTreeMap<u8, FoTerm>) -> FoTerm {
        match self {
            Var(v) => s.get(v).cloned().unwrap_or_else(|| self.clone()),
            Const(_) => self.clone(),
            G(a) => G(Box::new(a.subst(s))),
            F(a, b) => F(Box::new(a.subst(s)), Box::new(b.subst(s))),
        }
    }

    pub fn to_hol(&self) -> Term {
        let ind = HolType::con("ind", vec![]);
        match self {
            Var(v) => Term::var(["x", "y"][*v as usize], ind),
            Const(c) => Term::constant(["a", "b"][*c as usize], ind),
            G(a) => Term::comb(Term::constant("g", HolType::fun(ind.clone(), ind)), a.to_hol()).unwrap(),
            F(a, b) => {
                let f = Term::constant("f", HolType::funs([ind.clone(), ind.clone()], ind));
                Term::list_comb(f, [a.to_hol(), b.to_hol()]).unwrap()
            }
        }
    }
}

/// Martelli-Montanari unification: rewrites a set of equations into solved
/// form or fails. The result is idempotent.
pub fn mm_unify(s: &FoTerm, t: &FoTerm) -> Option<BTreeMap<u8, FoTerm>> {
    let mut eqs = vec![(s.clone(), t.clone())];
    let mut solved: BTreeMap<u8, FoTerm> = BTreeMap::new();
    while let Some((l, r)) = eqs.pop() {
        match (l, r) {
            (Var(v), Var(w)) if v == w => {}
            (Var(v), t) | (t, Var(v)) => {
                if t.occurs(v) {
                    return None;
                }
                let one: BTreeMap<u8, FoTerm> = [(v, t.clone())].into();
                for e in eqs.iter_mut() {
                    *e = (e.0.subst(&one), e.1.subst(&one));
                }
                for u in solved.values_mut() {
                    *u = u.subst(&one);
                }
                solved.insert(v, t);
            }
            (Const(a), Const(b)) if a == b => {}
            (G(a), G(b)) => eqs.push((*a, *b)),
            (F(a1, b1), F(a2, b2)) => {
                eqs.push((*a1, *a2));
                eqs.push((*b1, *b2));
            }
            _ => return None,
        }
    }
    Some(solved)
}

/// Ground terms over `a`, `b`, `g`, `f` up to `depth`.
pub fn ground(depth: usize) -> Vec<FoTerm> {
    enumerate(depth).into_iter().filter(|t| !t.occurs(0) && !t.occurs(1)).collect()
}

/// Compares `unify` with the oracle on one pair. On success the two
/// unifiers must agree up to a renaming of `x` and `y`.
pub fn agrees(s: &FoTerm, t: &FoTerm) -> Result<(), String> {
    let metas: MetaSet = ["x", "y"].into_iter().map(std::sync::Arc::from).collect();
    let (hs, ht) = (s.to_hol(), t.to_hol());
    let ours = unify(&hs, &ht, &metas);
    let oracle = mm_unify(s, t);
    match (ours, oracle) {
        (None, None) => Ok(()),
        (Some(sigma), Some(rho)) => {
            if !sigma.apply(&hs).alpha_eq(&sigma.apply(&ht)) {
                return Err(format!("{s:?} ~ {t:?}: result is not a unifier"));
            }
            let vars = [Var(0), Var(1)];
            let swap: BTreeMap<u8, FoTerm> = [(0, Var(1)), (1, Var(0))].into();
            let renamings = [BTreeMap::new(), swap];
            let matches = renamings.iter().any(|ren| {
                vars.iter().all(|v| sigma.apply(&v.to_hol()).alpha_eq(&v.subst(&rho).subst(ren).to_hol()))
            });
            if matches {
                Ok(())
            } else {
                Err(format!("{s:?} ~ {t:?}: unifier differs from oracle {rho:?}"))
            }
        }
        (ours, oracle) => Err(format!("{s:?} ~ {t:?}: unify {} but oracle {}", ours.is_some(), oracle.is_some())),
    }
}

pub fn theory(name: &str) -> Arc<Theory> {
    load_builtin(name).unwrap()
}

/// Solves `query` with the named solver of `theory`, taking up to `n` answers.
pub fn run(theory: &Theory, solver: &str, query: &str, n: usize) -> (Vec<Solution>, Term) {
    let solver = theory.eval_solver(solver).unwrap();
    let q = theory.parse_query(query).unwrap();
    let sols = solve(&solver, &q, SearchContext::new()).take(n);
    (sols, q.body)
}

/// Hypotheses empty and conclusion equal to the query body under the bindings.
pub fn certificate_matches(sol: &Solution, body: &Term) -> Result<(), String> {
    if !sol.certificate.hyps().is_empty() {
        return Err(format!("certificate has hypotheses: {}", sol.certificate));
    }
    let inst = Instantiation::from_terms(sol.bindings.iter().cloned());
    let expected = inst.apply(body);
    if !sol.certificate.concl().alpha_eq(&expected) {
        return Err(format!("certificate proves `{}`, expected `{expected}`", sol.certificate.concl()));
    }
    Ok(())
}

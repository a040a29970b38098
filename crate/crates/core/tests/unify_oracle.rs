mod common;

use std::collections::BTreeMap;

use common::{agrees, enumerate, ground, mm_unify, FoTerm};
use hollog::unify::{unify, MetaSet};

#[test]
fn term_counts() {
    assert_eq!(enumerate(1).len(), 4);
    assert_eq!(enumerate(2).len(), 24);
    assert_eq!(enumerate(3).len(), 604);
}

#[test]
fn exhaustive_agreement_with_oracle() {
    let terms = enumerate(3);
    let mut failures = Vec::new();
    for s in &terms {
        for t in &terms {
            if let Err(e) = agrees(s, t) {
                failures.push(e);
            }
        }
    }
    assert!(failures.is_empty(), "{} disagreements, first: {}", failures.len(), failures[0]);
}

/// The oracle itself against brute force: a pair is unifiable over a finite
/// ground universe only if the oracle succeeds, and every ground unifier
/// factors through the oracle's answer.
#[test]
fn oracle_against_ground_search() {
    let universe = ground(3);
    let terms = enumerate(2);
    for s in &terms {
        for t in &terms {
            let mgu = mm_unify(s, t);
            for gx in &universe {
                for gy in &universe {
                    let theta: BTreeMap<u8, FoTerm> = [(0, gx.clone()), (1, gy.clone())].into();
                    if s.subst(&theta) != t.subst(&theta) {
                        continue;
                    }
                    let rho = mgu.as_ref().unwrap_or_else(|| panic!("{s:?} ~ {t:?} has ground unifier {theta:?}"));
                    for v in [0u8, 1] {
                        let via = FoTerm::Var(v).subst(rho).subst(&theta);
                        assert_eq!(via, theta[&v], "{s:?} ~ {t:?}: {theta:?} is not an instance of {rho:?}");
                    }
                }
            }
        }
    }
}

#[test]
fn non_metavariables_are_rigid() {
    let x = FoTerm::Var(0).to_hol();
    let a = FoTerm::Const(0).to_hol();
    assert!(unify(&x, &a, &MetaSet::new()).is_none());
    let only_y: MetaSet = ["y"].into_iter().map(std::sync::Arc::from).collect();
    assert!(unify(&x, &a, &only_y).is_none());
    assert!(unify(&x, &x, &MetaSet::new()).is_some());
}

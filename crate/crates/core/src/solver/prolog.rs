//! Horn-clause search and the association-list lookup solver.

use std::sync::Arc;

use super::basic::{accept, rule, split_conj, string_ne};
use super::combinators::{collect, concat, every, suspend_with, then};
use super::{Goal, Solver};
use crate::kernel::Theorem;

fn is_clause_rule(th: &Theorem) -> bool {
    th.concl().strip_forall().1.dest_imp().is_some()
}

/// Depth-first search with a database of Horn clauses. Conjunctions of
/// clauses are split; a clause `!xs. A ==> C` is used by backward chaining,
/// any other clause is accepted as a fact.
pub fn prolog(thms: Vec<Theorem>) -> Solver {
    let db: Arc<[Theorem]> = thms.iter().flat_map(Theorem::conjuncts).collect();
    then(split_conj(), database(db))
}

fn database(db: Arc<[Theorem]>) -> Solver {
    let steps = db
        .iter()
        .map(|th| {
            if is_clause_rule(th) {
                let db = db.clone();
                every(vec![rule(th.clone()), split_conj(), suspend_with(move || database(db.clone()))])
            } else {
                accept(th.clone())
            }
        })
        .collect();
    collect(steps)
}

/// Solves `RELASSOC a e y` with the clauses
/// `head: !x a e. RELASSOC a (CONS (x,a) e) x` and
/// `tail: !a b x y e. ~(b = a) /\ RELASSOC a e y ==> RELASSOC a (CONS (x,b) e) y`,
/// discharging the side condition on string literals.
pub fn relassoc(head: Theorem, tail: Theorem) -> Solver {
    let side = {
        let (head, tail) = (head.clone(), tail.clone());
        suspend_with(move || concat(string_ne(), relassoc(head.clone(), tail.clone())))
    };
    let step = every(vec![rule(tail), split_conj(), side]);
    let body = concat(accept(head), step);
    Arc::new(move |g: &Goal| {
        let (f, _) = g.concl.strip_comb();
        if !f.is_const_named("RELASSOC") {
            return crate::stream::Stream::nil();
        }
        body(g)
    })
}

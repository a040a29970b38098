//! Solver combinators.

use std::sync::Arc;

use super::basic::{all, no};
use super::{Goal, Goalstate, Justification, Solver};
use crate::kernel::{Instantiation, KernelError, Theorem};
use crate::stream::{mergef_stream, Stream};
use crate::unify::MetaSet;

/// The states of `s1` followed by those of `s2`. The two streams share turns
/// whenever the first one suspends.
pub fn concat(s1: Solver, s2: Solver) -> Solver {
    Arc::new(move |g: &Goal| {
        let s2 = s2.clone();
        let g2 = g.clone();
        s1(g).mplus(Stream::lazy(move || s2(&g2)))
    })
}

pub fn collect(solvers: Vec<Solver>) -> Solver {
    let mut it = solvers.into_iter().rev();
    match it.next() {
        None => no(),
        Some(last) => it.fold(last, |acc, s| concat(s, acc)),
    }
}

/// Applies `f` to every item and collects the resulting solvers.
pub fn map_collect<T>(f: impl Fn(&T) -> Solver, items: &[T]) -> Solver {
    collect(items.iter().map(f).collect())
}

/// Fair round-robin merge of the solvers' streams.
pub fn interleave(solvers: Vec<Solver>) -> Solver {
    if solvers.is_empty() {
        return no();
    }
    let solvers = Arc::new(solvers);
    Arc::new(move |g: &Goal| mergef_stream(&solvers, Vec::new(), g))
}

/// A solver that builds `s` only when a goal arrives; used for recursion.
pub fn suspend_with(f: impl Fn() -> Solver + Send + Sync + 'static) -> Solver {
    Arc::new(move |g: &Goal| {
        let s = f();
        let g = g.clone();
        Stream::lazy(move || s(&g))
    })
}

/// Delays the application of `s` until its stream is forced.
pub fn suspend(s: Solver) -> Solver {
    Arc::new(move |g: &Goal| {
        let s = s.clone();
        let g = g.clone();
        Stream::lazy(move || s(&g))
    })
}

/// Runs `s1`, then `s2` on every subgoal of each resulting state, threading
/// instantiations from left to right.
pub fn then(s1: Solver, s2: Solver) -> Solver {
    Arc::new(move |g: &Goal| {
        let s2 = s2.clone();
        let goal = g.clone();
        s1(g).bind(move |st| then_state(&goal, st, s2.clone()))
    })
}

pub fn every(solvers: Vec<Solver>) -> Solver {
    let mut it = solvers.into_iter();
    match it.next() {
        None => all(),
        Some(first) => it.fold(first, then),
    }
}

/// `concat(then(s, repeat(s)), all)`.
pub fn repeat(s: Solver) -> Solver {
    let inner = s.clone();
    let rec = suspend_with(move || repeat(inner.clone()));
    concat(then(s, rec), all())
}

struct StepRecord {
    justify: Justification,
    count: usize,
    sigma: Instantiation,
}

#[derive(Clone)]
struct Progress {
    metavars: MetaSet,
    tau: Instantiation,
    open: Vec<Goal>,
    steps: im::Vector<Arc<StepRecord>>,
}

fn then_state(goal: &Goal, st: Goalstate, s2: Solver) -> Stream<Goalstate> {
    refine(goal, st, s2, false)
}

/// Applies `s` to the subgoals of `st`, a state for `goal`: to every
/// subgoal, or only to the first one when `first_only` is set. Complete
/// states pass through unchanged.
pub fn refine(goal: &Goal, st: Goalstate, s: Solver, first_only: bool) -> Stream<Goalstate> {
    if st.subgoals.is_empty() {
        return Stream::single(st);
    }
    let acc = Progress {
        metavars: st.metavars.clone(),
        tau: Instantiation::new(),
        open: Vec::new(),
        steps: im::Vector::new(),
    };
    advance(Arc::new((goal.clone(), st)), 0, acc, s, first_only)
}

fn advance(base: Arc<(Goal, Goalstate)>, i: usize, acc: Progress, s2: Solver, first_only: bool) -> Stream<Goalstate> {
    if i == base.1.subgoals.len() {
        return Stream::single(finish(&base, acc));
    }
    let g0 = &base.1.subgoals[i];
    let concl = if acc.tau.is_empty() { g0.concl.clone() } else { acc.tau.apply(&g0.concl) };
    let goal = g0.derive(acc.metavars.clone(), concl);
    let results = if first_only && i > 0 { Stream::single(Goalstate::identity(&goal)) } else { s2(&goal) };
    results.bind(move |r| {
        let mut next = acc.clone();
        if !r.inst.is_empty() {
            next.open = next.open.iter().map(|o| o.derive(o.metavars.clone(), r.inst.apply(&o.concl))).collect();
            next.tau = Instantiation::compose(&r.inst, &next.tau);
        }
        next.metavars = r.metavars.clone();
        next.open.extend(r.subgoals.iter().cloned());
        next.steps.push_back(Arc::new(StepRecord { justify: r.justify.clone(), count: r.subgoals.len(), sigma: r.inst.clone() }));
        advance(base.clone(), i + 1, next, s2.clone(), first_only)
    })
}

fn finish(base: &Arc<(Goal, Goalstate)>, acc: Progress) -> Goalstate {
    let metavars = acc.metavars.clone();
    let open: Vec<Goal> = acc.open.into_iter().map(|g| g.derive(metavars.clone(), g.concl.clone())).collect();
    let inst = base.0.restrict(&Instantiation::compose(&acc.tau, &base.1.inst));
    let steps = acc.steps;
    let total = open.len();
    let base = base.clone();
    let justify: Justification = Arc::new(move |d, proofs| {
        if proofs.len() != total {
            return Err(KernelError::Shape("wrong number of proofs for goal-state"));
        }
        let mut thms = vec![None; steps.len()];
        let mut end = proofs.len();
        let mut down = d.clone();
        for (k, step) in steps.iter().enumerate().rev() {
            let start = end - step.count;
            thms[k] = Some((step.justify)(&down, &proofs[start..end])?);
            end = start;
            if !step.sigma.is_empty() {
                down = Instantiation::compose(&down, &step.sigma);
            }
        }
        let thms: Vec<Theorem> = thms.into_iter().map(|t| t.expect("every step justified")).collect();
        (base.1.justify)(&down, &thms)
    });
    Goalstate { metavars, inst, subgoals: open, justify }
}

/// Checks every state of `s` by running its justification on assumed
/// subgoals. States whose justification fails or proves the wrong statement
/// are dropped and reported as diagnostics naming `name`.
pub fn valid(name: String, s: Solver) -> Solver {
    Arc::new(move |g: &Goal| {
        let name = name.clone();
        let goal = g.clone();
        s(g).filter(move |st| match check(&goal, st) {
            Ok(()) => true,
            Err(msg) => {
                goal.ctx.report(format!("invalid justification from `{name}`: {msg}"));
                false
            }
        })
    })
}

fn check(g: &Goal, st: &Goalstate) -> Result<(), String> {
    let assumed = st
        .subgoals
        .iter()
        .map(|sg| Theorem::assume(&sg.concl))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let th = (st.justify)(&Instantiation::new(), &assumed).map_err(|e| e.to_string())?;
    let expected = st.inst.apply(&g.concl);
    if !th.concl().alpha_eq(&expected) {
        return Err(format!("proved `{}` instead of `{}`", th.concl(), expected));
    }
    let allowed: Vec<&crate::kernel::Term> = st.subgoals.iter().map(|sg| &sg.concl).collect();
    if let Some(h) = th.hyps().iter().find(|h| !allowed.iter().any(|a| a.alpha_eq(h))) {
        return Err(format!("unexpected hypothesis `{h}`"));
    }
    Ok(())
}

//! Goals, goal-states and solvers.
//!
//! A solver maps a goal to a lazy stream of goal-states. Each goal-state
//! records the instantiation it performed, the subgoals left open and a
//! justification that turns proofs of those subgoals into a proof of the
//! instantiated goal.

mod basic;
mod combinators;
mod prolog;
mod solve;

use std::fmt;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use crate::kernel::{Instantiation, KernelError, Term, Theorem};
use crate::stream::Stream;
use crate::unify::{FreshSource, MetaSet};

pub use basic::{accept, all, conj, no, refl, rule, split_conj, string_ne};
pub use combinators::{collect, concat, every, interleave, map_collect, refine, repeat, suspend, suspend_with, then, valid};
pub use prolog::{prolog, relassoc};
pub use solve::{solve, Solution};

pub type Solver = Arc<dyn Fn(&Goal) -> Stream<Goalstate> + Send + Sync>;

/// Given a downstream instantiation `d` and proofs of `d` applied to each
/// subgoal, proves `d` applied to the instantiated goal.
pub type Justification = Arc<dyn Fn(&Instantiation, &[Theorem]) -> Result<Theorem, KernelError> + Send + Sync>;

/// Shared state of one search: fresh names, the step budget and diagnostics.
#[derive(Debug, Default)]
pub struct SearchContext {
    fresh: FreshSource,
    steps: AtomicU64,
    max_steps: Option<u64>,
    stopped: AtomicBool,
    exceeded: AtomicBool,
    diagnostics: Mutex<Vec<String>>,
}

impl SearchContext {
    pub fn new() -> Arc<SearchContext> {
        Arc::new(SearchContext { fresh: FreshSource::new(), ..Default::default() })
    }

    /// Stops the search after `max_steps` elementary solver applications.
    pub fn with_budget(fresh: FreshSource, max_steps: Option<u64>) -> Arc<SearchContext> {
        Arc::new(SearchContext { fresh, max_steps, ..Default::default() })
    }

    pub fn fresh(&self) -> &FreshSource {
        &self.fresh
    }

    /// Counts one solver application. Returns false once the search must stop.
    pub fn tick(&self) -> bool {
        if self.stopped.load(Ordering::Relaxed) {
            return false;
        }
        let n = self.steps.fetch_add(1, Ordering::Relaxed) + 1;
        if self.max_steps.is_some_and(|m| n > m) {
            self.exceeded.store(true, Ordering::Relaxed);
            self.stopped.store(true, Ordering::Relaxed);
            return false;
        }
        true
    }

    pub fn steps(&self) -> u64 {
        self.steps.load(Ordering::Relaxed)
    }

    /// Whether the step budget ran out.
    pub fn budget_exceeded(&self) -> bool {
        self.exceeded.load(Ordering::Relaxed)
    }

    /// Makes every further solver application fail.
    pub fn cancel(&self) {
        self.stopped.store(true, Ordering::Relaxed);
    }

    pub fn report(&self, msg: String) {
        self.diagnostics.lock().unwrap_or_else(|e| e.into_inner()).push(msg);
    }

    pub fn diagnostics(&self) -> Vec<String> {
        self.diagnostics.lock().unwrap_or_else(|e| e.into_inner()).clone()
    }
}

#[derive(Clone)]
pub struct Goal {
    pub metavars: MetaSet,
    pub assumptions: Arc<Vec<(String, Theorem)>>,
    pub concl: Term,
    pub ctx: Arc<SearchContext>,
}

impl Goal {
    pub fn new(metavars: &[Term], concl: Term, ctx: Arc<SearchContext>) -> Goal {
        let metavars = metavars.iter().filter_map(|v| v.dest_var().map(|(n, _)| n.clone())).collect();
        Goal { metavars, assumptions: Arc::new(Vec::new()), concl, ctx }
    }

    /// The same goal with another conclusion and metavariable set.
    pub fn derive(&self, metavars: MetaSet, concl: Term) -> Goal {
        Goal { metavars, assumptions: self.assumptions.clone(), concl, ctx: self.ctx.clone() }
    }

    /// The part of `sigma` that affects this goal: bindings of metavariables
    /// and type variables occurring in the conclusion.
    pub fn restrict(&self, sigma: &Instantiation) -> Instantiation {
        let mut out = sigma.clone();
        if !out.tm.is_empty() {
            let frees = self.concl.frees();
            out.tm.retain(|v, _| frees.contains(v) && v.name().is_some_and(|n| self.metavars.contains(n)));
        }
        if !out.ty.is_empty() {
            let tvs = self.concl.tyvars();
            out.ty.retain(|a, _| tvs.contains(a));
        }
        out
    }

    /// Free variables of the conclusion that are metavariables, in order.
    pub fn open_metavars(&self) -> Vec<Term> {
        self.concl.frees().into_iter().filter(|v| v.name().is_some_and(|n| self.metavars.contains(n))).collect()
    }
}

impl fmt::Debug for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.concl)
    }
}

#[derive(Clone)]
pub struct Goalstate {
    pub metavars: MetaSet,
    pub inst: Instantiation,
    pub subgoals: Vec<Goal>,
    pub justify: Justification,
}

impl Goalstate {
    /// The identity state: one subgoal, the goal itself.
    pub fn identity(g: &Goal) -> Goalstate {
        Goalstate {
            metavars: g.metavars.clone(),
            inst: Instantiation::new(),
            subgoals: vec![g.clone()],
            justify: Arc::new(|_, proofs: &[Theorem]| match proofs {
                [p] => Ok(p.clone()),
                _ => Err(KernelError::Shape("identity justification expects one proof")),
            }),
        }
    }

    pub fn is_complete(&self) -> bool {
        self.subgoals.is_empty()
    }
}

impl fmt::Debug for Goalstate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Goalstate").field("inst", &self.inst).field("subgoals", &self.subgoals).finish()
    }
}

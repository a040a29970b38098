//! Interactive proof sessions.
//!
//! A session keeps a stack of levels. Each level is a lazy stream of
//! goal-states; `gg` starts a query, `ee` applies a solver on top of the
//! current level, `bb` pops back and `top_thms` harvests the theorems proved
//! by the complete states of the top level.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::kernel::{Instantiation, Term, Theorem};
use crate::solver::{refine, Goal, Goalstate, SearchContext, Solution};
use crate::stream::Stream;
use crate::syntax::Query;
use crate::theories::{load_builtin, Theory, TheoryError};
use crate::unify::FreshSource;

#[derive(Debug, Clone, Error)]
pub enum SessionError {
    #[error("no goal has been started")]
    NoGoal,
    #[error("already at the initial goal state")]
    AtBottom,
    #[error(transparent)]
    Theory(#[from] TheoryError),
}

/// One entry of the goal stack.
#[derive(Clone)]
pub struct Level {
    states: Stream<Goalstate>,
}

impl Level {
    pub fn states(&self) -> &Stream<Goalstate> {
        &self.states
    }

    /// Number of states already computed, without forcing any more.
    pub fn forced_count(&self) -> usize {
        let mut n = 0;
        let mut s = self.states.clone();
        while s.is_forced() {
            match s.uncons() {
                Some((_, t)) => {
                    n += 1;
                    s = t;
                }
                None => break,
            }
        }
        n
    }
}

struct Active {
    query: Query,
    goal: Goal,
    stack: Vec<Level>,
    cursor: Stream<Solution>,
}

/// A goal stack over a theory.
pub struct Session {
    theory: Theory,
    fresh: FreshSource,
    max_steps: Option<u64>,
    active: Option<Active>,
}

impl Default for Session {
    fn default() -> Self {
        Session::new()
    }
}

impl Session {
    /// A session over the prelude.
    pub fn new() -> Session {
        let mut theory = Theory::empty("session");
        let prelude = load_builtin("prelude").expect("prelude theory is well formed");
        theory.import(&prelude).expect("prelude imports into an empty theory");
        Session { theory, fresh: FreshSource::new(), max_steps: None, active: None }
    }

    pub fn with_theory(theory: Theory) -> Session {
        Session { theory, fresh: FreshSource::new(), max_steps: None, active: None }
    }

    pub fn theory(&self) -> &Theory {
        &self.theory
    }

    /// Limits the solver applications of each goal started afterwards.
    pub fn set_max_steps(&mut self, max_steps: Option<u64>) {
        self.max_steps = max_steps;
    }

    /// Merges a built-in theory into the session theory.
    pub fn load_builtin(&mut self, name: &str) -> Result<(), SessionError> {
        let th = load_builtin(name)?;
        self.merge(&th)
    }

    /// Parses a theory file and merges it into the session theory.
    pub fn load_source(&mut self, name: &str, src: &str) -> Result<(), SessionError> {
        let th = Theory::from_source(name, src)?;
        self.merge(&th)
    }

    fn merge(&mut self, th: &Theory) -> Result<(), SessionError> {
        self.theory
            .import(th)
            .map_err(|source| TheoryError::Kernel { theory: th.name().to_string(), line: 0, source })?;
        Ok(())
    }

    /// Starts a new goal from a `??` query.
    pub fn gg(&mut self, query: &str) -> Result<(), SessionError> {
        let query = self.theory.parse_query(query)?;
        let ctx = SearchContext::with_budget(self.fresh.clone(), self.max_steps);
        let goal = Goal::new(&query.vars, query.body.clone(), ctx);
        let level = Level { states: Stream::single(Goalstate::identity(&goal)) };
        let cursor = solutions_of(&query, &goal, &level);
        self.active = Some(Active { query, goal, stack: vec![level], cursor });
        Ok(())
    }

    /// Applies a solver to the first open subgoal of every state of the top level.
    pub fn ee(&mut self, solver: &str) -> Result<(), SessionError> {
        self.apply(solver, true)
    }

    /// Applies a solver to every open subgoal of every state of the top level.
    pub fn ee_all(&mut self, solver: &str) -> Result<(), SessionError> {
        self.apply(solver, false)
    }

    fn apply(&mut self, solver: &str, first_only: bool) -> Result<(), SessionError> {
        let solver = self.theory.eval_solver(solver)?;
        let active = self.active.as_mut().ok_or(SessionError::NoGoal)?;
        let top = active.stack.last().expect("goal stack is nonempty");
        let goal = active.goal.clone();
        let states = top.states.flat_map(move |st| refine(&goal, st, solver.clone(), first_only));
        let level = Level { states };
        active.cursor = solutions_of(&active.query, &active.goal, &level);
        active.stack.push(level);
        Ok(())
    }

    /// Pops the top level. The initial level is never popped.
    pub fn bb(&mut self) -> Result<(), SessionError> {
        let active = self.active.as_mut().ok_or(SessionError::NoGoal)?;
        if active.stack.len() == 1 {
            return Err(SessionError::AtBottom);
        }
        active.stack.pop();
        let top = active.stack.last().expect("goal stack is nonempty");
        active.cursor = solutions_of(&active.query, &active.goal, top);
        Ok(())
    }

    pub fn depth(&self) -> usize {
        self.active.as_ref().map_or(0, |a| a.stack.len())
    }

    pub fn query(&self) -> Option<&Query> {
        self.active.as_ref().map(|a| &a.query)
    }

    pub fn top(&self) -> Option<&Level> {
        self.active.as_ref().and_then(|a| a.stack.last())
    }

    /// The search context of the current goal.
    pub fn context(&self) -> Option<&Arc<SearchContext>> {
        self.active.as_ref().map(|a| &a.goal.ctx)
    }

    /// Instantiations and theorems of the complete states of the top level.
    /// A justification that fails is reported on the search context and skipped.
    pub fn top_thms(&self) -> Result<Stream<(Instantiation, Theorem)>, SessionError> {
        let active = self.active.as_ref().ok_or(SessionError::NoGoal)?;
        let ctx = active.goal.ctx.clone();
        let top = active.stack.last().expect("goal stack is nonempty");
        Ok(top.states.filter_map(move |st| {
            if !st.is_complete() {
                return None;
            }
            match (st.justify)(&Instantiation::new(), &[]) {
                Ok(th) => Some((st.inst.clone(), th)),
                Err(e) => {
                    ctx.report(format!("justification failed: {e}"));
                    None
                }
            }
        }))
    }

    /// The solutions of the top level, as `solve` reports them.
    pub fn solutions(&self) -> Result<Stream<Solution>, SessionError> {
        let active = self.active.as_ref().ok_or(SessionError::NoGoal)?;
        let top = active.stack.last().expect("goal stack is nonempty");
        Ok(solutions_of(&active.query, &active.goal, top))
    }

    /// The next `n` solutions of the top level. Successive calls continue
    /// where the previous one stopped; `ee` and `bb` restart the sequence.
    pub fn take(&mut self, n: usize) -> Result<Vec<Solution>, SessionError> {
        let active = self.active.as_mut().ok_or(SessionError::NoGoal)?;
        let mut out = Vec::new();
        while out.len() < n {
            match active.cursor.uncons() {
                Some((sol, rest)) => {
                    out.push(sol);
                    active.cursor = rest;
                }
                None => break,
            }
        }
        Ok(out)
    }

    /// The current goal stack, rendered as in the interactive transcript.
    pub fn display(&self) -> Display {
        let Some(active) = self.active.as_ref() else {
            return Display::NoGoal;
        };
        let top = active.stack.last().expect("goal stack is nonempty");
        let Some(st) = top.states.get() else {
            return Display::NoStates;
        };
        if st.is_complete() {
            return Display::Complete { forced: top.forced_count() };
        }
        let mut metavars: Vec<Term> = Vec::new();
        for g in &st.subgoals {
            for v in g.open_metavars() {
                if !metavars.contains(&v) {
                    metavars.push(v);
                }
            }
        }
        Display::Open {
            subgoals: st.subgoals.iter().map(|g| g.concl.clone()).collect(),
            metavars,
            forced: top.forced_count(),
        }
    }
}

fn solutions_of(query: &Query, goal: &Goal, level: &Level) -> Stream<Solution> {
    let vars = query.vars.clone();
    let ctx = goal.ctx.clone();
    level.states.filter_map(move |st| {
        if !st.is_complete() {
            return None;
        }
        match Solution::from_state(&vars, &st) {
            Ok(sol) => Some(sol),
            Err(e) => {
                ctx.report(format!("justification failed: {e}"));
                None
            }
        }
    })
}

/// What the goal stack shows: the subgoals of the first state of the top
/// level and the metavariables still open in them. Only the first state is
/// forced.
#[derive(Clone, Debug, PartialEq)]
pub enum Display {
    NoGoal,
    NoStates,
    Complete { forced: usize },
    Open { subgoals: Vec<Term>, metavars: Vec<Term>, forced: usize },
}

impl fmt::Display for Display {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Display::NoGoal => write!(f, "No goal"),
            Display::NoStates => write!(f, "No states"),
            Display::Complete { .. } => write!(f, "No sub(m)goals"),
            Display::Open { subgoals, metavars, .. } => {
                for (i, g) in subgoals.iter().enumerate() {
                    if i > 0 {
                        writeln!(f)?;
                    }
                    write!(f, "`{g}`")?;
                }
                if !metavars.is_empty() {
                    write!(f, "\nMetavariables:")?;
                    for v in metavars {
                        write!(f, " `{v}`,")?;
                    }
                }
                Ok(())
            }
        }
    }
}

use std::fmt;
use std::sync::Arc;

use super::{Goal, Goalstate, SearchContext, Solver};
use crate::kernel::{Instantiation, KernelError, Term, Theorem};
use crate::stream::Stream;
use crate::syntax::Query;

/// A certified answer: values for the query variables and a theorem whose
/// conclusion is the query body under those values.
#[derive(Clone, Debug)]
pub struct Solution {
    pub bindings: Vec<(Term, Term)>,
    pub certificate: Theorem,
}

impl Solution {
    /// Certifies a complete goal-state for a query over `vars`.
    pub fn from_state(vars: &[Term], st: &Goalstate) -> Result<Solution, KernelError> {
        if !st.subgoals.is_empty() {
            return Err(KernelError::Shape("goal-state has open subgoals"));
        }
        let certificate = (st.justify)(&Instantiation::new(), &[])?;
        let bindings = vars.iter().map(|v| (v.clone(), st.inst.apply(v))).collect();
        Ok(Solution { bindings, certificate })
    }
}

impl fmt::Display for Solution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (v, t)) in self.bindings.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v} = {t}")?;
        }
        Ok(())
    }
}

/// The lazy stream of solutions of `query`. States with open subgoals are
/// skipped; a justification that fails is reported on `ctx` and skipped.
pub fn solve(solver: &Solver, query: &Query, ctx: Arc<SearchContext>) -> Stream<Solution> {
    let goal = Goal::new(&query.vars, query.body.clone(), ctx.clone());
    let vars = query.vars.clone();
    solver(&goal).filter_map(move |st| {
        if !st.subgoals.is_empty() {
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

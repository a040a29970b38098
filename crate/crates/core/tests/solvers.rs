mod common;

use std::sync::Arc;

use common::{certificate_matches, run, theory};
use hollog::kernel::{Instantiation, Theorem};
use hollog::solver::{self, solve, Goal, Goalstate, Justification, SearchContext, Solver};
use hollog::stream::Stream;
use hollog::unify::FreshSource;

fn xs(sols: &[hollog::solver::Solution]) -> Vec<String> {
    sols.iter().map(|s| s.bindings[0].1.to_string()).collect()
}

#[test]
fn concat_keeps_order() {
    let th = theory("arith");
    let (sols, body) = run(&th, "concat(refl, accept(ARITH_2_2_4))", "??x. 2 + 2 = x", 10);
    assert_eq!(xs(&sols), ["2 + 2", "4"]);
    let (sols, _) = run(&th, "concat(accept(ARITH_2_2_4), refl)", "??x. 2 + 2 = x", 10);
    assert_eq!(xs(&sols), ["4", "2 + 2"]);
    for s in &sols {
        certificate_matches(s, &body).unwrap();
    }
}

#[test]
fn empty_collect_and_every() {
    let th = theory("arith");
    assert!(run(&th, "collect([])", "??x. x = 1", 5).0.is_empty());
    let all = th.eval_solver("every([])").unwrap();
    let q = th.parse_query("??x. x = 1").unwrap();
    let goal = Goal::new(&q.vars, q.body.clone(), SearchContext::new());
    let states = all(&goal).take(5);
    assert_eq!(states.len(), 1);
    assert_eq!(states[0].subgoals.len(), 1);
}

#[test]
fn then_threads_instantiations() {
    let th = theory("arith");
    let (sols, body) = run(&th, "then(conj, refl)", "??x y. x = y /\\ y = 1", 5);
    assert_eq!(sols.len(), 1);
    assert_eq!(sols[0].to_string(), "x = 1\ny = 1");
    certificate_matches(&sols[0], &body).unwrap();
}

#[test]
fn split_conj_rebuilds_nested_conjunctions() {
    let th = theory("arith");
    let (sols, body) = run(&th, "then(splitconj, refl)", "??x y z. (x = 1 /\\ y = 2) /\\ z = 3", 5);
    assert_eq!(sols[0].to_string(), "x = 1\ny = 2\nz = 3");
    certificate_matches(&sols[0], &body).unwrap();
}

#[test]
fn rule_backward_chains() {
    let th = theory("lists");
    let (sols, body) = run(&th, "then(rule(APPEND_CONS), accept(APPEND_NIL))", "??x. APPEND [1] [2] = x", 5);
    assert_eq!(xs(&sols), ["[1; 2]"]);
    certificate_matches(&sols[0], &body).unwrap();
    assert!(run(&th, "rule(APPEND_CONS)", "??x. 2 + 2 = x", 5).0.is_empty());
}

#[test]
fn repeat_is_lazy() {
    let th = theory("arith");
    let q = th.parse_query("??x. x = 1").unwrap();
    let goal = Goal::new(&q.vars, q.body.clone(), SearchContext::new());
    let states = solver::repeat(solver::all())(&goal).take(20);
    assert_eq!(states.len(), 20);
    assert!(states.iter().all(|st| st.subgoals.len() == 1));
    let (sols, _) = run(&th, "then(repeat(all), refl)", "??x. x = 1", 3);
    assert_eq!(sols.len(), 3);
}

#[test]
fn relassoc_looks_up_keys() {
    let th = theory("lisp");
    let env = "[(Symbol \"one\", \"a\"); (Symbol \"two\", \"b\"); (Symbol \"three\", \"b\")]";
    let (sols, body) = run(&th, "relassoc", &format!("??v. RELASSOC \"b\" {env} v"), 5);
    assert_eq!(xs(&sols), ["Symbol \"two\""]);
    certificate_matches(&sols[0], &body).unwrap();
    assert!(run(&th, "relassoc", &format!("??v. RELASSOC \"c\" {env} v"), 5).0.is_empty());
}

#[test]
fn prolog_over_horn_clauses() {
    let th = theory("lists");
    let (sols, body) = run(&th, "prolog([REVERSE_HORN, APPEND_HORN])", "??r. REVERSE [1;2;3] = r", 5);
    assert_eq!(xs(&sols), ["[3; 2; 1]"]);
    certificate_matches(&sols[0], &body).unwrap();
}

#[test]
fn interleave_does_not_starve_finite_branches() {
    let th = theory("arith");
    let q = th.parse_query("??x. x = 1").unwrap();
    let goal = Goal::new(&q.vars, q.body.clone(), SearchContext::new());
    let endless = solver::repeat(solver::all());
    let merged = solver::interleave(vec![endless.clone(), solver::refl(), endless])(&goal).take(10);
    assert!(merged.iter().take(4).any(Goalstate::is_complete));
}

#[test]
fn step_budget_stops_search() {
    let th = theory("lisp");
    let slv = th.eval_solver("EVAL_SLV").unwrap();
    let q = th.parse_query("??q. EVAL [] q q").unwrap();
    let ctx = SearchContext::with_budget(FreshSource::new(), Some(50));
    let sols = solve(&slv, &q, ctx.clone()).take(3);
    assert!(sols.len() < 3);
    assert!(ctx.budget_exceeded());
    assert!(ctx.steps() <= 60);
}

#[test]
fn cancel_stops_search() {
    let th = theory("lisp");
    let slv = th.eval_solver("EVAL_SLV").unwrap();
    let q = th.parse_query("??q. EVAL [] q q").unwrap();
    let ctx = SearchContext::new();
    ctx.cancel();
    assert!(solve(&slv, &q, ctx.clone()).take(3).is_empty());
    assert!(!ctx.budget_exceeded());
}

/// Claims to close any equation but proves a different one.
fn liar(th: Theorem) -> Solver {
    Arc::new(move |g: &Goal| {
        let th = th.clone();
        let justify: Justification = Arc::new(move |_, _| Ok(th.clone()));
        Stream::single(Goalstate { metavars: g.metavars.clone(), inst: Instantiation::new(), subgoals: vec![], justify })
    })
}

#[test]
fn valid_rejects_wrong_justifications() {
    let th = theory("arith");
    let four = th.theorem("ARITH_2_2_4").unwrap().clone();
    let q = th.parse_query("??x. 1 = x").unwrap();

    let ctx = SearchContext::new();
    let sols = solve(&solver::valid("liar".into(), liar(four.clone())), &q, ctx.clone()).take(5);
    assert!(sols.is_empty());
    assert!(ctx.diagnostics()[0].contains("invalid justification from `liar`"), "{:?}", ctx.diagnostics());

    let q = th.parse_query("??x. 2 + 2 = 4").unwrap();
    let ctx = SearchContext::new();
    assert_eq!(solve(&solver::valid("liar".into(), liar(four)), &q, ctx.clone()).take(5).len(), 1);
    assert!(ctx.diagnostics().is_empty());
}

#[test]
fn solve_skips_unsound_states() {
    let th = theory("arith");
    let q = th.parse_query("??x. 1 = x").unwrap();
    let broken: Solver = Arc::new(|g: &Goal| {
        let justify: Justification =
            Arc::new(|_, _| Err(hollog::kernel::KernelError::Shape("no proof")));
        Stream::single(Goalstate { metavars: g.metavars.clone(), inst: Instantiation::new(), subgoals: vec![], justify })
    });
    let ctx = SearchContext::new();
    assert!(solve(&broken, &q, ctx.clone()).take(5).is_empty());
    assert!(ctx.diagnostics()[0].contains("justification failed"));
}

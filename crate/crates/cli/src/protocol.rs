//! The JSON session protocol: one request object in, one response object out.
//! See `docs/protocol.md` for the message schema.

use hollog::session::{Display, Session, SessionError};
use hollog::syntax::vocabulary;
use hollog::theories::TheoryError;
use serde_json::{json, Map, Value};

use crate::render::solution_json;

/// Serves the requests of one client against its own session.
pub struct Handler {
    session: Session,
}

impl Handler {
    pub fn new(max_steps: Option<u64>) -> Handler {
        let mut session = Session::new();
        session.set_max_steps(max_steps);
        Handler { session }
    }

    pub fn session(&self) -> &Session {
        &self.session
    }

    /// Handles one newline-delimited request and renders the response line.
    pub fn handle_line(&mut self, line: &str) -> String {
        let resp = match serde_json::from_str::<Value>(line) {
            Ok(req) => self.handle(&req),
            Err(e) => error("bad_json", &e.to_string(), None),
        };
        resp.to_string()
    }

    pub fn handle(&mut self, req: &Value) -> Value {
        let mut resp = match self.dispatch(req) {
            Ok(v) => v,
            Err(e) => e,
        };
        if let (Some(id), Some(obj)) = (req.get("id"), resp.as_object_mut()) {
            obj.insert("id".into(), id.clone());
        }
        resp
    }

    fn dispatch(&mut self, req: &Value) -> Result<Value, Value> {
        let op = req.get("op").and_then(Value::as_str).ok_or_else(|| error("bad_request", "missing `op`", None))?;
        match op {
            "load_builtin" => {
                let name = str_field(req, "name")?;
                self.session.load_builtin(name).map_err(session_error)?;
                Ok(json!({ "ok": true, "theory": name }))
            }
            "load_source" => {
                let name = req.get("name").and_then(Value::as_str).unwrap_or("user");
                let source = str_field(req, "source")?;
                self.session.load_source(name, source).map_err(session_error)?;
                Ok(json!({ "ok": true, "theory": name }))
            }
            "start_goal" => {
                let query = str_field(req, "query")?;
                self.session.gg(query).map_err(session_error)?;
                Ok(self.state())
            }
            "apply" => {
                let solver = str_field(req, "solver")?;
                let every = req.get("all").and_then(Value::as_bool).unwrap_or(false);
                let r = if every { self.session.ee_all(solver) } else { self.session.ee(solver) };
                r.map_err(session_error)?;
                Ok(self.state())
            }
            "back" => {
                self.session.bb().map_err(session_error)?;
                Ok(self.state())
            }
            "state" => Ok(self.state()),
            "solutions" => {
                let n = req.get("n").and_then(Value::as_u64).unwrap_or(1) as usize;
                let sols = self.session.take(n).map_err(session_error)?;
                let ctx = self.session.context().expect("a goal is active");
                Ok(json!({
                    "ok": true,
                    "solutions": sols.iter().map(solution_json).collect::<Vec<_>>(),
                    "exhausted": sols.len() < n,
                    "budget_exceeded": ctx.budget_exceeded(),
                    "steps": ctx.steps(),
                    "diagnostics": ctx.diagnostics(),
                }))
            }
            "list_theorems" => {
                let theorems: Vec<Value> = self
                    .session
                    .theory()
                    .theorems()
                    .map(|(n, th)| json!({ "name": n, "statement": th.concl().to_string() }))
                    .collect();
                Ok(json!({ "ok": true, "theorems": theorems }))
            }
            "list_solvers" => {
                let solvers: Vec<Value> = self
                    .session
                    .theory()
                    .solvers()
                    .map(|(n, s)| json!({ "name": n, "expr": s.expr.to_string() }))
                    .collect();
                let combinators: Vec<&str> = vocabulary().collect();
                Ok(json!({ "ok": true, "solvers": solvers, "combinators": combinators }))
            }
            other => Err(error("unknown_op", &format!("unknown op `{other}`"), None)),
        }
    }

    fn state(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("ok".into(), true.into());
        obj.insert("depth".into(), self.session.depth().into());
        let display = self.session.display();
        obj.insert("display".into(), display.to_string().into());
        let forced = self.session.top().map_or(0, |l| l.forced_count());
        obj.insert("states_forced".into(), forced.into());
        let (goal, subgoals, metavars, status) = match &display {
            Display::NoGoal => (None, vec![], vec![], "no_goal"),
            Display::NoStates => (None, vec![], vec![], "no_states"),
            Display::Complete { .. } => (None, vec![], vec![], "complete"),
            Display::Open { subgoals, metavars, .. } => (
                subgoals.first().map(ToString::to_string),
                subgoals.iter().map(ToString::to_string).collect(),
                metavars.iter().map(ToString::to_string).collect(),
                "open",
            ),
        };
        obj.insert("status".into(), status.into());
        obj.insert("goal".into(), goal.map_or(Value::Null, Value::from));
        obj.insert("subgoals".into(), subgoals.into());
        obj.insert("metavars".into(), metavars.into());
        Value::Object(obj)
    }
}

fn str_field<'a>(req: &'a Value, key: &str) -> Result<&'a str, Value> {
    req.get(key)
        .and_then(Value::as_str)
        .ok_or_else(|| error("bad_request", &format!("missing string field `{key}`"), None))
}

fn error(code: &str, message: &str, position: Option<Value>) -> Value {
    let mut obj = json!({ "error": code, "message": message });
    if let Some(p) = position {
        obj["position"] = p;
    }
    obj
}

fn session_error(e: SessionError) -> Value {
    let msg = e.to_string();
    match e {
        SessionError::NoGoal => error("no_goal", &msg, None),
        SessionError::AtBottom => error("at_bottom", &msg, None),
        SessionError::Theory(t) => match t {
            TheoryError::Syntax { line, col, message, .. } => {
                error("parse_error", &message, Some(json!({ "line": line, "column": col })))
            }
            TheoryError::Kernel { .. } => error("kernel_error", &msg, None),
            TheoryError::UnknownTheory(_) | TheoryError::UnknownTheorem(_) | TheoryError::UnknownSolver(_) => {
                error("unknown_name", &msg, None)
            }
            TheoryError::Invalid(_) => error("invalid", &msg, None),
        },
    }
}

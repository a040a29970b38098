//! Text and JSON renderings of solutions shared by every front end.

use hollog::solver::Solution;
use serde_json::{json, Value};

/// The bindings of `sol`, one `var = term` line each, then its certificate.
pub fn solution_text(sol: &Solution) -> String {
    let mut out = String::new();
    for (v, t) in &sol.bindings {
        out.push_str(&format!("{v} = {t}\n"));
    }
    out.push_str(&format!("{}\n", sol.certificate));
    out
}

/// Solutions separated by blank lines.
pub fn solutions_text(sols: &[Solution]) -> String {
    sols.iter().map(solution_text).collect::<Vec<_>>().join("\n")
}

pub fn solution_json(sol: &Solution) -> Value {
    let bindings: Vec<Value> =
        sol.bindings.iter().map(|(v, t)| json!({ "var": v.to_string(), "value": t.to_string() })).collect();
    json!({
        "bindings": bindings,
        "certificate": sol.certificate.to_string(),
        "conclusion": sol.certificate.concl().to_string(),
        "hyps": sol.certificate.hyps().iter().map(ToString::to_string).collect::<Vec<_>>(),
    })
}

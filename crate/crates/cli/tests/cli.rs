use std::io::{BufRead, BufReader, Write};
use std::net::TcpStream;
use std::process::{Child, Command, Output, Stdio};
use std::time::{Duration, Instant};

use serde_json::{json, Value};

fn hollog() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hollog"))
}

fn run(args: &[&str]) -> Output {
    hollog().args(args).output().unwrap()
}

fn run_with_input(args: &[&str], input: &str) -> Output {
    let mut child = hollog().args(args).stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped()).spawn().unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

const APPEND_BACKWARD: &[&str] =
    &["solve", "--builtin", "lists", "--solver", "APPEND_SLV", "--query", "??x y. APPEND x y = [1;2;3]", "--take", "10"];

#[test]
fn solve_backward_append() {
    let o = run(APPEND_BACKWARD);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let xs: Vec<&str> = text.lines().filter(|l| l.starts_with("x = ")).collect();
    assert_eq!(xs, ["x = []", "x = [1]", "x = [1; 2]", "x = [1; 2; 3]"]);
    assert!(text.contains("|- APPEND [1] [2; 3] = [1; 2; 3]\n"));
}

#[test]
fn solve_json_records() {
    let o = run(&["solve", "--builtin", "lists", "--solver", "APPEND_SLV", "--query", "??x. APPEND [1;2] [3] = x", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let lines: Vec<Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 1);
    assert_eq!(lines[0]["bindings"], json!([{ "var": "x", "value": "[1; 2; 3]" }]));
    assert_eq!(lines[0]["conclusion"], "APPEND [1; 2] [3] = [1; 2; 3]");
    assert_eq!(lines[0]["hyps"], json!([]));
}

#[test]
fn solve_exit_codes() {
    let none = run(&["solve", "--builtin", "lists", "--solver", "APPEND_SLV", "--query", "??x. APPEND [1] x = []"]);
    assert_eq!(none.status.code(), Some(1));
    assert_eq!(stdout(&none), "");

    let bad = run(&["solve", "--builtin", "lists", "--solver", "APPEND_SLV", "--query", "??x. APPEND [1 x"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(stderr(&bad).contains("query:1:"), "{}", stderr(&bad));

    let bad_solver = run(&["solve", "--builtin", "lists", "--solver", "concat(refl", "--query", "??x. x = 1"]);
    assert_eq!(bad_solver.status.code(), Some(2));

    let zero = run(&["solve", "--solver", "refl", "--query", "??x. x = 1", "--take", "0"]);
    assert_eq!(zero.status.code(), Some(2));
}

#[test]
fn step_budget_stops_quine_search() {
    let o = run(&["solve", "--builtin", "lisp", "--solver", "EVAL_SLV", "--query", "??q. EVAL [] q q", "--take", "3", "--max-steps", "5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("budget exceeded"));
}

#[test]
fn solve_two_quines() {
    let start = Instant::now();
    let o = run(&["solve", "--builtin", "lisp", "--solver", "EVAL_SLV", "--query", "??q. EVAL [] q q", "--take", "2"]);
    assert!(start.elapsed() < Duration::from_secs(60));
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("q = ")).count(), 2);
}

#[test]
fn repl_transcript() {
    let script = "gg ??x. 2 + 2 = x\nee refl\ntop\nbb\nee accept(ARITH_2_2_4)\ntop\nbb\nee concat(refl, accept(ARITH_2_2_4))\ntop\n";
    let o = run_with_input(&["repl", "--builtin", "arith"], script);
    assert_eq!(o.status.code(), Some(0));
    let expected = "\
`2 + 2 = x`
Metavariables: `x`,
No sub(m)goals
[(([], [(`2 + 2`, `x`)]), |- 2 + 2 = 2 + 2)]
`2 + 2 = x`
Metavariables: `x`,
No sub(m)goals
[(([], [(`4`, `x`)]), |- 2 + 2 = 4)]
`2 + 2 = x`
Metavariables: `x`,
No sub(m)goals
[(([], [(`2 + 2`, `x`)]), |- 2 + 2 = 2 + 2);
 (([], [(`4`, `x`)]), |- 2 + 2 = 4)]
";
    assert_eq!(stdout(&o), expected);
}

#[test]
fn repl_bb_at_bottom_keeps_state() {
    let o = run_with_input(&["repl"], "gg ??x. x = 1\nbb\nee refl\ntake\n");
    let text = stdout(&o);
    assert!(text.contains("already at the initial goal state\n`x = 1`\nMetavariables: `x`,\n"), "{text}");
    assert!(text.contains("x = 1\n|- 1 = 1\n"), "{text}");
}

#[test]
fn repl_load_then_gg() {
    let o = run_with_input(&["repl"], "load lists.thy\ngg ??x. APPEND [1] [2] = x\nee APPEND_SLV\ntake 1\n");
    let text = stdout(&o);
    assert!(text.starts_with("loaded lists.thy\n"), "{text}");
    assert!(text.contains("x = [1; 2]\n|- APPEND [1] [2] = [1; 2]\n"), "{text}");
}

#[test]
fn repl_errors_do_not_stop_the_loop() {
    let o = run_with_input(&["repl"], "ee refl\ngg 1 = 1\nfrob\ngg ??x. x = 2\n");
    let text = stdout(&o);
    assert_eq!(text.matches("error: ").count(), 3, "{text}");
    assert!(text.ends_with("`x = 2`\nMetavariables: `x`,\n"));
}

#[test]
fn batch_and_repl_print_identical_solutions() {
    let batch = stdout(&run(APPEND_BACKWARD));
    let o = run_with_input(&["repl", "--builtin", "lists"], "gg ??x y. APPEND x y = [1;2;3]\nee APPEND_SLV\ntake 4\n");
    let text = stdout(&o);
    let solutions = text.split_once("No sub(m)goals\n").unwrap().1;
    assert_eq!(solutions, batch);

    let batch = stdout(&run(&["solve", "--builtin", "arith", "--solver", "concat(refl, accept(ARITH_2_2_4))", "--query", "??x. 2 + 2 = x", "--take", "5"]));
    assert_eq!(batch, "x = 2 + 2\n|- 2 + 2 = 2 + 2\n\nx = 4\n|- 2 + 2 = 4\n");
    let o = run_with_input(&["repl", "--builtin", "arith"], "gg ??x. 2 + 2 = x\nee concat(refl, accept(ARITH_2_2_4))\ntake 2\n");
    assert_eq!(stdout(&o).split_once("No sub(m)goals\n").unwrap().1, batch);
}

fn exchange(lines: &[Value]) -> Vec<Value> {
    let input: String = lines.iter().map(|l| format!("{l}\n")).collect();
    let o = run_with_input(&["serve", "--stdio"], &input);
    stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn stdio_protocol_session() {
    let r = exchange(&[
        json!({"op": "start_goal", "query": "??x. 2 + 2 = x"}),
        json!({"op": "apply", "solver": "refl"}),
        json!({"op": "solutions", "n": 1}),
        json!({"op": "back"}),
        json!({"op": "apply", "solver": "bogus("}),
    ]);
    assert_eq!(r[0]["goal"], "2 + 2 = x");
    assert_eq!(r[0]["metavars"], json!(["x"]));
    assert_eq!(r[1]["status"], "complete");
    assert_eq!(r[2]["solutions"][0]["bindings"], json!([{ "var": "x", "value": "2 + 2" }]));
    assert_eq!(r[2]["solutions"][0]["certificate"], "|- 2 + 2 = 2 + 2");
    assert_eq!(r[3]["goal"], "2 + 2 = x");
    assert_eq!(r[3]["depth"], 1);
    assert_eq!(r[4]["error"], "parse_error");
    assert!(r[4]["position"]["column"].is_u64());
}

#[test]
fn stdio_solutions_resume() {
    let r = exchange(&[
        json!({"op": "load_builtin", "name": "lists"}),
        json!({"op": "start_goal", "query": "??x y. APPEND x y = [1;2;3]"}),
        json!({"op": "apply", "solver": "APPEND_SLV"}),
        json!({"op": "solutions", "n": 2}),
        json!({"op": "solutions", "n": 2}),
        json!({"op": "solutions", "n": 2}),
    ]);
    let xs = |v: &Value| -> Vec<String> {
        v["solutions"].as_array().unwrap().iter().map(|s| s["bindings"][0]["value"].as_str().unwrap().to_string()).collect()
    };
    assert_eq!(xs(&r[3]), ["[]", "[1]"]);
    assert_eq!(xs(&r[4]), ["[1; 2]", "[1; 2; 3]"]);
    assert_eq!(r[4]["exhausted"], false);
    assert!(xs(&r[5]).is_empty());
    assert_eq!(r[5]["exhausted"], true);
}

#[test]
fn stdio_listings() {
    let r = exchange(&[
        json!({"op": "load_builtin", "name": "arith"}),
        json!({"op": "list_theorems"}),
        json!({"op": "list_solvers"}),
        json!({"op": "load_builtin", "name": "nope"}),
    ]);
    let names: Vec<&str> = r[1]["theorems"].as_array().unwrap().iter().map(|t| t["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"ARITH_2_2_4"));
    assert!(r[2]["solvers"].as_array().unwrap().iter().any(|s| s["name"] == "ARITH_SLV"));
    assert!(r[2]["combinators"].as_array().unwrap().iter().any(|c| c == "concat"));
    assert_eq!(r[3]["error"], "unknown_name");
}

struct Server(Child);

impl Drop for Server {
    fn drop(&mut self) {
        let _ = self.0.kill();
        let _ = self.0.wait();
    }
}

fn start_server(extra: &[&str]) -> (Server, String) {
    let mut child = hollog()
        .args(["serve", "--port", "0"])
        .args(extra)
        .stderr(Stdio::piped())
        .stdout(Stdio::null())
        .spawn()
        .unwrap();
    let mut line = String::new();
    BufReader::new(child.stderr.take().unwrap()).read_line(&mut line).unwrap();
    let addr = line.trim().strip_prefix("listening on ").expect("server announces its address").to_string();
    (Server(child), addr)
}

struct Client {
    reader: BufReader<TcpStream>,
    writer: TcpStream,
}

impl Client {
    fn connect(addr: &str) -> Client {
        let writer = TcpStream::connect(addr).unwrap();
        Client { reader: BufReader::new(writer.try_clone().unwrap()), writer }
    }

    fn send(&mut self, req: Value) -> Value {
        writeln!(self.writer, "{req}").unwrap();
        let mut line = String::new();
        self.reader.read_line(&mut line).unwrap();
        serde_json::from_str(&line).unwrap()
    }
}

#[test]
fn tcp_sessions_are_independent() {
    let (_server, addr) = start_server(&[]);
    let mut a = Client::connect(&addr);
    let mut b = Client::connect(&addr);
    assert_eq!(a.send(json!({"op": "start_goal", "query": "??x. 2 + 2 = x"}))["goal"], "2 + 2 = x");
    assert_eq!(b.send(json!({"op": "state"}))["status"], "no_goal");
    assert_eq!(a.send(json!({"op": "apply", "solver": "refl"}))["status"], "complete");
    let r = a.send(json!({"op": "solutions", "n": 1, "id": "q1"}));
    assert_eq!(r["id"], "q1");
    assert_eq!(r["solutions"][0]["bindings"][0]["value"], "2 + 2");
    assert_eq!(b.send(json!({"op": "back"}))["error"], "no_goal");
}

#[test]
fn http_websocket_session() {
    let (_server, announced) = start_server(&["--http"]);
    let url = announced.replace("http://", "ws://");
    let rt = tokio::runtime::Runtime::new().unwrap();
    rt.block_on(async {
        use futures::{SinkExt, StreamExt};
        use tokio_tungstenite::tungstenite::Message;

        let (mut ws, _) = tokio_tungstenite::connect_async(url.as_str()).await.unwrap();
        let mut send = async |req: Value| -> Value {
            ws.send(Message::text(req.to_string())).await.unwrap();
            loop {
                if let Message::Text(t) = ws.next().await.unwrap().unwrap() {
                    return serde_json::from_str(t.as_str()).unwrap();
                }
            }
        };
        let r = send(json!({"op": "start_goal", "query": "??x. 2 + 2 = x"})).await;
        assert_eq!(r["metavars"], json!(["x"]));
        send(json!({"op": "load_builtin", "name": "arith"})).await;
        send(json!({"op": "apply", "solver": "concat(refl, accept(ARITH_2_2_4))"})).await;
        let r = send(json!({"op": "solutions", "n": 2})).await;
        assert_eq!(r["solutions"][0]["certificate"], "|- 2 + 2 = 2 + 2");
        assert_eq!(r["solutions"][1]["certificate"], "|- 2 + 2 = 4");
    });
}

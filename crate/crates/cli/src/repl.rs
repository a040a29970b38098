//! The line-oriented goal-stack REPL.

use std::io::{self, BufRead, Write};
use std::path::Path;

use hollog::session::{Session, SessionError};
use hollog::theories::builtin_source;

use crate::render::solutions_text;

const HELP: &str = "\
commands:
  gg <query>        start a goal, e.g. gg ??x. 2 + 2 = x
  ee <solver>       apply a solver to the first subgoal of every state
  ee_all <solver>   apply a solver to every subgoal of every state
  bb                undo the last ee
  top [n]           show up to n (default 10) theorems of the top level
  take [n]          print the next n (default 1) solutions
  load <theory>     load a built-in theory or a .thy file
  theorems          list the theorems in scope
  solvers           list the named solvers in scope
  help              show this message
  quit              leave";

/// Runs the REPL until `quit` or end of input. With `prompt` set, `# ` is
/// written before every command.
pub fn run(session: &mut Session, input: impl BufRead, mut out: impl Write, prompt: bool) -> io::Result<()> {
    let mut lines = input.lines();
    loop {
        if prompt {
            write!(out, "# ")?;
            out.flush()?;
        }
        let Some(line) = lines.next() else { break };
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (cmd, arg) = line.split_once(char::is_whitespace).map_or((line, ""), |(c, a)| (c, a.trim()));
        if cmd == "quit" || cmd == "exit" {
            break;
        }
        match command(session, cmd, arg) {
            Ok(text) if text.is_empty() => {}
            Ok(text) => writeln!(out, "{}", text.trim_end_matches('\n'))?,
            Err(msg) => writeln!(out, "error: {msg}")?,
        }
    }
    Ok(())
}

fn command(session: &mut Session, cmd: &str, arg: &str) -> Result<String, String> {
    let err = |e: SessionError| e.to_string();
    match cmd {
        "gg" => {
            session.gg(arg).map_err(err)?;
            Ok(session.display().to_string())
        }
        "ee" => {
            session.ee(arg).map_err(err)?;
            Ok(session.display().to_string())
        }
        "ee_all" => {
            session.ee_all(arg).map_err(err)?;
            Ok(session.display().to_string())
        }
        "bb" => match session.bb() {
            Ok(()) => Ok(session.display().to_string()),
            Err(SessionError::AtBottom) => Ok(format!("already at the initial goal state\n{}", session.display())),
            Err(e) => Err(e.to_string()),
        },
        "top" => {
            let n = count(arg, 10)?;
            let thms = session.top_thms().map_err(err)?.take(n);
            let lines: Vec<String> = thms.iter().map(|(inst, th)| format!("({inst:?}, {th})")).collect();
            Ok(format!("[{}]", lines.join(";\n ")))
        }
        "take" => {
            let n = count(arg, 1)?;
            let sols = session.take(n).map_err(err)?;
            let mut text = solutions_text(&sols);
            if sols.len() < n {
                if let Some(ctx) = session.context().filter(|c| c.budget_exceeded()) {
                    text.push_str(&format!("step budget exceeded after {} steps\n", ctx.steps()));
                } else {
                    text.push_str("no more solutions\n");
                }
            }
            Ok(text)
        }
        "load" => load(session, arg).map(|()| format!("loaded {arg}")),
        "theorems" => {
            let lines: Vec<String> = session.theory().theorems().map(|(n, th)| format!("{n}: {th}")).collect();
            Ok(lines.join("\n"))
        }
        "solvers" => {
            let lines: Vec<String> = session.theory().solvers().map(|(n, s)| format!("{n} = {}", s.expr)).collect();
            Ok(lines.join("\n"))
        }
        "help" => Ok(HELP.to_string()),
        _ => Err(format!("unknown command `{cmd}`; try `help`")),
    }
}

fn count(arg: &str, default: usize) -> Result<usize, String> {
    if arg.is_empty() {
        return Ok(default);
    }
    arg.parse().map_err(|_| format!("expected a count, got `{arg}`"))
}

/// Loads `name` as a file if it exists, otherwise as a built-in theory;
/// `lists.thy` names the built-in `lists` when no such file is present.
pub fn load(session: &mut Session, name: &str) -> Result<(), String> {
    let path = Path::new(name);
    if path.is_file() {
        let src = std::fs::read_to_string(path).map_err(|e| format!("{name}: {e}"))?;
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or(name);
        return session.load_source(stem, &src).map_err(|e| e.to_string());
    }
    let builtin = name.strip_suffix(".thy").unwrap_or(name);
    if builtin_source(builtin).is_none() {
        return Err(format!("no theory file or built-in theory named `{name}`"));
    }
    session.load_builtin(builtin).map_err(|e| e.to_string())
}

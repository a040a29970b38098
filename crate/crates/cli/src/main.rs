use std::io::{self, IsTerminal};
use std::net::TcpListener;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hollog::session::Session;
use hollog::solver::{solve, SearchContext};
use hollog::unify::FreshSource;
use hollog_cli::render::{solution_json, solutions_text};
use hollog_cli::{http, repl, serve};

#[derive(Parser)]
#[command(name = "hollog", version, about = "Certified logic programming over a HOL kernel")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a query and print certified solutions.
    Solve(SolveArgs),
    /// Interactive goal-stack session (gg / ee / bb / top / take).
    Repl(TheoryArgs),
    /// Serve the JSON session protocol.
    Serve(ServeArgs),
}

#[derive(Args)]
struct TheoryArgs {
    /// Built-in theory to load (repeatable): prelude, lists, arith, lisp, sort, lock.
    #[arg(long = "builtin", value_name = "NAME")]
    builtins: Vec<String>,
    /// Theory file to load (repeatable).
    #[arg(long = "theory", value_name = "FILE")]
    theories: Vec<PathBuf>,
    /// Stop each search after this many solver steps.
    #[arg(long)]
    max_steps: Option<u64>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    theory: TheoryArgs,
    /// Solver expression or the name of a solver in scope.
    #[arg(long)]
    solver: String,
    /// Query of the form `??x y. body`.
    #[arg(long)]
    query: String,
    /// Number of solutions to print.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    take: u64,
    /// Print one JSON object per solution.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ServeArgs {
    /// Address to listen on.
    #[arg(long, default_value = "127.0.0.1")]
    host: String,
    /// Port to listen on; 0 picks a free one.
    #[arg(long, default_value_t = 7171)]
    port: u16,
    /// Speak the protocol on stdin/stdout instead of TCP.
    #[arg(long, conflicts_with = "http")]
    stdio: bool,
    /// Serve WebSocket connections at /ws instead of raw TCP.
    #[arg(long)]
    http: bool,
    /// Stop each search after this many solver steps.
    #[arg(long)]
    max_steps: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Repl(args) => cmd_repl(args),
        Command::Serve(args) => cmd_serve(args),
    };
    match result {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn session(args: &TheoryArgs) -> Result<Session, String> {
    let mut session = Session::new();
    session.set_max_steps(args.max_steps);
    for name in &args.builtins {
        session.load_builtin(name).map_err(|e| e.to_string())?;
    }
    for path in &args.theories {
        repl::load(&mut session, &path.to_string_lossy())?;
    }
    Ok(session)
}

fn cmd_solve(args: SolveArgs) -> Result<ExitCode, String> {
    let session = session(&args.theory)?;
    let theory = session.theory();
    let solver = theory.eval_solver(&args.solver).map_err(|e| format!("solver: {e}"))?;
    let query = theory.parse_query(&args.query).map_err(|e| e.to_string())?;
    let ctx = SearchContext::with_budget(FreshSource::new(), args.theory.max_steps);
    let sols = solve(&solver, &query, ctx.clone()).take(args.take as usize);
    if args.json {
        for sol in &sols {
            println!("{}", solution_json(sol));
        }
    } else {
        print!("{}", solutions_text(&sols));
    }
    for d in ctx.diagnostics() {
        eprintln!("warning: {d}");
    }
    if ctx.budget_exceeded() {
        eprintln!("step budget exceeded after {} steps", ctx.steps());
    }
    Ok(match (sols.is_empty(), ctx.budget_exceeded()) {
        (false, _) => ExitCode::SUCCESS,
        (true, false) => ExitCode::from(1),
        (true, true) => ExitCode::from(2),
    })
}

fn cmd_repl(args: TheoryArgs) -> Result<ExitCode, String> {
    let mut session = session(&args)?;
    let stdin = io::stdin();
    let prompt = stdin.is_terminal();
    repl::run(&mut session, stdin.lock(), io::stdout().lock(), prompt).map_err(|e| e.to_string())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_serve(args: ServeArgs) -> Result<ExitCode, String> {
    if args.stdio {
        serve::serve_lines(io::stdin().lock(), io::stdout().lock(), args.max_steps).map_err(|e| e.to_string())?;
        return Ok(ExitCode::SUCCESS);
    }
    let addr = format!("{}:{}", args.host, args.port);
    if args.http {
        let rt = tokio::runtime::Runtime::new().map_err(|e| e.to_string())?;
        return rt.block_on(async {
            let listener = tokio::net::TcpListener::bind(&addr).await.map_err(|e| format!("{addr}: {e}"))?;
            let local = listener.local_addr().map_err(|e| e.to_string())?;
            eprintln!("listening on http://{local}/ws");
            http::serve(listener, args.max_steps).await.map_err(|e| e.to_string())?;
            Ok(ExitCode::SUCCESS)
        });
    }
    let listener = TcpListener::bind(&addr).map_err(|e| format!("{addr}: {e}"))?;
    eprintln!("listening on {}", listener.local_addr().map_err(|e| e.to_string())?);
    serve::serve_tcp(listener, args.max_steps).map_err(|e| e.to_string())?;
    Ok(ExitCode::SUCCESS)
}

//! Newline-delimited JSON over TCP or standard streams.

use std::io::{self, BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};
use std::thread;

use crate::protocol::Handler;

/// Answers every request line of `input` on `out` with a fresh session.
pub fn serve_lines(input: impl BufRead, mut out: impl Write, max_steps: Option<u64>) -> io::Result<()> {
    let mut handler = Handler::new(max_steps);
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        writeln!(out, "{}", handler.handle_line(&line))?;
        out.flush()?;
    }
    Ok(())
}

/// Accepts connections forever, one session and one thread per connection.
pub fn serve_tcp(listener: TcpListener, max_steps: Option<u64>) -> io::Result<()> {
    for stream in listener.incoming() {
        let stream = stream?;
        thread::spawn(move || {
            if let Err(e) = connection(stream, max_steps) {
                eprintln!("connection error: {e}");
            }
        });
    }
    Ok(())
}

fn connection(stream: TcpStream, max_steps: Option<u64>) -> io::Result<()> {
    let reader = BufReader::new(stream.try_clone()?);
    serve_lines(reader, stream, max_steps)
}

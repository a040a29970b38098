//! Batch solving, a line-oriented REPL and a JSON session server for hollog.

pub mod http;
pub mod protocol;
pub mod render;
pub mod repl;
pub mod serve;

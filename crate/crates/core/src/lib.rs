//! Relational programming over a small LCF-style higher-order logic kernel.
//!
//! Queries are solved by lazy, fair search over Horn-clause theorems. Every
//! answer comes with a kernel theorem certifying it.

pub mod kernel;
pub mod session;
pub mod solver;
pub mod stream;
pub mod syntax;
pub mod theories;
pub mod unify;

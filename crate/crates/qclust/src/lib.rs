//! Standard-library companion to `qclust-core`: points and QUBO file
//! formats, timed multi-threaded solving, assignment records, the
//! benchmark harness and the `qclust` command line.

pub mod benchmark;
pub mod cli;
mod error;
pub mod exec;
pub mod formats;
pub mod records;

pub use error::{exit, Error, Result};
pub use qclust_core as core;

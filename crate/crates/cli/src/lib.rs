//! Batch front end for the coset-mean engine: spec files in, JSON or CSV
//! reports out.

pub mod commands;
pub mod error;
pub mod report;
pub mod spec;

pub use commands::{run, Command, RunOptions};
pub use error::{CliError, CliResult};
pub use report::Report;
pub use spec::{emit_spec, parse_spec, SpecFile};

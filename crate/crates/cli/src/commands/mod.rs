//! One module per subcommand. Each `run` returns the process exit code on
//! success; errors bubble up to `main` for uniform reporting.

pub mod aggregate;
pub mod classify;
pub mod evaluate;
pub mod pipeline;
pub mod reproduce;
pub mod train;
pub mod weights;

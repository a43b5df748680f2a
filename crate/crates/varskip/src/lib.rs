//! File formats, configuration, parallel execution and the command-line
//! front end around `varskip-core`.

pub mod checkpoint;
pub mod cli;
pub mod config;
mod error;
pub mod ingest;
pub mod parallel;
pub mod report;
pub mod tablefile;
pub mod workload_file;

pub use error::{AppError, AppResult};

//! File formats, reports, parallel replications and the `blackspace`
//! command-line tool built on `blackspace-core`.

pub mod cli;
mod error;
pub mod replicate;
pub mod report;
pub mod scenario_file;

pub use error::{Error, Result};

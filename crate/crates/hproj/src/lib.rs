//! IO, benchmarking and the `hproj` command line on top of `hproj-core`.

pub mod bench;
pub mod cli;
pub mod error;
pub mod format;
pub mod report;

pub use error::{Error, Result};

//! Command-line driver, file formats and parallel orchestration for
//! `acadperf-core`.

pub mod cli;
pub mod error;
pub mod io;
pub mod manifest;
pub mod pipeline;

pub use error::{AppError, Result};

//! Research performance measurement for full professors.
//!
//! The crate covers the computational side of the pipeline: fractional author
//! credit, field-normalized bibliometric indicators, percentile scaling within
//! field cohorts, fractional-response logit estimation by quasi-maximum
//! likelihood, and a seeded synthetic-cohort generator with known ground
//! truth. It needs only `alloc`; file formats and the command line live in the
//! `acadperf` companion crate.

#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod cohort;
pub mod corpus;
pub mod credit;
pub mod error;
pub mod indicators;
pub mod linalg;
pub mod math;
pub mod regress;
pub mod report;
pub mod sim;

pub use error::{Error, Result};

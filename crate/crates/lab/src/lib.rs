//! Experiment runner, file formats and command-line front end for
//! `monolab-core`.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod error;
pub mod experiment;
pub mod plot;
pub mod record;
pub mod summary;

pub use config::Config;
pub use error::{LabError, Result};
pub use record::ConvergenceRecord;
pub use summary::{Check, CurveSummary, Summary};

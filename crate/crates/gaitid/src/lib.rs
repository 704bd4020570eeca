//! File formats, experiment runner and command-line interface on top of
//! [`gaitid_core`].
//!
//! - [`sequence_csv`]: the 81-column skeleton sequence format.
//! - [`manifest`]: dataset manifests and loading.
//! - [`feature_csv`]: feature tables.
//! - [`report`]: result tables of the evaluation protocols.
//! - [`run`] and [`truth`]: JSON records of runs and synthetic ground truth.
//! - [`cli`]: the `gaitid` command.

pub mod cli;
pub mod error;
pub mod feature_csv;
pub mod manifest;
pub mod report;
pub mod run;
pub mod sequence_csv;
pub mod truth;

pub use error::{Error, Result};

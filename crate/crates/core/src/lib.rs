//! Skeleton-based gait recognition.
//!
//! This crate holds the pure algorithmic part of the system and only needs
//! `alloc`:
//!
//! - [`skeleton`]: the 20-joint skeleton data model and sequence validation.
//! - [`gait`]: per-frame relative distances and the 20-dimensional RDF vector.
//! - [`anthro`]: bone lengths, height, the trimmed-mean AF vector and CF.
//! - [`ensemble`]: Manhattan KNN and the random-subspace majority-vote ensemble.
//! - [`eval`]: cross-validation, K and gallery-size sweeps, CMC curves.
//! - [`synth`]: a seeded synthetic walker used as a ground-truth oracle.
//!
//! File formats, the experiment runner and the command-line tool live in the
//! `gaitid` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod anthro;
pub mod ensemble;
pub mod error;
pub mod eval;
pub mod feature;
pub mod gait;
pub mod rng;
pub mod skeleton;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};
pub use feature::{FeatureSet, FeatureVector};
pub use skeleton::{Dataset, JointId, Point3, SkeletonFrame, SkeletonSequence, TrackingState};

use alloc::string::String;

use crate::skeleton::JointId;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Contract and validation failures raised by the algorithms in this crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("joint id {0} is outside 1..=20")]
    InvalidJoint(u8),

    #[error("frame {frame_index} is not valid: joint {joint} is not tracked")]
    InvalidFrame { frame_index: u64, joint: JointId },

    #[error(
        "sequence {subject_id}/{sequence_id}: need at least {required} valid frames, found {found}"
    )]
    InsufficientData {
        subject_id: String,
        sequence_id: String,
        required: usize,
        found: usize,
    },

    #[error("frame index {next} does not strictly follow {prev}")]
    FrameOrder { prev: u64, next: u64 },

    #[error("duplicate sequence {subject_id}/{sequence_id}")]
    DuplicateSequence {
        subject_id: String,
        sequence_id: String,
    },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("feature names and values differ in length ({names} vs {values})")]
    NameCount { names: usize, values: usize },

    #[error("gallery is empty")]
    EmptyGallery,

    #[error("K = {k} exceeds gallery size {gallery}")]
    KTooLarge { k: usize, gallery: usize },

    #[error("subspace dimension {n} exceeds feature dimension {dim}")]
    SubspaceTooLarge { n: usize, dim: usize },

    #[error("index {index} is out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("cannot vote on an empty label list")]
    EmptyVote,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{folds} folds requested for {sequences} sequences")]
    TooManyFolds { folds: usize, sequences: usize },

    #[error("gallery size {size} exceeds subject count {subjects}")]
    GalleryTooLarge { size: usize, subjects: usize },

    #[error("rank {rank} exceeds class count {classes}")]
    RankTooLarge { rank: usize, classes: usize },
}

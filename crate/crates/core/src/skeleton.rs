//! Skeleton data model: joints, frames, sequences and datasets.
//!
//! Joint numbering follows the 20-joint Kinect v1 skeleton (1 = head,
//! 20 = left foot). Positions are in meters in the sensor frame: x parallel
//! to the sensor, y up, z along the sensor's viewing direction.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// Number of joints in a skeleton frame.
pub const JOINT_COUNT: usize = 20;

const JOINT_NAMES: [&str; JOINT_COUNT] = [
    "Head",
    "Shoulder-Center",
    "Shoulder-Right",
    "Shoulder-Left",
    "Elbow-Right",
    "Elbow-Left",
    "Wrist-Right",
    "Wrist-Left",
    "Hand-Right",
    "Hand-Left",
    "Spine",
    "Hip-Center",
    "Hip-Right",
    "Hip-Left",
    "Knee-Right",
    "Knee-Left",
    "Ankle-Right",
    "Ankle-Left",
    "Foot-Right",
    "Foot-Left",
];

/// A joint number in `1..=20`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "u8", into = "u8"))]
pub struct JointId(u8);

impl JointId {
    pub const HEAD: JointId = JointId(1);
    pub const SHOULDER_CENTER: JointId = JointId(2);
    pub const SHOULDER_RIGHT: JointId = JointId(3);
    pub const SHOULDER_LEFT: JointId = JointId(4);
    pub const ELBOW_RIGHT: JointId = JointId(5);
    pub const ELBOW_LEFT: JointId = JointId(6);
    pub const WRIST_RIGHT: JointId = JointId(7);
    pub const WRIST_LEFT: JointId = JointId(8);
    pub const HAND_RIGHT: JointId = JointId(9);
    pub const HAND_LEFT: JointId = JointId(10);
    pub const SPINE: JointId = JointId(11);
    pub const HIP_CENTER: JointId = JointId(12);
    pub const HIP_RIGHT: JointId = JointId(13);
    pub const HIP_LEFT: JointId = JointId(14);
    pub const KNEE_RIGHT: JointId = JointId(15);
    pub const KNEE_LEFT: JointId = JointId(16);
    pub const ANKLE_RIGHT: JointId = JointId(17);
    pub const ANKLE_LEFT: JointId = JointId(18);
    pub const FOOT_RIGHT: JointId = JointId(19);
    pub const FOOT_LEFT: JointId = JointId(20);

    /// Joints on the right half of the body, the far side when a subject
    /// walks with their left side towards the sensor.
    pub const RIGHT_SIDE: [JointId; 8] = [
        Self::SHOULDER_RIGHT,
        Self::ELBOW_RIGHT,
        Self::WRIST_RIGHT,
        Self::HAND_RIGHT,
        Self::HIP_RIGHT,
        Self::KNEE_RIGHT,
        Self::ANKLE_RIGHT,
        Self::FOOT_RIGHT,
    ];

    pub const fn new(id: u8) -> Result<Self> {
        if id >= 1 && id as usize <= JOINT_COUNT {
            Ok(JointId(id))
        } else {
            Err(Error::InvalidJoint(id))
        }
    }

    pub const fn get(self) -> u8 {
        self.0
    }

    /// Zero-based slot in per-frame arrays.
    pub const fn index(self) -> usize {
        self.0 as usize - 1
    }

    pub fn name(self) -> &'static str {
        JOINT_NAMES[self.index()]
    }

    pub fn all() -> impl Iterator<Item = JointId> {
        (1..=JOINT_COUNT as u8).map(JointId)
    }
}

impl TryFrom<u8> for JointId {
    type Error = Error;

    fn try_from(id: u8) -> Result<Self> {
        JointId::new(id)
    }
}

impl From<JointId> for u8 {
    fn from(j: JointId) -> u8 {
        j.0
    }
}

impl fmt::Display for JointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.0, self.name())
    }
}

/// A 3D position in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const ORIGIN: Point3 = Point3 {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Point3 { x, y, z }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn distance(&self, other: &Point3) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z - other.z;
        libm::sqrt(dx * dx + dy * dy + dz * dz)
    }

    pub fn offset(&self, dir: Point3, len: f64) -> Point3 {
        Point3::new(
            self.x + dir.x * len,
            self.y + dir.y * len,
            self.z + dir.z * len,
        )
    }
}

/// Per-joint tracking state reported by the capture system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum TrackingState {
    NotTracked,
    Inferred,
    #[default]
    Tracked,
}

impl TrackingState {
    /// File encoding: 2 = tracked, 1 = inferred, 0 = not tracked.
    pub const fn code(self) -> u8 {
        match self {
            TrackingState::NotTracked => 0,
            TrackingState::Inferred => 1,
            TrackingState::Tracked => 2,
        }
    }

    pub const fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(TrackingState::NotTracked),
            1 => Some(TrackingState::Inferred),
            2 => Some(TrackingState::Tracked),
            _ => None,
        }
    }
}

/// One time sample of the skeleton.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SkeletonFrame {
    pub frame_index: u64,
    pub positions: [Point3; JOINT_COUNT],
    pub states: [TrackingState; JOINT_COUNT],
}

impl SkeletonFrame {
    /// A frame with every joint tracked.
    pub fn tracked(frame_index: u64, positions: [Point3; JOINT_COUNT]) -> Self {
        SkeletonFrame {
            frame_index,
            positions,
            states: [TrackingState::Tracked; JOINT_COUNT],
        }
    }

    pub fn position(&self, joint: JointId) -> Point3 {
        self.positions[joint.index()]
    }

    pub fn state(&self, joint: JointId) -> TrackingState {
        self.states[joint.index()]
    }

    /// Marks `joint` as lost; lost joints sit at the origin.
    pub fn drop_joint(&mut self, joint: JointId) {
        self.states[joint.index()] = TrackingState::NotTracked;
        self.positions[joint.index()] = Point3::ORIGIN;
    }

    /// First joint that is not tracked at all, if any.
    pub fn first_lost_joint(&self) -> Option<JointId> {
        JointId::all().find(|j| self.state(*j) == TrackingState::NotTracked)
    }

    /// A frame is valid when no joint is `NotTracked`. Inferred joints count
    /// as present.
    pub fn is_valid(&self) -> bool {
        self.first_lost_joint().is_none()
    }

    pub(crate) fn ensure_valid(&self) -> Result<()> {
        match self.first_lost_joint() {
            None => Ok(()),
            Some(joint) => Err(Error::InvalidFrame {
                frame_index: self.frame_index,
                joint,
            }),
        }
    }
}

/// Returns the stored position of `joint`. Lost joints read as the origin.
pub fn joint_position(frame: &SkeletonFrame, joint: JointId) -> Point3 {
    frame.position(joint)
}

/// An ordered run of frames for one walk of one subject.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SkeletonSequence {
    subject_id: String,
    sequence_id: String,
    frames: Vec<SkeletonFrame>,
}

impl SkeletonSequence {
    /// Builds a sequence, checking that frame indices strictly increase.
    pub fn new(
        subject_id: impl Into<String>,
        sequence_id: impl Into<String>,
        frames: Vec<SkeletonFrame>,
    ) -> Result<Self> {
        for pair in frames.windows(2) {
            if pair[1].frame_index <= pair[0].frame_index {
                return Err(Error::FrameOrder {
                    prev: pair[0].frame_index,
                    next: pair[1].frame_index,
                });
            }
        }
        Ok(SkeletonSequence {
            subject_id: subject_id.into(),
            sequence_id: sequence_id.into(),
            frames,
        })
    }

    pub fn subject_id(&self) -> &str {
        &self.subject_id
    }

    pub fn sequence_id(&self) -> &str {
        &self.sequence_id
    }

    pub fn frames(&self) -> &[SkeletonFrame] {
        &self.frames
    }

    pub fn into_frames(self) -> Vec<SkeletonFrame> {
        self.frames
    }

    pub fn valid_frames(&self) -> impl Iterator<Item = &SkeletonFrame> {
        self.frames.iter().filter(|f| f.is_valid())
    }

    /// Fails unless at least `required` frames are valid.
    pub(crate) fn require_valid_frames(&self, required: usize) -> Result<()> {
        let found = self.valid_frames().count();
        if found < required {
            return Err(Error::InsufficientData {
                subject_id: self.subject_id.clone(),
                sequence_id: self.sequence_id.clone(),
                required,
                found,
            });
        }
        Ok(())
    }
}

/// Summary of tracking quality over a sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub total_frames: usize,
    pub valid_frames: usize,
    pub invalid_frames: usize,
    /// NotTracked counts indexed by `JointId::index`.
    pub not_tracked: [usize; JOINT_COUNT],
    /// Inferred counts indexed by `JointId::index`.
    pub inferred: [usize; JOINT_COUNT],
}

impl ValidationReport {
    pub fn not_tracked_count(&self, joint: JointId) -> usize {
        self.not_tracked[joint.index()]
    }

    pub fn inferred_count(&self, joint: JointId) -> usize {
        self.inferred[joint.index()]
    }
}

pub fn validate_sequence(seq: &SkeletonSequence) -> ValidationReport {
    let mut report = ValidationReport {
        total_frames: seq.frames.len(),
        valid_frames: 0,
        invalid_frames: 0,
        not_tracked: [0; JOINT_COUNT],
        inferred: [0; JOINT_COUNT],
    };
    for frame in &seq.frames {
        let mut valid = true;
        for (slot, state) in frame.states.iter().enumerate() {
            match state {
                TrackingState::NotTracked => {
                    report.not_tracked[slot] += 1;
                    valid = false;
                }
                TrackingState::Inferred => report.inferred[slot] += 1,
                TrackingState::Tracked => {}
            }
        }
        if valid {
            report.valid_frames += 1;
        } else {
            report.invalid_frames += 1;
        }
    }
    report
}

/// A collection of sequences with unique `(subject_id, sequence_id)` keys.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    sequences: Vec<SkeletonSequence>,
    /// Free-form provenance notes carried from the manifest.
    pub source: String,
}

impl Dataset {
    pub fn new(sequences: Vec<SkeletonSequence>) -> Result<Self> {
        let mut keys: Vec<(&str, &str)> = sequences
            .iter()
            .map(|s| (s.subject_id(), s.sequence_id()))
            .collect();
        keys.sort_unstable();
        if let Some(pair) = keys.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateSequence {
                subject_id: pair[0].0.into(),
                sequence_id: pair[0].1.into(),
            });
        }
        Ok(Dataset {
            sequences,
            source: String::new(),
        })
    }

    pub fn sequences(&self) -> &[SkeletonSequence] {
        &self.sequences
    }

    pub fn len(&self) -> usize {
        self.sequences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequences.is_empty()
    }

    /// Distinct subject ids in sorted order.
    pub fn subjects(&self) -> Vec<&str> {
        let mut ids: Vec<&str> = self.sequences.iter().map(|s| s.subject_id()).collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }
}

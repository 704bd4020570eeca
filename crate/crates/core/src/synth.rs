//! Seeded synthetic walkers.
//!
//! The generator places joints on the [`BoneGraph::KINECT`] skeleton so every
//! bone has exactly its subject's length, swings the limbs sinusoidally and
//! moves the hip center along +x at constant speed. With the subject facing
//! +x, the left side points to +z; y is up.
//!
//! - Each ankle's x offset from its hip is `±a·sin(θ)`, so with zero noise
//!   `dx1 = (a_right + a_left)·|sin θ|` exactly.
//! - Each hand's x offset from its shoulder follows the opposite leg,
//!   shifted by the subject's arm phase.
//! - The shoulder line twists about the vertical axis; the trunk leans
//!   forward at a constant angle.
//!
//! `θ = 2π·frame/period + start_phase`, where the start phase and the start
//! position are drawn per sequence. Noise is additive Gaussian on every
//! coordinate, plus random occlusion of a chosen joint set.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::anthro::{BoneGraph, BONE_COUNT};
use crate::error::{Error, Result};
use crate::rng::{self, Purpose};
use crate::skeleton::{
    Dataset, JointId as J, Point3, SkeletonFrame, SkeletonSequence, TrackingState, JOINT_COUNT,
};

/// Sampling range of each bone, in [`BoneGraph::KINECT`] edge order. Right
/// bones are drawn as the left bone times `1 ± 2%`.
pub const BONE_RANGES: [(f64, f64); BONE_COUNT] = [
    (0.18, 0.26), // head - shoulder center
    (0.14, 0.22), // shoulder center - shoulder left
    (0.14, 0.22), // shoulder center - shoulder right
    (0.24, 0.34), // shoulder center - spine
    (0.24, 0.32), // upper arm left
    (0.21, 0.28), // forearm left
    (0.06, 0.10), // hand left
    (0.24, 0.32),
    (0.21, 0.28),
    (0.06, 0.10),
    (0.06, 0.12), // spine - hip center
    (0.07, 0.12), // hip left
    (0.07, 0.12),
    (0.38, 0.50), // thigh left
    (0.36, 0.46), // shin left
    (0.07, 0.12), // foot left
    (0.38, 0.50),
    (0.36, 0.46),
    (0.07, 0.12),
];

/// Edge index pairs `(left, right)` for mirrored bones.
const MIRRORED: [(usize, usize); 8] = [
    (1, 2),
    (4, 7),
    (5, 8),
    (6, 9),
    (11, 12),
    (13, 16),
    (14, 17),
    (15, 18),
];

pub const MIN_BONE: f64 = 0.05;
pub const MAX_BONE: f64 = 0.6;
pub const PERIOD_RANGE: (f64, f64) = (28.0, 40.0);
pub const ANKLE_SWING_RANGE: (f64, f64) = (0.12, 0.28);
pub const HAND_SWING_RANGE: (f64, f64) = (0.05, 0.20);
pub const TWIST_RANGE: (f64, f64) = (0.02, 0.12);
pub const LEAN_RANGE: (f64, f64) = (0.0, 0.08);
pub const PHASE_OFFSET_RANGE: (f64, f64) = (-0.3, 0.3);
/// Walking speed in meters per frame (about 0.9 to 1.5 m/s at 30 fps).
pub const SPEED_RANGE: (f64, f64) = (0.03, 0.05);

const SENSOR_DEPTH: f64 = 2.5;
const START_X_RANGE: (f64, f64) = (-2.0, -0.5);
const MIN_PERIOD: f64 = 10.0;

/// Oscillation amplitudes driving the relative distances.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GaitAmplitudes {
    /// Peak x offset of each ankle from its hip, meters, `[right, left]`.
    pub ankle_swing: [f64; 2],
    /// Peak x offset of each hand from its shoulder, meters, `[right, left]`.
    pub hand_swing: [f64; 2],
    /// Peak shoulder-line rotation about the vertical, radians.
    pub shoulder_twist: f64,
    /// Constant forward trunk lean, radians.
    pub trunk_lean: f64,
}

impl GaitAmplitudes {
    pub const STILL: GaitAmplitudes = GaitAmplitudes {
        ankle_swing: [0.0; 2],
        hand_swing: [0.0; 2],
        shoulder_twist: 0.0,
        trunk_lean: 0.0,
    };
}

/// Everything that identifies one synthetic subject.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SubjectParams {
    pub subject_id: String,
    /// Bone lengths in [`BoneGraph::KINECT`] edge order, meters.
    pub bone_lengths: [f64; BONE_COUNT],
    pub amplitudes: GaitAmplitudes,
    /// Gait period in frames.
    pub period: f64,
    /// Phase lead of the arm swing over the opposite leg, radians.
    pub arm_phase: f64,
    /// Phase lead of the shoulder twist over the legs, radians.
    pub twist_phase: f64,
    /// Meters per frame along +x.
    pub speed: f64,
}

impl SubjectParams {
    pub fn validate(&self) -> Result<()> {
        if self
            .bone_lengths
            .iter()
            .any(|l| !(MIN_BONE..=MAX_BONE).contains(l))
        {
            return Err(Error::InvalidConfig(format!(
                "{}: bone lengths must lie in [{MIN_BONE}, {MAX_BONE}]",
                self.subject_id
            )));
        }
        if self.period.is_nan() || self.period < MIN_PERIOD {
            return Err(Error::InvalidConfig(format!(
                "{}: period must be at least {MIN_PERIOD} frames",
                self.subject_id
            )));
        }
        let a = &self.amplitudes;
        let all = [
            a.ankle_swing[0],
            a.ankle_swing[1],
            a.hand_swing[0],
            a.hand_swing[1],
            a.shoulder_twist,
            a.trunk_lean,
        ];
        if all.iter().any(|v| v.is_nan() || *v < 0.0) {
            return Err(Error::InvalidConfig(format!(
                "{}: amplitudes must be non-negative",
                self.subject_id
            )));
        }
        let b = &self.bone_lengths;
        let legs = [b[16] + b[17], b[13] + b[14]];
        let arms = [b[7] + b[8] + b[9], b[4] + b[5] + b[6]];
        for side in 0..2 {
            if a.ankle_swing[side] > legs[side] || a.hand_swing[side] > arms[side] {
                return Err(Error::InvalidConfig(format!(
                    "{}: swing exceeds limb length",
                    self.subject_id
                )));
            }
        }
        Ok(())
    }

    fn bone(&self, a: J, b: J) -> f64 {
        let i = BoneGraph::KINECT.edge_index(a, b).expect("bone in graph");
        self.bone_lengths[i]
    }
}

fn uniform(rng: &mut impl Rng, (lo, hi): (f64, f64)) -> f64 {
    if hi > lo {
        rng.random_range(lo..hi)
    } else {
        lo
    }
}

/// Draws subject parameters from the documented ranges.
pub fn generate_subject(seed: u64, subject_id: impl Into<String>) -> SubjectParams {
    let mut rng = rng::stream(seed, Purpose::SubjectParams, 0);
    let mut bone_lengths = BONE_RANGES.map(|range| uniform(&mut rng, range));
    for (left, right) in MIRRORED {
        bone_lengths[right] = bone_lengths[left] * (1.0 + uniform(&mut rng, (-0.02, 0.02)));
    }
    for l in bone_lengths.iter_mut() {
        *l = l.clamp(MIN_BONE, MAX_BONE);
    }
    let amplitudes = GaitAmplitudes {
        ankle_swing: [
            uniform(&mut rng, ANKLE_SWING_RANGE),
            uniform(&mut rng, ANKLE_SWING_RANGE),
        ],
        hand_swing: [
            uniform(&mut rng, HAND_SWING_RANGE),
            uniform(&mut rng, HAND_SWING_RANGE),
        ],
        shoulder_twist: uniform(&mut rng, TWIST_RANGE),
        trunk_lean: uniform(&mut rng, LEAN_RANGE),
    };
    SubjectParams {
        subject_id: subject_id.into(),
        bone_lengths,
        amplitudes,
        period: uniform(&mut rng, PERIOD_RANGE),
        arm_phase: uniform(&mut rng, PHASE_OFFSET_RANGE),
        twist_phase: uniform(&mut rng, PHASE_OFFSET_RANGE),
        speed: uniform(&mut rng, SPEED_RANGE),
    }
}

/// Measurement noise applied on top of the clean kinematics.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NoiseConfig {
    /// Additive Gaussian std per coordinate per frame, meters.
    pub coordinate_std: f64,
    /// Per-frame, per-joint probability that a joint in `occluded_joints`
    /// is occluded.
    pub occlusion_rate: f64,
    /// Extra Gaussian std added to occluded joints marked `Inferred`, meters.
    pub inferred_std: f64,
    pub occluded_joints: Vec<J>,
    /// `Inferred` keeps a corrupted position; `NotTracked` zeroes it.
    pub occlusion_state: TrackingState,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        NoiseConfig {
            coordinate_std: 0.0,
            occlusion_rate: 0.0,
            inferred_std: 0.05,
            occluded_joints: J::RIGHT_SIDE.to_vec(),
            occlusion_state: TrackingState::Inferred,
        }
    }
}

impl NoiseConfig {
    /// No noise at all.
    pub fn none() -> Self {
        Self::default()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.coordinate_std >= 0.0 && self.inferred_std >= 0.0) {
            return Err(Error::InvalidConfig(
                "noise stds must be non-negative".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.occlusion_rate) {
            return Err(Error::InvalidConfig(
                "occlusion rate must lie in [0, 1]".into(),
            ));
        }
        if self.occlusion_state == TrackingState::Tracked {
            return Err(Error::InvalidConfig(
                "occluded joints cannot be Tracked".into(),
            ));
        }
        Ok(())
    }
}

/// Which joints the generator occluded, one bit per joint per frame
/// (bit `JointId::index`).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OcclusionMask {
    pub frames: Vec<u32>,
}

impl OcclusionMask {
    pub fn is_occluded(&self, frame: usize, joint: J) -> bool {
        self.frames[frame] & (1 << joint.index()) != 0
    }

    /// Frames with at least one occluded joint.
    pub fn occluded_frames(&self) -> usize {
        self.frames.iter().filter(|m| **m != 0).count()
    }

    pub fn joint_count(&self, joint: J) -> usize {
        (0..self.frames.len())
            .filter(|&f| self.is_occluded(f, joint))
            .count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSequence {
    pub sequence: SkeletonSequence,
    pub occlusion: OcclusionMask,
}

/// Joint positions of the clean walker at gait phase `theta`, with the hip
/// center at `root`.
pub fn pose(params: &SubjectParams, root: Point3, theta: f64) -> [Point3; JOINT_COUNT] {
    let a = &params.amplitudes;
    let mut p = [Point3::ORIGIN; JOINT_COUNT];
    let mut set = |j: J, v: Point3| p[j.index()] = v;

    let lean = a.trunk_lean;
    let up = Point3::new(libm::sin(lean), libm::cos(lean), 0.0);
    let spine = root.offset(up, params.bone(J::HIP_CENTER, J::SPINE));
    let neck = spine.offset(up, params.bone(J::SPINE, J::SHOULDER_CENTER));
    let head = neck.offset(up, params.bone(J::SHOULDER_CENTER, J::HEAD));
    set(J::HIP_CENTER, root);
    set(J::SPINE, spine);
    set(J::SHOULDER_CENTER, neck);
    set(J::HEAD, head);

    let twist = a.shoulder_twist * libm::sin(theta + params.twist_phase);
    let to_left = Point3::new(libm::sin(twist), 0.0, libm::cos(twist));
    let to_right = Point3::new(-to_left.x, 0.0, -to_left.z);
    let shoulders = [
        neck.offset(to_right, params.bone(J::SHOULDER_CENTER, J::SHOULDER_RIGHT)),
        neck.offset(to_left, params.bone(J::SHOULDER_CENTER, J::SHOULDER_LEFT)),
    ];
    let hips = [
        root.offset(
            Point3::new(0.0, 0.0, -1.0),
            params.bone(J::HIP_CENTER, J::HIP_RIGHT),
        ),
        root.offset(
            Point3::new(0.0, 0.0, 1.0),
            params.bone(J::HIP_CENTER, J::HIP_LEFT),
        ),
    ];

    // [right, left] chains
    let arms = [
        [
            J::SHOULDER_RIGHT,
            J::ELBOW_RIGHT,
            J::WRIST_RIGHT,
            J::HAND_RIGHT,
        ],
        [J::SHOULDER_LEFT, J::ELBOW_LEFT, J::WRIST_LEFT, J::HAND_LEFT],
    ];
    let legs = [
        [J::HIP_RIGHT, J::KNEE_RIGHT, J::ANKLE_RIGHT, J::FOOT_RIGHT],
        [J::HIP_LEFT, J::KNEE_LEFT, J::ANKLE_LEFT, J::FOOT_LEFT],
    ];
    for side in 0..2 {
        let sign = if side == 0 { 1.0 } else { -1.0 };

        let [hip, knee, ankle, foot] = legs[side];
        let (thigh, shin) = (params.bone(hip, knee), params.bone(knee, ankle));
        let reach = sign * a.ankle_swing[side] * libm::sin(theta);
        let s = (reach / (thigh + shin)).clamp(-1.0, 1.0);
        let c = libm::sqrt(1.0 - s * s);
        let down = Point3::new(s, -c, 0.0);
        let knee_at = hips[side].offset(down, thigh);
        let ankle_at = knee_at.offset(down, shin);
        set(hip, hips[side]);
        set(knee, knee_at);
        set(ankle, ankle_at);
        set(
            foot,
            ankle_at.offset(Point3::new(c, s, 0.0), params.bone(ankle, foot)),
        );

        let [shoulder, elbow, wrist, hand] = arms[side];
        let (upper, fore, palm) = (
            params.bone(shoulder, elbow),
            params.bone(elbow, wrist),
            params.bone(wrist, hand),
        );
        let reach = -sign * a.hand_swing[side] * libm::sin(theta + params.arm_phase);
        let s = (reach / (upper + fore + palm)).clamp(-1.0, 1.0);
        let down = Point3::new(s, -libm::sqrt(1.0 - s * s), 0.0);
        let elbow_at = shoulders[side].offset(down, upper);
        let wrist_at = elbow_at.offset(down, fore);
        set(shoulder, shoulders[side]);
        set(elbow, elbow_at);
        set(wrist, wrist_at);
        set(hand, wrist_at.offset(down, palm));
    }
    p
}

/// Generates one walk of `params` with `n_frames` frames.
pub fn generate_sequence(
    params: &SubjectParams,
    sequence_id: impl Into<String>,
    n_frames: usize,
    noise: &NoiseConfig,
    seed: u64,
) -> Result<SyntheticSequence> {
    if n_frames < 2 {
        return Err(Error::InvalidConfig(
            "a sequence needs at least 2 frames".into(),
        ));
    }
    params.validate()?;
    noise.validate()?;
    let mut rng = rng::stream(seed, Purpose::SequenceNoise, 0);
    let start_x = uniform(&mut rng, START_X_RANGE);
    let start_phase = uniform(&mut rng, (0.0, 2.0 * PI));
    let coord = Normal::new(0.0, noise.coordinate_std).expect("validated std");
    let inferred = Normal::new(0.0, noise.inferred_std).expect("validated std");
    let b = &params.bone_lengths;
    let hip_height = 0.05 + (b[13] + b[14] + b[16] + b[17]) / 2.0;

    let mut frames = Vec::with_capacity(n_frames);
    let mut mask = Vec::with_capacity(n_frames);
    for i in 0..n_frames {
        let t = i as f64;
        let root = Point3::new(start_x + params.speed * t, hip_height, SENSOR_DEPTH);
        let theta = 2.0 * PI * t / params.period + start_phase;
        let mut frame = SkeletonFrame::tracked(i as u64, pose(params, root, theta));
        if noise.coordinate_std > 0.0 {
            for q in frame.positions.iter_mut() {
                q.x += coord.sample(&mut rng);
                q.y += coord.sample(&mut rng);
                q.z += coord.sample(&mut rng);
            }
        }
        let mut bits = 0u32;
        if noise.occlusion_rate > 0.0 {
            for &j in &noise.occluded_joints {
                if !rng.random_bool(noise.occlusion_rate) {
                    continue;
                }
                bits |= 1 << j.index();
                match noise.occlusion_state {
                    TrackingState::NotTracked => frame.drop_joint(j),
                    _ => {
                        frame.states[j.index()] = TrackingState::Inferred;
                        let q = &mut frame.positions[j.index()];
                        q.x += inferred.sample(&mut rng);
                        q.y += inferred.sample(&mut rng);
                        q.z += inferred.sample(&mut rng);
                    }
                }
            }
        }
        frames.push(frame);
        mask.push(bits);
    }
    Ok(SyntheticSequence {
        sequence: SkeletonSequence::new(params.subject_id.clone(), sequence_id, frames)?,
        occlusion: OcclusionMask { frames: mask },
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticDataset {
    pub dataset: Dataset,
    pub subjects: Vec<SubjectParams>,
    /// Occlusion masks aligned with `dataset.sequences()`.
    pub occlusion: Vec<OcclusionMask>,
}

pub fn subject_id(index: usize) -> String {
    format!("S{:03}", index + 1)
}

pub fn sequence_id(index: usize) -> String {
    format!("{:02}", index + 1)
}

/// `n_subjects` subjects with `sequences_per_subject` walks each. Subject
/// parameters are shared by all walks of a subject; every walk draws its own
/// start position, start phase and noise.
pub fn generate_dataset(
    n_subjects: usize,
    sequences_per_subject: usize,
    n_frames: usize,
    noise: &NoiseConfig,
    seed: u64,
) -> Result<SyntheticDataset> {
    if n_subjects == 0 || sequences_per_subject == 0 {
        return Err(Error::InvalidConfig(
            "subject and sequence counts must be positive".into(),
        ));
    }
    let mut subjects = Vec::with_capacity(n_subjects);
    let mut sequences = Vec::with_capacity(n_subjects * sequences_per_subject);
    let mut occlusion = Vec::with_capacity(n_subjects * sequences_per_subject);
    for s in 0..n_subjects {
        let subject_seed = rng::stream(seed, Purpose::SubjectParams, s as u64 + 1).random();
        let params = generate_subject(subject_seed, subject_id(s));
        for q in 0..sequences_per_subject {
            let k = (s * sequences_per_subject + q) as u64;
            let seq_seed = rng::stream(seed, Purpose::SequenceNoise, k + 1).random();
            let generated = generate_sequence(&params, sequence_id(q), n_frames, noise, seq_seed)?;
            sequences.push(generated.sequence);
            occlusion.push(generated.occlusion);
        }
        subjects.push(params);
    }
    let mut dataset = Dataset::new(sequences)?;
    dataset.source = format!(
        "synthetic: {n_subjects} subjects x {sequences_per_subject} sequences x {n_frames} frames, seed {seed}"
    );
    Ok(SyntheticDataset {
        dataset,
        subjects,
        occlusion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anthro::segment_lengths;
    use crate::gait::relative_distances;

    #[test]
    fn subject_draws_are_seeded_and_in_range() {
        let a = generate_subject(5, "A");
        assert_eq!(a, generate_subject(5, "A"));
        assert!(a.validate().is_ok());
        assert!(a
            .bone_lengths
            .iter()
            .all(|l| (MIN_BONE..=MAX_BONE).contains(l)));
        let b = generate_subject(6, "A");
        assert_ne!(a.bone_lengths, b.bone_lengths);
    }

    #[test]
    fn clean_frames_keep_bone_lengths_exactly() {
        let params = generate_subject(1, "A");
        let seq = generate_sequence(&params, "1", 120, &NoiseConfig::none(), 9).unwrap();
        for frame in seq.sequence.frames() {
            let lengths = segment_lengths(frame, &BoneGraph::KINECT).unwrap();
            for (got, want) in lengths.iter().zip(&params.bone_lengths) {
                assert!((got - want).abs() < 1e-9, "{got} vs {want}");
            }
        }
        assert_eq!(seq.occlusion.occluded_frames(), 0);
    }

    #[test]
    fn still_subject_has_constant_distances() {
        let params = SubjectParams {
            amplitudes: GaitAmplitudes::STILL,
            ..generate_subject(2, "A")
        };
        let seq = generate_sequence(&params, "1", 50, &NoiseConfig::none(), 3).unwrap();
        let first = relative_distances(&seq.sequence.frames()[0])
            .unwrap()
            .to_array();
        for frame in seq.sequence.frames() {
            let d = relative_distances(frame).unwrap().to_array();
            for (a, b) in d.iter().zip(&first) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn out_of_range_params_are_rejected() {
        let mut params = generate_subject(2, "A");
        params.period = 5.0;
        assert!(generate_sequence(&params, "1", 10, &NoiseConfig::none(), 0).is_err());
        let params = generate_subject(2, "A");
        assert!(generate_sequence(&params, "1", 1, &NoiseConfig::none(), 0).is_err());
        let noise = NoiseConfig {
            occlusion_rate: 1.5,
            ..NoiseConfig::none()
        };
        assert!(generate_sequence(&params, "1", 10, &noise, 0).is_err());
    }
}

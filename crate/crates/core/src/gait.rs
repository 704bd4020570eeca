//! Relative distance features.
//!
//! Eleven per-axis distances are measured in every frame between joint pairs
//! whose relative motion stays periodic while the subject walks. A sequence
//! is summarised by the means of ten of them and the sample standard
//! deviations of a slightly different ten:
//!
//! | block | components |
//! |-------|------------|
//! | mean  | dx1..dx6, dy1, dy2, dy3, dz1 |
//! | std   | dx1..dx7, dy1, dy2, dy3 |
//!
//! `dx7` only contributes to the std block and `dz1` only to the mean block.

use alloc::vec::Vec;

use crate::error::Result;
use crate::feature::FeatureVector;
use crate::skeleton::{JointId as J, SkeletonFrame, SkeletonSequence};
use crate::stats;

/// Length of each of the two RDF blocks.
pub const BLOCK_LEN: usize = 10;

/// Names of the 11 per-frame distances, in storage order.
pub const DISTANCE_NAMES: [&str; 11] = [
    "dx1", "dx2", "dx3", "dx4", "dx5", "dx6", "dx7", "dy1", "dy2", "dy3", "dz1",
];

/// Positions in [`DISTANCE_NAMES`] that feed the mean block (no `dx7`).
pub const MEAN_COMPONENTS: [usize; BLOCK_LEN] = [0, 1, 2, 3, 4, 5, 7, 8, 9, 10];
/// Positions in [`DISTANCE_NAMES`] that feed the std block (no `dz1`).
pub const STD_COMPONENTS: [usize; BLOCK_LEN] = [0, 1, 2, 3, 4, 5, 6, 7, 8, 9];

/// RDF component names: the mean block followed by the std block.
pub const RDF_NAMES: [&str; 2 * BLOCK_LEN] = [
    "mean_dx1", "mean_dx2", "mean_dx3", "mean_dx4", "mean_dx5", "mean_dx6", "mean_dy1", "mean_dy2",
    "mean_dy3", "mean_dz1", "std_dx1", "std_dx2", "std_dx3", "std_dx4", "std_dx5", "std_dx6",
    "std_dx7", "std_dy1", "std_dy2", "std_dy3",
];

/// The eleven relative distances of one frame, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RelativeDistanceSample {
    /// Ankle to ankle.
    pub dx1: f64,
    /// Elbow to elbow.
    pub dx2: f64,
    /// Hand to hand.
    pub dx3: f64,
    /// Head to ankle midpoint.
    pub dx4: f64,
    /// Spine to ankle midpoint.
    pub dx5: f64,
    /// Wrist to wrist.
    pub dx6: f64,
    /// Shoulder to shoulder.
    pub dx7: f64,
    /// Head height over the feet.
    pub dy1: f64,
    /// Head height over the knees.
    pub dy2: f64,
    /// Foot to foot.
    pub dy3: f64,
    /// Hand to hand, depth axis.
    pub dz1: f64,
}

impl RelativeDistanceSample {
    pub fn to_array(&self) -> [f64; 11] {
        [
            self.dx1, self.dx2, self.dx3, self.dx4, self.dx5, self.dx6, self.dx7, self.dy1,
            self.dy2, self.dy3, self.dz1,
        ]
    }
}

/// Computes the eleven relative distances of a valid frame.
pub fn relative_distances(frame: &SkeletonFrame) -> Result<RelativeDistanceSample> {
    frame.ensure_valid()?;
    Ok(distances_unchecked(frame))
}

fn distances_unchecked(frame: &SkeletonFrame) -> RelativeDistanceSample {
    let p = |j: J| frame.position(j);
    let ankle_mid_x = (p(J::ANKLE_RIGHT).x + p(J::ANKLE_LEFT).x) / 2.0;
    let head = p(J::HEAD);
    RelativeDistanceSample {
        dx1: (p(J::ANKLE_RIGHT).x - p(J::ANKLE_LEFT).x).abs(),
        dx2: (p(J::ELBOW_RIGHT).x - p(J::ELBOW_LEFT).x).abs(),
        dx3: (p(J::HAND_RIGHT).x - p(J::HAND_LEFT).x).abs(),
        dx4: (head.x - ankle_mid_x).abs(),
        dx5: (p(J::SPINE).x - ankle_mid_x).abs(),
        dx6: (p(J::WRIST_RIGHT).x - p(J::WRIST_LEFT).x).abs(),
        dx7: (p(J::SHOULDER_RIGHT).x - p(J::SHOULDER_LEFT).x).abs(),
        dy1: (head.y - (p(J::FOOT_RIGHT).y + p(J::FOOT_LEFT).y) / 2.0).abs(),
        dy2: (head.y - (p(J::KNEE_RIGHT).y + p(J::KNEE_LEFT).y) / 2.0).abs(),
        dy3: (p(J::FOOT_RIGHT).y - p(J::FOOT_LEFT).y).abs(),
        dz1: (p(J::HAND_RIGHT).z - p(J::HAND_LEFT).z).abs(),
    }
}

/// Per-distance time series over the valid frames of `seq`, one `Vec` per
/// entry of [`DISTANCE_NAMES`].
pub fn distance_series(seq: &SkeletonSequence) -> [Vec<f64>; 11] {
    let mut series: [Vec<f64>; 11] = Default::default();
    for frame in seq.valid_frames() {
        for (s, v) in series.iter_mut().zip(distances_unchecked(frame).to_array()) {
            s.push(v);
        }
    }
    series
}

/// The 20-dimensional relative distance feature vector of a sequence.
///
/// Invalid frames are skipped; at least two valid frames are required.
pub fn rdf(seq: &SkeletonSequence) -> Result<FeatureVector> {
    seq.require_valid_frames(2)?;
    let series = distance_series(seq);
    let means = MEAN_COMPONENTS.iter().map(|&i| stats::mean(&series[i]));
    let stds = STD_COMPONENTS
        .iter()
        .map(|&i| stats::sample_std(&series[i]));
    FeatureVector::from_static(&RDF_NAMES, means.chain(stds).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::skeleton::{Point3, JOINT_COUNT};
    use alloc::vec;

    #[test]
    fn coincident_joints_give_zero_distances() {
        let frame = SkeletonFrame::tracked(0, [Point3::new(0.4, 1.0, 2.0); JOINT_COUNT]);
        assert_eq!(
            relative_distances(&frame).unwrap(),
            RelativeDistanceSample::default()
        );
    }

    #[test]
    fn ankle_offsets_feed_dx1_dx4_dx5() {
        let mut pos = [Point3::ORIGIN; JOINT_COUNT];
        pos[J::ANKLE_RIGHT.index()].x = 0.3;
        pos[J::ANKLE_LEFT.index()].x = 0.1;
        let d = relative_distances(&SkeletonFrame::tracked(0, pos)).unwrap();
        assert!((d.dx1 - 0.2).abs() < 1e-15);
        assert!((d.dx4 - 0.2).abs() < 1e-15);
        assert!((d.dx5 - 0.2).abs() < 1e-15);
        let rest = [d.dx2, d.dx3, d.dx6, d.dx7, d.dy1, d.dy2, d.dy3, d.dz1];
        assert!(rest.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn lost_joint_is_a_precondition_error() {
        let mut frame = SkeletonFrame::tracked(4, [Point3::ORIGIN; JOINT_COUNT]);
        frame.drop_joint(J::HAND_LEFT);
        assert!(relative_distances(&frame).is_err());
    }

    #[test]
    fn two_frame_statistics_are_hand_computable() {
        let frame = |i, x: f64| {
            let mut pos = [Point3::ORIGIN; JOINT_COUNT];
            pos[J::ANKLE_RIGHT.index()].x = x;
            // keep dx4/dx5 at zero by moving head and spine to the ankle midpoint
            pos[J::HEAD.index()].x = x / 2.0;
            pos[J::SPINE.index()].x = x / 2.0;
            SkeletonFrame::tracked(i, pos)
        };
        let seq = SkeletonSequence::new("s", "q", vec![frame(0, 1.0), frame(1, 3.0)]).unwrap();
        let v = rdf(&seq).unwrap();
        assert_eq!(v.values()[0], 2.0);
        assert!((v.values()[10] - core::f64::consts::SQRT_2).abs() < 1e-15);
        assert!(v
            .values()
            .iter()
            .enumerate()
            .all(|(i, x)| i == 0 || i == 10 || *x == 0.0));
    }

    #[test]
    fn rdf_needs_two_valid_frames() {
        let mut lost = SkeletonFrame::tracked(1, [Point3::ORIGIN; JOINT_COUNT]);
        lost.drop_joint(J::HEAD);
        let ok = SkeletonFrame::tracked(0, [Point3::ORIGIN; JOINT_COUNT]);
        let seq = SkeletonSequence::new("s", "q", vec![ok, lost]).unwrap();
        assert!(matches!(
            rdf(&seq),
            Err(crate::Error::InsufficientData {
                found: 1,
                required: 2,
                ..
            })
        ));
    }

    #[test]
    fn block_layout_is_pinned() {
        assert_eq!(RDF_NAMES.len(), 20);
        let mean_names: Vec<_> = MEAN_COMPONENTS.iter().map(|&i| DISTANCE_NAMES[i]).collect();
        let std_names: Vec<_> = STD_COMPONENTS.iter().map(|&i| DISTANCE_NAMES[i]).collect();
        assert!(!mean_names.contains(&"dx7") && mean_names.contains(&"dz1"));
        assert!(std_names.contains(&"dx7") && !std_names.contains(&"dz1"));
        for (k, name) in mean_names.iter().enumerate() {
            assert_eq!(RDF_NAMES[k].strip_prefix("mean_"), Some(*name));
        }
        for (k, name) in std_names.iter().enumerate() {
            assert_eq!(RDF_NAMES[BLOCK_LEN + k].strip_prefix("std_"), Some(*name));
        }
    }
}

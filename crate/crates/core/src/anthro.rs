//! Anthropometric features: bone lengths and height.
//!
//! Each of the 19 bone lengths and the height is measured in every valid
//! frame. The sequence-level value is the mean after one pass of dropping
//! samples more than two sample standard deviations from the mean.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::feature::FeatureVector;
use crate::gait;
use crate::skeleton::{JointId as J, SkeletonFrame, SkeletonSequence, JOINT_COUNT};
use crate::stats;

pub const BONE_COUNT: usize = 19;

/// AF component names: the 19 bones of [`BoneGraph::KINECT`] followed by
/// height.
pub const AF_NAMES: [&str; BONE_COUNT + 1] = [
    "len_head_shoulder_center",
    "len_shoulder_center_shoulder_left",
    "len_shoulder_center_shoulder_right",
    "len_shoulder_center_spine",
    "len_shoulder_left_elbow_left",
    "len_elbow_left_wrist_left",
    "len_wrist_left_hand_left",
    "len_shoulder_right_elbow_right",
    "len_elbow_right_wrist_right",
    "len_wrist_right_hand_right",
    "len_spine_hip_center",
    "len_hip_center_hip_left",
    "len_hip_center_hip_right",
    "len_hip_left_knee_left",
    "len_knee_left_ankle_left",
    "len_ankle_left_foot_left",
    "len_hip_right_knee_right",
    "len_knee_right_ankle_right",
    "len_ankle_right_foot_right",
    "height",
];

/// The connected joint pairs of a skeleton, in a fixed order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoneGraph {
    edges: [(J, J); BONE_COUNT],
}

impl BoneGraph {
    /// Standard Kinect v1 topology. Each pair is `(parent, child)` with the
    /// hip center as root.
    pub const KINECT: BoneGraph = BoneGraph {
        edges: [
            (J::SHOULDER_CENTER, J::HEAD),
            (J::SHOULDER_CENTER, J::SHOULDER_LEFT),
            (J::SHOULDER_CENTER, J::SHOULDER_RIGHT),
            (J::SPINE, J::SHOULDER_CENTER),
            (J::SHOULDER_LEFT, J::ELBOW_LEFT),
            (J::ELBOW_LEFT, J::WRIST_LEFT),
            (J::WRIST_LEFT, J::HAND_LEFT),
            (J::SHOULDER_RIGHT, J::ELBOW_RIGHT),
            (J::ELBOW_RIGHT, J::WRIST_RIGHT),
            (J::WRIST_RIGHT, J::HAND_RIGHT),
            (J::HIP_CENTER, J::SPINE),
            (J::HIP_CENTER, J::HIP_LEFT),
            (J::HIP_CENTER, J::HIP_RIGHT),
            (J::HIP_LEFT, J::KNEE_LEFT),
            (J::KNEE_LEFT, J::ANKLE_LEFT),
            (J::ANKLE_LEFT, J::FOOT_LEFT),
            (J::HIP_RIGHT, J::KNEE_RIGHT),
            (J::KNEE_RIGHT, J::ANKLE_RIGHT),
            (J::ANKLE_RIGHT, J::FOOT_RIGHT),
        ],
    };

    /// Accepts 19 edges only if they form a spanning tree over the 20 joints.
    pub fn new(edges: [(J, J); BONE_COUNT]) -> Result<Self> {
        let mut parent: [usize; JOINT_COUNT] = core::array::from_fn(|i| i);
        fn root(parent: &mut [usize; JOINT_COUNT], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        for (a, b) in edges {
            let (ra, rb) = (root(&mut parent, a.index()), root(&mut parent, b.index()));
            if ra == rb {
                return Err(Error::InvalidConfig(alloc::format!(
                    "bone {}-{} closes a cycle",
                    a.get(),
                    b.get()
                )));
            }
            parent[ra] = rb;
        }
        Ok(BoneGraph { edges })
    }

    pub fn edges(&self) -> &[(J, J); BONE_COUNT] {
        &self.edges
    }

    /// Position of the edge `a`-`b` (either orientation).
    pub fn edge_index(&self, a: J, b: J) -> Option<usize> {
        self.edges
            .iter()
            .position(|&(p, c)| (p, c) == (a, b) || (p, c) == (b, a))
    }
}

impl Default for BoneGraph {
    fn default() -> Self {
        BoneGraph::KINECT
    }
}

/// Euclidean length of every bone of `graph`, in edge order.
pub fn segment_lengths(frame: &SkeletonFrame, graph: &BoneGraph) -> Result<[f64; BONE_COUNT]> {
    frame.ensure_valid()?;
    Ok(lengths_unchecked(frame, graph))
}

fn lengths_unchecked(frame: &SkeletonFrame, graph: &BoneGraph) -> [f64; BONE_COUNT] {
    graph
        .edges
        .map(|(a, b)| frame.position(a).distance(&frame.position(b)))
}

/// Neck plus upper and lower spine plus the mean leg length. The hip
/// segments are not part of it.
pub fn height(frame: &SkeletonFrame) -> Result<f64> {
    frame.ensure_valid()?;
    Ok(height_unchecked(frame))
}

fn height_unchecked(frame: &SkeletonFrame) -> f64 {
    let d = |a: J, b: J| frame.position(a).distance(&frame.position(b));
    d(J::HEAD, J::SHOULDER_CENTER)
        + d(J::SHOULDER_CENTER, J::SPINE)
        + d(J::SPINE, J::HIP_CENTER)
        + (d(J::HIP_LEFT, J::KNEE_LEFT)
            + d(J::KNEE_LEFT, J::ANKLE_LEFT)
            + d(J::HIP_RIGHT, J::KNEE_RIGHT)
            + d(J::KNEE_RIGHT, J::ANKLE_RIGHT))
            / 2.0
}

/// Bone lengths and height of a single frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnthroSample {
    pub segment_lengths: [f64; BONE_COUNT],
    pub height: f64,
}

pub fn anthro_sample(frame: &SkeletonFrame) -> Result<AnthroSample> {
    frame.ensure_valid()?;
    Ok(AnthroSample {
        segment_lengths: lengths_unchecked(frame, &BoneGraph::KINECT),
        height: height_unchecked(frame),
    })
}

/// The 20-dimensional anthropometric feature vector of a sequence.
pub fn af(seq: &SkeletonSequence) -> Result<FeatureVector> {
    seq.require_valid_frames(2)?;
    let mut series: [Vec<f64>; BONE_COUNT + 1] = Default::default();
    for frame in seq.valid_frames() {
        let lengths = lengths_unchecked(frame, &BoneGraph::KINECT);
        for (s, v) in series.iter_mut().zip(lengths) {
            s.push(v);
        }
        series[BONE_COUNT].push(height_unchecked(frame));
    }
    let values = series.iter().map(|s| stats::trimmed_mean(s)).collect();
    FeatureVector::from_static(&AF_NAMES, values)
}

/// AF followed by RDF, 40 components.
pub fn cf(seq: &SkeletonSequence) -> Result<FeatureVector> {
    Ok(af(seq)?.concat(gait::rdf(seq)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::skeleton::Point3;
    use alloc::vec;

    #[test]
    fn kinect_graph_is_a_spanning_tree() {
        assert_eq!(
            BoneGraph::new(*BoneGraph::KINECT.edges()),
            Ok(BoneGraph::KINECT)
        );
        let mut edges = *BoneGraph::KINECT.edges();
        edges[18] = (J::HEAD, J::SPINE);
        assert!(BoneGraph::new(edges).is_err());
    }

    #[test]
    fn head_to_shoulder_center_is_a_3_4_5_triangle() {
        let mut pos = [Point3::ORIGIN; JOINT_COUNT];
        pos[J::HEAD.index()] = Point3::new(0.3, 0.4, 0.0);
        let lengths = segment_lengths(&SkeletonFrame::tracked(0, pos), &BoneGraph::KINECT).unwrap();
        assert!((lengths[0] - 0.5).abs() < 1e-15);
        assert!(lengths[1..].iter().all(|l| *l == 0.0));
    }

    #[test]
    fn height_sums_spine_and_mean_leg() {
        // Lay the chain out along y with segment lengths 0.2 (trunk) and 0.4 (legs).
        let mut pos = [Point3::ORIGIN; JOINT_COUNT];
        let mut put = |j: J, y: f64, z: f64| pos[j.index()] = Point3::new(0.0, y, z);
        put(J::HEAD, 1.6, 0.0);
        put(J::SHOULDER_CENTER, 1.4, 0.0);
        put(J::SPINE, 1.2, 0.0);
        put(J::HIP_CENTER, 1.0, 0.0);
        for (hip, knee, ankle, z) in [
            (J::HIP_LEFT, J::KNEE_LEFT, J::ANKLE_LEFT, 0.1),
            (J::HIP_RIGHT, J::KNEE_RIGHT, J::ANKLE_RIGHT, -0.1),
        ] {
            put(hip, 1.0, z);
            put(knee, 0.6, z);
            put(ankle, 0.2, z);
        }
        let h = height(&SkeletonFrame::tracked(0, pos)).unwrap();
        assert!((h - 1.4).abs() < 1e-12, "{h}");
    }

    #[test]
    fn af_trims_the_single_spike() {
        let mut frames = Vec::new();
        for i in 0..100u64 {
            let mut pos = [Point3::ORIGIN; JOINT_COUNT];
            pos[J::HEAD.index()].y = if i == 42 { 100.0 } else { 1.0 };
            frames.push(SkeletonFrame::tracked(i, pos));
        }
        let seq = SkeletonSequence::new("s", "q", frames).unwrap();
        let v = af(&seq).unwrap();
        assert_eq!(v.values()[0], 1.0);
        assert_eq!(v.dim(), 20);
    }

    #[test]
    fn cf_is_af_then_rdf() {
        let frames = vec![
            SkeletonFrame::tracked(0, [Point3::new(0.0, 1.0, 0.0); JOINT_COUNT]),
            SkeletonFrame::tracked(1, [Point3::new(0.5, 1.0, 0.0); JOINT_COUNT]),
        ];
        let seq = SkeletonSequence::new("s", "q", frames).unwrap();
        let c = cf(&seq).unwrap();
        assert_eq!(c.dim(), 40);
        assert_eq!(c.slice(0..20), af(&seq).unwrap());
        assert_eq!(c.slice(20..40), gait::rdf(&seq).unwrap());
    }
}

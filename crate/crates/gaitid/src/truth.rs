//! Ground-truth sidecar written by `gaitid synth`.

use std::fs;
use std::path::Path;

use gaitid_core::synth::{NoiseConfig, OcclusionMask, SubjectParams};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub seed: u64,
    pub frames: usize,
    pub noise: NoiseConfig,
    pub subjects: Vec<SubjectParams>,
    pub sequences: Vec<SequenceTruth>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceTruth {
    pub subject_id: String,
    pub sequence_id: String,
    pub file: String,
    /// Per-frame occlusion bits, bit `j - 1` for joint `j`.
    pub occlusion: OcclusionMask,
}

impl GroundTruth {
    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string(self).expect("ground truth serializes");
        fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: Some(path.into()),
            line: e.line() as u64,
            message: e.to_string(),
        })
    }
}

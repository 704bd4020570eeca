//! Named feature vectors and the feature-set kinds used by the pipeline.

use alloc::borrow::Cow;
use alloc::format;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::skeleton::SkeletonSequence;
use crate::{anthro, gait};

pub type FeatureName = Cow<'static, str>;

/// An ordered list of named real-valued components.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    names: Vec<FeatureName>,
    values: Vec<f64>,
}

impl FeatureVector {
    pub fn new(names: Vec<FeatureName>, values: Vec<f64>) -> Result<Self> {
        if names.len() != values.len() {
            return Err(Error::NameCount {
                names: names.len(),
                values: values.len(),
            });
        }
        Ok(FeatureVector { names, values })
    }

    /// Builds a vector with static component names.
    pub fn from_static(names: &[&'static str], values: Vec<f64>) -> Result<Self> {
        Self::new(names.iter().map(|n| Cow::Borrowed(*n)).collect(), values)
    }

    /// Components named `f1`, `f2`, ...
    pub fn unnamed(values: Vec<f64>) -> Self {
        let names = (1..=values.len())
            .map(|i| Cow::Owned(format!("f{i}")))
            .collect();
        FeatureVector { names, values }
    }

    pub fn names(&self) -> &[FeatureName] {
        &self.names
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Concatenates `self` followed by `other`.
    pub fn concat(mut self, other: FeatureVector) -> FeatureVector {
        self.names.extend(other.names);
        self.values.extend(other.values);
        self
    }

    /// Keeps components `range.start..range.end`.
    pub fn slice(&self, range: core::ops::Range<usize>) -> FeatureVector {
        FeatureVector {
            names: self.names[range.clone()].to_vec(),
            values: self.values[range].to_vec(),
        }
    }
}

/// The feature sets the evaluation protocols can run on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum FeatureSet {
    /// 19 bone lengths and height.
    Af,
    /// Mean and standard deviation of relative distances.
    Rdf,
    /// AF followed by RDF.
    Cf,
    /// The mean half of RDF.
    Mean,
    /// The standard-deviation half of RDF.
    Std,
}

impl FeatureSet {
    pub const ALL: [FeatureSet; 5] = [
        FeatureSet::Af,
        FeatureSet::Rdf,
        FeatureSet::Cf,
        FeatureSet::Mean,
        FeatureSet::Std,
    ];

    pub const fn dim(self) -> usize {
        match self {
            FeatureSet::Af | FeatureSet::Rdf => 20,
            FeatureSet::Cf => 40,
            FeatureSet::Mean | FeatureSet::Std => 10,
        }
    }

    pub const fn as_str(self) -> &'static str {
        match self {
            FeatureSet::Af => "AF",
            FeatureSet::Rdf => "RDF",
            FeatureSet::Cf => "CF",
            FeatureSet::Mean => "MEAN",
            FeatureSet::Std => "STD",
        }
    }

    /// Computes this feature set for one sequence.
    pub fn extract(self, seq: &SkeletonSequence) -> Result<FeatureVector> {
        match self {
            FeatureSet::Af => anthro::af(seq),
            FeatureSet::Rdf => gait::rdf(seq),
            FeatureSet::Cf => anthro::cf(seq),
            FeatureSet::Mean => gait::rdf(seq).map(|v| v.slice(0..gait::BLOCK_LEN)),
            FeatureSet::Std => {
                gait::rdf(seq).map(|v| v.slice(gait::BLOCK_LEN..2 * gait::BLOCK_LEN))
            }
        }
    }
}

impl fmt::Display for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FeatureSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FeatureSet::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidConfig(format!("unknown feature set {s:?}")))
    }
}

//! Evaluation protocols: k-fold cross-validation, K sweep, gallery-size
//! sweep, cumulative match curves and the MEAN/STD ablation.
//!
//! Every protocol emits one [`ProbeRecord`] per classified probe, so all
//! aggregate numbers can be recomputed from the log. Randomness (fold
//! assignment, subject draws, subspaces) is bound to explicit seeds.

use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::{index, SliceRandom};

use crate::ensemble::{Classifier, EnsembleConfig, Gallery};
use crate::error::{Error, Result};
use crate::feature::{FeatureSet, FeatureVector};
use crate::rng::{self, Purpose};
use crate::skeleton::Dataset;
use crate::stats;

/// A feature vector tagged with the sequence it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledFeature {
    pub subject_id: String,
    pub sequence_id: String,
    pub feature: FeatureVector,
}

/// Extracts `set` for every sequence, in dataset order.
pub fn extract_features(dataset: &Dataset, set: FeatureSet) -> Result<Vec<LabeledFeature>> {
    dataset
        .sequences()
        .iter()
        .map(|seq| {
            Ok(LabeledFeature {
                subject_id: seq.subject_id().into(),
                sequence_id: seq.sequence_id().into(),
                feature: set.extract(seq)?,
            })
        })
        .collect()
}

/// Classifier settings shared by all protocols.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Protocol {
    pub ensemble: EnsembleConfig,
    /// Plain KNN on the whole vector when false.
    pub use_rsm: bool,
}

impl Default for Protocol {
    fn default() -> Self {
        Protocol {
            ensemble: EnsembleConfig::default(),
            use_rsm: true,
        }
    }
}

impl Protocol {
    pub fn with_k(self, k: usize) -> Self {
        Protocol {
            ensemble: EnsembleConfig {
                neighbors: k,
                ..self.ensemble
            },
            ..self
        }
    }

    pub fn classifier(&self, dim: usize) -> Result<Classifier> {
        if self.use_rsm {
            Classifier::rsm(dim, &self.ensemble)
        } else if self.ensemble.neighbors == 0 {
            Err(Error::InvalidConfig("K must be positive".into()))
        } else {
            Ok(Classifier::plain(self.ensemble.neighbors))
        }
    }
}

/// Sequence-level assignment of samples to folds, balanced to within one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    folds: usize,
    seed: u64,
    assignment: Vec<usize>,
}

impl FoldPlan {
    /// Shuffles `0..n` with the seed and deals positions round-robin.
    pub fn new(n: usize, folds: usize, seed: u64) -> Result<Self> {
        if folds == 0 {
            return Err(Error::InvalidConfig("fold count must be positive".into()));
        }
        if folds > n {
            return Err(Error::TooManyFolds {
                folds,
                sequences: n,
            });
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng::stream(seed, Purpose::FoldPlan, 0));
        let mut assignment = alloc::vec![0; n];
        for (pos, &sample) in order.iter().enumerate() {
            assignment[sample] = pos % folds;
        }
        Ok(FoldPlan {
            folds,
            seed,
            assignment,
        })
    }

    pub fn folds(&self) -> usize {
        self.folds
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Zero-based fold of sample `i`.
    pub fn fold_of(&self, i: usize) -> usize {
        self.assignment[i]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn members(&self, fold: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&i| self.assignment[i] == fold)
            .collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = alloc::vec![0; self.folds];
        for &f in &self.assignment {
            sizes[f] += 1;
        }
        sizes
    }
}

/// Outcome for one probe.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProbeRecord {
    /// Fold index for cross-validation, probe position for leave-one-out.
    pub group: usize,
    pub subject_id: String,
    pub sequence_id: String,
    pub predicted: String,
    /// One-based rank of the true class; `None` when the gallery holds no
    /// sequence of the probe's subject.
    pub true_rank: Option<usize>,
}

impl ProbeRecord {
    pub fn correct(&self) -> bool {
        self.predicted == self.subject_id
    }
}

/// Aggregate accuracy of one protocol run plus the per-probe log.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvalReport {
    pub feature_set: String,
    pub protocol: Protocol,
    /// Mean of `group_accuracies`.
    pub accuracy: f64,
    /// Correct probes over all probes.
    pub pooled_accuracy: f64,
    /// Accuracy per fold (or per probe for leave-one-out).
    pub group_accuracies: Vec<f64>,
    /// Rank-r identification rates for r = 1..=len.
    pub cmc: Option<Vec<f64>>,
    /// Probes whose subject had no gallery sequence.
    pub unmatched_probes: usize,
    pub probes: Vec<ProbeRecord>,
}

impl EvalReport {
    fn from_probes(
        feature_set: &str,
        protocol: Protocol,
        groups: usize,
        probes: Vec<ProbeRecord>,
    ) -> Self {
        let mut hits = alloc::vec![0usize; groups];
        let mut totals = alloc::vec![0usize; groups];
        for p in &probes {
            totals[p.group] += 1;
            hits[p.group] += p.correct() as usize;
        }
        let group_accuracies: Vec<f64> = hits
            .iter()
            .zip(&totals)
            .map(|(&h, &t)| if t == 0 { 0.0 } else { h as f64 / t as f64 })
            .collect();
        let correct = probes.iter().filter(|p| p.correct()).count();
        EvalReport {
            feature_set: feature_set.into(),
            protocol,
            accuracy: stats::mean(&group_accuracies),
            pooled_accuracy: if probes.is_empty() {
                0.0
            } else {
                correct as f64 / probes.len() as f64
            },
            group_accuracies,
            cmc: None,
            unmatched_probes: probes.iter().filter(|p| p.true_rank.is_none()).count(),
            probes,
        }
    }
}

/// CMC from the probe log: fraction of probes whose true class ranks at or
/// above r, for r = 1..=max_rank.
pub fn cmc_from_probes(probes: &[ProbeRecord], max_rank: usize) -> Vec<f64> {
    let total = probes.len().max(1) as f64;
    (1..=max_rank)
        .map(|r| {
            probes
                .iter()
                .filter(|p| p.true_rank.is_some_and(|t| t <= r))
                .count() as f64
                / total
        })
        .collect()
}

fn classify_split(
    samples: &[LabeledFeature],
    probes: &[usize],
    gallery: &[usize],
    classifier: &Classifier,
    group: usize,
    out: &mut Vec<ProbeRecord>,
) -> Result<()> {
    let gallery = Gallery::new(gallery.iter().map(|&i| {
        let s = &samples[i];
        (s.subject_id.clone(), s.feature.clone())
    }))?;
    for &i in probes {
        let probe = &samples[i];
        let decision = classifier.decide(probe.feature.values(), &gallery)?;
        let true_rank = gallery
            .class_id(&probe.subject_id)
            .and_then(|c| decision.rank_of(c));
        out.push(ProbeRecord {
            group,
            subject_id: probe.subject_id.clone(),
            sequence_id: probe.sequence_id.clone(),
            predicted: gallery.classes()[decision.label].clone(),
            true_rank,
        });
    }
    Ok(())
}

fn feature_dim(samples: &[LabeledFeature]) -> Result<usize> {
    samples
        .first()
        .map(|s| s.feature.dim())
        .ok_or(Error::EmptyGallery)
}

/// Cross-validation over precomputed features with a given fold plan.
pub fn cross_validate(
    samples: &[LabeledFeature],
    feature_set: &str,
    plan: &FoldPlan,
    protocol: &Protocol,
) -> Result<EvalReport> {
    if plan.assignment.len() != samples.len() {
        return Err(Error::DimensionMismatch {
            left: plan.assignment.len(),
            right: samples.len(),
        });
    }
    let classifier = protocol.classifier(feature_dim(samples)?)?;
    let mut records = Vec::with_capacity(samples.len());
    for fold in 0..plan.folds {
        let (test, train): (Vec<usize>, Vec<usize>) =
            (0..samples.len()).partition(|&i| plan.fold_of(i) == fold);
        classify_split(samples, &test, &train, &classifier, fold, &mut records)?;
    }
    Ok(EvalReport::from_probes(
        feature_set,
        *protocol,
        plan.folds,
        records,
    ))
}

/// k-fold cross-validation on precomputed features.
pub fn kfold_cv_features(
    samples: &[LabeledFeature],
    feature_set: &str,
    folds: usize,
    protocol: &Protocol,
    seed: u64,
) -> Result<EvalReport> {
    let plan = FoldPlan::new(samples.len(), folds, seed)?;
    cross_validate(samples, feature_set, &plan, protocol)
}

/// k-fold cross-validation: held-out sequences are probes, the rest the
/// gallery. Partitioning is at sequence level, without stratification.
pub fn kfold_cv(
    dataset: &Dataset,
    set: FeatureSet,
    folds: usize,
    protocol: &Protocol,
    seed: u64,
) -> Result<EvalReport> {
    let samples = extract_features(dataset, set)?;
    kfold_cv_features(&samples, set.as_str(), folds, protocol, seed)
}

/// Each sample in turn is the probe against all others.
pub fn leave_one_out(
    samples: &[LabeledFeature],
    feature_set: &str,
    protocol: &Protocol,
) -> Result<EvalReport> {
    let classifier = protocol.classifier(feature_dim(samples)?)?;
    let mut records = Vec::with_capacity(samples.len());
    for i in 0..samples.len() {
        let rest: Vec<usize> = (0..samples.len()).filter(|&j| j != i).collect();
        classify_split(samples, &[i], &rest, &classifier, i, &mut records)?;
    }
    Ok(EvalReport::from_probes(
        feature_set,
        *protocol,
        samples.len(),
        records,
    ))
}

/// Cross-validation accuracy for every K in `ks`, all on one fold plan.
pub fn k_sweep_features(
    samples: &[LabeledFeature],
    feature_set: &str,
    folds: usize,
    ks: &[usize],
    protocol: &Protocol,
    seed: u64,
) -> Result<Vec<EvalReport>> {
    let plan = FoldPlan::new(samples.len(), folds, seed)?;
    let smallest_gallery = samples.len() - plan.fold_sizes().into_iter().max().unwrap_or(0);
    if let Some(&k) = ks.iter().find(|&&k| k > smallest_gallery) {
        return Err(Error::KTooLarge {
            k,
            gallery: smallest_gallery,
        });
    }
    ks.iter()
        .map(|&k| cross_validate(samples, feature_set, &plan, &protocol.with_k(k)))
        .collect()
}

pub fn k_sweep(
    dataset: &Dataset,
    set: FeatureSet,
    folds: usize,
    ks: &[usize],
    protocol: &Protocol,
    seed: u64,
) -> Result<Vec<(usize, f64)>> {
    let samples = extract_features(dataset, set)?;
    Ok(
        k_sweep_features(&samples, set.as_str(), folds, ks, protocol, seed)?
            .iter()
            .map(|r| (r.protocol.ensemble.neighbors, r.accuracy))
            .collect(),
    )
}

/// Accuracy statistics for one gallery size.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GallerySizeRecord {
    pub size: usize,
    pub mean_accuracy: f64,
    /// Sample standard deviation over repetitions; 0 for one repetition.
    pub std_accuracy: f64,
    pub repetitions: usize,
    pub accuracies: Vec<f64>,
    /// Leave-one-out log of every repetition, `group` = repetition.
    pub probes: Vec<ProbeRecord>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GallerySweepReport {
    pub feature_set: String,
    pub protocol: Protocol,
    pub records: Vec<GallerySizeRecord>,
}

/// For every size P and repetition, draws P subjects, keeps their sequences
/// and runs leave-one-out inside that subset.
pub fn gallery_sweep_features(
    samples: &[LabeledFeature],
    feature_set: &str,
    sizes: &[usize],
    repetitions: usize,
    protocol: &Protocol,
    seed: u64,
) -> Result<GallerySweepReport> {
    if repetitions == 0 {
        return Err(Error::InvalidConfig("repetitions must be positive".into()));
    }
    let mut subjects: Vec<&str> = samples.iter().map(|s| s.subject_id.as_str()).collect();
    subjects.sort_unstable();
    subjects.dedup();
    let mut records = Vec::with_capacity(sizes.len());
    for &size in sizes {
        if size == 0 {
            return Err(Error::InvalidConfig("gallery size must be positive".into()));
        }
        if size > subjects.len() {
            return Err(Error::GalleryTooLarge {
                size,
                subjects: subjects.len(),
            });
        }
        let mut accuracies = Vec::with_capacity(repetitions);
        let mut probes = Vec::new();
        for rep in 0..repetitions {
            let draw_index = ((size as u64) << 32) | rep as u64;
            let mut rng = rng::stream(seed, Purpose::GalleryDraw, draw_index);
            let mut chosen: Vec<&str> = index::sample(&mut rng, subjects.len(), size)
                .into_iter()
                .map(|i| subjects[i])
                .collect();
            chosen.sort_unstable();
            let subset: Vec<LabeledFeature> = samples
                .iter()
                .filter(|s| chosen.binary_search(&s.subject_id.as_str()).is_ok())
                .cloned()
                .collect();
            let report = leave_one_out(&subset, feature_set, protocol)?;
            accuracies.push(report.pooled_accuracy);
            probes.extend(
                report
                    .probes
                    .into_iter()
                    .map(|p| ProbeRecord { group: rep, ..p }),
            );
        }
        records.push(GallerySizeRecord {
            size,
            mean_accuracy: stats::mean(&accuracies),
            std_accuracy: stats::sample_std(&accuracies),
            repetitions,
            accuracies,
            probes,
        });
    }
    Ok(GallerySweepReport {
        feature_set: feature_set.into(),
        protocol: *protocol,
        records,
    })
}

pub fn gallery_sweep(
    dataset: &Dataset,
    set: FeatureSet,
    sizes: &[usize],
    repetitions: usize,
    protocol: &Protocol,
    seed: u64,
) -> Result<GallerySweepReport> {
    let samples = extract_features(dataset, set)?;
    gallery_sweep_features(&samples, set.as_str(), sizes, repetitions, protocol, seed)
}

/// Leave-one-out cumulative match curve up to `max_rank`.
pub fn cmc_features(
    samples: &[LabeledFeature],
    feature_set: &str,
    max_rank: usize,
    protocol: &Protocol,
) -> Result<EvalReport> {
    let mut classes: Vec<&str> = samples.iter().map(|s| s.subject_id.as_str()).collect();
    classes.sort_unstable();
    classes.dedup();
    if max_rank == 0 || max_rank > classes.len() {
        return Err(Error::RankTooLarge {
            rank: max_rank,
            classes: classes.len(),
        });
    }
    let mut report = leave_one_out(samples, feature_set, protocol)?;
    report.cmc = Some(cmc_from_probes(&report.probes, max_rank));
    Ok(report)
}

pub fn cmc(
    dataset: &Dataset,
    set: FeatureSet,
    max_rank: usize,
    protocol: &Protocol,
) -> Result<Vec<f64>> {
    let samples = extract_features(dataset, set)?;
    Ok(cmc_features(&samples, set.as_str(), max_rank, protocol)?
        .cmc
        .unwrap_or_default())
}

/// Cross-validation on the MEAN half, the STD half and the full RDF.
pub fn ablate_rdf_subsets(
    dataset: &Dataset,
    folds: usize,
    protocol: &Protocol,
    seed: u64,
) -> Result<[EvalReport; 3]> {
    let rdf = extract_features(dataset, FeatureSet::Rdf)?;
    ablate_rdf_features(&rdf, folds, protocol, seed)
}

/// As [`ablate_rdf_subsets`], on precomputed RDF vectors.
pub fn ablate_rdf_features(
    rdf: &[LabeledFeature],
    folds: usize,
    protocol: &Protocol,
    seed: u64,
) -> Result<[EvalReport; 3]> {
    if let Some(s) = rdf
        .iter()
        .find(|s| s.feature.dim() != FeatureSet::Rdf.dim())
    {
        return Err(Error::DimensionMismatch {
            left: s.feature.dim(),
            right: FeatureSet::Rdf.dim(),
        });
    }
    let half = |range: core::ops::Range<usize>| -> Vec<LabeledFeature> {
        rdf.iter()
            .map(|s| LabeledFeature {
                feature: s.feature.slice(range.clone()),
                ..s.clone()
            })
            .collect()
    };
    let mean = half(0..10);
    let std = half(10..20);
    Ok([
        kfold_cv_features(&mean, FeatureSet::Mean.as_str(), folds, protocol, seed)?,
        kfold_cv_features(&std, FeatureSet::Std.as_str(), folds, protocol, seed)?,
        kfold_cv_features(rdf, FeatureSet::Rdf.as_str(), folds, protocol, seed)?,
    ])
}

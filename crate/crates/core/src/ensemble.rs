//! Manhattan-distance KNN and the random-subspace majority-vote ensemble.
//!
//! Ties are always broken deterministically:
//!
//! - equal distances: the lower gallery index is nearer;
//! - equal neighbor counts in KNN: the class of the single nearest neighbor
//!   wins if it is among the tied classes, otherwise the lexicographically
//!   smallest label;
//! - equal vote counts: the lexicographically smallest label.
//!
//! No feature scaling is applied before measuring distances.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::seq::index;

use crate::error::{Error, Result};
use crate::feature::{FeatureName, FeatureVector};
use crate::rng::{self, Purpose};

/// Sum of absolute component differences.
pub fn manhattan_distance(a: &FeatureVector, b: &FeatureVector) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(manhattan(a.values(), b.values()))
}

/// Slice form of [`manhattan_distance`]; both slices must have equal length.
pub fn manhattan(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

fn manhattan_on(a: &[f64], b: &[f64], indices: &[usize]) -> f64 {
    indices.iter().map(|&i| (a[i] - b[i]).abs()).sum()
}

/// Labeled reference vectors, all of one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Gallery {
    names: Vec<FeatureName>,
    dim: usize,
    rows: Vec<f64>,
    labels: Vec<String>,
    /// Sorted unique labels, so class ids order like their labels.
    classes: Vec<String>,
    class_of: Vec<usize>,
}

impl Gallery {
    pub fn new<I>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (String, FeatureVector)>,
    {
        let mut entries = entries.into_iter();
        let (first_label, first) = entries.next().ok_or(Error::EmptyGallery)?;
        let dim = first.dim();
        let names = first.names().to_vec();
        let mut rows = first.values().to_vec();
        let mut labels = alloc::vec![first_label];
        for (label, v) in entries {
            if v.dim() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: v.dim(),
                });
            }
            rows.extend_from_slice(v.values());
            labels.push(label);
        }
        let mut classes = labels.clone();
        classes.sort_unstable();
        classes.dedup();
        let class_of = labels
            .iter()
            .map(|l| classes.binary_search(l).expect("label present"))
            .collect();
        Ok(Gallery {
            names,
            dim,
            rows,
            labels,
            classes,
            class_of,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn names(&self) -> &[FeatureName] {
        &self.names
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i * self.dim..(i + 1) * self.dim]
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    /// Sorted distinct labels; positions are the class ids used by
    /// [`Decision`].
    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn class_id(&self, label: &str) -> Option<usize> {
        self.classes
            .binary_search_by(|c| c.as_str().cmp(label))
            .ok()
    }

    fn check_probe(&self, probe: &[f64]) -> Result<()> {
        if probe.len() != self.dim {
            return Err(Error::DimensionMismatch {
                left: probe.len(),
                right: self.dim,
            });
        }
        Ok(())
    }

    fn check_k(&self, k: usize) -> Result<()> {
        if k == 0 {
            return Err(Error::InvalidConfig("K must be positive".into()));
        }
        if k > self.len() {
            return Err(Error::KTooLarge {
                k,
                gallery: self.len(),
            });
        }
        Ok(())
    }

    /// Modal class among the `k` nearest entries under `distance(i)`.
    fn knn_class(&self, k: usize, distance: impl Fn(usize) -> f64) -> usize {
        let nearer = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if k == 1 {
            let best = (0..self.len())
                .map(|i| (distance(i), i))
                .min_by(nearer)
                .expect("non-empty gallery");
            return self.class_of[best.1];
        }
        let mut scored: Vec<(f64, usize)> = (0..self.len()).map(|i| (distance(i), i)).collect();
        if k < scored.len() {
            scored.select_nth_unstable_by(k - 1, nearer);
            scored.truncate(k);
        }
        scored.sort_unstable_by(nearer);
        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        for (_, i) in &scored {
            *counts.entry(self.class_of[*i]).or_default() += 1;
        }
        let top = counts.values().copied().max().unwrap_or(0);
        let nearest = self.class_of[scored[0].1];
        if counts.get(&nearest) == Some(&top) {
            return nearest;
        }
        counts
            .into_iter()
            .find(|&(_, c)| c == top)
            .map(|(class, _)| class)
            .expect("non-empty neighbor set")
    }

    /// Per class: nearest-entry distance under `distance(i)` and that entry's
    /// index.
    fn class_nearest(&self, distance: impl Fn(usize) -> f64) -> Vec<(f64, usize)> {
        let mut best = alloc::vec![(f64::INFINITY, usize::MAX); self.classes.len()];
        for i in 0..self.len() {
            let d = distance(i);
            let slot = &mut best[self.class_of[i]];
            if d < slot.0 {
                *slot = (d, i);
            }
        }
        best
    }
}

/// Classifies `probe` by the modal label of its `k` nearest gallery entries.
pub fn knn_classify<'g>(probe: &FeatureVector, gallery: &'g Gallery, k: usize) -> Result<&'g str> {
    let decision = Classifier::plain(k).decide(probe.values(), gallery)?;
    Ok(&gallery.classes[decision.label])
}

/// Ensemble parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EnsembleConfig {
    /// Number of weak classifiers (`L`).
    pub weak_classifiers: usize,
    /// Components per random subspace (`N`).
    pub subspace_dim: usize,
    /// Neighbors consulted by each weak classifier (`K`).
    pub neighbors: usize,
    pub seed: u64,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        EnsembleConfig {
            weak_classifiers: 100,
            subspace_dim: 10,
            neighbors: 1,
            seed: 0,
        }
    }
}

impl EnsembleConfig {
    pub fn validate(&self, dim: usize) -> Result<()> {
        if self.weak_classifiers == 0 || self.subspace_dim == 0 || self.neighbors == 0 {
            return Err(Error::InvalidConfig("L, N and K must be positive".into()));
        }
        if self.subspace_dim > dim {
            return Err(Error::SubspaceTooLarge {
                n: self.subspace_dim,
                dim,
            });
        }
        Ok(())
    }
}

/// Sorted, distinct zero-based component indices.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Subspace {
    indices: Vec<usize>,
}

impl Subspace {
    pub fn new(mut indices: Vec<usize>) -> Result<Self> {
        indices.sort_unstable();
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidConfig(
                "subspace indices must be distinct".into(),
            ));
        }
        Ok(Subspace { indices })
    }

    pub fn full(dim: usize) -> Self {
        Subspace {
            indices: (0..dim).collect(),
        }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }
}

/// Draws `L` subspaces of `N` distinct indices out of `dim`. Subspace `i`
/// depends only on `(seed, i)`.
pub fn make_subspaces(dim: usize, config: &EnsembleConfig) -> Result<Vec<Subspace>> {
    config.validate(dim)?;
    Ok((0..config.weak_classifiers)
        .map(|i| {
            let mut rng = rng::stream(config.seed, Purpose::Subspace, i as u64);
            let mut indices = index::sample(&mut rng, dim, config.subspace_dim).into_vec();
            indices.sort_unstable();
            Subspace { indices }
        })
        .collect())
}

/// Keeps the components listed in `subspace`, in index order.
pub fn project(feature: &FeatureVector, subspace: &Subspace) -> Result<FeatureVector> {
    if let Some(&bad) = subspace.indices.iter().find(|&&i| i >= feature.dim()) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            dim: feature.dim(),
        });
    }
    let names = subspace
        .indices
        .iter()
        .map(|&i| feature.names()[i].clone())
        .collect();
    let values = subspace
        .indices
        .iter()
        .map(|&i| feature.values()[i])
        .collect();
    FeatureVector::new(names, values)
}

/// Most frequent label; ties go to the lexicographically smallest.
pub fn majority_vote<S: AsRef<str>>(labels: &[S]) -> Result<&str> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for l in labels {
        *counts.entry(l.as_ref()).or_default() += 1;
    }
    let top = counts.values().copied().max().ok_or(Error::EmptyVote)?;
    Ok(counts
        .into_iter()
        .find(|&(_, c)| c == top)
        .map(|(l, _)| l)
        .expect("non-empty counts"))
}

/// Random-subspace ensemble: one KNN per subspace, combined by majority vote.
pub fn rsm_classify<'g>(
    probe: &FeatureVector,
    gallery: &'g Gallery,
    config: &EnsembleConfig,
) -> Result<&'g str> {
    let classifier = Classifier::rsm(gallery.dim(), config)?;
    let decision = classifier.decide(probe.values(), gallery)?;
    Ok(&gallery.classes[decision.label])
}

/// A classification plus a full ordering of the gallery classes.
#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    /// Predicted class id (index into [`Gallery::classes`]).
    pub label: usize,
    /// All class ids, most likely first.
    pub ranking: Vec<usize>,
}

impl Decision {
    /// One-based rank of `class` in the ranking.
    pub fn rank_of(&self, class: usize) -> Option<usize> {
        self.ranking.iter().position(|&c| c == class).map(|r| r + 1)
    }
}

/// A ready-to-use classifier, with subspaces drawn once up front.
#[derive(Debug, Clone, PartialEq)]
pub enum Classifier {
    /// KNN on all components. Classes rank by nearest-entry distance.
    Plain { k: usize },
    /// Random-subspace ensemble. Classes rank by votes, then by mean
    /// nearest-entry distance across subspaces, then by label.
    Rsm { k: usize, subspaces: Vec<Subspace> },
}

impl Classifier {
    pub fn plain(k: usize) -> Self {
        Classifier::Plain { k }
    }

    pub fn rsm(dim: usize, config: &EnsembleConfig) -> Result<Self> {
        Ok(Classifier::Rsm {
            k: config.neighbors,
            subspaces: make_subspaces(dim, config)?,
        })
    }

    pub fn k(&self) -> usize {
        match self {
            Classifier::Plain { k } | Classifier::Rsm { k, .. } => *k,
        }
    }

    pub fn decide(&self, probe: &[f64], gallery: &Gallery) -> Result<Decision> {
        gallery.check_probe(probe)?;
        gallery.check_k(self.k())?;
        match self {
            Classifier::Plain { k } => {
                let label = gallery.knn_class(*k, |i| manhattan(probe, gallery.row(i)));
                let nearest = gallery.class_nearest(|i| manhattan(probe, gallery.row(i)));
                let mut ranking: Vec<usize> = (0..nearest.len()).collect();
                ranking.sort_by(|&a, &b| {
                    nearest[a]
                        .0
                        .total_cmp(&nearest[b].0)
                        .then(nearest[a].1.cmp(&nearest[b].1))
                });
                Ok(Decision { label, ranking })
            }
            Classifier::Rsm { k, subspaces } => {
                if let Some(bad) = subspaces
                    .iter()
                    .flat_map(|s| s.indices.iter())
                    .find(|&&i| i >= gallery.dim())
                {
                    return Err(Error::IndexOutOfRange {
                        index: *bad,
                        dim: gallery.dim(),
                    });
                }
                let classes = gallery.classes.len();
                let mut votes = alloc::vec![0usize; classes];
                let mut distance_sum = alloc::vec![0.0f64; classes];
                for s in subspaces {
                    let dist = |i: usize| manhattan_on(probe, gallery.row(i), &s.indices);
                    votes[gallery.knn_class(*k, dist)] += 1;
                    for (sum, (d, _)) in distance_sum.iter_mut().zip(gallery.class_nearest(dist)) {
                        *sum += d;
                    }
                }
                let top = votes.iter().copied().max().unwrap_or(0);
                let label = votes.iter().position(|&v| v == top).unwrap_or(0);
                let mut ranking: Vec<usize> = (0..classes).collect();
                ranking.sort_by(|&a, &b| match votes[b].cmp(&votes[a]) {
                    Ordering::Equal => distance_sum[a].total_cmp(&distance_sum[b]).then(a.cmp(&b)),
                    other => other,
                });
                Ok(Decision { label, ranking })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn fv(values: &[f64]) -> FeatureVector {
        FeatureVector::unnamed(values.to_vec())
    }

    fn gallery(entries: &[(&str, &[f64])]) -> Gallery {
        Gallery::new(entries.iter().map(|(l, v)| (l.to_string(), fv(v)))).unwrap()
    }

    #[test]
    fn manhattan_hand_values() {
        assert_eq!(
            manhattan_distance(&fv(&[1.0, 0.0]), &fv(&[0.0, 2.0])).unwrap(),
            3.0
        );
        assert_eq!(
            manhattan_distance(&fv(&[1.5, -2.0]), &fv(&[1.5, -2.0])).unwrap(),
            0.0
        );
        assert!(manhattan_distance(&fv(&[1.0]), &fv(&[1.0, 2.0])).is_err());
    }

    #[test]
    fn nearest_neighbor_hand_case() {
        let g = gallery(&[("A", &[0.0, 0.0]), ("B", &[3.0, 4.0])]);
        assert_eq!(knn_classify(&fv(&[1.0, 0.0]), &g, 1).unwrap(), "A");
        assert_eq!(knn_classify(&fv(&[3.0, 4.0]), &g, 1).unwrap(), "B");
    }

    #[test]
    fn knn_contract_errors() {
        let g = gallery(&[("A", &[0.0])]);
        assert_eq!(
            knn_classify(&fv(&[0.0]), &g, 2),
            Err(Error::KTooLarge { k: 2, gallery: 1 })
        );
        assert!(Gallery::new(Vec::<(String, FeatureVector)>::new()).is_err());
        assert!(knn_classify(&fv(&[0.0, 1.0]), &g, 1).is_err());
    }

    #[test]
    fn tie_breaks_are_documented_ones() {
        // Equal distances: lower index wins.
        let g = gallery(&[("B", &[1.0]), ("A", &[-1.0])]);
        assert_eq!(knn_classify(&fv(&[0.0]), &g, 1).unwrap(), "B");
        // 1-1 modal tie at K=2: the nearest neighbor's class wins.
        let g = gallery(&[("Z", &[0.5]), ("A", &[1.0])]);
        assert_eq!(knn_classify(&fv(&[0.0]), &g, 2).unwrap(), "Z");
        // K=5: B and C tie on two votes, the nearest entry is A, so B wins on label order.
        let g = gallery(&[
            ("A", &[0.1]),
            ("C", &[0.2]),
            ("B", &[0.3]),
            ("C", &[0.4]),
            ("B", &[0.5]),
        ]);
        assert_eq!(knn_classify(&fv(&[0.0]), &g, 5).unwrap(), "B");
    }

    #[test]
    fn majority_vote_rules() {
        assert_eq!(majority_vote(&["A", "A", "A"]).unwrap(), "A");
        assert_eq!(majority_vote(&["A", "A", "B"]).unwrap(), "A");
        assert_eq!(majority_vote(&["B", "A"]).unwrap(), "A");
        assert_eq!(majority_vote::<&str>(&[]), Err(Error::EmptyVote));
    }

    #[test]
    fn projection_keeps_listed_components() {
        let v = fv(&[5.0, 6.0, 7.0]);
        let s = Subspace::new(vec![2, 0]).unwrap();
        let p = project(&v, &s).unwrap();
        assert_eq!(p.values(), &[5.0, 7.0]);
        assert_eq!(p.names()[1], "f3");
        assert_eq!(project(&v, &Subspace::full(3)).unwrap(), v);
        assert!(project(&v, &Subspace::new(vec![3]).unwrap()).is_err());
        assert!(Subspace::new(vec![1, 1]).is_err());
    }

    #[test]
    fn full_subspaces_cover_everything() {
        let config = EnsembleConfig {
            weak_classifiers: 5,
            subspace_dim: 4,
            ..Default::default()
        };
        let subspaces = make_subspaces(4, &config).unwrap();
        assert!(subspaces.iter().all(|s| s.indices() == [0, 1, 2, 3]));
        assert!(matches!(
            make_subspaces(3, &config),
            Err(Error::SubspaceTooLarge { n: 4, dim: 3 })
        ));
    }

    #[test]
    fn subspace_draws_are_seeded() {
        let config = EnsembleConfig {
            seed: 11,
            ..Default::default()
        };
        let a = make_subspaces(40, &config).unwrap();
        assert_eq!(a, make_subspaces(40, &config).unwrap());
        let other = make_subspaces(40, &EnsembleConfig { seed: 12, ..config }).unwrap();
        assert_ne!(a, other);
        // Subspace i does not depend on how many are drawn.
        let fewer = make_subspaces(
            40,
            &EnsembleConfig {
                weak_classifiers: 3,
                ..config
            },
        )
        .unwrap();
        assert_eq!(&a[..3], &fewer[..]);
        assert!(a
            .iter()
            .all(|s| s.indices().len() == 10 && s.indices().windows(2).all(|w| w[0] < w[1])));
    }

    #[test]
    fn unscaled_components_can_flip_the_answer() {
        let g = gallery(&[("A", &[0.0, 10.0]), ("B", &[1.0, 0.0])]);
        let probe = fv(&[0.0, 0.5]);
        assert_eq!(knn_classify(&probe, &g, 1).unwrap(), "B");
        // Shrinking the second component by 100x everywhere flips it.
        let g = gallery(&[("A", &[0.0, 0.1]), ("B", &[1.0, 0.0])]);
        let probe = fv(&[0.0, 0.005]);
        assert_eq!(knn_classify(&probe, &g, 1).unwrap(), "A");
    }

    #[test]
    fn plain_ranking_orders_classes_by_nearest_entry() {
        let g = gallery(&[("A", &[5.0]), ("B", &[1.0]), ("C", &[2.0]), ("A", &[0.5])]);
        let d = Classifier::plain(1).decide(&[0.0], &g).unwrap();
        assert_eq!(d.label, 0);
        assert_eq!(d.ranking, vec![0, 1, 2]);
        assert_eq!(d.rank_of(2), Some(3));
    }
}

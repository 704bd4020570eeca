use gaitid_core::ensemble::{self, EnsembleConfig, Gallery};
use gaitid_core::eval::{self, FoldPlan, LabeledFeature, Protocol};
use gaitid_core::synth::{self, NoiseConfig};
use gaitid_core::{Dataset, FeatureSet, Point3, SkeletonFrame, SkeletonSequence};

fn plain(k: usize) -> Protocol {
    Protocol {
        use_rsm: false,
        ..Protocol::default().with_k(k)
    }
}

fn mild_noise() -> NoiseConfig {
    NoiseConfig {
        coordinate_std: 0.005,
        occlusion_rate: 0.05,
        ..NoiseConfig::none()
    }
}

fn samples(
    n_subjects: usize,
    noise: &NoiseConfig,
    seed: u64,
    set: FeatureSet,
) -> Vec<LabeledFeature> {
    let data = synth::generate_dataset(n_subjects, 5, 120, noise, seed).unwrap();
    eval::extract_features(&data.dataset, set).unwrap()
}

#[test]
fn folds_equal_to_sequence_count_is_leave_one_out() {
    let s = samples(6, &mild_noise(), 3, FeatureSet::Rdf);
    for k in [1, 3] {
        let cv = eval::kfold_cv_features(&s, "RDF", s.len(), &plain(k), 9).unwrap();
        let mut correct = 0;
        for i in 0..s.len() {
            let gallery = Gallery::new(
                s.iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, x)| (x.subject_id.clone(), x.feature.clone())),
            )
            .unwrap();
            let got = ensemble::knn_classify(&s[i].feature, &gallery, k).unwrap();
            correct += (got == s[i].subject_id) as usize;
        }
        let explicit = correct as f64 / s.len() as f64;
        assert!(
            (cv.accuracy - explicit).abs() < 1e-12,
            "k={k}: {} vs {explicit}",
            cv.accuracy
        );
        let loo = eval::leave_one_out(&s, "RDF", &plain(k)).unwrap();
        assert!((loo.accuracy - explicit).abs() < 1e-12);
    }
}

#[test]
fn full_dimensional_rsm_equals_plain_knn() {
    for set in [FeatureSet::Af, FeatureSet::Rdf, FeatureSet::Cf] {
        let s = samples(8, &mild_noise(), 4, set);
        let rsm = Protocol {
            ensemble: EnsembleConfig {
                weak_classifiers: 5,
                subspace_dim: set.dim(),
                ..EnsembleConfig::default()
            },
            use_rsm: true,
        };
        let a = eval::kfold_cv_features(&s, set.as_str(), 10, &rsm, 1).unwrap();
        let b = eval::kfold_cv_features(&s, set.as_str(), 10, &plain(1), 1).unwrap();
        let pred = |r: &eval::EvalReport| {
            r.probes
                .iter()
                .map(|p| p.predicted.clone())
                .collect::<Vec<_>>()
        };
        assert_eq!(pred(&a), pred(&b), "{set}");
        assert_eq!(a.accuracy, b.accuracy);
    }
}

#[test]
fn zero_noise_two_subjects_is_perfect() {
    let data = synth::generate_dataset(2, 5, 200, &NoiseConfig::none(), 17).unwrap();
    for set in [FeatureSet::Af, FeatureSet::Rdf, FeatureSet::Cf] {
        for protocol in [Protocol::default(), plain(1)] {
            let r = eval::kfold_cv(&data.dataset, set, 5, &protocol, 2).unwrap();
            assert_eq!(r.accuracy, 1.0, "{set}");
        }
        let sweep = eval::k_sweep(&data.dataset, set, 5, &[1, 2, 3], &plain(1), 2).unwrap();
        assert_eq!(sweep.len(), 3);
        assert_eq!(sweep[0], (1, 1.0));
    }
}

#[test]
fn full_size_gallery_sweep_is_leave_one_out() {
    let s = samples(7, &mild_noise(), 5, FeatureSet::Cf);
    let protocol = Protocol::default();
    let sweep = eval::gallery_sweep_features(&s, "CF", &[7], 1, &protocol, 3).unwrap();
    let loo = eval::leave_one_out(&s, "CF", &protocol).unwrap();
    let rec = &sweep.records[0];
    assert_eq!(rec.repetitions, 1);
    assert_eq!(rec.std_accuracy, 0.0);
    assert_eq!(rec.mean_accuracy, loo.pooled_accuracy);
    let pred = |p: &[eval::ProbeRecord]| p.iter().map(|r| r.predicted.clone()).collect::<Vec<_>>();
    assert_eq!(pred(&rec.probes), pred(&loo.probes));
}

#[test]
fn experiments_reproduce_from_seed() {
    let noise = NoiseConfig {
        coordinate_std: 0.03,
        ..mild_noise()
    };
    let data = synth::generate_dataset(6, 5, 100, &noise, 8).unwrap();
    assert_eq!(data, synth::generate_dataset(6, 5, 100, &noise, 8).unwrap());
    let p = Protocol::default();
    let ds = &data.dataset;
    assert_eq!(
        eval::kfold_cv(ds, FeatureSet::Cf, 10, &p, 4).unwrap(),
        eval::kfold_cv(ds, FeatureSet::Cf, 10, &p, 4).unwrap()
    );
    assert_eq!(
        eval::gallery_sweep(ds, FeatureSet::Rdf, &[2, 4], 3, &p, 4).unwrap(),
        eval::gallery_sweep(ds, FeatureSet::Rdf, &[2, 4], 3, &p, 4).unwrap()
    );
    assert_eq!(
        eval::cmc(ds, FeatureSet::Af, 6, &p).unwrap(),
        eval::cmc(ds, FeatureSet::Af, 6, &p).unwrap()
    );
    assert_eq!(
        FoldPlan::new(30, 10, 4).unwrap(),
        FoldPlan::new(30, 10, 4).unwrap()
    );
    assert_ne!(
        FoldPlan::new(30, 10, 4).unwrap(),
        FoldPlan::new(30, 10, 5).unwrap()
    );
}

#[test]
fn fold_plans_partition_the_sequences() {
    for (n, folds, seed) in [(50, 10, 0), (47, 10, 1), (12, 12, 2), (7, 3, 3)] {
        let plan = FoldPlan::new(n, folds, seed).unwrap();
        let mut seen: Vec<usize> = (0..folds).flat_map(|f| plan.members(f)).collect();
        seen.sort_unstable();
        assert_eq!(seen, (0..n).collect::<Vec<_>>());
        let sizes = plan.fold_sizes();
        assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
    }
}

#[test]
fn accuracy_is_recomputable_from_probe_log() {
    let noise = NoiseConfig {
        coordinate_std: 0.04,
        ..mild_noise()
    };
    let s = samples(10, &noise, 12, FeatureSet::Rdf);
    let r = eval::kfold_cv_features(&s, "RDF", 10, &Protocol::default(), 6).unwrap();
    assert_eq!(r.probes.len(), s.len());
    let per_fold: Vec<f64> = (0..10)
        .map(|f| {
            let fold: Vec<_> = r.probes.iter().filter(|p| p.group == f).collect();
            fold.iter().filter(|p| p.predicted == p.subject_id).count() as f64 / fold.len() as f64
        })
        .collect();
    let mean = per_fold.iter().sum::<f64>() / 10.0;
    assert!((r.accuracy - mean).abs() < 1e-12);
    let pooled = r
        .probes
        .iter()
        .filter(|p| p.predicted == p.subject_id)
        .count() as f64
        / s.len() as f64;
    assert!((r.pooled_accuracy - pooled).abs() < 1e-12);
    assert!((0.0..=1.0).contains(&r.accuracy));
}

#[test]
fn cmc_is_monotone_and_reaches_one() {
    let noise = NoiseConfig {
        coordinate_std: 0.05,
        ..mild_noise()
    };
    let data = synth::generate_dataset(12, 5, 100, &noise, 21).unwrap();
    for protocol in [Protocol::default(), plain(1)] {
        for set in FeatureSet::ALL {
            let curve = eval::cmc(&data.dataset, set, 12, &protocol).unwrap();
            assert_eq!(curve.len(), 12);
            assert!(curve.windows(2).all(|w| w[0] <= w[1]), "{set}: {curve:?}");
            assert_eq!(curve[11], 1.0);
        }
    }
    assert!(eval::cmc(&data.dataset, FeatureSet::Cf, 13, &plain(1)).is_err());
}

/// Plain KNN ranks classes by nearest entry, so its rank-1 is the prediction.
#[test]
fn plain_rank_one_is_the_prediction() {
    let s = samples(
        8,
        &NoiseConfig {
            coordinate_std: 0.05,
            ..mild_noise()
        },
        2,
        FeatureSet::Cf,
    );
    let r = eval::cmc_features(&s, "CF", 8, &plain(1)).unwrap();
    for p in &r.probes {
        assert_eq!(p.correct(), p.true_rank == Some(1));
    }
    assert_eq!(r.cmc.as_ref().unwrap()[0], r.pooled_accuracy);
}

fn constant_dataset(subjects: usize, sequences: usize) -> Dataset {
    let mut seqs = Vec::new();
    for s in 0..subjects {
        let params = synth::generate_subject(s as u64 + 100, synth::subject_id(s));
        let pose = synth::pose(&params, Point3::new(0.0, 1.0, 2.5), 0.7);
        for q in 0..sequences {
            let frames = (0..5).map(|i| SkeletonFrame::tracked(i, pose)).collect();
            seqs.push(
                SkeletonSequence::new(params.subject_id.clone(), synth::sequence_id(q), frames)
                    .unwrap(),
            );
        }
    }
    Dataset::new(seqs).unwrap()
}

/// All STD components are zero, so every gallery entry ties. The lowest gallery
/// index wins, which is always a sequence of the first subject.
#[test]
fn constant_sequences_make_std_ablation_chance_level() {
    let data = constant_dataset(4, 3);
    let n = data.len();
    for protocol in [Protocol::default(), plain(1)] {
        let [mean, std, rdf] = eval::ablate_rdf_subsets(&data, n, &protocol, 0).unwrap();
        assert_eq!(std.pooled_accuracy, 0.25);
        assert_eq!(std.accuracy, 0.25);
        assert!(std.probes.iter().all(|p| p.predicted == "S001"));
        assert_eq!(mean.accuracy, 1.0);
        assert_eq!(rdf.accuracy, 1.0);
    }
    let rdf = eval::extract_features(&data, FeatureSet::Std).unwrap();
    assert!(rdf
        .iter()
        .all(|s| s.feature.values().iter().all(|v| *v == 0.0)));
    assert!(rdf.iter().all(|s| s.feature.dim() == 10));
}

#[test]
fn k_larger_than_fold_gallery_is_rejected() {
    let s = samples(3, &mild_noise(), 1, FeatureSet::Af);
    assert!(eval::k_sweep_features(&s, "AF", 5, &[1, 12], &plain(1), 0).is_ok());
    assert!(eval::k_sweep_features(&s, "AF", 5, &[1, 13], &plain(1), 0).is_err());
    assert!(eval::kfold_cv_features(&s, "AF", 16, &plain(1), 0).is_err());
    assert!(eval::gallery_sweep_features(&s, "AF", &[4], 1, &plain(1), 0).is_err());
}

/// Smaller galleries are easier: accuracy falls as the subject count grows.
#[test]
fn gallery_sweep_accuracy_falls_with_size() {
    let noise = NoiseConfig {
        coordinate_std: 0.1,
        ..NoiseConfig::none()
    };
    let data = synth::generate_dataset(40, 5, 60, &noise, 31).unwrap();
    let s = eval::extract_features(&data.dataset, FeatureSet::Rdf).unwrap();
    let sizes = [5, 10, 20, 40];
    let sweep =
        eval::gallery_sweep_features(&s, "RDF", &sizes, 10, &Protocol::default(), 1).unwrap();
    let acc: Vec<f64> = sweep.records.iter().map(|r| r.mean_accuracy).collect();
    eprintln!("gallery sweep {acc:?}");
    assert!(acc[0] > acc[3], "{acc:?}");
    let xs: Vec<f64> = sizes.iter().map(|&x| x as f64).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / 4.0, acc.iter().sum::<f64>() / 4.0);
    let slope: f64 = xs.iter().zip(&acc).map(|(x, y)| (x - mx) * (y - my)).sum();
    assert!(slope < 0.0, "{acc:?}");
    assert!(sweep
        .records
        .iter()
        .all(|r| r.std_accuracy >= 0.0 && r.accuracies.len() == 10));
}

#[test]
fn accuracy_does_not_rise_with_coordinate_noise() {
    let levels = [0.0, 0.01, 0.05];
    let mut mean_acc = [0.0; 3];
    for seed in 0..10 {
        for (l, &std) in levels.iter().enumerate() {
            let noise = NoiseConfig {
                coordinate_std: std,
                ..NoiseConfig::none()
            };
            let data = synth::generate_dataset(20, 5, 60, &noise, seed).unwrap();
            mean_acc[l] += eval::kfold_cv(
                &data.dataset,
                FeatureSet::Rdf,
                10,
                &Protocol::default(),
                seed,
            )
            .unwrap()
            .accuracy
                / 10.0;
        }
    }
    eprintln!("noise sweep {mean_acc:?}");
    assert!(
        mean_acc[0] >= mean_acc[1] && mean_acc[1] >= mean_acc[2],
        "{mean_acc:?}"
    );
}

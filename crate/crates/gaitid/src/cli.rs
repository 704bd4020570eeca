//! The `gaitid` command line.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gaitid_core::ensemble::EnsembleConfig;
use gaitid_core::eval::{self, EvalReport, LabeledFeature, Protocol};
use gaitid_core::synth::{self, NoiseConfig};
use gaitid_core::{Dataset, FeatureSet, JointId, TrackingState};
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::feature_csv;
use crate::manifest::{self, ManifestEntry};
use crate::report::{self, ProbeLog};
use crate::run::RunManifest;
use crate::sequence_csv;
use crate::truth::{GroundTruth, SequenceTruth};

#[derive(Debug, Parser)]
#[command(
    name = "gaitid",
    version,
    about = "Skeleton gait recognition experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic dataset: sequence CSVs, manifest, ground truth.
    Synth(SynthArgs),
    /// Extract one feature vector per sequence into a CSV.
    Extract(ExtractArgs),
    /// Run an evaluation protocol.
    Eval(EvalArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OcclusionState {
    Inferred,
    NotTracked,
}

#[derive(Debug, Args, Serialize)]
pub struct SynthArgs {
    /// Number of subjects.
    #[arg(short = 'n', long = "subjects", default_value_t = 10)]
    pub subjects: usize,
    /// Sequences per subject.
    #[arg(short = 's', long = "sequences", default_value_t = 5)]
    pub sequences: usize,
    /// Frames per sequence.
    #[arg(short = 'f', long = "frames", default_value_t = 300)]
    pub frames: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Gaussian coordinate noise std, meters.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    /// Per-frame, per-joint occlusion probability.
    #[arg(long, default_value_t = 0.0)]
    pub occlusion: f64,
    /// Extra noise std on occluded joints marked Inferred, meters.
    #[arg(long, default_value_t = 0.05)]
    pub inferred_std: f64,
    /// Joint ids that may be occluded.
    #[arg(long, value_delimiter = ',', default_value = "3,5,7,9,13,15,17,19")]
    pub occluded_joints: Vec<u8>,
    #[arg(long, value_enum, default_value_t = OcclusionState::Inferred)]
    pub occlusion_state: OcclusionState,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct ExtractArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long, default_value = "CF")]
    pub features: FeatureSet,
    /// Output CSV; the run record goes to `<out>.run.json`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    /// k-fold cross-validation, writes cv.csv.
    Cv,
    /// Cross-validation for each K, writes ksweep.csv.
    Ksweep,
    /// Leave-one-out on random subject subsets, writes gallery.csv.
    Gallery,
    /// Leave-one-out cumulative match curve, writes cmc.csv.
    Cmc,
    /// Cross-validation on MEAN, STD and RDF, writes ablate.csv.
    Ablate,
}

#[derive(Debug, Args, Serialize)]
pub struct EvalArgs {
    #[arg(value_enum)]
    pub experiment: Experiment,
    #[arg(long)]
    pub manifest: PathBuf,
    /// Comma-separated feature sets. Ignored by `ablate`.
    #[arg(long, value_delimiter = ',', default_value = "AF,RDF,CF")]
    pub features: Vec<FeatureSet>,
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    /// Neighbors per KNN.
    #[arg(long = "K", default_value_t = 1)]
    pub k: usize,
    /// Weak classifiers in the ensemble.
    #[arg(long = "L", default_value_t = 100)]
    pub l: usize,
    /// Components per random subspace.
    #[arg(long = "N", default_value_t = 10)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Use the random-subspace ensemble (default).
    #[arg(long, overrides_with = "no_rsm")]
    #[serde(skip)]
    pub rsm: bool,
    /// Plain KNN on the whole feature vector.
    #[arg(long = "no-rsm", overrides_with = "rsm")]
    pub no_rsm: bool,
    /// K values for `ksweep`: a list such as 1,3,5 and/or ranges such as 1-70.
    #[arg(long, default_value = "1-70")]
    pub k_values: String,
    /// Gallery sizes for `gallery`; defaults to multiples of 10 up to the
    /// subject count, plus the full count.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    #[arg(long, default_value_t = 10)]
    pub reps: usize,
    /// Highest rank for `cmc`; defaults to min(10, subject count).
    #[arg(long)]
    pub max_rank: Option<usize>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: Command) -> Result<()> {
    match command {
        Command::Synth(a) => cmd_synth(&a),
        Command::Extract(a) => cmd_extract(&a),
        Command::Eval(a) => cmd_eval(&a),
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn create_file(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

fn sequence_file(subject_id: &str, sequence_id: &str) -> String {
    format!("{subject_id}_{sequence_id}.csv")
}

pub fn cmd_synth(a: &SynthArgs) -> Result<()> {
    let joints = a
        .occluded_joints
        .iter()
        .map(|&j| JointId::new(j))
        .collect::<gaitid_core::Result<Vec<_>>>()?;
    let noise = NoiseConfig {
        coordinate_std: a.noise,
        occlusion_rate: a.occlusion,
        inferred_std: a.inferred_std,
        occluded_joints: joints,
        occlusion_state: match a.occlusion_state {
            OcclusionState::Inferred => TrackingState::Inferred,
            OcclusionState::NotTracked => TrackingState::NotTracked,
        },
    };
    let mut run = RunManifest::start("synth", json!(a), a.seed);
    let data = synth::generate_dataset(a.subjects, a.sequences, a.frames, &noise, a.seed)?;
    create_dir(&a.out)?;

    let mut entries = Vec::with_capacity(data.dataset.len());
    let mut truth = Vec::with_capacity(data.dataset.len());
    for (seq, mask) in data.dataset.sequences().iter().zip(&data.occlusion) {
        let file = sequence_file(seq.subject_id(), seq.sequence_id());
        sequence_csv::save_sequence(&a.out.join(&file), seq)?;
        entries.push(ManifestEntry {
            subject_id: seq.subject_id().into(),
            sequence_id: seq.sequence_id().into(),
            path: file.clone().into(),
        });
        truth.push(SequenceTruth {
            subject_id: seq.subject_id().into(),
            sequence_id: seq.sequence_id().into(),
            file,
            occlusion: mask.clone(),
        });
        run.outputs
            .push(entries.last().unwrap().path.display().to_string());
    }
    let manifest_path = a.out.join("manifest.csv");
    manifest::write_manifest(create_file(&manifest_path)?, &entries)
        .map_err(|e| Error::io(&manifest_path, e))?;
    GroundTruth {
        seed: a.seed,
        frames: a.frames,
        noise,
        subjects: data.subjects,
        sequences: truth,
    }
    .save(&a.out.join("truth.json"))?;
    run.outputs
        .extend(["manifest.csv".into(), "truth.json".into()]);
    log::info!("wrote {} sequences to {}", entries.len(), a.out.display());
    run.finish(&a.out.join("run.json"))
}

#[derive(Debug, Clone, Serialize)]
pub struct Skipped {
    pub subject_id: String,
    pub sequence_id: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct Extraction {
    pub samples: Vec<LabeledFeature>,
    pub skipped: Vec<Skipped>,
    /// Seconds per extracted sequence.
    pub seconds: Vec<f64>,
}

impl Extraction {
    fn notes(&self) -> serde_json::Value {
        let total: f64 = self.seconds.iter().sum();
        let n = self.seconds.len().max(1) as f64;
        json!({
            "skipped": self.skipped,
            "extraction_seconds_mean": total / n,
            "extraction_seconds_max": self.seconds.iter().copied().fold(0.0, f64::max),
        })
    }
}

/// Extracts `set` from every sequence, skipping those that fail a
/// precondition.
pub fn extract_all(dataset: &Dataset, set: FeatureSet) -> Extraction {
    let mut out = Extraction::default();
    for seq in dataset.sequences() {
        let t = Instant::now();
        match set.extract(seq) {
            Ok(feature) => {
                let dt = t.elapsed().as_secs_f64();
                log::debug!(
                    "{}/{}: {set} from {} frames in {:.3} ms",
                    seq.subject_id(),
                    seq.sequence_id(),
                    seq.frames().len(),
                    dt * 1e3
                );
                out.seconds.push(dt);
                out.samples.push(LabeledFeature {
                    subject_id: seq.subject_id().into(),
                    sequence_id: seq.sequence_id().into(),
                    feature,
                });
            }
            Err(e) => {
                log::warn!("skipping {}/{}: {e}", seq.subject_id(), seq.sequence_id());
                out.skipped.push(Skipped {
                    subject_id: seq.subject_id().into(),
                    sequence_id: seq.sequence_id().into(),
                    reason: e.to_string(),
                });
            }
        }
    }
    if !out.seconds.is_empty() {
        log::info!(
            "{set}: {} sequences, {:.3} ms mean extraction time, {} skipped",
            out.samples.len(),
            out.seconds.iter().sum::<f64>() / out.seconds.len() as f64 * 1e3,
            out.skipped.len()
        );
    }
    out
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    s.into()
}

pub fn cmd_extract(a: &ExtractArgs) -> Result<()> {
    let mut run = RunManifest::start("extract", json!(a), 0);
    run.inputs.push(a.manifest.display().to_string());
    let (dataset, _) = manifest::load_dataset(&a.manifest)?;
    let extraction = extract_all(&dataset, a.features);
    let names = feature_csv::feature_names(a.features);
    feature_csv::write_features(create_file(&a.out)?, &names, &extraction.samples)
        .map_err(|e| Error::io(&a.out, e))?;
    run.outputs.push(a.out.display().to_string());
    run.notes = extraction.notes();
    run.finish(&with_suffix(&a.out, ".run.json"))
}

/// Parses `1,3,5-9` into `[1, 3, 5, 6, 7, 8, 9]`.
pub fn parse_k_values(spec: &str) -> Result<Vec<usize>> {
    let bad = || Error::Usage(format!("invalid K list {spec:?}"));
    let mut ks = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once('-') {
            Some((lo, hi)) => {
                let lo: usize = lo.trim().parse().map_err(|_| bad())?;
                let hi: usize = hi.trim().parse().map_err(|_| bad())?;
                if lo > hi {
                    return Err(bad());
                }
                ks.extend(lo..=hi);
            }
            None => ks.push(part.parse().map_err(|_| bad())?),
        }
    }
    if ks.is_empty() {
        return Err(bad());
    }
    Ok(ks)
}

pub fn default_sizes(subjects: usize) -> Vec<usize> {
    let mut sizes: Vec<usize> = (1..)
        .map(|i| 10 * i)
        .take_while(|&s| s <= subjects)
        .collect();
    if sizes.last() != Some(&subjects) && subjects > 0 {
        sizes.push(subjects);
    }
    sizes
}

#[derive(Debug, Serialize)]
struct ResolvedEval<'a> {
    experiment: Experiment,
    manifest: &'a Path,
    features: Vec<&'static str>,
    folds: usize,
    k: usize,
    l: usize,
    n: usize,
    rsm: bool,
    seed: u64,
    k_values: Option<Vec<usize>>,
    sizes: Option<Vec<usize>>,
    reps: Option<usize>,
    max_rank: Option<usize>,
}

pub fn cmd_eval(a: &EvalArgs) -> Result<()> {
    let protocol = Protocol {
        ensemble: EnsembleConfig {
            weak_classifiers: a.l,
            subspace_dim: a.n,
            neighbors: a.k,
            seed: a.seed,
        },
        use_rsm: !a.no_rsm,
    };
    let (dataset, _) = manifest::load_dataset(&a.manifest)?;
    let subjects = dataset.subjects().len();
    let sets: Vec<FeatureSet> = match a.experiment {
        Experiment::Ablate => vec![FeatureSet::Rdf],
        _ => a.features.clone(),
    };
    let mut resolved = ResolvedEval {
        experiment: a.experiment,
        manifest: &a.manifest,
        features: sets.iter().map(|s| s.as_str()).collect(),
        folds: a.folds,
        k: a.k,
        l: a.l,
        n: a.n,
        rsm: protocol.use_rsm,
        seed: a.seed,
        k_values: None,
        sizes: None,
        reps: None,
        max_rank: None,
    };
    match a.experiment {
        Experiment::Ksweep => resolved.k_values = Some(parse_k_values(&a.k_values)?),
        Experiment::Gallery => {
            resolved.sizes = Some(a.sizes.clone().unwrap_or_else(|| default_sizes(subjects)));
            resolved.reps = Some(a.reps);
        }
        Experiment::Cmc => resolved.max_rank = Some(a.max_rank.unwrap_or(subjects.min(10))),
        Experiment::Cv | Experiment::Ablate => {}
    }
    let mut run = RunManifest::start("eval", json!(resolved), a.seed);
    run.inputs.push(a.manifest.display().to_string());
    create_dir(&a.out)?;

    let mut skipped = serde_json::Map::new();
    let mut features = Vec::with_capacity(sets.len());
    for &set in &sets {
        let ex = extract_all(&dataset, set);
        skipped.insert(set.as_str().into(), ex.notes());
        features.push((set, ex.samples));
    }
    run.notes = serde_json::Value::Object(skipped);

    let write =
        |name: &str, f: &dyn Fn(BufWriter<File>) -> std::io::Result<()>| -> Result<String> {
            let path = a.out.join(name);
            f(create_file(&path)?).map_err(|e| Error::io(&path, e))?;
            Ok(name.to_string())
        };

    match a.experiment {
        Experiment::Cv => {
            let reports = features
                .iter()
                .map(|(set, s)| {
                    eval::kfold_cv_features(s, set.as_str(), a.folds, &protocol, a.seed)
                })
                .collect::<gaitid_core::Result<Vec<_>>>()?;
            for r in &reports {
                log::info!("{}: accuracy {}", r.feature_set, report::sig6(r.accuracy));
            }
            run.outputs.push(write("cv.csv", &|w| {
                report::write_cv(w, &reports, a.folds, a.seed)
            })?);
            run.outputs.push(write("probes.csv", &|w| {
                report::write_probes(w, &logs(&reports))
            })?);
        }
        Experiment::Ablate => {
            let reports = eval::ablate_rdf_features(&features[0].1, a.folds, &protocol, a.seed)?;
            for r in &reports {
                log::info!("{}: accuracy {}", r.feature_set, report::sig6(r.accuracy));
            }
            run.outputs.push(write("ablate.csv", &|w| {
                report::write_cv(w, &reports, a.folds, a.seed)
            })?);
            run.outputs.push(write("probes.csv", &|w| {
                report::write_probes(w, &logs(&reports))
            })?);
        }
        Experiment::Ksweep => {
            let ks = resolved.k_values.clone().unwrap_or_default();
            let mut reports = Vec::new();
            for (set, s) in &features {
                reports.extend(eval::k_sweep_features(
                    s,
                    set.as_str(),
                    a.folds,
                    &ks,
                    &protocol,
                    a.seed,
                )?);
            }
            run.outputs
                .push(write("ksweep.csv", &|w| report::write_ksweep(w, &reports))?);
            run.outputs.push(write("probes.csv", &|w| {
                report::write_probes(w, &logs(&reports))
            })?);
        }
        Experiment::Gallery => {
            let sizes = resolved.sizes.clone().unwrap_or_default();
            let sweeps = features
                .iter()
                .map(|(set, s)| {
                    eval::gallery_sweep_features(s, set.as_str(), &sizes, a.reps, &protocol, a.seed)
                })
                .collect::<gaitid_core::Result<Vec<_>>>()?;
            run.outputs.push(write("gallery.csv", &|w| {
                report::write_gallery(w, &sweeps)
            })?);
            let probe_logs: Vec<ProbeLog<'_>> = sweeps
                .iter()
                .flat_map(|s| {
                    s.records.iter().map(move |r| ProbeLog {
                        feature_set: &s.feature_set,
                        k: s.protocol.ensemble.neighbors,
                        size: Some(r.size),
                        probes: &r.probes,
                    })
                })
                .collect();
            run.outputs.push(write("probes.csv", &|w| {
                report::write_probes(w, &probe_logs)
            })?);
        }
        Experiment::Cmc => {
            let max_rank = resolved.max_rank.unwrap_or(1);
            let reports = features
                .iter()
                .map(|(set, s)| eval::cmc_features(s, set.as_str(), max_rank, &protocol))
                .collect::<gaitid_core::Result<Vec<_>>>()?;
            run.outputs
                .push(write("cmc.csv", &|w| report::write_cmc(w, &reports))?);
            run.outputs.push(write("probes.csv", &|w| {
                report::write_probes(w, &logs(&reports))
            })?);
        }
    }
    run.finish(&a.out.join("run.json"))
}

fn logs(reports: &[EvalReport]) -> Vec<ProbeLog<'_>> {
    reports
        .iter()
        .map(|r| ProbeLog {
            feature_set: &r.feature_set,
            k: r.protocol.ensemble.neighbors,
            size: None,
            probes: &r.probes,
        })
        .collect()
}

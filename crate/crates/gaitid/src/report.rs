//! Result tables written by `gaitid eval`. Real numbers carry six significant
//! digits.

use std::io::{self, Write};

use gaitid_core::eval::{EvalReport, GallerySweepReport, ProbeRecord};

/// Formats like C's `%g`: six significant digits, trailing zeros dropped,
/// exponent form outside `1e-4 <= |v| < 1e6`.
pub fn sig6(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v == 0.0 { "0".into() } else { v.to_string() };
    }
    let sci = format!("{v:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{m}e{sign}{:02}", exp.abs());
    }
    let decimals = (5 - exp) as usize;
    trim_zeros(&format!("{v:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn write_rows<W: Write>(writer: W, header: &[&str], rows: &[Vec<String>]) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()
}

pub const CV_HEADER: [&str; 10] = [
    "feature_set",
    "folds",
    "K",
    "L",
    "N",
    "rsm",
    "seed",
    "accuracy",
    "pooled_accuracy",
    "unmatched_probes",
];

/// One row per report: accuracy is the mean over folds.
pub fn write_cv<W: Write>(w: W, reports: &[EvalReport], folds: usize, seed: u64) -> io::Result<()> {
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            let e = &r.protocol.ensemble;
            vec![
                r.feature_set.clone(),
                folds.to_string(),
                e.neighbors.to_string(),
                e.weak_classifiers.to_string(),
                e.subspace_dim.to_string(),
                r.protocol.use_rsm.to_string(),
                seed.to_string(),
                sig6(r.accuracy),
                sig6(r.pooled_accuracy),
                r.unmatched_probes.to_string(),
            ]
        })
        .collect();
    write_rows(w, &CV_HEADER, &rows)
}

pub const KSWEEP_HEADER: [&str; 4] = ["feature_set", "K", "accuracy", "pooled_accuracy"];

pub fn write_ksweep<W: Write>(w: W, reports: &[EvalReport]) -> io::Result<()> {
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            vec![
                r.feature_set.clone(),
                r.protocol.ensemble.neighbors.to_string(),
                sig6(r.accuracy),
                sig6(r.pooled_accuracy),
            ]
        })
        .collect();
    write_rows(w, &KSWEEP_HEADER, &rows)
}

pub const GALLERY_HEADER: [&str; 5] = [
    "feature_set",
    "size",
    "repetitions",
    "mean_accuracy",
    "std_accuracy",
];

pub fn write_gallery<W: Write>(w: W, reports: &[GallerySweepReport]) -> io::Result<()> {
    let rows: Vec<Vec<String>> = reports
        .iter()
        .flat_map(|r| {
            r.records.iter().map(|rec| {
                vec![
                    r.feature_set.clone(),
                    rec.size.to_string(),
                    rec.repetitions.to_string(),
                    sig6(rec.mean_accuracy),
                    sig6(rec.std_accuracy),
                ]
            })
        })
        .collect();
    write_rows(w, &GALLERY_HEADER, &rows)
}

pub const CMC_HEADER: [&str; 3] = ["feature_set", "rank", "accuracy"];

pub fn write_cmc<W: Write>(w: W, reports: &[EvalReport]) -> io::Result<()> {
    let rows: Vec<Vec<String>> = reports
        .iter()
        .flat_map(|r| {
            r.cmc
                .iter()
                .flatten()
                .enumerate()
                .map(|(i, a)| vec![r.feature_set.clone(), (i + 1).to_string(), sig6(*a)])
        })
        .collect();
    write_rows(w, &CMC_HEADER, &rows)
}

pub const PROBES_HEADER: [&str; 9] = [
    "feature_set",
    "K",
    "size",
    "group",
    "subject_id",
    "sequence_id",
    "predicted",
    "true_rank",
    "correct",
];

/// Probes of one experiment. `size` is only set for gallery sweeps, where
/// `group` is the repetition; elsewhere `group` is the fold.
pub struct ProbeLog<'a> {
    pub feature_set: &'a str,
    pub k: usize,
    pub size: Option<usize>,
    pub probes: &'a [ProbeRecord],
}

pub fn write_probes<W: Write>(w: W, logs: &[ProbeLog<'_>]) -> io::Result<()> {
    let rows: Vec<Vec<String>> = logs
        .iter()
        .flat_map(|log| {
            log.probes.iter().map(move |p| {
                vec![
                    log.feature_set.to_string(),
                    log.k.to_string(),
                    log.size.map(|s| s.to_string()).unwrap_or_default(),
                    p.group.to_string(),
                    p.subject_id.clone(),
                    p.sequence_id.clone(),
                    p.predicted.clone(),
                    p.true_rank.map(|r| r.to_string()).unwrap_or_default(),
                    (p.correct() as u8).to_string(),
                ]
            })
        })
        .collect();
    write_rows(w, &PROBES_HEADER, &rows)
}

#[cfg(test)]
mod tests {
    use super::sig6;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(1.0), "1");
        assert_eq!(sig6(0.9999999999999999), "1");
        assert_eq!(sig6(0.954), "0.954");
        assert_eq!(sig6(2.0 / 3.0), "0.666667");
        assert_eq!(sig6(123456.7), "123457");
        assert_eq!(sig6(999999.6), "1e+06");
        assert_eq!(sig6(1234567.0), "1.23457e+06");
        assert_eq!(sig6(0.0001), "0.0001");
        assert_eq!(sig6(0.00001234567), "1.23457e-05");
        assert_eq!(sig6(-0.5), "-0.5");
        assert_eq!(sig6(0.0), "0");
    }
}

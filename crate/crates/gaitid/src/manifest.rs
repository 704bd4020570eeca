//! Dataset manifests: one `subject_id, sequence_id, relative_path` record per
//! sequence, paths relative to the manifest's directory. An optional header
//! row spelling those three names is skipped.

use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::{Path, PathBuf};

use gaitid_core::Dataset;

use crate::error::{Error, Result};
use crate::sequence_csv::{self, csv_error};

pub const HEADER: [&str; 3] = ["subject_id", "sequence_id", "relative_path"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub subject_id: String,
    pub sequence_id: String,
    pub path: PathBuf,
}

pub fn parse_manifest<R: Read>(reader: R) -> Result<Vec<ManifestEntry>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut entries = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| csv_error(e, i as u64 + 1))?;
        let line = record.position().map_or(i as u64 + 1, |p| p.line());
        if record.len() != 3 {
            return Err(Error::Schema {
                path: None,
                line,
                expected: 3,
                found: record.len(),
            });
        }
        if i == 0 && record.iter().eq(HEADER) {
            continue;
        }
        if record.iter().any(str::is_empty) {
            return Err(Error::Parse {
                path: None,
                line,
                message: "empty field".into(),
            });
        }
        entries.push(ManifestEntry {
            subject_id: record[0].to_string(),
            sequence_id: record[1].to_string(),
            path: PathBuf::from(&record[2]),
        });
    }
    Ok(entries)
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_manifest(BufReader::new(file)).map_err(|e| e.in_file(path))
}

pub fn write_manifest<W: Write>(writer: W, entries: &[ManifestEntry]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for e in entries {
        w.write_record([
            e.subject_id.as_str(),
            e.sequence_id.as_str(),
            &e.path.to_string_lossy(),
        ])?;
    }
    w.flush()
}

/// Reads the manifest and every sequence it lists.
pub fn load_dataset(manifest: &Path) -> Result<(Dataset, Vec<ManifestEntry>)> {
    let entries = read_manifest(manifest)?;
    let base = manifest.parent().unwrap_or(Path::new(""));
    let mut sequences = Vec::with_capacity(entries.len());
    for e in &entries {
        sequences.push(sequence_csv::read_sequence(
            &base.join(&e.path),
            e.subject_id.clone(),
            e.sequence_id.clone(),
        )?);
    }
    let mut dataset = Dataset::new(sequences)?;
    dataset.source = manifest.display().to_string();
    Ok((dataset, entries))
}

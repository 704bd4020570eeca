//! Skeleton sequence files.
//!
//! One row per frame, 81 columns: `frame_index, x1, y1, z1, s1, ..., x20, y20,
//! z20, s20`, with the state `s` coded 2 = Tracked, 1 = Inferred,
//! 0 = NotTracked. A header row is optional and recognised by a non-numeric
//! first field. Coordinates are written with six decimals.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use gaitid_core::skeleton::JOINT_COUNT;
use gaitid_core::{Point3, SkeletonFrame, SkeletonSequence, TrackingState};

use crate::error::{Error, Result};

pub const COLUMNS: usize = 1 + 4 * JOINT_COUNT;

/// Decimal places used for coordinates.
pub const DECIMALS: usize = 6;

pub fn header() -> Vec<String> {
    let mut h = Vec::with_capacity(COLUMNS);
    h.push("frame_index".to_string());
    for j in 1..=JOINT_COUNT {
        for axis in ["x", "y", "z", "s"] {
            h.push(format!("{axis}{j}"));
        }
    }
    h
}

pub(crate) fn csv_error(err: csv::Error, line: u64) -> Error {
    let line = err.position().map_or(line, |p| p.line());
    match err.into_kind() {
        csv::ErrorKind::Io(e) => Error::Parse {
            path: None,
            line,
            message: e.to_string(),
        },
        csv::ErrorKind::Utf8 { err, .. } => Error::Parse {
            path: None,
            line,
            message: format!("invalid UTF-8: {err}"),
        },
        other => Error::Parse {
            path: None,
            line,
            message: format!("{other:?}"),
        },
    }
}

fn parse_field<T: std::str::FromStr>(field: &str, line: u64, what: &str) -> Result<T> {
    field.parse().map_err(|_| Error::Parse {
        path: None,
        line,
        message: format!("cannot parse {what} from {field:?}"),
    })
}

fn parse_coordinate(field: &str, line: u64, column: usize) -> Result<f64> {
    let v: f64 = parse_field(field, line, "a coordinate")?;
    if !v.is_finite() {
        return Err(Error::Parse {
            path: None,
            line,
            message: format!("column {} is not finite: {field:?}", column + 1),
        });
    }
    Ok(v)
}

fn is_header(first_field: &str) -> bool {
    first_field.parse::<f64>().is_err()
}

/// Parses a sequence file. NotTracked joints are stored at the origin
/// whatever the file says.
pub fn parse_sequence<R: Read>(
    reader: R,
    subject_id: impl Into<String>,
    sequence_id: impl Into<String>,
) -> Result<SkeletonSequence> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut frames: Vec<SkeletonFrame> = Vec::new();
    let mut record = csv::StringRecord::new();
    let mut first = true;
    let mut line = 0;
    loop {
        match rdr.read_record(&mut record) {
            Ok(true) => {}
            Ok(false) => break,
            Err(e) => return Err(csv_error(e, line + 1)),
        }
        line = record.position().map_or(line + 1, |p| p.line());
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if first && is_header(&record[0]) {
            first = false;
            if record.len() != COLUMNS {
                return Err(Error::Schema {
                    path: None,
                    line,
                    expected: COLUMNS,
                    found: record.len(),
                });
            }
            continue;
        }
        first = false;
        if record.len() != COLUMNS {
            return Err(Error::Schema {
                path: None,
                line,
                expected: COLUMNS,
                found: record.len(),
            });
        }
        let frame_index: u64 = parse_field(&record[0], line, "a frame index")?;
        if let Some(prev) = frames.last() {
            if frame_index <= prev.frame_index {
                return Err(Error::Ordering {
                    path: None,
                    line,
                    prev: prev.frame_index,
                    next: frame_index,
                });
            }
        }
        let mut positions = [Point3::ORIGIN; JOINT_COUNT];
        let mut states = [TrackingState::Tracked; JOINT_COUNT];
        for j in 0..JOINT_COUNT {
            let c = 1 + 4 * j;
            let code: u8 = parse_field(&record[c + 3], line, "a tracking state")?;
            states[j] = TrackingState::from_code(code).ok_or_else(|| Error::Parse {
                path: None,
                line,
                message: format!("tracking state must be 0, 1 or 2, found {code}"),
            })?;
            let p = Point3::new(
                parse_coordinate(&record[c], line, c)?,
                parse_coordinate(&record[c + 1], line, c + 1)?,
                parse_coordinate(&record[c + 2], line, c + 2)?,
            );
            if states[j] != TrackingState::NotTracked {
                positions[j] = p;
            }
        }
        frames.push(SkeletonFrame {
            frame_index,
            positions,
            states,
        });
    }
    Ok(SkeletonSequence::new(subject_id, sequence_id, frames)?)
}

pub fn read_sequence(
    path: &Path,
    subject_id: impl Into<String>,
    sequence_id: impl Into<String>,
) -> Result<SkeletonSequence> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_sequence(BufReader::new(file), subject_id, sequence_id).map_err(|e| e.in_file(path))
}

/// Writes the header and one row per frame.
pub fn write_sequence<W: Write>(writer: W, seq: &SkeletonSequence) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(header())?;
    let mut row = Vec::with_capacity(COLUMNS);
    for f in seq.frames() {
        row.clear();
        row.push(f.frame_index.to_string());
        for (p, s) in f.positions.iter().zip(&f.states) {
            row.push(fixed(p.x));
            row.push(fixed(p.y));
            row.push(fixed(p.z));
            row.push(s.code().to_string());
        }
        w.write_record(&row)?;
    }
    w.flush()
}

pub fn save_sequence(path: &Path, seq: &SkeletonSequence) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_sequence(BufWriter::new(file), seq).map_err(|e| Error::io(path, e))
}

/// Fixed six-decimal form; values that round to zero print without a sign.
pub fn fixed(v: f64) -> String {
    let s = format!("{:.*}", DECIMALS, v);
    match s.strip_prefix('-') {
        Some(rest) if rest.bytes().all(|b| b == b'0' || b == b'.') => rest.to_string(),
        _ => s,
    }
}

/// The value a coordinate takes after a write and read.
pub fn quantize(v: f64) -> f64 {
    fixed(v).parse().expect("formatted float")
}

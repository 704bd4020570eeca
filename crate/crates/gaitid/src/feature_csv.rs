//! Feature tables: a `subject_id, sequence_id, name1, ..., nameD` header, then
//! one row per sequence. Values are written in shortest round-trip form.

use std::borrow::Cow;
use std::io::{self, Read, Write};

use gaitid_core::anthro::AF_NAMES;
use gaitid_core::eval::LabeledFeature;
use gaitid_core::gait::{BLOCK_LEN, RDF_NAMES};
use gaitid_core::{FeatureSet, FeatureVector};

use crate::error::{Error, Result};
use crate::sequence_csv::csv_error;

pub fn feature_names(set: FeatureSet) -> Vec<&'static str> {
    match set {
        FeatureSet::Af => AF_NAMES.to_vec(),
        FeatureSet::Rdf => RDF_NAMES.to_vec(),
        FeatureSet::Cf => AF_NAMES.iter().chain(&RDF_NAMES).copied().collect(),
        FeatureSet::Mean => RDF_NAMES[..BLOCK_LEN].to_vec(),
        FeatureSet::Std => RDF_NAMES[BLOCK_LEN..].to_vec(),
    }
}

/// Every row must have `names.len()` values.
pub fn write_features<W: Write>(
    writer: W,
    names: &[&str],
    rows: &[LabeledFeature],
) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["subject_id", "sequence_id"];
    header.extend_from_slice(names);
    w.write_record(&header)?;
    for r in rows {
        if r.feature.dim() != names.len() {
            return Err(io::Error::new(
                io::ErrorKind::InvalidData,
                format!("{} values for {} columns", r.feature.dim(), names.len()),
            ));
        }
        let mut row = vec![r.subject_id.clone(), r.sequence_id.clone()];
        row.extend(r.feature.values().iter().map(|v| v.to_string()));
        w.write_record(&row)?;
    }
    w.flush()
}

pub fn parse_features<R: Read>(reader: R) -> Result<Vec<LabeledFeature>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut records = rdr.records();
    let header = match records.next() {
        None => return Ok(Vec::new()),
        Some(h) => h.map_err(|e| csv_error(e, 1))?,
    };
    if header.len() < 2 || &header[0] != "subject_id" || &header[1] != "sequence_id" {
        return Err(Error::Parse {
            path: None,
            line: 1,
            message: "header must start with subject_id,sequence_id".into(),
        });
    }
    let names: Vec<Cow<'static, str>> = header
        .iter()
        .skip(2)
        .map(|n| Cow::Owned(n.to_string()))
        .collect();
    let mut out = Vec::new();
    for (i, record) in records.enumerate() {
        let record = record.map_err(|e| csv_error(e, i as u64 + 2))?;
        let line = record.position().map_or(i as u64 + 2, |p| p.line());
        if record.len() != header.len() {
            return Err(Error::Schema {
                path: None,
                line,
                expected: header.len(),
                found: record.len(),
            });
        }
        let values = record
            .iter()
            .skip(2)
            .map(|f| {
                f.parse::<f64>().map_err(|_| Error::Parse {
                    path: None,
                    line,
                    message: format!("cannot parse a feature value from {f:?}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        out.push(LabeledFeature {
            subject_id: record[0].to_string(),
            sequence_id: record[1].to_string(),
            feature: FeatureVector::new(names.clone(), values)?,
        });
    }
    Ok(out)
}

//! JSON and CSV space formats.
//!
//! JSON: `{"name": optional, "labels": [..], "matrix": [[..]]}`. Derived
//! outputs add a `"classes"` or `"origins"` field, which readers ignore.
//! CSV: a square numeric matrix with an optional header row of labels.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::chain::ChainPartition;
use crate::error::{Error, Result};
use crate::kuratowski::{Origin, SampledDt};
use crate::metric::FiniteMetricSpace;
use crate::ultra::UltrametricSpace;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpaceDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub labels: Vec<String>,
    pub matrix: Vec<Vec<f64>>,
}

impl From<&FiniteMetricSpace> for SpaceDoc {
    fn from(s: &FiniteMetricSpace) -> Self {
        Self {
            name: s.name().map(str::to_owned),
            labels: s.labels().to_vec(),
            matrix: s.rows(),
        }
    }
}

impl SpaceDoc {
    pub fn into_space(self, tol: f64) -> Result<FiniteMetricSpace> {
        let mut s = FiniteMetricSpace::new(self.labels, self.matrix, tol)?;
        s.set_name(self.name);
        Ok(s)
    }
}

#[derive(Debug, Serialize)]
pub struct UltrametricDoc {
    #[serde(flatten)]
    pub space: SpaceDoc,
    pub classes: Vec<Vec<String>>,
}

impl UltrametricDoc {
    pub fn new(u: &UltrametricSpace, source: &FiniteMetricSpace) -> Self {
        Self {
            space: SpaceDoc::from(&u.space),
            classes: u
                .source_classes
                .iter()
                .map(|c| c.iter().map(|&i| source.label(i).to_owned()).collect())
                .collect(),
        }
    }
}

#[derive(Debug, Serialize)]
#[serde(untagged)]
pub enum OriginDoc {
    Original { original: String },
    Segment { segment: [String; 2], s: f64 },
}

#[derive(Debug, Serialize)]
pub struct SampledDtDoc {
    #[serde(flatten)]
    pub space: SpaceDoc,
    pub t: f64,
    pub step: f64,
    pub origins: Vec<OriginDoc>,
}

impl SampledDtDoc {
    pub fn new(dt: &SampledDt, source: &FiniteMetricSpace) -> Self {
        let origins = dt
            .origins
            .iter()
            .map(|o| match *o {
                Origin::Original(i) => OriginDoc::Original {
                    original: source.label(i).to_owned(),
                },
                Origin::Segment { from, to, s } => OriginDoc::Segment {
                    segment: [source.label(from).to_owned(), source.label(to).to_owned()],
                    s,
                },
            })
            .collect();
        Self {
            space: SpaceDoc::from(&dt.space),
            t: dt.t,
            step: dt.step,
            origins,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct PartitionDoc {
    pub scale: f64,
    pub components: Vec<Vec<String>>,
}

impl PartitionDoc {
    pub fn new(p: &ChainPartition, x: &FiniteMetricSpace) -> Self {
        Self {
            scale: p.scale,
            components: p
                .components
                .iter()
                .map(|c| c.iter().map(|&i| x.label(i).to_owned()).collect())
                .collect(),
        }
    }
}

pub fn space_to_json(s: &FiniteMetricSpace) -> String {
    to_json(&SpaceDoc::from(s))
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("documents serialize");
    out.push('\n');
    out
}

/// Parses only, without checking the metric axioms.
pub fn parse_json_doc(text: &str) -> Result<SpaceDoc> {
    Ok(serde_json::from_str(text)?)
}

pub fn parse_json(text: &str, tol: f64) -> Result<FiniteMetricSpace> {
    parse_json_doc(text)?.into_space(tol)
}

/// Square numeric CSV. The first row is taken as labels when it does not
/// parse as numbers, or when there is one more row than columns.
pub fn parse_csv_doc(text: &str) -> Result<SpaceDoc> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut records = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        records.push(rec.iter().map(str::to_owned).collect::<Vec<_>>());
    }
    let parse_row =
        |r: &[String]| -> Option<Vec<f64>> { r.iter().map(|v| v.parse().ok()).collect() };
    let (labels, body) = match records.first() {
        Some(first) if parse_row(first).is_none() || records.len() == first.len() + 1 => {
            (Some(first.clone()), &records[1..])
        }
        _ => (None, &records[..]),
    };
    let matrix = body
        .iter()
        .enumerate()
        .map(|(i, r)| {
            parse_row(r).ok_or_else(|| Error::input(format!("row {i}: non-numeric entry")))
        })
        .collect::<Result<Vec<_>>>()?;
    let labels = labels.unwrap_or_else(|| (0..matrix.len()).map(|i| i.to_string()).collect());
    Ok(SpaceDoc {
        name: None,
        labels,
        matrix,
    })
}

pub fn parse_csv(text: &str, tol: f64) -> Result<FiniteMetricSpace> {
    parse_csv_doc(text)?.into_space(tol)
}

pub fn space_to_csv(s: &FiniteMetricSpace) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(s.labels())?;
    for i in 0..s.len() {
        w.write_record(s.row(i).iter().map(|v| v.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Reads a file as JSON or CSV, chosen by extension, falling back to
/// sniffing for a leading `{`.
pub fn read_doc(path: &Path) -> Result<SpaceDoc> {
    let text = std::fs::read_to_string(path)?;
    let is_csv = match path.extension().and_then(|e| e.to_str()) {
        Some(e) if e.eq_ignore_ascii_case("csv") => true,
        Some(e) if e.eq_ignore_ascii_case("json") => false,
        _ => !text.trim_start().starts_with('{'),
    };
    if is_csv {
        parse_csv_doc(&text)
    } else {
        parse_json_doc(&text)
    }
}

pub fn read_space(path: &Path, tol: f64) -> Result<FiniteMetricSpace> {
    read_doc(path)?.into_space(tol)
}

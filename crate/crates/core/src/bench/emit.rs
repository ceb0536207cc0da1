//! Writing experiment outputs.
//!
//! JSON carries everything: the spec, every pair, every estimate with its
//! substream key, and the result table. CSV carries only the table, one row
//! per bin or grid point, with the row struct's field names as header.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{BinnedResult, EstimateRecord, ExperimentSpec, PairInfo, ScalingResult, SizeResult, VarianceTable};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::invalid(format!("unknown format {other:?} (expected csv or json)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentResult {
    Variance(VarianceTable),
    Bounds(BinnedResult),
    Scaling(ScalingResult),
    Size(SizeResult),
}

impl ExperimentResult {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentResult::Variance(_) => "variance",
            ExperimentResult::Bounds(_) => "bounds",
            ExperimentResult::Scaling(_) => "scaling",
            ExperimentResult::Size(_) => "size",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentOutput {
    pub spec: ExperimentSpec,
    pub pairs: Vec<PairInfo>,
    pub records: Vec<EstimateRecord>,
    pub result: ExperimentResult,
}

impl ExperimentOutput {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn to_csv(&self) -> Result<String> {
        match &self.result {
            ExperimentResult::Variance(t) => csv_rows(&t.rows),
            ExperimentResult::Bounds(b) => csv_rows(&b.rows),
            ExperimentResult::Scaling(s) => csv_rows(&s.rows),
            ExperimentResult::Size(s) => csv_rows(&s.rows),
        }
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

/// Serializes rows with a header line naming the fields.
pub fn csv_rows<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| Error::Format(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Format(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))
}

/// Writes `output` to `path` in `format`.
pub fn emit(output: &ExperimentOutput, path: &Path, format: Format) -> Result<()> {
    let text = output.render(format)?;
    let mut file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}

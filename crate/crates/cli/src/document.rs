//! Tuple input documents, as JSON or CSV.
//!
//! JSON: `{"n": 3, "distributions": [[".2", "1/5", 0.2, "2/5"], ...]}`;
//! entries may be strings (decimal or `p/q`) or JSON numbers. CSV: one
//! distribution per row, with an optional header row.

use std::path::Path;

use emdkit::scalar::{parse_rational, rational_string};
use emdkit::simplex::{DistTuple, Distribution};
use emdkit::Rational;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Text(String),
    Number(serde_json::Number),
}

impl Entry {
    fn as_text(&self) -> String {
        match self {
            Entry::Text(s) => s.clone(),
            Entry::Number(n) => n.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TupleDocument {
    pub n: usize,
    pub distributions: Vec<Vec<Entry>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Auto,
    Json,
    Csv,
}

impl TupleDocument {
    /// Exact `"p/q"` rendering of a parsed tuple.
    pub fn from_tuple(xs: &DistTuple<Rational>) -> Self {
        TupleDocument {
            n: xs.n(),
            distributions: xs
                .members()
                .iter()
                .map(|m| m.mass().iter().map(|v| Entry::Text(rational_string(v))).collect())
                .collect(),
        }
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Parse(format!("JSON: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("documents always serialize")
    }

    /// Rows of a CSV file; the first row is skipped as a header if any of
    /// its fields fails to parse as a number.
    pub fn from_csv(text: &str) -> CliResult<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(text.as_bytes());
        let mut rows = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let record = record.map_err(|e| CliError::Parse(format!("CSV: {e}")))?;
            let fields: Vec<String> = record.iter().map(str::to_string).collect();
            if fields.iter().all(|f| f.is_empty()) {
                continue;
            }
            if i == 0 && fields.iter().any(|f| parse_rational(f).is_err()) {
                continue;
            }
            rows.push(fields.into_iter().map(Entry::Text).collect::<Vec<_>>());
        }
        let n = rows
            .first()
            .map(|r| r.len().saturating_sub(1))
            .ok_or_else(|| CliError::Parse("CSV: no data rows".into()))?;
        Ok(TupleDocument { n, distributions: rows })
    }

    pub fn parse(text: &str, format: Format, path: Option<&Path>) -> CliResult<Self> {
        let format = match format {
            Format::Auto => {
                let by_ext = path
                    .and_then(|p| p.extension())
                    .and_then(|e| e.to_str())
                    .map(str::to_ascii_lowercase);
                match by_ext.as_deref() {
                    Some("csv") => Format::Csv,
                    Some("json") => Format::Json,
                    _ if text.trim_start().starts_with('{') => Format::Json,
                    _ => Format::Csv,
                }
            }
            f => f,
        };
        match format {
            Format::Csv => Self::from_csv(text),
            _ => Self::from_json(text),
        }
    }

    /// Validate into an exact tuple. Row numbers in errors are 1-based.
    pub fn to_tuple(&self) -> CliResult<DistTuple<Rational>> {
        let mut members = Vec::with_capacity(self.distributions.len());
        for (i, row) in self.distributions.iter().enumerate() {
            let row_no = i + 1;
            if row.len() != self.n + 1 {
                return Err(CliError::Row {
                    row: row_no,
                    source: emdkit::Error::DimensionMismatch {
                        expected: self.n,
                        found: row.len().saturating_sub(1),
                    },
                });
            }
            let values = row
                .iter()
                .map(|e| parse_rational(&e.as_text()))
                .collect::<emdkit::Result<Vec<_>>>()
                .map_err(|source| CliError::Row { row: row_no, source })?;
            let member = Distribution::new(values).map_err(|source| CliError::Row { row: row_no, source })?;
            members.push(member);
        }
        Ok(DistTuple::new(members)?)
    }
}

//! Machine-readable run reports and CSV tables.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::algebra::{Collinearity, StructuralSummary};
use crate::man::{extended_float, EntropyBlockTerm, ManBounds, ManReport, QuantumnessReport};
use crate::protocol::{EstimatorResult, MarkovReport};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputSummary {
    pub source: String,
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub structure: Option<StructuralSummary>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Analysis {
    pub summary: StructuralSummary,
    pub collinearity: Collinearity,
    pub commutant_summary: StructuralSummary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum RunResult {
    Analysis(Analysis),
    Man(ManReport),
    Entropy {
        report: ManReport,
        blocks: Vec<EntropyBlockTerm>,
    },
    Estimate(EstimatorResult),
    Quantumness(QuantumnessReport),
    Markov(MarkovReport),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: Vec<String>,
    pub inputs: Vec<InputSummary>,
    pub results: Vec<RunResult>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub bounds: Option<ManBounds>,
    pub wall_time_s: f64,
    pub seed: u64,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// Drops every structural summary, including those inside results.
    pub fn strip_summaries(&mut self) {
        for input in &mut self.inputs {
            input.structure = None;
        }
        for r in &mut self.results {
            match r {
                RunResult::Man(m) | RunResult::Entropy { report: m, .. } => m.summaries.clear(),
                _ => {}
            }
        }
    }
}

/// One row of tabular output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub inputs: String,
    pub method: String,
    pub s: f64,
    #[serde(with = "extended_float")]
    pub s2: f64,
    pub commutant_bound: Option<f64>,
    pub weak_bound: Option<f64>,
    pub intersection_bound: Option<f64>,
    pub std_error: Option<f64>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
}

impl CsvRow {
    pub fn from_man(inputs: &str, m: &ManReport) -> Self {
        Self {
            inputs: inputs.to_string(),
            method: m.method.as_str().to_string(),
            s: m.s,
            s2: m.s2,
            commutant_bound: m.bounds.as_ref().map(|b| b.commutant_bound),
            weak_bound: m.bounds.as_ref().map(|b| b.weak_bound),
            intersection_bound: m.bounds.as_ref().and_then(|b| b.intersection_bound),
            std_error: None,
            samples: None,
            seed: None,
        }
    }

    pub fn from_estimate(inputs: &str, e: &EstimatorResult, base: crate::man::LogBase) -> Self {
        Self {
            inputs: inputs.to_string(),
            method: e.method.as_str().to_string(),
            s: e.estimate,
            s2: crate::man::log_man(e.estimate.clamp(0.0, 1.0), base),
            commutant_bound: None,
            weak_bound: None,
            intersection_bound: None,
            std_error: Some(e.std_error),
            samples: Some(e.samples),
            seed: Some(e.seed),
        }
    }
}

const CSV_HEADER: [&str; 10] = [
    "inputs",
    "method",
    "s",
    "s2",
    "commutant_bound",
    "weak_bound",
    "intersection_bound",
    "std_error",
    "samples",
    "seed",
];

/// Writes a header row followed by one row per case.
pub fn emit_csv(rows: &[CsvRow], path: &Path) -> Result<(), CliError> {
    let csv_err = |e: csv::Error| CliError::Csv {
        path: path.display().to_string(),
        message: e.to_string(),
    };
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(csv_err)?;
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for row in rows {
        w.serialize(row).map_err(csv_err)?;
    }
    w.flush().map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Rows derivable from a report's results.
pub fn rows_from_results(
    inputs: &str,
    results: &[RunResult],
    base: crate::man::LogBase,
) -> Vec<CsvRow> {
    results
        .iter()
        .filter_map(|r| match r {
            RunResult::Man(m) | RunResult::Entropy { report: m, .. } => {
                Some(CsvRow::from_man(inputs, m))
            }
            RunResult::Estimate(e) => Some(CsvRow::from_estimate(inputs, e, base)),
            _ => None,
        })
        .collect()
}

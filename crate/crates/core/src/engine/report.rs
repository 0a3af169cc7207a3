use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{CampaignReport, EngineError};

/// One row of `per_mr.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub mr: String,
    pub tokenizer_killed: usize,
    pub chunker_killed: usize,
    pub total_killed: usize,
    pub testable: usize,
    /// Empty when no mutant is testable.
    pub kill_rate: Option<f64>,
}

impl CsvRow {
    pub fn rows(report: &CampaignReport) -> Vec<CsvRow> {
        report
            .per_mr
            .iter()
            .map(|(mr, s)| CsvRow {
                mr: format!("MR{mr}"),
                tokenizer_killed: s.tokenizer_killed,
                chunker_killed: s.chunker_killed,
                total_killed: s.total_killed,
                testable: s.testable,
                kill_rate: s.kill_rate,
            })
            .collect()
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> EngineError + '_ {
    move |source| EngineError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Pretty JSON with a trailing newline.
pub fn write_json(report: &CampaignReport, path: &Path) -> Result<(), EngineError> {
    let mut text = serde_json::to_string_pretty(report).expect("report serializes");
    text.push('\n');
    std::fs::write(path, text).map_err(io_err(path))
}

pub fn write_csv(report: &CampaignReport, path: &Path) -> Result<(), EngineError> {
    let mut out = csv::Writer::from_writer(Vec::new());
    for row in CsvRow::rows(report) {
        out.serialize(row).expect("in-memory CSV write");
    }
    let bytes = out.into_inner().expect("in-memory CSV flush");
    std::fs::write(path, bytes).map_err(io_err(path))
}

use super::{FailedStep, MatrixReport, Verdict};
use crate::sutsim::log_to_text;
use serde::{Deserialize, Serialize};
use std::fs;
use std::io;
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexEntry {
    pub device: String,
    pub verdict: Verdict,
    /// Report file, relative to the index.
    pub report: String,
    /// Transition log file, relative to the index.
    pub log: String,
    pub failed_step: Option<FailedStep>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportIndex {
    pub test_id: String,
    pub passed: usize,
    pub failed: usize,
    pub devices: Vec<IndexEntry>,
}

pub(crate) fn file_stem(id: &str) -> String {
    id.chars()
        .map(|c| match c {
            'a'..='z' | 'A'..='Z' | '0'..='9' | '-' | '_' | '.' => c,
            _ => '_',
        })
        .collect()
}

/// Writes `<device>.json`, `<device>.log` and `index.json` into `dir`.
pub fn write_matrix(dir: &Path, matrix: &MatrixReport) -> io::Result<ReportIndex> {
    fs::create_dir_all(dir)?;
    let mut devices = Vec::with_capacity(matrix.reports.len());
    for report in &matrix.reports {
        let stem = file_stem(&report.device);
        let report_file = format!("{stem}.json");
        let log_file = format!("{stem}.log");
        let mut json = serde_json::to_string_pretty(report).map_err(io::Error::other)?;
        json.push('\n');
        fs::write(dir.join(&report_file), json)?;
        fs::write(dir.join(&log_file), log_to_text(&report.transition_log))?;
        devices.push(IndexEntry {
            device: report.device.clone(),
            verdict: report.verdict,
            report: report_file,
            log: log_file,
            failed_step: report.failed_step.clone(),
        });
    }
    let index = ReportIndex {
        test_id: matrix.test_id.clone(),
        passed: matrix.passed,
        failed: matrix.failed,
        devices,
    };
    let mut json = serde_json::to_string_pretty(&index).map_err(io::Error::other)?;
    json.push('\n');
    fs::write(dir.join("index.json"), json)?;
    Ok(index)
}

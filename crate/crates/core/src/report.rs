//! Metric report document: everything computed from one evaluation run,
//! self-describing (config echo + scenario digest) so any number can be
//! re-derived from the inputs.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::DataError;
use crate::metrics::doc::{
    AmbiguityAdjusted, EvaluationConfig, LatencyRecallCurve, LocalizationStats, ObjectOutcome,
    TrackingStats,
};
use crate::metrics::legacy::PRPoint;
use crate::metrics::ConfusionCounts;
use crate::scenario::{scenario_to_json, Scenario};

pub const REPORT_SCHEMA_VERSION: &str = "doc-eval-report/1";

/// Hex SHA-256 of the scenario's canonical JSON serialization.
pub fn scenario_digest(scenario: &Scenario) -> String {
    let mut hasher = Sha256::new();
    hasher.update(scenario_to_json(scenario).as_bytes());
    hex_string(&hasher.finalize())
}

pub fn digest_bytes(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hex_string(&hasher.finalize())
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameCounts {
    pub t: f64,
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

/// Legacy per-frame 2D detection metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LegacyBlock {
    pub counts: ConfusionCounts,
    pub precision: f64,
    pub recall: f64,
    pub average_precision: f64,
    pub pr_curve: Vec<PRPoint>,
    pub per_frame: Vec<FrameCounts>,
}

/// Comprehension-regime metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocBlock {
    /// Classification confusion over matched events, OOS-aware.
    pub oos_counts: ConfusionCounts,
    pub outcomes: Vec<ObjectOutcome>,
    pub adl_compliance: f64,
    pub latency_recall: LatencyRecallCurve,
    pub ambiguity: AmbiguityAdjusted,
    pub localization: LocalizationStats,
    pub tracking: TrackingStats,
    /// Detection-level OOS accounting with distractor true negatives.
    pub oos_detection: ConfusionCounts,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Input prediction records that arrived out of timestamp order.
    pub reorder_count: u64,
    /// Prediction events past the scenario duration, dropped.
    pub events_beyond_duration: u64,
    pub excluded_short_exposure: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub schema_version: String,
    /// Wall-clock provenance only; excluded from golden comparisons.
    pub generated_at: String,
    pub scenario_digest: String,
    pub config: EvaluationConfig,
    pub legacy: LegacyBlock,
    pub doc: DocBlock,
    pub diagnostics: Diagnostics,
}

pub fn report_to_json(report: &MetricReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serialization");
    s.push('\n');
    s
}

pub fn save_report(report: &MetricReport, path: impl AsRef<Path>) -> Result<(), DataError> {
    let path = path.as_ref();
    std::fs::write(path, report_to_json(report))
        .map_err(|e| DataError::Io { path: path.display().to_string(), source: e })
}

pub fn load_report(path: impl AsRef<Path>) -> Result<MetricReport, DataError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| DataError::Io { path: path.display().to_string(), source: e })?;
    let report: MetricReport = serde_json::from_str(&text)
        .map_err(|e| DataError::Parse { path: path.display().to_string(), message: e.to_string() })?;
    if report.schema_version != REPORT_SCHEMA_VERSION {
        return Err(DataError::Schema {
            found: report.schema_version,
            expected: REPORT_SCHEMA_VERSION.to_string(),
        });
    }
    Ok(report)
}

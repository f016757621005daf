use std::collections::BTreeMap;

use rspcert_core::order_k::OracleReport;
use rspcert_core::{IndexSet, ToleranceConfig, Verdict};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Inputs {
    pub paths: BTreeMap<String, String>,
    pub rows: usize,
    pub cols: usize,
    pub tolerances: ToleranceConfig,
    pub subset_budget: u64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub parameters: BTreeMap<String, serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportJson {
    pub schema_version: String,
    pub command: String,
    pub inputs: Inputs,
    pub verdicts: serde_json::Value,
    pub exit_code: i32,
    pub timing_ms: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// One line of a `random-batch` stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchRecord {
    pub index: usize,
    pub holds: Verdict,
    pub counterexample: Option<IndexSet>,
    pub oracle: OracleReport,
    /// `None` when the certifier was marginal.
    pub agreement: Option<bool>,
}

/// Final line of a `random-batch` stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub schema_version: String,
    pub command: String,
    pub inputs: Inputs,
    pub count: usize,
    pub compared: usize,
    pub agreements: usize,
    pub marginal: usize,
    pub agreement_rate: f64,
    pub exit_code: i32,
    pub timing_ms: f64,
    pub seed: u64,
}

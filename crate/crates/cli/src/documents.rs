//! JSON documents written by the commands.

use std::path::Path;

use crisk::lime::{Explanation, ProbeReport, StabilityReport};
use crisk::metrics::EvalReport;
use crisk::{Error, Result, SCHEMA_VERSION};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelEvaluation {
    /// `A` or `B`.
    pub label: String,
    pub path: String,
    /// `glm` or `gbm`.
    pub kind: String,
    #[serde(flatten)]
    pub report: EvalReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationDocument {
    pub schema_version: u32,
    pub kind: String,
    pub data: String,
    pub models: Vec<ModelEvaluation>,
    /// `100 · (gini_A − gini_B)` when two models were given.
    pub gini_delta_points: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplanationDocument {
    pub schema_version: u32,
    pub kind: String,
    #[serde(flatten)]
    pub explanation: Explanation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityDocument {
    pub schema_version: u32,
    pub kind: String,
    #[serde(flatten)]
    pub report: StabilityReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeDocument {
    pub schema_version: u32,
    pub kind: String,
    #[serde(flatten)]
    pub report: ProbeReport,
}

impl ExplanationDocument {
    pub fn new(explanation: Explanation) -> Self {
        Self { schema_version: SCHEMA_VERSION, kind: "explanation".into(), explanation }
    }
}

impl StabilityDocument {
    pub fn new(report: StabilityReport) -> Self {
        Self { schema_version: SCHEMA_VERSION, kind: "stability".into(), report }
    }
}

impl ProbeDocument {
    pub fn new(report: ProbeReport) -> Self {
        Self { schema_version: SCHEMA_VERSION, kind: "probe".into(), report }
    }
}

pub fn write_json<T: Serialize>(path: &Path, doc: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(doc).map_err(|e| Error::Document(e.to_string()))?;
    std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Document(format!("{}: {e}", path.display())))
}

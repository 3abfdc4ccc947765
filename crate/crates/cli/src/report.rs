//! Machine-readable report documents.

use std::collections::BTreeMap;
use std::path::Path;

use biaseval::assoc::{AssociationResult, Level};
use biaseval::metaeval::{CorrelationLevel, CorrelationResult, MultiRef, PreferenceReport, RecordFilter, TopKPoint};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricConfig {
    pub name: String,
    pub source: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub command: Option<String>,
    pub symmetric: bool,
    pub supports_multi_ref: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub score_range: Option<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

impl InputDigest {
    pub fn of_file(path: &Path) -> std::io::Result<Self> {
        let bytes = std::fs::read(path)?;
        Ok(Self::of_bytes(&path.display().to_string(), &bytes))
    }

    pub fn of_bytes(label: &str, bytes: &[u8]) -> Self {
        let digest = Sha256::digest(bytes);
        InputDigest {
            path: label.to_owned(),
            sha256: digest.iter().map(|b| format!("{b:02x}")).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssocCell {
    pub test: String,
    pub level: Level,
    pub metric: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub result: Option<AssociationResult>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PreferRow {
    pub metric: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub report: Option<PreferenceReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PreferResults {
    pub dataset: String,
    /// Qualifying records (same for every metric).
    pub n: usize,
    pub rows: Vec<PreferRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelateCell {
    pub metric: String,
    pub dimension: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub origin: Option<CorrelationResult>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub swapped: Option<CorrelationResult>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TopKSeries {
    pub metric: String,
    pub dimension: String,
    pub origin: Vec<TopKPoint>,
    pub swapped: Vec<TopKPoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelateResults {
    pub dataset: String,
    pub level: CorrelationLevel,
    pub filter: RecordFilter,
    pub mode: MultiRef,
    pub cells: Vec<CorrelateCell>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub topk: Vec<TopKSeries>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", content = "results", rename_all = "snake_case")]
pub enum Body {
    Assoc(Vec<AssocCell>),
    Prefer(PreferResults),
    Correlate(CorrelateResults),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub metrics: Vec<MetricConfig>,
    pub inputs: Vec<InputDigest>,
    pub settings: BTreeMap<String, serde_json::Value>,
    #[serde(flatten)]
    pub body: Body,
}

impl Report {
    pub fn new(seed: u64, metrics: Vec<MetricConfig>, inputs: Vec<InputDigest>, body: Body) -> Self {
        Report {
            tool: "biaseval".into(),
            version: biaseval::VERSION.into(),
            seed,
            metrics,
            inputs,
            settings: BTreeMap::new(),
            body,
        }
    }

    pub fn setting(mut self, key: &str, value: impl Serialize) -> Self {
        self.settings
            .insert(key.to_owned(), serde_json::to_value(value).expect("setting serializes"));
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn failed_cells(&self) -> usize {
        match &self.body {
            Body::Assoc(cells) => cells.iter().filter(|c| c.error.is_some()).count(),
            Body::Prefer(p) => p.rows.iter().filter(|r| r.error.is_some()).count(),
            Body::Correlate(c) => c.cells.iter().filter(|r| r.error.is_some()).count(),
        }
    }
}

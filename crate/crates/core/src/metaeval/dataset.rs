use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::Text;

/// One system output for one example, with its references and human scores.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetaEvalRecord {
    pub example_id: String,
    pub system_id: String,
    pub hypothesis: Text,
    pub references: Vec<Text>,
    pub human: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetaEvalDataset {
    pub name: String,
    pub dimensions: Vec<String>,
    pub records: Vec<MetaEvalRecord>,
}

impl MetaEvalDataset {
    pub fn from_json(body: &str) -> Result<Self> {
        let ds: MetaEvalDataset = serde_json::from_str(body).map_err(|e| Error::json("meta-evaluation dataset", e))?;
        ds.validate()?;
        Ok(ds)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let body = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&body).map_err(|e| Error::invalid(format!("{}: {e}", path.display())))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("dataset serializes");
        s.push('\n');
        s
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn validate(&self) -> Result<()> {
        let dims: HashSet<&String> = self.dimensions.iter().collect();
        if dims.len() != self.dimensions.len() {
            return Err(Error::invalid(format!("{}: duplicate dimension names", self.name)));
        }
        let mut keys = HashSet::new();
        for r in &self.records {
            let where_ = || format!("{}: record ({}, {})", self.name, r.example_id, r.system_id);
            if !keys.insert((&r.example_id, &r.system_id)) {
                return Err(Error::invalid(format!("{} is duplicated", where_())));
            }
            if r.references.is_empty() {
                return Err(Error::invalid(format!("{} has no references", where_())));
            }
            if r.human.len() != dims.len() || !r.human.keys().all(|k| dims.contains(k)) {
                return Err(Error::invalid(format!(
                    "{} has human dimensions {:?}, expected {:?}",
                    where_(),
                    r.human.keys().collect::<Vec<_>>(),
                    self.dimensions
                )));
            }
            if let Some((k, v)) = r.human.iter().find(|(_, v)| !v.is_finite()) {
                return Err(Error::invalid(format!("{} has non-finite {k} score {v}", where_())));
            }
        }
        Ok(())
    }

    pub fn has_dimension(&self, dimension: &str) -> bool {
        self.dimensions.iter().any(|d| d == dimension)
    }

    /// Distinct system ids in order of first appearance.
    pub fn systems(&self) -> Vec<&str> {
        let mut seen = HashSet::new();
        self.records
            .iter()
            .map(|r| r.system_id.as_str())
            .filter(|s| seen.insert(*s))
            .collect()
    }
}

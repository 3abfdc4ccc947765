use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::Text;

pub const WORD_SLOT: &str = "<word>";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    Word,
    /// Items inside semantically bleached template sentences.
    Sentence,
    /// Items inside sentences that carry real content.
    SentenceUnbleached,
}

impl Level {
    pub fn as_str(self) -> &'static str {
        match self {
            Level::Word => "word",
            Level::Sentence => "sentence",
            Level::SentenceUnbleached => "sentence_unbleached",
        }
    }
}

/// Whether groups are represented by names ("Amy") or terms ("girl").
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Names,
    Terms,
}

/// Target sets A, B and attribute sets X, Y of one association test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssociationTestSpec {
    pub name: String,
    pub targets_a: Vec<String>,
    pub targets_b: Vec<String>,
    pub attributes_x: Vec<String>,
    pub attributes_y: Vec<String>,
    pub level: Level,
    #[serde(default)]
    pub templates: Vec<String>,
    /// Templates for X and Y when they differ from the target templates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attribute_templates: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<Variant>,
}

/// One item of a set with the texts it expands to.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpandedItem {
    pub item: String,
    pub texts: Vec<Text>,
}

impl AssociationTestSpec {
    pub fn from_json(body: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(body).map_err(|e| Error::json("association test spec", e))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let body = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let spec: Self = serde_json::from_str(&body).map_err(|e| Error::json(path.display().to_string(), e))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let sets = [
            ("targets_a", &self.targets_a),
            ("targets_b", &self.targets_b),
            ("attributes_x", &self.attributes_x),
            ("attributes_y", &self.attributes_y),
        ];
        for (label, set) in sets {
            if set.is_empty() {
                return Err(Error::invalid(format!("{}: {label} is empty", self.name)));
            }
            let mut seen = HashSet::new();
            if let Some(dup) = set.iter().find(|s| !seen.insert(s.as_str())) {
                return Err(Error::invalid(format!("{}: duplicate {dup:?} in {label}", self.name)));
            }
        }
        if self.attributes_x.len() != self.attributes_y.len() {
            return Err(Error::invalid(format!(
                "{}: |X| = {} but |Y| = {}",
                self.name,
                self.attributes_x.len(),
                self.attributes_y.len()
            )));
        }
        if self.level != Level::Word {
            let attr = self.attribute_templates.as_ref().unwrap_or(&self.templates);
            for (label, ts) in [("templates", &self.templates), ("attribute_templates", attr)] {
                if ts.is_empty() {
                    return Err(Error::invalid(format!(
                        "{}: {} level needs {label}",
                        self.name,
                        self.level.as_str()
                    )));
                }
                if let Some(t) = ts.iter().find(|t| !t.contains(WORD_SLOT)) {
                    return Err(Error::invalid(format!(
                        "{}: template {t:?} lacks {WORD_SLOT}",
                        self.name
                    )));
                }
            }
        }
        Ok(())
    }

    fn expand(&self, items: &[String], templates: &[String]) -> Vec<ExpandedItem> {
        items
            .iter()
            .map(|item| {
                let texts = match self.level {
                    Level::Word => vec![Text::new(item.clone())],
                    Level::Sentence | Level::SentenceUnbleached => templates
                        .iter()
                        .map(|t| Text::new(t.replace(WORD_SLOT, item)))
                        .collect(),
                };
                ExpandedItem {
                    item: item.clone(),
                    texts,
                }
            })
            .collect()
    }

    fn attr_templates(&self) -> &[String] {
        self.attribute_templates.as_deref().unwrap_or(&self.templates)
    }

    pub fn expand_a(&self) -> Vec<ExpandedItem> {
        self.expand(&self.targets_a, &self.templates)
    }

    pub fn expand_b(&self) -> Vec<ExpandedItem> {
        self.expand(&self.targets_b, &self.templates)
    }

    pub fn expand_x(&self) -> Vec<ExpandedItem> {
        self.expand(&self.attributes_x, self.attr_templates())
    }

    pub fn expand_y(&self) -> Vec<ExpandedItem> {
        self.expand(&self.attributes_y, self.attr_templates())
    }

    /// True when no token of a target item occurs in an attribute item.
    pub fn targets_and_attributes_disjoint(&self) -> bool {
        let tokens = |sets: [&Vec<String>; 2]| -> HashSet<String> {
            sets.iter()
                .flat_map(|s| s.iter())
                .flat_map(|item| crate::text::tokenize(item))
                .collect()
        };
        let targets = tokens([&self.targets_a, &self.targets_b]);
        let attributes = tokens([&self.attributes_x, &self.attributes_y]);
        targets.is_disjoint(&attributes)
    }
}

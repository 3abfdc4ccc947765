//! Gender-swapped counterparts of texts and meta-evaluation datasets.

mod lexicon;
mod swap;

pub use lexicon::{AmbiguousRule, Gender, GenderLexicon, LexiconFile, POSSESSIVE_LOOKAHEAD};
pub use swap::{detect_gender, swap_gender, Replacement, SwapReport, BIJECTIVE_RULE};

use serde::{Deserialize, Serialize};

use crate::metaeval::MetaEvalDataset;

/// Replacements made in one record.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordSwap {
    pub example_id: String,
    pub system_id: String,
    pub hypothesis: SwapReport,
    pub references: Vec<SwapReport>,
}

impl RecordSwap {
    pub fn replacement_count(&self) -> usize {
        self.hypothesis.replacements.len() + self.references.iter().map(|r| r.replacements.len()).sum::<usize>()
    }
}

/// Swaps every hypothesis and reference; human scores are copied as is.
pub fn swap_dataset(dataset: &MetaEvalDataset, lexicon: &GenderLexicon) -> (MetaEvalDataset, Vec<RecordSwap>) {
    let mut out = dataset.clone();
    let mut audit = Vec::with_capacity(dataset.records.len());
    for rec in &mut out.records {
        let (hyp, hyp_report) = swap_gender(&rec.hypothesis, lexicon);
        rec.hypothesis = hyp;
        let mut ref_reports = Vec::with_capacity(rec.references.len());
        for r in &mut rec.references {
            let (swapped, report) = swap_gender(r, lexicon);
            *r = swapped;
            ref_reports.push(report);
        }
        audit.push(RecordSwap {
            example_id: rec.example_id.clone(),
            system_id: rec.system_id.clone(),
            hypothesis: hyp_report,
            references: ref_reports,
        });
    }
    (out, audit)
}

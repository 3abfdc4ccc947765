//! Native metric implementations and the name-based registry the CLI uses.

pub mod bleu;
pub mod cider;
pub mod embedding;
pub mod meteor;
pub mod ngram;
pub mod rouge;
pub mod ter;
pub mod transport;

use std::sync::Arc;

pub use bleu::{bleu, Bleu, Smoothing};
pub use cider::{cider, Cider, IdfTable};
pub use embedding::{
    embedding_average, greedy_matching, vector_extrema, wmd_distance, wmd_plan, wmd_score, EmbeddingMetric,
    EmbeddingScorer, EmbeddingStore, LoadReport,
};
pub use meteor::{meteor_lite, Meteor, Stemmer, SynonymTable};
pub use ngram::NGramProfile;
pub use rouge::{rouge_l, rouge_n, rouge_su4, RefAggregate, Rouge, RougeVariant};
pub use ter::{ter, Ter};
pub use transport::{solve_transport, TransportPlan};

use crate::error::{Error, Result};
use crate::scorer::{ConstantScorer, ExactMatchScorer, Scorer};

/// Optional assets some native metrics need.
#[derive(Clone, Debug, Default)]
pub struct NativeResources {
    pub embeddings: Option<Arc<EmbeddingStore<f64>>>,
    pub idf: Option<Arc<IdfTable>>,
    pub synonyms: Option<Arc<SynonymTable>>,
}

pub const NATIVE_METRICS: &[&str] = &[
    "bleu1", "bleu2", "bleu3", "bleu4", "rouge1", "rouge2", "rougeL", "rougeSU4", "meteor", "ter", "cider", "wmd",
    "embavg", "vecext", "greedy", "exact", "constant",
];

/// Builds a native scorer by name (case-insensitive; `bleu` means `bleu4`).
pub fn native_scorer(name: &str, res: &NativeResources) -> Result<Box<dyn Scorer>> {
    let lower = name.to_ascii_lowercase();
    let need_embeddings = || {
        res.embeddings
            .clone()
            .ok_or_else(|| Error::invalid(format!("metric {name} needs --embeddings")))
    };
    let scorer: Box<dyn Scorer> = match lower.as_str() {
        "bleu" | "bleu4" => Box::new(Bleu::new(4, Smoothing::default())),
        "bleu1" => Box::new(Bleu::new(1, Smoothing::default())),
        "bleu2" => Box::new(Bleu::new(2, Smoothing::default())),
        "bleu3" => Box::new(Bleu::new(3, Smoothing::default())),
        "rouge1" => Box::new(Rouge::new(RougeVariant::N(1), RefAggregate::Max)),
        "rouge2" => Box::new(Rouge::new(RougeVariant::N(2), RefAggregate::Max)),
        "rougel" => Box::new(Rouge::new(RougeVariant::L, RefAggregate::Max)),
        "rougesu4" => Box::new(Rouge::new(RougeVariant::Su(4), RefAggregate::Max)),
        "meteor" => Box::new(Meteor::new(res.synonyms.clone(), Stemmer::Porter)),
        "ter" => Box::new(Ter::default()),
        "cider" => {
            let idf = res
                .idf
                .clone()
                .ok_or_else(|| Error::invalid("cider needs an idf table"))?;
            Box::new(Cider::new(idf)?)
        }
        "wmd" => Box::new(EmbeddingScorer::new(EmbeddingMetric::Wmd, need_embeddings()?)),
        "embavg" => Box::new(EmbeddingScorer::new(EmbeddingMetric::Average, need_embeddings()?)),
        "vecext" => Box::new(EmbeddingScorer::new(EmbeddingMetric::Extrema, need_embeddings()?)),
        "greedy" => Box::new(EmbeddingScorer::new(EmbeddingMetric::Greedy, need_embeddings()?)),
        "exact" => Box::new(ExactMatchScorer::default()),
        "constant" => Box::new(ConstantScorer::new(0.5)),
        _ => return Err(Error::invalid(format!("unknown metric {name:?}"))),
    };
    Ok(scorer)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_resolves_known_names() {
        let res = NativeResources::default();
        for name in [
            "bleu", "BLEU4", "rouge1", "rougeL", "rougeSU4", "meteor", "ter", "exact",
        ] {
            assert!(native_scorer(name, &res).is_ok(), "{name}");
        }
        assert_eq!(native_scorer("rougel", &res).unwrap().info().name, "rougeL");
    }

    #[test]
    fn registry_reports_missing_assets() {
        let res = NativeResources::default();
        assert!(native_scorer("wmd", &res).is_err());
        assert!(native_scorer("cider", &res).is_err());
        assert!(native_scorer("spice", &res).is_err());
    }
}

//! ROUGE-N, ROUGE-L and ROUGE-SU4 as F1 scores.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::ngram::{f1, NGramProfile};
use crate::error::{Error, Result};
use crate::scorer::{Scorer, ScorerInfo};
use crate::text::Text;

/// How per-reference scores combine.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RefAggregate {
    #[default]
    Max,
    Mean,
}

impl RefAggregate {
    pub(crate) fn combine(self, scores: impl IntoIterator<Item = f64>) -> f64 {
        let mut n = 0usize;
        let mut acc = match self {
            RefAggregate::Max => f64::NEG_INFINITY,
            RefAggregate::Mean => 0.0,
        };
        for s in scores {
            n += 1;
            acc = match self {
                RefAggregate::Max => acc.max(s),
                RefAggregate::Mean => acc + s,
            };
        }
        match (self, n) {
            (_, 0) => 0.0,
            (RefAggregate::Max, _) => acc,
            (RefAggregate::Mean, n) => acc / n as f64,
        }
    }
}

pub fn rouge_n_single(hyp: &[String], reference: &[String], n: usize) -> f64 {
    let h = NGramProfile::new(hyp, n);
    let r = NGramProfile::new(reference, n);
    if h.total() == 0 || r.total() == 0 {
        return 0.0;
    }
    let overlap = h.overlap(&r) as f64;
    f1(overlap / h.total() as f64, overlap / r.total() as f64)
}

pub fn lcs_len(a: &[String], b: &[String]) -> usize {
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y { prev[j] + 1 } else { cur[j].max(prev[j + 1]) };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

pub fn rouge_l_single(hyp: &[String], reference: &[String]) -> f64 {
    if hyp.is_empty() || reference.is_empty() {
        return 0.0;
    }
    let lcs = lcs_len(hyp, reference) as f64;
    f1(lcs / hyp.len() as f64, lcs / reference.len() as f64)
}

/// Unigrams plus ordered skip-bigrams with at most `max_gap` tokens in
/// between.
fn skip_units(tokens: &[String], max_gap: usize) -> HashMap<(&str, Option<&str>), usize> {
    let mut counts = HashMap::new();
    for (i, a) in tokens.iter().enumerate() {
        *counts.entry((a.as_str(), None)).or_insert(0) += 1;
        for b in tokens.iter().skip(i + 1).take(max_gap + 1) {
            *counts.entry((a.as_str(), Some(b.as_str()))).or_insert(0) += 1;
        }
    }
    counts
}

pub fn rouge_su_single(hyp: &[String], reference: &[String], max_gap: usize) -> f64 {
    let h = skip_units(hyp, max_gap);
    let r = skip_units(reference, max_gap);
    let h_total: usize = h.values().sum();
    let r_total: usize = r.values().sum();
    if h_total == 0 || r_total == 0 {
        return 0.0;
    }
    let overlap: usize = h.iter().map(|(k, &c)| c.min(r.get(k).copied().unwrap_or(0))).sum();
    f1(overlap as f64 / h_total as f64, overlap as f64 / r_total as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RougeVariant {
    N(usize),
    L,
    /// Skip-bigrams with the given maximum gap, plus unigrams.
    Su(usize),
}

fn single(variant: RougeVariant, hyp: &[String], reference: &[String]) -> f64 {
    match variant {
        RougeVariant::N(n) => rouge_n_single(hyp, reference, n),
        RougeVariant::L => rouge_l_single(hyp, reference),
        RougeVariant::Su(gap) => rouge_su_single(hyp, reference, gap),
    }
}

pub fn rouge(variant: RougeVariant, hyp: &[String], refs: &[&[String]], agg: RefAggregate) -> Result<f64> {
    if refs.is_empty() {
        return Err(Error::invalid("rouge needs at least one reference"));
    }
    Ok(agg.combine(refs.iter().map(|r| single(variant, hyp, r))))
}

pub fn rouge_n(hyp: &[String], refs: &[&[String]], n: usize) -> Result<f64> {
    rouge(RougeVariant::N(n), hyp, refs, RefAggregate::Max)
}

pub fn rouge_l(hyp: &[String], refs: &[&[String]]) -> Result<f64> {
    rouge(RougeVariant::L, hyp, refs, RefAggregate::Max)
}

pub fn rouge_su4(hyp: &[String], refs: &[&[String]]) -> Result<f64> {
    rouge(RougeVariant::Su(4), hyp, refs, RefAggregate::Max)
}

#[derive(Clone, Debug)]
pub struct Rouge {
    info: ScorerInfo,
    variant: RougeVariant,
    aggregate: RefAggregate,
}

impl Rouge {
    pub fn new(variant: RougeVariant, aggregate: RefAggregate) -> Self {
        let name = match variant {
            RougeVariant::N(n) => format!("rouge{n}"),
            RougeVariant::L => "rougeL".to_owned(),
            RougeVariant::Su(g) => format!("rougeSU{g}"),
        };
        Rouge {
            info: ScorerInfo::new(name).symmetric(true).multi_ref(true).range(0.0, 1.0),
            variant,
            aggregate,
        }
    }
}

impl Scorer for Rouge {
    fn info(&self) -> &ScorerInfo {
        &self.info
    }

    fn score(&self, hyp: &Text, reference: &Text) -> Result<f64> {
        Ok(single(self.variant, hyp.tokens(), reference.tokens()))
    }

    fn score_multi(&self, hyp: &Text, refs: &[Text]) -> Result<f64> {
        let refs: Vec<&[String]> = refs.iter().map(Text::tokens).collect();
        rouge(self.variant, hyp.tokens(), &refs, self.aggregate)
    }
}

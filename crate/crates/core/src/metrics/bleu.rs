//! Sentence-level BLEU with clipped n-gram precision and brevity penalty.

use serde::{Deserialize, Serialize};

use super::ngram::NGramProfile;
use crate::error::{Error, Result};
use crate::scorer::{Scorer, ScorerInfo};
use crate::text::Text;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "method", content = "value")]
pub enum Smoothing {
    None,
    /// Replace a zero matched count by `epsilon`.
    Epsilon(f64),
    /// Add one to matched and total counts for orders above 1.
    AddOne,
}

impl Default for Smoothing {
    fn default() -> Self {
        Smoothing::Epsilon(0.1)
    }
}

/// BLEU of `hyp` against `refs`.
///
/// Orders for which the hypothesis has no n-grams are left out of the
/// geometric mean, so short texts are scored on the orders they can carry.
/// A hypothesis with no matching unigram scores 0 under every smoothing.
pub fn bleu(hyp: &[String], refs: &[&[String]], max_n: usize, smoothing: Smoothing) -> Result<f64> {
    if refs.is_empty() {
        return Err(Error::invalid("bleu needs at least one reference"));
    }
    if !(1..=4).contains(&max_n) {
        return Err(Error::invalid(format!("bleu order {max_n} outside 1..=4")));
    }
    if hyp.is_empty() {
        return Ok(0.0);
    }

    let mut log_sum = 0.0;
    let mut orders = 0usize;
    for n in 1..=max_n {
        let hyp_grams = NGramProfile::new(hyp, n);
        let total = hyp_grams.total();
        if total == 0 {
            continue;
        }
        let ref_grams: Vec<NGramProfile> = refs.iter().map(|r| NGramProfile::new(r, n)).collect();
        let matched: usize = hyp_grams
            .iter()
            .map(|(g, c)| {
                let max_ref = ref_grams.iter().map(|r| r.count(g)).max().unwrap_or(0);
                c.min(max_ref)
            })
            .sum();
        if n == 1 && matched == 0 {
            return Ok(0.0);
        }
        let (m, t) = (matched as f64, total as f64);
        let precision = match smoothing {
            Smoothing::AddOne if n > 1 => (m + 1.0) / (t + 1.0),
            _ if matched > 0 => m / t,
            Smoothing::Epsilon(eps) => eps / t,
            Smoothing::None | Smoothing::AddOne => return Ok(0.0),
        };
        log_sum += precision.ln();
        orders += 1;
    }

    let geo_mean = (log_sum / orders as f64).exp();
    Ok((geo_mean * brevity_penalty(hyp.len(), refs)).min(1.0))
}

fn brevity_penalty(hyp_len: usize, refs: &[&[String]]) -> f64 {
    // closest reference length, shorter wins ties
    let ref_len = refs
        .iter()
        .map(|r| r.len())
        .min_by_key(|&l| (l.abs_diff(hyp_len), l))
        .unwrap_or(0);
    if hyp_len >= ref_len {
        1.0
    } else {
        (1.0 - ref_len as f64 / hyp_len as f64).exp()
    }
}

#[derive(Clone, Debug)]
pub struct Bleu {
    info: ScorerInfo,
    max_n: usize,
    smoothing: Smoothing,
}

impl Bleu {
    pub fn new(max_n: usize, smoothing: Smoothing) -> Self {
        Bleu {
            info: ScorerInfo::new(format!("bleu{max_n}")).multi_ref(true).range(0.0, 1.0),
            max_n,
            smoothing,
        }
    }
}

impl Scorer for Bleu {
    fn info(&self) -> &ScorerInfo {
        &self.info
    }

    fn score(&self, hyp: &Text, reference: &Text) -> Result<f64> {
        bleu(hyp.tokens(), &[reference.tokens()], self.max_n, self.smoothing)
    }

    fn score_multi(&self, hyp: &Text, refs: &[Text]) -> Result<f64> {
        let refs: Vec<&[String]> = refs.iter().map(Text::tokens).collect();
        bleu(hyp.tokens(), &refs, self.max_n, self.smoothing)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<String> {
        crate::text::tokenize(s)
    }

    #[test]
    fn identical_is_one() {
        let h = toks("the quick brown fox jumps over");
        assert_eq!(bleu(&h, &[&h], 4, Smoothing::default()).unwrap(), 1.0);
    }

    #[test]
    fn no_shared_token_is_zero() {
        let h = toks("alpha beta gamma");
        let r = toks("delta epsilon");
        for s in [Smoothing::None, Smoothing::default(), Smoothing::AddOne] {
            assert_eq!(bleu(&h, &[&r], 4, s).unwrap(), 0.0);
        }
    }

    #[test]
    fn hand_counted_bigram_bleu() {
        // p1 = 3/4, p2 = 2/3, BP = 1
        let h = toks("the cat sat down");
        let r = toks("the cat sat");
        let v = bleu(&h, &[&r], 2, Smoothing::None).unwrap();
        assert!((v - 0.5f64.sqrt()).abs() < 1e-12, "{v}");
    }

    #[test]
    fn brevity_penalty_applies() {
        let h = toks("the cat");
        let r = toks("the cat sat down");
        let v = bleu(&h, &[&r], 2, Smoothing::None).unwrap();
        assert!((v - (1.0f64 - 2.0).exp()).abs() < 1e-12);
    }

    #[test]
    fn epsilon_smoothing_on_zero_bigrams() {
        // p1 = 2/2, p2 = 0.1 / 1
        let h = toks("cat the");
        let r = toks("the cat");
        let v = bleu(&h, &[&r], 2, Smoothing::Epsilon(0.1)).unwrap();
        assert!((v - 0.1f64.sqrt()).abs() < 1e-12);
        assert_eq!(bleu(&h, &[&r], 2, Smoothing::None).unwrap(), 0.0);
    }

    #[test]
    fn clipping_uses_max_over_references() {
        let h = toks("the the the");
        let r1 = toks("the cat");
        let r2 = toks("the the dog");
        let v = bleu(&h, &[&r1, &r2], 1, Smoothing::None).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn empty_hypothesis_and_missing_refs() {
        assert_eq!(bleu(&[], &[&toks("a b")], 4, Smoothing::default()).unwrap(), 0.0);
        assert!(bleu(&toks("a"), &[], 4, Smoothing::default()).is_err());
    }

    #[test]
    fn single_word_identity() {
        let h = toks("rose");
        assert_eq!(bleu(&h, &[&h], 4, Smoothing::default()).unwrap(), 1.0);
    }
}

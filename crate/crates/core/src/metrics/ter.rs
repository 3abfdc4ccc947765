//! Translation edit rate with greedy phrase-shift search.

use crate::error::{Error, Result};
use crate::scorer::{Scorer, ScorerInfo};
use crate::text::Text;

const MAX_PHRASE_LEN: usize = 10;
const MAX_SHIFT_DIST: usize = 50;

/// Word-level Levenshtein distance.
pub fn edit_distance(a: &[String], b: &[String]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(x != y);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

fn apply_shift(words: &[String], start: usize, len: usize, dest: usize) -> Vec<String> {
    let mut rest: Vec<String> = Vec::with_capacity(words.len());
    rest.extend_from_slice(&words[..start]);
    rest.extend_from_slice(&words[start + len..]);
    let mut out = Vec::with_capacity(words.len());
    out.extend_from_slice(&rest[..dest]);
    out.extend_from_slice(&words[start..start + len]);
    out.extend_from_slice(&rest[dest..]);
    out
}

/// Best single shift: `(new_edit_distance, shifted_words)`.
fn best_shift(words: &[String], reference: &[String], current: usize) -> Option<(usize, Vec<String>)> {
    let mut best: Option<(usize, usize, usize, usize, Vec<String>)> = None;
    for start in 0..words.len() {
        for len in 1..=MAX_PHRASE_LEN.min(words.len() - start) {
            let phrase = &words[start..start + len];
            if reference.get(start..start + len) == Some(phrase) {
                continue;
            }
            let remaining = words.len() - len;
            let mut tried = Vec::new();
            for j in 0..reference.len().saturating_sub(len - 1) {
                if &reference[j..j + len] != phrase {
                    continue;
                }
                for dest in [j.saturating_sub(1), j, j + 1] {
                    if dest > remaining || dest == start || dest.abs_diff(start) > MAX_SHIFT_DIST {
                        continue;
                    }
                    if tried.contains(&dest) {
                        continue;
                    }
                    tried.push(dest);
                    let shifted = apply_shift(words, start, len, dest);
                    let ed = edit_distance(&shifted, reference);
                    if ed + 1 >= current {
                        continue;
                    }
                    let better = match &best {
                        None => true,
                        Some((bed, blen, bstart, bdest, _)) => {
                            (ed, std::cmp::Reverse(len), start, dest)
                                < (*bed, std::cmp::Reverse(*blen), *bstart, *bdest)
                        }
                    };
                    if better {
                        best = Some((ed, len, start, dest, shifted));
                    }
                }
            }
        }
    }
    best.map(|(ed, _, _, _, words)| (ed, words))
}

/// Number of edits (shifts plus Levenshtein operations) turning `hyp`
/// into `reference`.
pub fn ter_edits(hyp: &[String], reference: &[String]) -> usize {
    let mut words = hyp.to_vec();
    let mut ed = edit_distance(&words, reference);
    let mut shifts = 0;
    while ed > 0 {
        match best_shift(&words, reference, ed) {
            Some((new_ed, shifted)) => {
                words = shifted;
                ed = new_ed;
                shifts += 1;
            }
            None => break,
        }
    }
    shifts + ed
}

/// Minimum over references of edits / reference length.
pub fn ter(hyp: &[String], refs: &[&[String]]) -> Result<f64> {
    if refs.is_empty() {
        return Err(Error::invalid("ter needs at least one reference"));
    }
    let mut best = f64::INFINITY;
    for r in refs {
        if r.is_empty() {
            return Err(Error::invalid("ter reference is empty"));
        }
        best = best.min(ter_edits(hyp, r) as f64 / r.len() as f64);
    }
    Ok(best)
}

#[derive(Clone, Debug)]
pub struct Ter {
    info: ScorerInfo,
}

impl Default for Ter {
    fn default() -> Self {
        Ter {
            info: ScorerInfo::new("ter").multi_ref(true).range(0.0, f64::INFINITY),
        }
    }
}

impl Scorer for Ter {
    fn info(&self) -> &ScorerInfo {
        &self.info
    }

    fn score(&self, hyp: &Text, reference: &Text) -> Result<f64> {
        ter(hyp.tokens(), &[reference.tokens()])
    }

    fn score_multi(&self, hyp: &Text, refs: &[Text]) -> Result<f64> {
        let refs: Vec<&[String]> = refs.iter().map(Text::tokens).collect();
        ter(hyp.tokens(), &refs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(str::to_owned).collect()
    }

    #[test]
    fn identical_is_zero() {
        let h = toks("a b c");
        assert_eq!(ter(&h, &[&h]).unwrap(), 0.0);
    }

    #[test]
    fn empty_hypothesis_is_one() {
        assert_eq!(ter(&[], &[&toks("a b c d")]).unwrap(), 1.0);
    }

    #[test]
    fn swapped_pair_is_one_shift() {
        assert_eq!(ter_edits(&toks("b a"), &toks("a b")), 1);
        assert_eq!(ter(&toks("b a"), &[&toks("a b")]).unwrap(), 0.5);
    }

    #[test]
    fn phrase_shift() {
        // moving "on the mat" to the front is one edit instead of six substitutions
        let h = toks("on the mat the cat sat");
        let r = toks("the cat sat on the mat");
        assert_eq!(edit_distance(&h, &r), 6);
        assert_eq!(ter_edits(&h, &r), 1);
    }

    #[test]
    fn empty_reference_is_an_error() {
        assert!(ter(&toks("a"), &[&[]]).is_err());
        assert!(ter(&toks("a"), &[]).is_err());
    }

    #[test]
    fn minimum_over_references() {
        let v = ter(&toks("a b"), &[&toks("c d"), &toks("a b e")]).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn levenshtein_basics() {
        assert_eq!(edit_distance(&toks("a b c"), &toks("a c")), 1);
        assert_eq!(edit_distance(&[], &toks("a c")), 2);
        assert_eq!(edit_distance(&toks("x y"), &toks("a b")), 2);
    }
}

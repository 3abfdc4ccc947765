use std::collections::HashMap;

/// Multiset of the order-`n` n-grams of a token sequence.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NGramProfile {
    n: usize,
    counts: HashMap<Vec<String>, usize>,
    total: usize,
}

impl NGramProfile {
    pub fn new(tokens: &[String], n: usize) -> Self {
        assert!(n >= 1, "n-gram order must be positive");
        let mut counts = HashMap::new();
        let mut total = 0;
        for w in tokens.windows(n) {
            *counts.entry(w.to_vec()).or_insert(0) += 1;
            total += 1;
        }
        NGramProfile { n, counts, total }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    /// Sum of multiplicities, `max(0, len - n + 1)`.
    pub fn total(&self) -> usize {
        self.total
    }

    pub fn count(&self, gram: &[String]) -> usize {
        self.counts.get(gram).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<String>, usize)> {
        self.counts.iter().map(|(g, &c)| (g, c))
    }

    /// Clipped overlap `sum_g min(self[g], other[g])`.
    pub fn overlap(&self, other: &NGramProfile) -> usize {
        let (small, large) = if self.counts.len() <= other.counts.len() {
            (self, other)
        } else {
            (other, self)
        };
        small.counts.iter().map(|(g, &c)| c.min(large.count(g))).sum()
    }
}

/// Harmonic mean of precision and recall; 0 when either is 0.
pub(crate) fn f1(precision: f64, recall: f64) -> f64 {
    if precision <= 0.0 || recall <= 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(str::to_owned).collect()
    }

    #[test]
    fn counts_with_multiplicity() {
        let p = NGramProfile::new(&toks("a b a b a"), 2);
        assert_eq!(p.count(&toks("a b")), 2);
        assert_eq!(p.count(&toks("b a")), 2);
        assert_eq!(p.total(), 4);
    }

    #[test]
    fn overlap_is_clipped() {
        let a = NGramProfile::new(&toks("the the the"), 1);
        let b = NGramProfile::new(&toks("the cat"), 1);
        assert_eq!(a.overlap(&b), 1);
        assert_eq!(b.overlap(&a), 1);
    }

    proptest! {
        #[test]
        fn total_multiplicity(words in prop::collection::vec("[a-c]", 0..12), n in 1usize..5) {
            let p = NGramProfile::new(&words, n);
            prop_assert_eq!(p.total(), words.len().saturating_sub(n - 1));
            prop_assert_eq!(p.iter().map(|(_, c)| c).sum::<usize>(), p.total());
        }
    }
}

//! The metric contract and the pairwise score cache used by the
//! association engine.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::text::Text;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScorerInfo {
    pub name: String,
    /// True iff the implementation guarantees `score(x, y) == score(y, x)`.
    pub symmetric: bool,
    pub supports_multi_ref: bool,
    pub score_range: Option<(f64, f64)>,
    /// Calls must not overlap; the engine serializes them.
    #[serde(default)]
    pub single_flight: bool,
}

impl ScorerInfo {
    pub fn new(name: impl Into<String>) -> Self {
        ScorerInfo {
            name: name.into(),
            symmetric: false,
            supports_multi_ref: false,
            score_range: None,
            single_flight: false,
        }
    }

    pub fn symmetric(mut self, yes: bool) -> Self {
        self.symmetric = yes;
        self
    }

    pub fn multi_ref(mut self, yes: bool) -> Self {
        self.supports_multi_ref = yes;
        self
    }

    pub fn range(mut self, lo: f64, hi: f64) -> Self {
        self.score_range = Some((lo, hi));
        self
    }
}

/// A reference-based metric `M(hyp, ref)`.
pub trait Scorer: Send + Sync {
    fn info(&self) -> &ScorerInfo;

    fn score(&self, hyp: &Text, reference: &Text) -> Result<f64>;

    /// The metric's own multi-reference handling.
    fn score_multi(&self, hyp: &Text, refs: &[Text]) -> Result<f64> {
        let _ = (hyp, refs);
        Err(Error::Unsupported {
            metric: self.info().name.clone(),
            what: "native multi-reference scoring".into(),
        })
    }

    /// Scores many pairs. Results line up with `pairs`.
    fn score_pairs(&self, pairs: &[(&Text, &Text)]) -> Vec<Result<f64>> {
        if self.info().single_flight {
            pairs.iter().map(|(h, r)| self.score(h, r)).collect()
        } else {
            pairs.par_iter().map(|(h, r)| self.score(h, r)).collect()
        }
    }
}

impl<S: Scorer + ?Sized> Scorer for Box<S> {
    fn info(&self) -> &ScorerInfo {
        (**self).info()
    }
    fn score(&self, hyp: &Text, reference: &Text) -> Result<f64> {
        (**self).score(hyp, reference)
    }
    fn score_multi(&self, hyp: &Text, refs: &[Text]) -> Result<f64> {
        (**self).score_multi(hyp, refs)
    }
    fn score_pairs(&self, pairs: &[(&Text, &Text)]) -> Vec<Result<f64>> {
        (**self).score_pairs(pairs)
    }
}

impl<S: Scorer + ?Sized> Scorer for std::sync::Arc<S> {
    fn info(&self) -> &ScorerInfo {
        (**self).info()
    }
    fn score(&self, hyp: &Text, reference: &Text) -> Result<f64> {
        (**self).score(hyp, reference)
    }
    fn score_multi(&self, hyp: &Text, refs: &[Text]) -> Result<f64> {
        (**self).score_multi(hyp, refs)
    }
    fn score_pairs(&self, pairs: &[(&Text, &Text)]) -> Vec<Result<f64>> {
        (**self).score_pairs(pairs)
    }
}

/// Rejects non-finite values and values outside the declared range.
pub fn validate_score(info: &ScorerInfo, hyp: &Text, reference: &Text, value: f64) -> Result<f64> {
    if !value.is_finite() {
        return Err(Error::NonFinite {
            metric: info.name.clone(),
            value,
            hyp: hyp.raw().to_owned(),
            reference: reference.raw().to_owned(),
        });
    }
    if let Some((lo, hi)) = info.score_range {
        if value < lo || value > hi {
            return Err(Error::OutOfRange {
                metric: info.name.clone(),
                value,
                lo,
                hi,
            });
        }
    }
    Ok(value)
}

pub fn checked_score<S: Scorer + ?Sized>(m: &S, hyp: &Text, reference: &Text) -> Result<f64> {
    let v = m.score(hyp, reference)?;
    validate_score(m.info(), hyp, reference, v)
}

/// `S(x, y) = (M(x, y) + M(y, x)) / 2`; symmetric scorers are called once.
pub fn symmetrized_score<S: Scorer + ?Sized>(m: &S, x: &Text, y: &Text) -> Result<f64> {
    let forward = checked_score(m, x, y)?;
    if m.info().symmetric {
        return Ok(forward);
    }
    let backward = checked_score(m, y, x)?;
    Ok(0.5 * (forward + backward))
}

/// Dense cache of `S(rows[i], cols[j])`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreMatrix<T = f64> {
    rows: Vec<Text>,
    cols: Vec<Text>,
    values: Vec<T>,
}

impl<T: Scalar> ScoreMatrix<T> {
    pub fn from_values(rows: Vec<Text>, cols: Vec<Text>, values: Vec<T>) -> Result<Self> {
        if values.len() != rows.len() * cols.len() {
            return Err(Error::invalid(format!(
                "score matrix has {} values for {}x{} texts",
                values.len(),
                rows.len(),
                cols.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            let (i, j) = (pos / cols.len(), pos % cols.len());
            return Err(Error::NonFinite {
                metric: "score matrix".into(),
                value: values[pos].to_score(),
                hyp: rows[i].raw().to_owned(),
                reference: cols[j].raw().to_owned(),
            });
        }
        Ok(ScoreMatrix { rows, cols, values })
    }

    /// Computes the symmetrized score for every (row, col) pair. All
    /// directed pairs go through [`Scorer::score_pairs`] in one call so
    /// batching scorers see the full workload.
    pub fn compute<S: Scorer + ?Sized>(m: &S, rows: Vec<Text>, cols: Vec<Text>) -> Result<Self> {
        let symmetric = m.info().symmetric;
        let mut pairs: Vec<(&Text, &Text)> = Vec::with_capacity(rows.len() * cols.len() * 2);
        for r in &rows {
            for c in &cols {
                pairs.push((r, c));
                if !symmetric {
                    pairs.push((c, r));
                }
            }
        }
        let raw = m.score_pairs(&pairs);
        let mut checked = Vec::with_capacity(raw.len());
        for ((h, r), v) in pairs.iter().zip(raw) {
            let v = v
                .and_then(|v| validate_score(m.info(), h, r, v))
                .map_err(|e| Error::Pair {
                    hyp: h.raw().to_owned(),
                    reference: r.raw().to_owned(),
                    source: Box::new(e),
                })?;
            checked.push(v);
        }
        let values = if symmetric {
            checked.into_iter().map(T::from_score).collect()
        } else {
            checked
                .chunks_exact(2)
                .map(|fb| T::from_score(0.5 * (fb[0] + fb[1])))
                .collect()
        };
        Self::from_values(rows, cols, values)
    }

    pub fn rows(&self) -> &[Text] {
        &self.rows
    }

    pub fn cols(&self) -> &[Text] {
        &self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.values[i * self.cols.len() + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        let w = self.cols.len();
        &self.values[i * w..(i + 1) * w]
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Result<Self> {
        Self::from_values(
            self.rows.clone(),
            self.cols.clone(),
            self.values.iter().map(|&v| f(v)).collect(),
        )
    }
}

/// Returns the same value for every pair.
#[derive(Clone, Debug)]
pub struct ConstantScorer {
    info: ScorerInfo,
    value: f64,
}

impl ConstantScorer {
    pub fn new(value: f64) -> Self {
        ConstantScorer {
            info: ScorerInfo::new("constant").symmetric(true).multi_ref(true),
            value,
        }
    }
}

impl Scorer for ConstantScorer {
    fn info(&self) -> &ScorerInfo {
        &self.info
    }
    fn score(&self, _: &Text, _: &Text) -> Result<f64> {
        Ok(self.value)
    }
    fn score_multi(&self, _: &Text, _: &[Text]) -> Result<f64> {
        Ok(self.value)
    }
}

/// 1.0 iff the raw strings are identical.
#[derive(Clone, Debug)]
pub struct ExactMatchScorer {
    info: ScorerInfo,
}

impl Default for ExactMatchScorer {
    fn default() -> Self {
        ExactMatchScorer {
            info: ScorerInfo::new("exact").symmetric(true).multi_ref(true).range(0.0, 1.0),
        }
    }
}

impl Scorer for ExactMatchScorer {
    fn info(&self) -> &ScorerInfo {
        &self.info
    }
    fn score(&self, hyp: &Text, reference: &Text) -> Result<f64> {
        Ok(if hyp.raw() == reference.raw() { 1.0 } else { 0.0 })
    }
    fn score_multi(&self, hyp: &Text, refs: &[Text]) -> Result<f64> {
        Ok(if refs.iter().any(|r| r.raw() == hyp.raw()) {
            1.0
        } else {
            0.0
        })
    }
}

/// Adapts a closure into a scorer; handy for synthetic metrics.
pub struct FnScorer<F> {
    info: ScorerInfo,
    f: F,
}

impl<F> FnScorer<F>
where
    F: Fn(&Text, &Text) -> f64 + Send + Sync,
{
    pub fn new(info: ScorerInfo, f: F) -> Self {
        FnScorer { info, f }
    }
}

impl<F> Scorer for FnScorer<F>
where
    F: Fn(&Text, &Text) -> f64 + Send + Sync,
{
    fn info(&self) -> &ScorerInfo {
        &self.info
    }
    fn score(&self, hyp: &Text, reference: &Text) -> Result<f64> {
        Ok((self.f)(hyp, reference))
    }
}

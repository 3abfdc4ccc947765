//! Static word-embedding metrics: word mover's distance, embedding
//! average, vector extrema and greedy matching.
//!
//! Out-of-vocabulary tokens are dropped. In-vocabulary tokens are
//! processed in a canonical order (by vector, then token) so every metric
//! is exactly invariant to token order and to renamings that preserve
//! vectors.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::{ordered_sum, Scalar};
use crate::scorer::{Scorer, ScorerInfo};
use crate::text::Text;

use super::transport::{solve_transport, TransportPlan};

#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingStore<T = f64> {
    dim: usize,
    vectors: HashMap<String, Vec<T>>,
}

/// What happened while reading an embedding file.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub header: Option<(usize, usize)>,
    pub loaded: usize,
    pub duplicates: usize,
    pub malformed: usize,
}

impl<T: Scalar> EmbeddingStore<T> {
    pub fn new(dim: usize) -> Self {
        EmbeddingStore {
            dim,
            vectors: HashMap::new(),
        }
    }

    /// Inserts unless the (lowercased) token is already present.
    pub fn insert(&mut self, token: &str, vector: Vec<T>) -> Result<bool> {
        if vector.len() != self.dim {
            return Err(Error::invalid(format!(
                "vector for {token:?} has {} entries, store dim is {}",
                vector.len(),
                self.dim
            )));
        }
        if vector.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("vector for {token:?} is not finite")));
        }
        let key = token.to_lowercase();
        if self.vectors.contains_key(&key) {
            return Ok(false);
        }
        self.vectors.insert(key, vector);
        Ok(true)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn get(&self, token: &str) -> Option<&[T]> {
        match self.vectors.get(token) {
            Some(v) => Some(v),
            None => self.vectors.get(&token.to_lowercase()).map(Vec::as_slice),
        }
    }

    /// Reads the word2vec/GloVe text format: an optional `count dim`
    /// header, then `token v1 ... vdim` per line.
    pub fn load(path: &Path, expected_dim: Option<usize>) -> Result<(Self, LoadReport)> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut report = LoadReport::default();
        let mut store: Option<Self> = None;
        for (lineno, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.is_empty() {
                continue;
            }
            if lineno == 0 && fields.len() == 2 {
                if let (Ok(count), Ok(dim)) = (fields[0].parse::<usize>(), fields[1].parse::<usize>()) {
                    if let Some(exp) = expected_dim.filter(|&e| e != dim) {
                        return Err(Error::Parse {
                            path: path.into(),
                            line: 1,
                            message: format!("header dim {dim} != expected {exp}"),
                        });
                    }
                    report.header = Some((count, dim));
                    store = Some(Self::new(dim));
                    continue;
                }
            }
            let store = match &mut store {
                Some(s) => s,
                None => {
                    let dim = fields.len() - 1;
                    if let Some(exp) = expected_dim.filter(|&e| e != dim) {
                        return Err(Error::Parse {
                            path: path.into(),
                            line: lineno + 1,
                            message: format!("row dim {dim} != expected {exp}"),
                        });
                    }
                    store.insert(Self::new(dim))
                }
            };
            if fields.len() != store.dim + 1 {
                report.malformed += 1;
                continue;
            }
            let parsed: Option<Vec<T>> = fields[1..]
                .iter()
                .map(|f| T::from_str_radix(f, 10).ok().filter(|v| v.is_finite()))
                .collect();
            match parsed {
                Some(vec) => {
                    if store.insert(fields[0], vec)? {
                        report.loaded += 1;
                    } else {
                        report.duplicates += 1;
                    }
                }
                None => report.malformed += 1,
            }
        }
        if report.malformed > 0 {
            log::warn!("{}: skipped {} malformed rows", path.display(), report.malformed);
        }
        match store {
            Some(s) if !s.is_empty() => Ok((s, report)),
            _ => Err(Error::Parse {
                path: path.into(),
                line: 0,
                message: "no usable embedding rows".into(),
            }),
        }
    }

    /// In-vocabulary tokens of `text` with their vectors, canonically ordered.
    fn lookup<'a>(&'a self, text: &'a Text) -> Vec<(&'a str, &'a [T])> {
        let mut found: Vec<(&str, &[T])> = text
            .tokens()
            .iter()
            .filter_map(|t| self.get(t).map(|v| (t.as_str(), v)))
            .collect();
        found.sort_by(|a, b| cmp_vectors(a.1, b.1).then_with(|| a.0.cmp(b.0)));
        found
    }

    fn lookup_nonempty<'a>(&'a self, text: &'a Text) -> Result<Vec<(&'a str, &'a [T])>> {
        let found = self.lookup(text);
        if found.is_empty() {
            return Err(Error::NoComparableContent(format!(
                "no in-vocabulary tokens in {:?}",
                text.raw()
            )));
        }
        Ok(found)
    }
}

fn cmp_vectors<T: Scalar>(a: &[T], b: &[T]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y) {
            Some(Ordering::Equal) | None => continue,
            Some(o) => return o,
        }
    }
    a.len().cmp(&b.len())
}

pub fn euclidean<T: Scalar>(a: &[T], b: &[T]) -> T {
    ordered_sum(a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y))).sqrt()
}

pub fn cosine<T: Scalar>(a: &[T], b: &[T]) -> Result<T> {
    let dot = ordered_sum(a.iter().zip(b).map(|(&x, &y)| x * y));
    let na2 = ordered_sum(a.iter().map(|&x| x * x));
    let nb2 = ordered_sum(b.iter().map(|&x| x * x));
    if na2 == T::zero() || nb2 == T::zero() {
        return Err(Error::Undefined("cosine of a zero-norm vector".into()));
    }
    // sqrt(na2 * na2) == na2 exactly, so identical vectors give exactly 1
    Ok((dot / (na2 * nb2).sqrt()).max(-T::one()).min(T::one()))
}

/// Normalized bag of words: distinct tokens (canonical order) with weights.
fn nbow<'a, T: Scalar>(found: &[(&'a str, &'a [T])]) -> (Vec<&'a [T]>, Vec<T>) {
    let mut vecs: Vec<&[T]> = Vec::new();
    let mut counts: Vec<usize> = Vec::new();
    let mut last: Option<&str> = None;
    for (tok, v) in found {
        // canonical order groups equal tokens together
        if last == Some(*tok) {
            *counts.last_mut().expect("group exists") += 1;
        } else {
            vecs.push(v);
            counts.push(1);
            last = Some(tok);
        }
    }
    let total = T::from_count(found.len());
    (vecs, counts.into_iter().map(|c| T::from_count(c) / total).collect())
}

/// Optimal transport plan between the bag-of-words distributions of `x`
/// and `y` under Euclidean embedding distance.
pub fn wmd_plan<T: Scalar>(x: &Text, y: &Text, store: &EmbeddingStore<T>) -> Result<TransportPlan<T>> {
    let fx = store.lookup_nonempty(x)?;
    let fy = store.lookup_nonempty(y)?;
    let (vx, wx) = nbow(&fx);
    let (vy, wy) = nbow(&fy);
    let cost: Vec<T> = vx
        .iter()
        .flat_map(|a| vy.iter().map(move |b| euclidean(a, b)))
        .collect();
    solve_transport(&wx, &wy, &cost)
}

pub fn wmd_distance<T: Scalar>(x: &Text, y: &Text, store: &EmbeddingStore<T>) -> Result<T> {
    // Solve in a canonical orientation so the distance is exactly symmetric.
    let fx = store.lookup_nonempty(x)?;
    let fy = store.lookup_nonempty(y)?;
    let vx: Vec<&[T]> = fx.iter().map(|f| f.1).collect();
    let vy: Vec<&[T]> = fy.iter().map(|f| f.1).collect();
    let swap = vx
        .iter()
        .zip(&vy)
        .map(|(a, b)| cmp_vectors(a, b))
        .find(|o| *o != Ordering::Equal)
        .unwrap_or_else(|| vx.len().cmp(&vy.len()))
        == Ordering::Greater;
    let plan = if swap {
        wmd_plan(y, x, store)?
    } else {
        wmd_plan(x, y, store)?
    };
    Ok(plan.cost().max(T::zero()))
}

/// `1 / (1 + wmd_distance)`, in (0, 1].
pub fn wmd_score<T: Scalar>(x: &Text, y: &Text, store: &EmbeddingStore<T>) -> Result<T> {
    Ok(T::one() / (T::one() + wmd_distance(x, y, store)?))
}

fn mean_vector<T: Scalar>(found: &[(&str, &[T])], dim: usize) -> Vec<T> {
    let n = T::from_count(found.len());
    (0..dim)
        .map(|d| ordered_sum(found.iter().map(|f| f.1[d])) / n)
        .collect()
}

pub fn embedding_average<T: Scalar>(x: &Text, y: &Text, store: &EmbeddingStore<T>) -> Result<T> {
    let mx = mean_vector(&store.lookup_nonempty(x)?, store.dim());
    let my = mean_vector(&store.lookup_nonempty(y)?, store.dim());
    cosine(&mx, &my)
}

/// Per dimension, the entry of largest magnitude; ties go to the positive one.
pub fn extrema_vector<T: Scalar>(vectors: &[&[T]], dim: usize) -> Vec<T> {
    (0..dim)
        .map(|d| {
            let max = vectors.iter().map(|v| v[d]).fold(T::neg_infinity(), T::max);
            let min = vectors.iter().map(|v| v[d]).fold(T::infinity(), T::min);
            if min.abs() > max.abs() {
                min
            } else {
                max
            }
        })
        .collect()
}

pub fn vector_extrema<T: Scalar>(x: &Text, y: &Text, store: &EmbeddingStore<T>) -> Result<T> {
    let vx: Vec<&[T]> = store.lookup_nonempty(x)?.into_iter().map(|f| f.1).collect();
    let vy: Vec<&[T]> = store.lookup_nonempty(y)?.into_iter().map(|f| f.1).collect();
    cosine(&extrema_vector(&vx, store.dim()), &extrema_vector(&vy, store.dim()))
}

fn greedy_direction<T: Scalar>(from: &[&[T]], to: &[&[T]]) -> Result<T> {
    let mut best = Vec::with_capacity(from.len());
    for a in from {
        let mut m = T::neg_infinity();
        for b in to {
            m = m.max(cosine(a, b)?);
        }
        best.push(m);
    }
    Ok(ordered_sum(best.iter().copied()) / T::from_count(best.len()))
}

pub fn greedy_matching<T: Scalar>(x: &Text, y: &Text, store: &EmbeddingStore<T>) -> Result<T> {
    let vx: Vec<&[T]> = store.lookup_nonempty(x)?.into_iter().map(|f| f.1).collect();
    let vy: Vec<&[T]> = store.lookup_nonempty(y)?.into_iter().map(|f| f.1).collect();
    let forward = greedy_direction(&vx, &vy)?;
    let backward = greedy_direction(&vy, &vx)?;
    Ok((forward + backward) / (T::one() + T::one()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EmbeddingMetric {
    Wmd,
    Average,
    Extrema,
    Greedy,
}

/// Any of the four embedding metrics as a [`Scorer`].
#[derive(Clone, Debug)]
pub struct EmbeddingScorer<T = f64> {
    info: ScorerInfo,
    metric: EmbeddingMetric,
    store: Arc<EmbeddingStore<T>>,
}

impl<T: Scalar> EmbeddingScorer<T> {
    pub fn new(metric: EmbeddingMetric, store: Arc<EmbeddingStore<T>>) -> Self {
        let info = match metric {
            EmbeddingMetric::Wmd => ScorerInfo::new("wmd").range(0.0, 1.0),
            EmbeddingMetric::Average => ScorerInfo::new("embavg").range(-1.0, 1.0),
            EmbeddingMetric::Extrema => ScorerInfo::new("vecext").range(-1.0, 1.0),
            EmbeddingMetric::Greedy => ScorerInfo::new("greedy").range(-1.0, 1.0),
        };
        EmbeddingScorer {
            info: info.symmetric(true),
            metric,
            store,
        }
    }
}

impl<T: Scalar> Scorer for EmbeddingScorer<T> {
    fn info(&self) -> &ScorerInfo {
        &self.info
    }

    fn score(&self, hyp: &Text, reference: &Text) -> Result<f64> {
        let s = &*self.store;
        let v = match self.metric {
            EmbeddingMetric::Wmd => wmd_score(hyp, reference, s)?,
            EmbeddingMetric::Average => embedding_average(hyp, reference, s)?,
            EmbeddingMetric::Extrema => vector_extrema(hyp, reference, s)?,
            EmbeddingMetric::Greedy => greedy_matching(hyp, reference, s)?,
        };
        Ok(v.to_score())
    }
}

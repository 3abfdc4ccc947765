//! A lightweight METEOR: staged unigram alignment (exact, stem, synonym),
//! recall-weighted F-mean and a fragmentation penalty.

use std::collections::HashMap;
use std::path::Path;
use std::sync::Arc;

use rust_stemmers::{Algorithm, Stemmer as SnowballStemmer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scorer::{Scorer, ScorerInfo};
use crate::text::Text;

const ALPHA: f64 = 0.9;
const GAMMA: f64 = 0.5;
const BETA: f64 = 3.0;

/// Synonym sets; two tokens are synonyms iff they share a set.
#[derive(Clone, Debug, Default)]
pub struct SynonymTable {
    sets: HashMap<String, Vec<usize>>,
}

impl SynonymTable {
    pub fn from_sets<I, S>(sets: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut table = SynonymTable::default();
        for (id, line) in sets.into_iter().enumerate() {
            for tok in line.as_ref().split_whitespace() {
                let entry = table.sets.entry(tok.to_lowercase()).or_default();
                if !entry.contains(&id) {
                    entry.push(id);
                }
            }
        }
        table
    }

    /// One synonym set per line, tokens separated by spaces.
    pub fn load(path: &Path) -> Result<Self> {
        let body = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::from_sets(body.lines().filter(|l| !l.trim().is_empty())))
    }

    pub fn are_synonyms(&self, a: &str, b: &str) -> bool {
        match (self.sets.get(a), self.sets.get(b)) {
            (Some(x), Some(y)) => x.iter().any(|id| y.contains(id)),
            _ => false,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stemmer {
    None,
    #[default]
    Porter,
}

impl Stemmer {
    fn stems(self, tokens: &[String]) -> Option<Vec<String>> {
        match self {
            Stemmer::None => None,
            Stemmer::Porter => {
                let s = SnowballStemmer::create(Algorithm::English);
                Some(tokens.iter().map(|t| s.stem(t).into_owned()).collect())
            }
        }
    }
}

/// Alignment statistics for one hypothesis/reference pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Alignment {
    pub matches: usize,
    pub chunks: usize,
}

/// Aligns unigrams stage by stage. Within a stage each hypothesis token,
/// left to right, takes the unaligned reference position closest to the
/// one following its left neighbour's alignment, which keeps chunks long.
pub fn align(hyp: &[String], reference: &[String], synonyms: Option<&SynonymTable>, stemmer: Stemmer) -> Alignment {
    let mut hyp_to_ref: Vec<Option<usize>> = vec![None; hyp.len()];
    let mut ref_used = vec![false; reference.len()];

    let hyp_stems = stemmer.stems(hyp);
    let ref_stems = stemmer.stems(reference);

    let mut stages: Vec<Box<dyn Fn(usize, usize) -> bool + '_>> = vec![Box::new(|i, j| hyp[i] == reference[j])];
    if let (Some(hs), Some(rs)) = (&hyp_stems, &ref_stems) {
        stages.push(Box::new(move |i, j| hs[i] == rs[j]));
    }
    if let Some(table) = synonyms {
        stages.push(Box::new(move |i, j| table.are_synonyms(&hyp[i], &reference[j])));
    }

    for stage in &stages {
        for i in 0..hyp.len() {
            if hyp_to_ref[i].is_some() {
                continue;
            }
            let anchor = (0..i).rev().find_map(|k| hyp_to_ref[k]).map_or(0, |j| j + 1);
            let best = (0..reference.len())
                .filter(|&j| !ref_used[j] && stage(i, j))
                .min_by_key(|&j| (j.abs_diff(anchor), j));
            if let Some(j) = best {
                hyp_to_ref[i] = Some(j);
                ref_used[j] = true;
            }
        }
    }

    let mut matches = 0;
    let mut chunks = 0;
    let mut prev: Option<usize> = None;
    for slot in &hyp_to_ref {
        match (*slot, prev) {
            (Some(j), Some(p)) if j == p + 1 => {
                matches += 1;
            }
            (Some(_), _) => {
                matches += 1;
                chunks += 1;
            }
            (None, _) => {}
        }
        prev = *slot;
    }
    Alignment { matches, chunks }
}

pub fn meteor_single(hyp: &[String], reference: &[String], synonyms: Option<&SynonymTable>, stemmer: Stemmer) -> f64 {
    if hyp.is_empty() || reference.is_empty() {
        return 0.0;
    }
    let Alignment { matches, chunks } = align(hyp, reference, synonyms, stemmer);
    if matches == 0 {
        return 0.0;
    }
    let m = matches as f64;
    let precision = m / hyp.len() as f64;
    let recall = m / reference.len() as f64;
    let fmean = precision * recall / (ALPHA * precision + (1.0 - ALPHA) * recall);
    let penalty = GAMMA * (chunks as f64 / m).powf(BETA);
    fmean * (1.0 - penalty)
}

pub fn meteor_lite(
    hyp: &[String],
    refs: &[&[String]],
    synonyms: Option<&SynonymTable>,
    stemmer: Stemmer,
) -> Result<f64> {
    if refs.is_empty() {
        return Err(Error::invalid("meteor needs at least one reference"));
    }
    Ok(refs
        .iter()
        .map(|r| meteor_single(hyp, r, synonyms, stemmer))
        .fold(0.0, f64::max))
}

#[derive(Clone, Debug)]
pub struct Meteor {
    info: ScorerInfo,
    synonyms: Option<Arc<SynonymTable>>,
    stemmer: Stemmer,
}

impl Meteor {
    pub fn new(synonyms: Option<Arc<SynonymTable>>, stemmer: Stemmer) -> Self {
        if synonyms.is_none() {
            log::info!("meteor: no synonym table, matching on exact forms and stems only");
        }
        Meteor {
            info: ScorerInfo::new("meteor").multi_ref(true).range(0.0, 1.0),
            synonyms,
            stemmer,
        }
    }
}

impl Scorer for Meteor {
    fn info(&self) -> &ScorerInfo {
        &self.info
    }

    fn score(&self, hyp: &Text, reference: &Text) -> Result<f64> {
        Ok(meteor_single(
            hyp.tokens(),
            reference.tokens(),
            self.synonyms.as_deref(),
            self.stemmer,
        ))
    }

    fn score_multi(&self, hyp: &Text, refs: &[Text]) -> Result<f64> {
        let refs: Vec<&[String]> = refs.iter().map(Text::tokens).collect();
        meteor_lite(hyp.tokens(), &refs, self.synonyms.as_deref(), self.stemmer)
    }
}

//! CIDEr-D: tf-idf weighted n-gram cosine with clipping and a gaussian
//! length penalty, scaled by 10.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ngram::NGramProfile;
use crate::error::{Error, Result};
use crate::scorer::{Scorer, ScorerInfo};
use crate::text::Text;

/// Document frequencies of n-grams over a corpus of reference sets.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct IdfTable {
    document_frequencies: HashMap<String, usize>,
    num_docs: usize,
}

#[derive(Serialize, Deserialize)]
struct IdfFile {
    num_docs: usize,
    #[serde(flatten)]
    frequencies: BTreeMap<String, usize>,
}

impl IdfTable {
    pub fn new(document_frequencies: HashMap<String, usize>, num_docs: usize) -> Result<Self> {
        if num_docs == 0 {
            return Err(Error::invalid("idf table needs num_docs > 0"));
        }
        if let Some((g, &df)) = document_frequencies.iter().find(|(_, &df)| df > num_docs) {
            return Err(Error::invalid(format!(
                "document frequency {df} of {g:?} exceeds num_docs {num_docs}"
            )));
        }
        Ok(IdfTable {
            document_frequencies,
            num_docs,
        })
    }

    /// One document per reference set; an n-gram counts once per set.
    pub fn from_reference_sets<'a, I>(sets: I, max_n: usize) -> Result<Self>
    where
        I: IntoIterator<Item = &'a [Text]>,
    {
        let mut df: HashMap<String, usize> = HashMap::new();
        let mut num_docs = 0;
        for set in sets {
            num_docs += 1;
            let mut seen: HashSet<String> = HashSet::new();
            for r in set {
                for n in 1..=max_n {
                    for (g, _) in NGramProfile::new(r.tokens(), n).iter() {
                        seen.insert(g.join(" "));
                    }
                }
            }
            for g in seen {
                *df.entry(g).or_insert(0) += 1;
            }
        }
        Self::new(df, num_docs)
    }

    /// JSON object mapping space-joined n-grams to frequencies, plus
    /// `"num_docs"`.
    pub fn load(path: &Path) -> Result<Self> {
        let body = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let file: IdfFile = serde_json::from_str(&body).map_err(|e| Error::json(path.display().to_string(), e))?;
        Self::new(file.frequencies.into_iter().collect(), file.num_docs)
    }

    pub fn to_json(&self) -> String {
        let file = IdfFile {
            num_docs: self.num_docs,
            frequencies: self.document_frequencies.clone().into_iter().collect(),
        };
        serde_json::to_string_pretty(&file).expect("idf table serializes")
    }

    pub fn num_docs(&self) -> usize {
        self.num_docs
    }

    pub fn document_frequency(&self, gram: &str) -> usize {
        self.document_frequencies.get(gram).copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.document_frequencies.is_empty()
    }

    fn weight(&self, gram: &str) -> f64 {
        let df = self.document_frequency(gram).max(1) as f64;
        (self.num_docs as f64).ln() - df.ln()
    }
}

struct TfIdf {
    vecs: Vec<HashMap<String, f64>>,
    norms: Vec<f64>,
    len: usize,
}

fn tfidf(tokens: &[String], idf: &IdfTable, max_n: usize) -> TfIdf {
    let mut vecs = Vec::with_capacity(max_n);
    let mut norms = Vec::with_capacity(max_n);
    for n in 1..=max_n {
        let profile = NGramProfile::new(tokens, n);
        let mut entries: Vec<(String, f64)> = profile
            .iter()
            .map(|(g, c)| {
                let key = g.join(" ");
                let w = c as f64 * idf.weight(&key);
                (key, w)
            })
            .collect();
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        norms.push(entries.iter().map(|(_, w)| w * w).sum::<f64>().sqrt());
        vecs.push(entries.into_iter().collect());
    }
    TfIdf {
        vecs,
        norms,
        len: tokens.len(),
    }
}

fn similarity(hyp: &TfIdf, reference: &TfIdf, n: usize, sigma: f64) -> f64 {
    let h = &hyp.vecs[n];
    let r = &reference.vecs[n];
    let mut keys: Vec<&String> = h.keys().filter(|k| r.contains_key(*k)).collect();
    keys.sort();
    let dot: f64 = keys.iter().map(|k| h[*k].min(r[*k]) * r[*k]).sum();
    let mut val = if hyp.norms[n] != 0.0 && reference.norms[n] != 0.0 {
        dot / (hyp.norms[n] * reference.norms[n])
    } else {
        0.0
    };
    let delta = hyp.len as f64 - reference.len as f64;
    val *= (-(delta * delta) / (2.0 * sigma * sigma)).exp();
    val
}

pub fn cider(hyp: &[String], refs: &[&[String]], idf: &IdfTable, max_n: usize, sigma: f64) -> Result<f64> {
    if idf.is_empty() {
        return Err(Error::invalid("cider needs a non-empty idf table"));
    }
    if refs.is_empty() {
        return Err(Error::invalid("cider needs at least one reference"));
    }
    let h = tfidf(hyp, idf, max_n);
    let mut total = 0.0;
    for r in refs {
        let r = tfidf(r, idf, max_n);
        let per_n: f64 = (0..max_n).map(|n| similarity(&h, &r, n, sigma)).sum();
        total += per_n / max_n as f64;
    }
    Ok(10.0 * total / refs.len() as f64)
}

#[derive(Clone, Debug)]
pub struct Cider {
    info: ScorerInfo,
    idf: std::sync::Arc<IdfTable>,
    max_n: usize,
    sigma: f64,
}

impl Cider {
    pub fn new(idf: std::sync::Arc<IdfTable>) -> Result<Self> {
        if idf.is_empty() {
            return Err(Error::invalid("cider needs a non-empty idf table"));
        }
        Ok(Cider {
            info: ScorerInfo::new("cider").multi_ref(true).range(0.0, f64::INFINITY),
            idf,
            max_n: 4,
            sigma: 6.0,
        })
    }
}

impl Scorer for Cider {
    fn info(&self) -> &ScorerInfo {
        &self.info
    }

    fn score(&self, hyp: &Text, reference: &Text) -> Result<f64> {
        cider(hyp.tokens(), &[reference.tokens()], &self.idf, self.max_n, self.sigma)
    }

    fn score_multi(&self, hyp: &Text, refs: &[Text]) -> Result<f64> {
        let refs: Vec<&[String]> = refs.iter().map(Text::tokens).collect();
        cider(hyp.tokens(), &refs, &self.idf, self.max_n, self.sigma)
    }
}

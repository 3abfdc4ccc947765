//! Turns metric names and bridge command lines into scorers.

use std::collections::HashSet;
use std::path::PathBuf;
use std::sync::Arc;

use biaseval::bridge::{BridgeConfig, BridgeScorer, ScoreCache};
use biaseval::metaeval::MetaEvalDataset;
use biaseval::metrics::{native_scorer, EmbeddingStore, IdfTable, NativeResources, SynonymTable};
use biaseval::{Error, Result, Scorer};
use clap::Args;

use crate::report::{InputDigest, MetricConfig};

#[derive(Args, Debug, Clone, Default)]
pub struct MetricArgs {
    /// Comma-separated native metric names (bleu4, rouge1, rougeL, meteor, ter, cider, wmd, ...).
    #[arg(long, value_delimiter = ',')]
    pub metrics: Vec<String>,
    /// Word vectors in word2vec/GloVe text format, for wmd, embavg, vecext and greedy.
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    /// Document frequencies for cider (JSON); defaults to the dataset's references.
    #[arg(long)]
    pub idf: Option<PathBuf>,
    /// Synonym sets for meteor (JSON list of lists).
    #[arg(long)]
    pub synonyms: Option<PathBuf>,
    /// Command line of an external metric speaking the bridge protocol; repeatable.
    #[arg(long)]
    pub bridge: Vec<String>,
}

pub struct Resolved {
    pub scorer: Box<dyn Scorer>,
    pub config: MetricConfig,
}

fn config_of(scorer: &dyn Scorer, source: &str, command: Option<String>) -> MetricConfig {
    let info = scorer.info();
    MetricConfig {
        name: info.name.clone(),
        source: source.into(),
        command,
        symmetric: info.symmetric,
        supports_multi_ref: info.supports_multi_ref,
        score_range: info.score_range,
    }
}

fn digest(path: &PathBuf, inputs: &mut Vec<InputDigest>) -> Result<()> {
    inputs.push(InputDigest::of_file(path).map_err(|e| Error::io(path, e))?);
    Ok(())
}

/// Resolves every requested metric. Asset files are added to `inputs`.
pub fn resolve(
    args: &MetricArgs,
    dataset: Option<&MetaEvalDataset>,
    inputs: &mut Vec<InputDigest>,
) -> Result<Vec<Resolved>> {
    if args.metrics.is_empty() && args.bridge.is_empty() {
        return Err(Error::invalid("no metrics given; use --metrics and/or --bridge"));
    }
    let wants = |names: &[&str]| {
        args.metrics
            .iter()
            .any(|m| names.contains(&m.to_ascii_lowercase().as_str()))
    };
    let mut res = NativeResources::default();
    if let Some(path) = &args.embeddings {
        if wants(&["wmd", "embavg", "vecext", "greedy"]) {
            let (store, report) = EmbeddingStore::load(path, None)?;
            eprintln!(
                "embeddings: {} vectors loaded, {} duplicates, {} malformed lines skipped",
                report.loaded, report.duplicates, report.malformed
            );
            res.embeddings = Some(Arc::new(store));
        }
        digest(path, inputs)?;
    }
    if let Some(path) = &args.synonyms {
        res.synonyms = Some(Arc::new(SynonymTable::load(path)?));
        digest(path, inputs)?;
    }
    if let Some(path) = &args.idf {
        res.idf = Some(Arc::new(IdfTable::load(path)?));
        digest(path, inputs)?;
    } else if let (Some(ds), true) = (dataset, wants(&["cider"])) {
        // one document per example
        let mut seen = HashSet::new();
        let sets = ds
            .records
            .iter()
            .filter(|r| seen.insert(r.example_id.as_str()))
            .map(|r| r.references.as_slice());
        res.idf = Some(Arc::new(IdfTable::from_reference_sets(sets, 4)?));
    }

    let mut out = Vec::new();
    for name in &args.metrics {
        let scorer = native_scorer(name, &res)?;
        let config = config_of(scorer.as_ref(), "native", None);
        out.push(Resolved { scorer, config });
    }
    if !args.bridge.is_empty() {
        let cache = Arc::new(ScoreCache::from_env()?);
        for line in &args.bridge {
            let scorer = BridgeScorer::spawn(BridgeConfig::from_command_line(line))?.with_cache(cache.clone());
            let config = config_of(&scorer, "bridge", Some(line.clone()));
            out.push(Resolved {
                scorer: Box::new(scorer),
                config,
            });
        }
    }
    let mut names = HashSet::new();
    for r in &out {
        if !names.insert(r.config.name.clone()) {
            return Err(Error::invalid(format!("metric {} requested twice", r.config.name)));
        }
    }
    Ok(out)
}

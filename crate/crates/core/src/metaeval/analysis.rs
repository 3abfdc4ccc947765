use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dataset::{MetaEvalDataset, MetaEvalRecord};
use super::spearman::{spearman_with, CorrelationConfig, CorrelationResult};
use crate::error::{Error, Result};
use crate::genderswap::{detect_gender, swap_dataset, swap_gender, GenderLexicon};
use crate::scorer::{validate_score, Scorer};
use crate::text::Text;

/// Score differences within this bound count as ties.
pub const EQUALITY_TOLERANCE: f64 = 1e-9;

/// How a hypothesis is scored against several references.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MultiRef {
    #[default]
    Max,
    Mean,
    /// The metric's own multi-reference scoring.
    Native,
}

impl MultiRef {
    pub fn as_str(self) -> &'static str {
        match self {
            MultiRef::Max => "max",
            MultiRef::Mean => "mean",
            MultiRef::Native => "native",
        }
    }
}

/// Which records enter an example-level correlation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordFilter {
    #[default]
    All,
    /// The hypothesis has male terms and no female terms.
    MaleOnly,
    /// As `MaleOnly`, and every reference is free of gendered terms.
    MaleOnlyNeutralRefs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelationLevel {
    Example,
    System,
}

fn combine(mode: MultiRef, scores: &[f64]) -> f64 {
    match mode {
        MultiRef::Max => scores.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        _ => scores.iter().sum::<f64>() / scores.len() as f64,
    }
}

fn wrap(hyp: &Text, reference: &str, e: Error) -> Error {
    Error::Pair {
        hyp: hyp.raw().to_owned(),
        reference: reference.to_owned(),
        source: Box::new(e),
    }
}

/// Score of `hyp` against `refs` under `mode`.
pub fn aggregate_multi_ref<S: Scorer + ?Sized>(metric: &S, hyp: &Text, refs: &[Text], mode: MultiRef) -> Result<f64> {
    Ok(score_hypotheses(metric, &[(hyp, refs)], mode)?[0])
}

/// Scores many (hypothesis, references) items. Per-reference pairs go to
/// the metric in a single batch.
pub fn score_hypotheses<S: Scorer + ?Sized>(
    metric: &S,
    items: &[(&Text, &[Text])],
    mode: MultiRef,
) -> Result<Vec<f64>> {
    if let Some((h, _)) = items.iter().find(|(_, refs)| refs.is_empty()) {
        return Err(Error::invalid(format!("hypothesis {:?} has no references", h.raw())));
    }
    let info = metric.info();
    if mode == MultiRef::Native {
        if !info.supports_multi_ref {
            return Err(Error::Unsupported {
                metric: info.name.clone(),
                what: "native multi-reference scoring".into(),
            });
        }
        let one = |(h, refs): &(&Text, &[Text])| -> Result<f64> {
            let joined = || refs.iter().map(Text::raw).collect::<Vec<_>>().join(" | ");
            let v = metric.score_multi(h, refs).map_err(|e| wrap(h, &joined(), e))?;
            validate_score(info, h, &refs[0], v).map_err(|e| wrap(h, &joined(), e))
        };
        return if info.single_flight {
            items.iter().map(one).collect()
        } else {
            items.par_iter().map(one).collect()
        };
    }
    let pairs: Vec<(&Text, &Text)> = items
        .iter()
        .flat_map(|(h, refs)| refs.iter().map(move |r| (*h, r)))
        .collect();
    let raw = metric.score_pairs(&pairs);
    let mut checked = Vec::with_capacity(raw.len());
    for ((h, r), v) in pairs.iter().zip(raw) {
        checked.push(
            v.and_then(|v| validate_score(info, h, r, v))
                .map_err(|e| wrap(h, r.raw(), e))?,
        );
    }
    let mut out = Vec::with_capacity(items.len());
    let mut at = 0;
    for (_, refs) in items {
        out.push(combine(mode, &checked[at..at + refs.len()]));
        at += refs.len();
    }
    Ok(out)
}

pub fn score_records<S: Scorer + ?Sized>(metric: &S, records: &[MetaEvalRecord], mode: MultiRef) -> Result<Vec<f64>> {
    let items: Vec<(&Text, &[Text])> = records
        .iter()
        .map(|r| (&r.hypothesis, r.references.as_slice()))
        .collect();
    score_hypotheses(metric, &items, mode)
}

fn male_only(text: &Text, lexicon: &GenderLexicon) -> bool {
    let (m, f) = detect_gender(text, lexicon);
    m >= 1 && f == 0
}

fn neutral(text: &Text, lexicon: &GenderLexicon) -> bool {
    detect_gender(text, lexicon) == (0, 0)
}

/// Whether `record` passes `filter`.
pub fn keep_record(record: &MetaEvalRecord, filter: RecordFilter, lexicon: &GenderLexicon) -> bool {
    match filter {
        RecordFilter::All => true,
        RecordFilter::MaleOnly => male_only(&record.hypothesis, lexicon),
        RecordFilter::MaleOnlyNeutralRefs => {
            male_only(&record.hypothesis, lexicon) && record.references.iter().all(|r| neutral(r, lexicon))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PreferenceReport {
    pub n: usize,
    /// No record qualified; means and proportions are then 0.
    pub empty: bool,
    pub male_mean: f64,
    pub female_mean: f64,
    pub prop_gt: f64,
    pub prop_lt: f64,
    pub prop_eq: f64,
}

impl PreferenceReport {
    /// Pairwise comparison of scores for the original and swapped texts.
    pub fn from_scores(male: &[f64], female: &[f64]) -> Result<Self> {
        if male.len() != female.len() {
            return Err(Error::invalid("preference scores must pair up"));
        }
        let n = male.len();
        if n == 0 {
            return Ok(PreferenceReport {
                n: 0,
                empty: true,
                male_mean: 0.0,
                female_mean: 0.0,
                prop_gt: 0.0,
                prop_lt: 0.0,
                prop_eq: 0.0,
            });
        }
        let (mut gt, mut lt) = (0usize, 0usize);
        for (m, f) in male.iter().zip(female) {
            if (m - f).abs() <= EQUALITY_TOLERANCE {
                continue;
            }
            if m > f {
                gt += 1;
            } else {
                lt += 1;
            }
        }
        let eq = n - gt - lt;
        let nf = n as f64;
        Ok(PreferenceReport {
            n,
            empty: false,
            male_mean: male.iter().sum::<f64>() / nf,
            female_mean: female.iter().sum::<f64>() / nf,
            prop_gt: gt as f64 / nf,
            prop_lt: lt as f64 / nf,
            prop_eq: eq as f64 / nf,
        })
    }
}

/// Compares scores of male hypotheses and their swapped female versions
/// against gender-neutral references.
pub fn preference_analysis<S: Scorer + ?Sized>(
    dataset: &MetaEvalDataset,
    metric: &S,
    lexicon: &GenderLexicon,
    mode: MultiRef,
) -> Result<PreferenceReport> {
    let chosen: Vec<&MetaEvalRecord> = dataset
        .records
        .iter()
        .filter(|r| keep_record(r, RecordFilter::MaleOnlyNeutralRefs, lexicon))
        .collect();
    let swapped: Vec<Text> = chosen.iter().map(|r| swap_gender(&r.hypothesis, lexicon).0).collect();
    let mut items: Vec<(&Text, &[Text])> = chosen
        .iter()
        .map(|r| (&r.hypothesis, r.references.as_slice()))
        .collect();
    items.extend(chosen.iter().zip(&swapped).map(|(r, s)| (s, r.references.as_slice())));
    let scores = score_hypotheses(metric, &items, mode)?;
    let (male, female) = scores.split_at(chosen.len());
    PreferenceReport::from_scores(male, female)
}

fn human_scores(records: &[&MetaEvalRecord], dimension: &str) -> Vec<f64> {
    records.iter().map(|r| r.human[dimension]).collect()
}

fn check_dimension(dataset: &MetaEvalDataset, dimension: &str) -> Result<()> {
    if dataset.has_dimension(dimension) {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "{} has no human dimension {dimension:?} (has {:?})",
            dataset.name, dataset.dimensions
        )))
    }
}

fn filtered<'a>(
    dataset: &'a MetaEvalDataset,
    filter: RecordFilter,
    lexicon: &GenderLexicon,
) -> Result<Vec<&'a MetaEvalRecord>> {
    let kept: Vec<&MetaEvalRecord> = dataset
        .records
        .iter()
        .filter(|r| keep_record(r, filter, lexicon))
        .collect();
    if kept.is_empty() {
        return Err(Error::invalid(format!("{} is empty after filter", dataset.name)));
    }
    Ok(kept)
}

fn example_correlation_of<S: Scorer + ?Sized>(
    records: &[&MetaEvalRecord],
    metric: &S,
    dimension: &str,
    mode: MultiRef,
    config: CorrelationConfig,
) -> Result<CorrelationResult> {
    let items: Vec<(&Text, &[Text])> = records
        .iter()
        .map(|r| (&r.hypothesis, r.references.as_slice()))
        .collect();
    let scores = score_hypotheses(metric, &items, mode)?;
    spearman_with(&scores, &human_scores(records, dimension), config)
}

/// Spearman correlation between per-record metric scores and human scores.
pub fn example_level_correlation<S: Scorer + ?Sized>(
    dataset: &MetaEvalDataset,
    metric: &S,
    dimension: &str,
    mode: MultiRef,
    filter: RecordFilter,
    lexicon: &GenderLexicon,
    config: CorrelationConfig,
) -> Result<CorrelationResult> {
    check_dimension(dataset, dimension)?;
    example_correlation_of(&filtered(dataset, filter, lexicon)?, metric, dimension, mode, config)
}

/// Per-system mean metric score and mean human score.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemMeans {
    pub system_id: String,
    pub metric: f64,
    pub human: f64,
}

/// Per-system means sorted by system id.
pub fn system_means(records: &[&MetaEvalRecord], scores: &[f64], dimension: &str) -> Vec<SystemMeans> {
    let mut acc: BTreeMap<&str, (f64, f64, usize)> = BTreeMap::new();
    for (r, s) in records.iter().zip(scores) {
        let e = acc.entry(r.system_id.as_str()).or_insert((0.0, 0.0, 0));
        e.0 += s;
        e.1 += r.human[dimension];
        e.2 += 1;
    }
    acc.into_iter()
        .map(|(id, (m, h, n))| SystemMeans {
            system_id: id.to_owned(),
            metric: m / n as f64,
            human: h / n as f64,
        })
        .collect()
}

fn system_correlation_of(means: &[&SystemMeans], config: CorrelationConfig) -> Result<CorrelationResult> {
    if means.len() < 3 {
        return Err(Error::invalid(format!(
            "system-level correlation needs at least 3 systems (got {})",
            means.len()
        )));
    }
    // fixed system order so any subset is evaluated the same way
    let mut sorted = means.to_vec();
    sorted.sort_by(|a, b| a.system_id.cmp(&b.system_id));
    let m: Vec<f64> = sorted.iter().map(|s| s.metric).collect();
    let h: Vec<f64> = sorted.iter().map(|s| s.human).collect();
    spearman_with(&m, &h, config)
}

fn dataset_system_means<S: Scorer + ?Sized>(
    dataset: &MetaEvalDataset,
    metric: &S,
    dimension: &str,
    mode: MultiRef,
) -> Result<Vec<SystemMeans>> {
    check_dimension(dataset, dimension)?;
    let records: Vec<&MetaEvalRecord> = dataset.records.iter().collect();
    let scores = score_records(metric, &dataset.records, mode)?;
    Ok(system_means(&records, &scores, dimension))
}

/// Spearman correlation between per-system mean metric and human scores.
pub fn system_level_correlation<S: Scorer + ?Sized>(
    dataset: &MetaEvalDataset,
    metric: &S,
    dimension: &str,
    mode: MultiRef,
    config: CorrelationConfig,
) -> Result<CorrelationResult> {
    let means = dataset_system_means(dataset, metric, dimension, mode)?;
    system_correlation_of(&means.iter().collect::<Vec<_>>(), config)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TopKPoint {
    pub k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<CorrelationResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

/// Systems ordered by mean human score, best first, ties by system id.
pub fn rank_systems(means: &[SystemMeans]) -> Vec<&SystemMeans> {
    let mut ranked: Vec<&SystemMeans> = means.iter().collect();
    ranked.sort_by(|a, b| b.human.total_cmp(&a.human).then_with(|| a.system_id.cmp(&b.system_id)));
    ranked
}

/// System-level correlation over the top-k systems for each k.
pub fn topk_from_means(means: &[SystemMeans], k_values: &[usize], config: CorrelationConfig) -> Vec<TopKPoint> {
    let ranked = rank_systems(means);
    k_values
        .iter()
        .map(|&k| {
            let warn = |msg: String| TopKPoint {
                k,
                result: None,
                warning: Some(msg),
            };
            if k < 3 {
                return warn(format!("k = {k} is below 3; skipped"));
            }
            if k > ranked.len() {
                return warn(format!("k = {k} exceeds the {} systems; skipped", ranked.len()));
            }
            match system_correlation_of(&ranked[..k], config) {
                Ok(r) => TopKPoint {
                    k,
                    result: Some(r),
                    warning: None,
                },
                Err(e) => warn(e.to_string()),
            }
        })
        .collect()
}

pub fn topk_system_curve<S: Scorer + ?Sized>(
    dataset: &MetaEvalDataset,
    metric: &S,
    dimension: &str,
    mode: MultiRef,
    k_values: &[usize],
    config: CorrelationConfig,
) -> Result<Vec<TopKPoint>> {
    let means = dataset_system_means(dataset, metric, dimension, mode)?;
    Ok(topk_from_means(&means, k_values, config))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OriginSwap {
    pub origin: CorrelationResult,
    pub swapped: CorrelationResult,
    /// `swapped.rho - origin.rho`
    pub delta: f64,
}

/// Correlation on the dataset and on its gender-swapped copy. At example
/// level the filter selects records by their original texts and the same
/// records are used on both sides.
#[allow(clippy::too_many_arguments)]
pub fn compare_origin_swap<S: Scorer + ?Sized>(
    dataset: &MetaEvalDataset,
    metric: &S,
    dimension: &str,
    mode: MultiRef,
    level: CorrelationLevel,
    filter: RecordFilter,
    lexicon: &GenderLexicon,
    config: CorrelationConfig,
) -> Result<OriginSwap> {
    check_dimension(dataset, dimension)?;
    let swapped_ds = swap_dataset(dataset, lexicon).0;
    let (origin, swapped) = match level {
        CorrelationLevel::Example => {
            let keep: Vec<bool> = dataset
                .records
                .iter()
                .map(|r| keep_record(r, filter, lexicon))
                .collect();
            if !keep.contains(&true) {
                return Err(Error::invalid(format!("{} is empty after filter", dataset.name)));
            }
            fn pick<'a>(ds: &'a MetaEvalDataset, keep: &[bool]) -> Vec<&'a MetaEvalRecord> {
                ds.records
                    .iter()
                    .zip(keep)
                    .filter(|(_, k)| **k)
                    .map(|(r, _)| r)
                    .collect()
            }
            (
                example_correlation_of(&pick(dataset, &keep), metric, dimension, mode, config)?,
                example_correlation_of(&pick(&swapped_ds, &keep), metric, dimension, mode, config)?,
            )
        }
        CorrelationLevel::System => (
            system_level_correlation(dataset, metric, dimension, mode, config)?,
            system_level_correlation(&swapped_ds, metric, dimension, mode, config)?,
        ),
    };
    Ok(OriginSwap {
        delta: swapped.rho - origin.rho,
        origin,
        swapped,
    })
}

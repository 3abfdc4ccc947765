//! Preference and correlation analyses on meta-evaluation datasets.

mod analysis;
mod dataset;
mod spearman;

pub use analysis::{
    aggregate_multi_ref, compare_origin_swap, example_level_correlation, keep_record, preference_analysis,
    rank_systems, score_hypotheses, score_records, system_level_correlation, system_means, topk_from_means,
    topk_system_curve, CorrelationLevel, MultiRef, OriginSwap, PreferenceReport, RecordFilter, SystemMeans, TopKPoint,
    EQUALITY_TOLERANCE,
};
pub use dataset::{MetaEvalDataset, MetaEvalRecord};
pub use spearman::{average_ranks, spearman, spearman_with, CorrelationConfig, CorrelationResult, DEFAULT_SHUFFLES};

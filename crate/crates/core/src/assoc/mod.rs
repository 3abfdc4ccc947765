//! Differential association tests over text metrics.

pub mod bundled;
mod engine;
mod spec;

pub use engine::{
    association_r, differential_association, effect_size, effect_size_from_r, partition_count, permutation_pvalue,
    permutation_pvalue_from_r, r_from_scores, run_association_test, s_from_r, AssociationResult, PermutationConfig,
    PermutationOutcome, MAX_EXHAUSTIVE_PARTITIONS, SAMPLED_PARTITIONS,
};
pub use spec::{AssociationTestSpec, ExpandedItem, Level, Variant, WORD_SLOT};

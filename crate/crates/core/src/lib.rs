//! Bias auditing for reference-based text generation metrics.
//!
//! * [`assoc`] measures differential association between target and
//!   attribute sets under any [`Scorer`], with permutation p-values and
//!   effect sizes.
//! * [`genderswap`] builds gender-swapped counterparts of texts and
//!   datasets.
//! * [`metaeval`] runs preference and correlation analyses on
//!   meta-evaluation datasets before and after swapping.
//! * [`metrics`] holds native n-gram and embedding metrics; [`bridge`]
//!   connects external model-based metrics over a line-delimited JSON
//!   protocol.
//!
//! Statistics are generic over [`Scalar`] (`f32` or `f64`); the `*F64` and
//! `*F32` aliases below name the common instantiations.

pub mod assoc;
pub mod bridge;
pub mod error;
pub mod genderswap;
pub mod metaeval;
pub mod metrics;
pub mod scalar;
pub mod scorer;
pub mod text;

pub use error::{Error, Result};

/// Toolkit version recorded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use scalar::Scalar;
pub use scorer::{
    checked_score, symmetrized_score, ConstantScorer, ExactMatchScorer, FnScorer, ScoreMatrix, Scorer, ScorerInfo,
};
pub use text::{tokenize, Text};

pub type AssociationResultF64 = assoc::AssociationResult<f64>;
pub type AssociationResultF32 = assoc::AssociationResult<f32>;
pub type ScoreMatrixF64 = ScoreMatrix<f64>;
pub type ScoreMatrixF32 = ScoreMatrix<f32>;
pub type EmbeddingStoreF64 = metrics::EmbeddingStore<f64>;
pub type EmbeddingStoreF32 = metrics::EmbeddingStore<f32>;
pub type TransportPlanF64 = metrics::TransportPlan<f64>;
pub type TransportPlanF32 = metrics::TransportPlan<f32>;

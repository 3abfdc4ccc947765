//! Differential association, permutation significance and effect size.

use indexmap::IndexMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::spec::{AssociationTestSpec, ExpandedItem, Level};
use crate::error::{Error, Result};
use crate::scalar::{mean, ordered_sum, population_std, Scalar};
use crate::scorer::{ScoreMatrix, Scorer};
use crate::text::Text;

/// Partition counts above this switch the permutation test to sampling.
pub const MAX_EXHAUSTIVE_PARTITIONS: u128 = 100_000;
/// Partitions drawn in sampling mode, in addition to the observed one.
pub const SAMPLED_PARTITIONS: usize = 99_999;

fn check_finite<T: Scalar>(values: &[T]) -> Result<()> {
    match values.iter().find(|v| !v.is_finite()) {
        Some(v) => Err(Error::Undefined(format!("non-finite pairwise score {v}"))),
        None => Ok(()),
    }
}

/// `mean_a S(t, a) - mean_b S(t, b)` from the scores of one text against
/// the members of A and of B.
pub fn r_from_scores<T: Scalar>(scores_a: &[T], scores_b: &[T]) -> Result<T> {
    if scores_a.is_empty() || scores_b.is_empty() {
        return Err(Error::invalid("association needs non-empty A and B"));
    }
    check_finite(scores_a)?;
    check_finite(scores_b)?;
    Ok(mean(scores_a) - mean(scores_b))
}

/// `sum_x r(x) - sum_y r(y)`.
pub fn s_from_r<T: Scalar>(r_x: &[T], r_y: &[T]) -> T {
    ordered_sum(r_x.iter().copied()) - ordered_sum(r_y.iter().copied())
}

/// Standardized mean difference of the per-item associations; 0 when the
/// pooled population standard deviation is exactly 0.
pub fn effect_size_from_r<T: Scalar>(r_x: &[T], r_y: &[T]) -> Result<T> {
    if r_x.is_empty() || r_y.is_empty() {
        return Err(Error::invalid("effect size needs non-empty X and Y"));
    }
    check_finite(r_x)?;
    check_finite(r_y)?;
    let mut pooled: Vec<T> = r_x.iter().chain(r_y).copied().collect();
    // sorted so the pooled statistic does not depend on which side is X
    pooled.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let sd = population_std(&pooled);
    if sd == T::zero() {
        return Ok(T::zero());
    }
    Ok((mean(r_x) - mean(r_y)) / sd)
}

/// Association of `t` with A over B under the pairwise score `s`.
pub fn association_r<T, F>(t: &Text, a: &[Text], b: &[Text], s: F) -> Result<T>
where
    T: Scalar,
    F: Fn(&Text, &Text) -> Result<T>,
{
    let sa = a.iter().map(|x| s(t, x)).collect::<Result<Vec<T>>>()?;
    let sb = b.iter().map(|x| s(t, x)).collect::<Result<Vec<T>>>()?;
    r_from_scores(&sa, &sb)
}

fn r_values<T, F>(items: &[Text], a: &[Text], b: &[Text], s: &F) -> Result<Vec<T>>
where
    T: Scalar,
    F: Fn(&Text, &Text) -> Result<T>,
{
    items.iter().map(|t| association_r(t, a, b, s)).collect()
}

pub fn differential_association<T, F>(x: &[Text], y: &[Text], a: &[Text], b: &[Text], s: F) -> Result<T>
where
    T: Scalar,
    F: Fn(&Text, &Text) -> Result<T>,
{
    Ok(s_from_r(&r_values(x, a, b, &s)?, &r_values(y, a, b, &s)?))
}

pub fn effect_size<T, F>(x: &[Text], y: &[Text], a: &[Text], b: &[Text], s: F) -> Result<T>
where
    T: Scalar,
    F: Fn(&Text, &Text) -> Result<T>,
{
    effect_size_from_r(&r_values(x, a, b, &s)?, &r_values(y, a, b, &s)?)
}

/// `C(2n, n)`, saturating at `u128::MAX`.
pub fn partition_count(n: usize) -> u128 {
    let mut c: u128 = 1;
    for k in 0..n {
        // C(n+k+1, k+1) = C(n+k, k) * (n+k+1) / (k+1), exact at every step
        c = match c.checked_mul((n + k + 1) as u128) {
            Some(v) => v / (k + 1) as u128,
            None => return u128::MAX,
        };
    }
    c
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermutationConfig {
    pub seed: u64,
    /// Sample even when exhaustive enumeration is affordable.
    pub force_sampling: bool,
    pub samples: usize,
}

impl PermutationConfig {
    pub fn new(seed: u64) -> Self {
        PermutationConfig {
            seed,
            force_sampling: false,
            samples: SAMPLED_PARTITIONS,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PermutationOutcome {
    pub p_value: f64,
    /// Total number of equal-size partitions, `C(2n, n)` (saturating).
    #[serde(with = "partition_count_serde")]
    pub num_partitions: u128,
    /// Partitions actually compared, including the observed one.
    pub evaluated: u64,
    pub sampled: bool,
}

/// s for the partition whose X side is `in_x` over the pooled values.
fn partition_s<T: Scalar>(pooled: &[T], in_x: &[bool]) -> T {
    let mut sx = T::zero();
    let mut sy = T::zero();
    for (&v, &x) in pooled.iter().zip(in_x) {
        if x {
            sx = sx + v;
        } else {
            sy = sy + v;
        }
    }
    sx - sy
}

/// One-sided permutation p-value `Pr[s(X_i, Y_i) >= s(X, Y)]` over
/// equal-size partitions of X ∪ Y, given per-item associations. Ties count
/// toward the numerator and the observed partition is one of the
/// partitions compared.
pub fn permutation_pvalue_from_r<T: Scalar>(
    r_x: &[T],
    r_y: &[T],
    config: PermutationConfig,
) -> Result<PermutationOutcome> {
    let n = r_x.len();
    if n == 0 || r_y.len() != n {
        return Err(Error::invalid(format!(
            "permutation test needs |X| = |Y| > 0 (got {} and {})",
            n,
            r_y.len()
        )));
    }
    check_finite(r_x)?;
    check_finite(r_y)?;
    let pooled: Vec<T> = r_x.iter().chain(r_y).copied().collect();
    let mut observed_mask = vec![false; 2 * n];
    observed_mask[..n].iter_mut().for_each(|m| *m = true);
    let observed = partition_s(&pooled, &observed_mask);
    let total = partition_count(n);

    if total <= MAX_EXHAUSTIVE_PARTITIONS && !config.force_sampling {
        let mut hits: u64 = 0;
        let mut evaluated: u64 = 0;
        let mut mask = vec![false; 2 * n];
        let mut chosen: Vec<usize> = (0..n).collect();
        loop {
            mask.iter_mut().for_each(|m| *m = false);
            for &c in &chosen {
                mask[c] = true;
            }
            evaluated += 1;
            if partition_s(&pooled, &mask) >= observed {
                hits += 1;
            }
            if !next_combination(&mut chosen, 2 * n) {
                break;
            }
        }
        debug_assert_eq!(u128::from(evaluated), total);
        return Ok(PermutationOutcome {
            p_value: hits as f64 / evaluated as f64,
            num_partitions: total,
            evaluated,
            sampled: false,
        });
    }

    let samples = config.samples as u64;
    let hits: u64 = (0..samples.div_ceil(SAMPLE_BLOCK))
        .into_par_iter()
        .map(|block| {
            let mut sampler = PartitionSampler::new(config.seed, block, n);
            let count = SAMPLE_BLOCK.min(samples - block * SAMPLE_BLOCK);
            (0..count)
                .filter(|_| partition_s(&pooled, sampler.next_partition()) >= observed)
                .count() as u64
        })
        .sum();
    let evaluated = config.samples as u64 + 1;
    Ok(PermutationOutcome {
        p_value: (hits + 1) as f64 / evaluated as f64,
        num_partitions: total,
        evaluated,
        sampled: true,
    })
}

/// Samples per random stream. Block `b` of the sample sequence always
/// draws from stream `b`, so results do not depend on the thread count.
const SAMPLE_BLOCK: u64 = 4096;

/// Uniform equal-size partitions: the first n positions of a partial
/// Fisher-Yates shuffle go to X.
struct PartitionSampler {
    rng: ChaCha8Rng,
    order: Vec<usize>,
    in_x: Vec<bool>,
    n: usize,
}

impl PartitionSampler {
    fn new(seed: u64, stream: u64, n: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        PartitionSampler {
            rng,
            order: (0..2 * n).collect(),
            in_x: vec![false; 2 * n],
            n,
        }
    }

    fn next_partition(&mut self) -> &[bool] {
        let len = 2 * self.n;
        for i in 0..self.n {
            let j = self.rng.random_range(i..len);
            self.order.swap(i, j);
        }
        self.in_x.iter_mut().for_each(|m| *m = false);
        for &i in &self.order[..self.n] {
            self.in_x[i] = true;
        }
        &self.in_x
    }
}

/// Advances `c` to the next k-combination of 0..n in lexicographic order.
fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let Some(i) = (0..k).rev().find(|&i| c[i] < n - k + i) else {
        return false;
    };
    c[i] += 1;
    for j in i + 1..k {
        c[j] = c[j - 1] + 1;
    }
    true
}

pub fn permutation_pvalue<T, F>(
    x: &[Text],
    y: &[Text],
    a: &[Text],
    b: &[Text],
    s: F,
    config: PermutationConfig,
) -> Result<PermutationOutcome>
where
    T: Scalar,
    F: Fn(&Text, &Text) -> Result<T>,
{
    permutation_pvalue_from_r(&r_values(x, a, b, &s)?, &r_values(y, a, b, &s)?, config)
}

/// Partition counts as a JSON number while they fit in u64 and as a
/// decimal string beyond that. JSON readers rarely handle wider integers.
mod partition_count_serde {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &u128, s: S) -> Result<S::Ok, S::Error> {
        match u64::try_from(*v) {
            Ok(small) => s.serialize_u64(small),
            Err(_) => s.collect_str(v),
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Number(u64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u128, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Number(n) => Ok(u128::from(n)),
            Repr::Text(t) => t.parse().map_err(de::Error::custom),
        }
    }
}

/// Outcome of one association test under one metric.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct AssociationResult<T = f64> {
    pub test: String,
    pub metric: String,
    pub level: Level,
    pub s_value: T,
    pub p_value: f64,
    pub effect_size: T,
    pub r_x: IndexMap<String, T>,
    pub r_y: IndexMap<String, T>,
    #[serde(with = "partition_count_serde")]
    pub num_partitions: u128,
    pub evaluated_partitions: u64,
    pub sampled: bool,
    pub seed: u64,
}

impl<T: Scalar> AssociationResult<T> {
    /// s recomputed from the stored per-item associations.
    pub fn recompute_s(&self) -> T {
        s_from_r(
            &self.r_x.values().copied().collect::<Vec<_>>(),
            &self.r_y.values().copied().collect::<Vec<_>>(),
        )
    }
}

/// Per-item associations for items whose texts occupy consecutive rows of
/// `matrix`, starting at `first_row`. A text's association uses the
/// columns `a_cols` and `b_cols`; an item's is the mean over its texts.
fn item_associations<T: Scalar>(
    matrix: &ScoreMatrix<T>,
    items: &[ExpandedItem],
    first_row: usize,
    a_cols: std::ops::Range<usize>,
    b_cols: std::ops::Range<usize>,
) -> Result<IndexMap<String, T>> {
    let mut out = IndexMap::with_capacity(items.len());
    let mut row = first_row;
    for item in items {
        let mut per_text = Vec::with_capacity(item.texts.len());
        for _ in &item.texts {
            let scores = matrix.row(row);
            per_text.push(r_from_scores(&scores[a_cols.clone()], &scores[b_cols.clone()])?);
            row += 1;
        }
        out.insert(item.item.clone(), mean(&per_text));
    }
    Ok(out)
}

/// Runs a full association test: expands items to texts, scores every
/// attribute text against every target text with the symmetrized metric,
/// then computes s, p and d.
pub fn run_association_test<T: Scalar, S: Scorer + ?Sized>(
    spec: &AssociationTestSpec,
    scorer: &S,
    config: PermutationConfig,
) -> Result<AssociationResult<T>> {
    spec.validate()?;
    let (xs, ys, as_, bs) = (spec.expand_x(), spec.expand_y(), spec.expand_a(), spec.expand_b());
    let flatten =
        |items: &[ExpandedItem]| -> Vec<Text> { items.iter().flat_map(|i| i.texts.iter().cloned()).collect() };
    let mut rows = flatten(&xs);
    let x_rows = rows.len();
    rows.extend(flatten(&ys));
    let mut cols = flatten(&as_);
    let a_len = cols.len();
    cols.extend(flatten(&bs));
    let b_cols = a_len..cols.len();

    let matrix = ScoreMatrix::<T>::compute(scorer, rows, cols)?;
    let r_x = item_associations(&matrix, &xs, 0, 0..a_len, b_cols.clone())?;
    let r_y = item_associations(&matrix, &ys, x_rows, 0..a_len, b_cols)?;
    let rx: Vec<T> = r_x.values().copied().collect();
    let ry: Vec<T> = r_y.values().copied().collect();

    let perm = permutation_pvalue_from_r(&rx, &ry, config)?;
    Ok(AssociationResult {
        test: spec.name.clone(),
        metric: scorer.info().name.clone(),
        level: spec.level,
        s_value: s_from_r(&rx, &ry),
        p_value: perm.p_value,
        effect_size: effect_size_from_r(&rx, &ry)?,
        r_x,
        r_y,
        num_partitions: perm.num_partitions,
        evaluated_partitions: perm.evaluated,
        sampled: perm.sampled,
        seed: config.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scorer::{ConstantScorer, ExactMatchScorer, FnScorer, ScorerInfo};
    use proptest::prelude::*;

    fn texts(words: &[&str]) -> Vec<Text> {
        words.iter().map(|w| Text::new(*w)).collect()
    }

    #[test]
    fn r_basic_cases() {
        let t = Text::new("t");
        let a = texts(&["a"]);
        let b = texts(&["b"]);
        let table = |_: &Text, c: &Text| Ok(if c.raw() == "a" { 0.9 } else { 0.4 });
        let r: f64 = association_r(&t, &a, &b, table).unwrap();
        assert!((r - 0.5).abs() < 1e-15);
        let same: f64 = association_r(&t, &a, &a, table).unwrap();
        assert_eq!(same, 0.0);
        let constant: f64 = association_r(&t, &texts(&["a", "c"]), &b, |_: &Text, _: &Text| Ok(0.3)).unwrap();
        assert_eq!(constant, 0.0);
    }

    #[test]
    fn r_rejects_non_finite() {
        assert!(r_from_scores(&[f64::NAN], &[0.0]).is_err());
        assert!(r_from_scores::<f64>(&[], &[0.0]).is_err());
    }

    #[test]
    fn s_antisymmetry_and_identity() {
        let rx = [0.3, -0.1, 0.7];
        let ry = [0.2, 0.0, -0.4];
        assert_eq!(s_from_r(&rx, &ry), -s_from_r(&ry, &rx));
        assert_eq!(s_from_r(&rx, &rx), 0.0);
    }

    #[test]
    fn effect_size_hand_case() {
        // mean diff 0.8, pop std of {1.0, 0.8, 0.2, 0.0} = sqrt(0.17)
        let d = effect_size_from_r(&[1.0, 0.8], &[0.2, 0.0]).unwrap();
        assert!((d - 0.8 / 0.17f64.sqrt()).abs() < 1e-12);
        assert!((d - 1.9403).abs() < 1e-4);
    }

    #[test]
    fn effect_size_degenerate_and_antisymmetric() {
        assert_eq!(effect_size_from_r(&[0.0; 3], &[0.0; 3]).unwrap(), 0.0);
        assert_eq!(effect_size_from_r(&[0.1, 0.4], &[0.1, 0.4]).unwrap(), 0.0);
        let rx = [0.31, -0.12, 0.77];
        let ry = [0.25, 0.01, -0.4];
        assert_eq!(
            effect_size_from_r(&rx, &ry).unwrap(),
            -effect_size_from_r(&ry, &rx).unwrap()
        );
    }

    #[test]
    fn partition_counts() {
        assert_eq!(partition_count(1), 2);
        assert_eq!(partition_count(3), 20);
        assert_eq!(partition_count(8), 12_870);
        assert_eq!(partition_count(9), 48_620);
        assert_eq!(partition_count(10), 184_756);
        assert_eq!(partition_count(30), 118_264_581_564_861_424);
        assert_eq!(partition_count(200), u128::MAX);
    }

    #[test]
    fn n1_has_two_partitions() {
        let out = permutation_pvalue_from_r(&[0.5], &[0.1], PermutationConfig::new(0)).unwrap();
        assert_eq!(out.p_value, 0.5);
        assert_eq!(out.num_partitions, 2);
        assert!(!out.sampled);
    }

    #[test]
    fn all_ties_give_p_one() {
        let out = permutation_pvalue_from_r(&[0.0; 4], &[0.0; 4], PermutationConfig::new(0)).unwrap();
        assert_eq!(out.p_value, 1.0);
        let sampled = permutation_pvalue_from_r(&[0.0; 12], &[0.0; 12], PermutationConfig::new(1)).unwrap();
        assert!(sampled.sampled);
        assert_eq!(sampled.p_value, 1.0);
        assert_eq!(sampled.evaluated, 100_000);
    }

    #[test]
    fn n0_is_an_error() {
        assert!(permutation_pvalue_from_r::<f64>(&[], &[], PermutationConfig::new(0)).is_err());
        assert!(permutation_pvalue_from_r(&[1.0], &[1.0, 2.0], PermutationConfig::new(0)).is_err());
    }

    #[test]
    fn sampled_mode_is_seed_deterministic() {
        let rx: Vec<f64> = (0..10).map(|i| (i as f64 * 0.37).sin()).collect();
        let ry: Vec<f64> = (0..10).map(|i| (i as f64 * 0.91).cos()).collect();
        let a = permutation_pvalue_from_r(&rx, &ry, PermutationConfig::new(7)).unwrap();
        let b = permutation_pvalue_from_r(&rx, &ry, PermutationConfig::new(7)).unwrap();
        assert!(a.sampled);
        assert_eq!(a, b);
    }

    #[test]
    fn exhaustive_mode_ignores_seed() {
        let rx = [0.3, 0.1, 0.9];
        let ry = [0.2, 0.5, -0.1];
        let a = permutation_pvalue_from_r(&rx, &ry, PermutationConfig::new(1)).unwrap();
        let b = permutation_pvalue_from_r(&rx, &ry, PermutationConfig::new(99)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sample_partition_is_balanced() {
        let mut sampler = PartitionSampler::new(3, 0, 6);
        for _ in 0..50 {
            assert_eq!(sampler.next_partition().iter().filter(|&&x| x).count(), 6);
        }
    }

    #[test]
    fn combinations_enumerate_all() {
        let mut c = vec![0, 1];
        let mut n = 1;
        while next_combination(&mut c, 5) {
            n += 1;
        }
        assert_eq!(n, 10);
        assert_eq!(c, vec![3, 4]);
    }

    fn tiny_spec() -> AssociationTestSpec {
        AssociationTestSpec {
            name: "tiny".into(),
            targets_a: vec!["rose".into(), "lily".into()],
            targets_b: vec!["ant".into(), "flea".into()],
            attributes_x: vec!["love".into(), "joy".into()],
            attributes_y: vec!["war".into(), "evil".into()],
            level: Level::Word,
            templates: vec![],
            attribute_templates: None,
            variant: None,
        }
    }

    #[test]
    fn exact_match_on_disjoint_sets_is_null() {
        let res: AssociationResult =
            run_association_test(&tiny_spec(), &ExactMatchScorer::default(), PermutationConfig::new(0)).unwrap();
        assert_eq!(res.s_value, 0.0);
        assert_eq!(res.p_value, 1.0);
        assert_eq!(res.effect_size, 0.0);
        assert_eq!(res.num_partitions, 6);
    }

    #[test]
    fn partition_counts_survive_json() {
        let mut res: AssociationResult =
            run_association_test(&tiny_spec(), &ExactMatchScorer::default(), PermutationConfig::new(0)).unwrap();
        for count in [6, u128::from(u64::MAX), partition_count(40), u128::MAX] {
            res.num_partitions = count;
            let json = serde_json::to_string(&res).unwrap();
            let back: AssociationResult = serde_json::from_str(&json).unwrap();
            assert_eq!(back.num_partitions, count);
            // also through serde's buffered path, as in flattened reports
            let value: serde_json::Value = serde_json::from_str(&json).unwrap();
            let back: AssociationResult = serde_json::from_value(value).unwrap();
            assert_eq!(back.num_partitions, count);
        }
        assert!(serde_json::to_string(&res)
            .unwrap()
            .contains("\"num_partitions\":\"340282366920938463463374607431768211455\""));
    }

    #[test]
    fn synthetic_scorer_matches_brute_force() {
        // S depends on string lengths, asymmetric on purpose
        let scorer = FnScorer::new(ScorerInfo::new("len"), |h: &Text, r: &Text| {
            let (a, b) = (h.raw().len() as f64, r.raw().len() as f64);
            (a * 0.13 + b * 0.07).sin().abs()
        });
        let spec = tiny_spec();
        let res: AssociationResult = run_association_test(&spec, &scorer, PermutationConfig::new(0)).unwrap();

        // standalone recomputation
        let m = |h: &str, r: &str| ((h.len() as f64) * 0.13 + (r.len() as f64) * 0.07).sin().abs();
        let sym = |x: &str, y: &str| 0.5 * (m(x, y) + m(y, x));
        let r = |t: &str| {
            let sa: f64 = spec.targets_a.iter().map(|a| sym(t, a)).sum::<f64>() / 2.0;
            let sb: f64 = spec.targets_b.iter().map(|b| sym(t, b)).sum::<f64>() / 2.0;
            sa - sb
        };
        let rx: Vec<f64> = spec.attributes_x.iter().map(|x| r(x)).collect();
        let ry: Vec<f64> = spec.attributes_y.iter().map(|y| r(y)).collect();
        let s = rx.iter().sum::<f64>() - ry.iter().sum::<f64>();
        assert!((res.s_value - s).abs() < 1e-12);
        let all: Vec<f64> = rx.iter().chain(&ry).copied().collect();
        let mu = all.iter().sum::<f64>() / 4.0;
        let sd = (all.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / 4.0).sqrt();
        let d = (rx.iter().sum::<f64>() / 2.0 - ry.iter().sum::<f64>() / 2.0) / sd;
        assert!((res.effect_size - d).abs() < 1e-9);
        assert!((res.recompute_s() - res.s_value).abs() < 1e-9);
    }

    #[test]
    fn sentence_level_averages_over_templates() {
        let mut spec = tiny_spec();
        spec.level = Level::Sentence;
        spec.templates = vec!["This is <word>.".into(), "<word> it is!".into()];
        let scorer = crate::metrics::Rouge::new(crate::metrics::RougeVariant::N(1), Default::default());
        let res: AssociationResult = run_association_test(&spec, &scorer, PermutationConfig::new(0)).unwrap();
        assert_eq!(res.r_x.len(), 2);
        assert!((res.recompute_s() - res.s_value).abs() < 1e-12);
    }

    #[test]
    fn constant_scorer_in_f32() {
        let res: AssociationResult<f32> =
            run_association_test(&tiny_spec(), &ConstantScorer::new(0.7), PermutationConfig::new(0)).unwrap();
        assert_eq!(res.effect_size, 0.0);
        assert_eq!(res.p_value, 1.0);
    }

    #[test]
    fn failing_pair_is_identified() {
        let scorer = FnScorer::new(
            ScorerInfo::new("bad"),
            |h: &Text, _: &Text| {
                if h.raw() == "war" {
                    f64::NAN
                } else {
                    0.1
                }
            },
        );
        let err = run_association_test::<f64, _>(&tiny_spec(), &scorer, PermutationConfig::new(0)).unwrap_err();
        assert!(err.to_string().contains("war"), "{err}");
    }

    proptest! {
        #[test]
        fn affine_transform_preserves_p_and_d(
            rx in prop::collection::vec(-1.0f64..1.0, 4),
            ry in prop::collection::vec(-1.0f64..1.0, 4),
            alpha in 0.5f64..4.0,
        ) {
            // alpha * r is what alpha * S + beta produces for r
            let scaled_x: Vec<f64> = rx.iter().map(|v| v * alpha).collect();
            let scaled_y: Vec<f64> = ry.iter().map(|v| v * alpha).collect();
            let d0 = effect_size_from_r(&rx, &ry).unwrap();
            let d1 = effect_size_from_r(&scaled_x, &scaled_y).unwrap();
            prop_assert!((d0 - d1).abs() < 1e-9);
            let cfg = PermutationConfig::new(0);
            let s0 = s_from_r(&rx, &ry);
            let s1 = s_from_r(&scaled_x, &scaled_y);
            prop_assert_eq!(s0 > 0.0, s1 > 0.0);
            let p0 = permutation_pvalue_from_r(&rx, &ry, cfg).unwrap().p_value;
            let p1 = permutation_pvalue_from_r(&scaled_x, &scaled_y, cfg).unwrap().p_value;
            prop_assert!((p0 - p1).abs() <= 1.0 / 70.0 + 1e-12);
        }

        #[test]
        fn swapping_sides(
            rx in prop::collection::vec(-1.0f64..1.0, 1..6),
            seed in 0u64..1000,
        ) {
            let ry: Vec<f64> = rx.iter().map(|v| (v * 3.1 + seed as f64).sin()).collect();
            let cfg = PermutationConfig::new(seed);
            let d_xy = effect_size_from_r(&rx, &ry).unwrap();
            let d_yx = effect_size_from_r(&ry, &rx).unwrap();
            prop_assert_eq!(d_xy, -d_yx);
            let p_xy = permutation_pvalue_from_r(&rx, &ry, cfg).unwrap().p_value;
            let p_yx = permutation_pvalue_from_r(&ry, &rx, cfg).unwrap().p_value;
            prop_assert!(p_xy + p_yx >= 1.0 - 1e-12);
        }
    }
}

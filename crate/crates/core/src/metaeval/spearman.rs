use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shuffles used for the correlation p-value.
pub const DEFAULT_SHUFFLES: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrelationConfig {
    pub seed: u64,
    pub shuffles: usize,
}

impl CorrelationConfig {
    pub fn new(seed: u64) -> Self {
        CorrelationConfig {
            seed,
            shuffles: DEFAULT_SHUFFLES,
        }
    }
}

impl Default for CorrelationConfig {
    fn default() -> Self {
        Self::new(0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult {
    pub rho: f64,
    pub p_value: f64,
    pub n: usize,
}

/// 1-based ranks; tied values share the mean of their ranks.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

fn centered(values: &[f64]) -> Vec<f64> {
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    values.iter().map(|v| v - mean).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Spearman's rho with a two-sided permutation p-value:
/// `(1 + #{|rho_perm| >= |rho|}) / (1 + shuffles)`.
pub fn spearman_with(xs: &[f64], ys: &[f64], config: CorrelationConfig) -> Result<CorrelationResult> {
    if xs.len() != ys.len() {
        return Err(Error::invalid(format!(
            "spearman needs equal lengths (got {} and {})",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 3 {
        return Err(Error::invalid(format!(
            "spearman needs at least 3 points (got {})",
            xs.len()
        )));
    }
    if let Some(v) = xs.iter().chain(ys).find(|v| !v.is_finite()) {
        return Err(Error::invalid(format!("spearman input contains {v}")));
    }
    let rx = centered(&average_ranks(xs));
    let ry = centered(&average_ranks(ys));
    let (sxx, syy) = (dot(&rx, &rx), dot(&ry, &ry));
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Undefined(
            "rho is undefined: one side has zero rank variance".into(),
        ));
    }
    let norm = (sxx * syy).sqrt();
    let rho = (dot(&rx, &ry) / norm).clamp(-1.0, 1.0);

    // slack so that permutations reproducing |rho| count despite summation order
    let threshold = rho.abs() - 1e-12;
    let hits: usize = (0..config.shuffles as u64)
        .into_par_iter()
        .map_init(
            || ry.clone(),
            |perm, k| {
                let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
                rng.set_stream(k);
                perm.copy_from_slice(&ry);
                perm.shuffle(&mut rng);
                usize::from((dot(&rx, perm) / norm).abs() >= threshold)
            },
        )
        .sum();
    Ok(CorrelationResult {
        rho,
        p_value: (1 + hits) as f64 / (1 + config.shuffles) as f64,
        n: xs.len(),
    })
}

pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<CorrelationResult> {
    spearman_with(xs, ys, CorrelationConfig::default())
}

//! Permutation p-values and effect sizes against brute-force recomputation.

use biaseval::assoc::{
    effect_size_from_r, permutation_pvalue_from_r, run_association_test, AssociationTestSpec, Level, PermutationConfig,
};
use biaseval::{FnScorer, ScorerInfo, Text};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Every subset of `0..2n` of size n, as membership masks.
fn all_partitions(n: usize) -> Vec<Vec<bool>> {
    (0u32..1 << (2 * n))
        .filter(|m| m.count_ones() as usize == n)
        .map(|m| (0..2 * n).map(|i| m & (1 << i) != 0).collect())
        .collect()
}

fn s_of(values: &[f64], mask: &[bool]) -> f64 {
    let mut sx = 0.0;
    let mut sy = 0.0;
    for (v, &x) in values.iter().zip(mask) {
        if x {
            sx += v;
        } else {
            sy += v;
        }
    }
    sx - sy
}

fn brute_force_p(rx: &[f64], ry: &[f64]) -> f64 {
    let pooled: Vec<f64> = rx.iter().chain(ry).copied().collect();
    let observed: Vec<bool> = (0..pooled.len()).map(|i| i < rx.len()).collect();
    let s_obs = s_of(&pooled, &observed);
    let parts = all_partitions(rx.len());
    let hits = parts.iter().filter(|m| s_of(&pooled, m) >= s_obs).count();
    hits as f64 / parts.len() as f64
}

fn random_r(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

#[test]
fn exhaustive_p_matches_enumeration() {
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for n in 1..=6 {
            let rx = random_r(&mut rng, n);
            let ry = random_r(&mut rng, n);
            let got = permutation_pvalue_from_r(&rx, &ry, PermutationConfig::new(seed)).unwrap();
            assert!(!got.sampled);
            assert_eq!(got.p_value, brute_force_p(&rx, &ry), "seed {seed} n {n}");
        }
    }
}

#[test]
fn ties_count_toward_numerator() {
    // coarse values produce many exactly tied partitions
    let rx = [0.5, 0.25, 0.5];
    let ry = [0.25, 0.5, 0.25];
    let got = permutation_pvalue_from_r(&rx, &ry, PermutationConfig::new(0)).unwrap();
    assert_eq!(got.p_value, brute_force_p(&rx, &ry));
    assert_eq!(got.p_value, 10.0 / 20.0);
}

#[test]
fn sampled_p_close_to_exhaustive() {
    for seed in 0..5u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
        let rx = random_r(&mut rng, 3);
        let ry = random_r(&mut rng, 3);
        let exact = permutation_pvalue_from_r(&rx, &ry, PermutationConfig::new(seed)).unwrap();
        let sampled = permutation_pvalue_from_r(
            &rx,
            &ry,
            PermutationConfig {
                force_sampling: true,
                ..PermutationConfig::new(seed)
            },
        )
        .unwrap();
        assert!(sampled.sampled);
        assert!((exact.p_value - sampled.p_value).abs() <= 0.01, "{exact:?} {sampled:?}");
    }
}

/// Population-std effect size written out longhand.
fn direct_d(rx: &[f64], ry: &[f64]) -> f64 {
    let mx = rx.iter().sum::<f64>() / rx.len() as f64;
    let my = ry.iter().sum::<f64>() / ry.len() as f64;
    let all: Vec<f64> = rx.iter().chain(ry).copied().collect();
    let mu = all.iter().sum::<f64>() / all.len() as f64;
    let var = all.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / all.len() as f64;
    (mx - my) / var.sqrt()
}

#[test]
fn effect_size_matches_direct_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..200 {
        let rx = random_r(&mut rng, 4);
        let ry = random_r(&mut rng, 4);
        let d = effect_size_from_r(&rx, &ry).unwrap();
        assert!((d - direct_d(&rx, &ry)).abs() < 1e-12);
        assert_eq!(d, -effect_size_from_r(&ry, &rx).unwrap());
        assert_eq!(effect_size_from_r(&rx, &rx).unwrap(), 0.0);
    }
}

#[test]
fn end_to_end_against_score_table() {
    // asymmetric table keyed on word pairs; symmetrized by the engine
    let words = ["t1", "t2", "t3", "u1", "u2", "u3", "x1", "x2", "x3", "y1", "y2", "y3"];
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let table: Vec<f64> = (0..words.len() * words.len())
        .map(|_| rng.random_range(0.0..1.0))
        .collect();
    let idx = |w: &str| words.iter().position(|x| *x == w).unwrap();
    let m = {
        let table = table.clone();
        move |h: &Text, r: &Text| table[idx(h.raw()) * 12 + idx(r.raw())]
    };
    let spec = AssociationTestSpec {
        name: "table".into(),
        targets_a: vec!["t1".into(), "t2".into(), "t3".into()],
        targets_b: vec!["u1".into(), "u2".into(), "u3".into()],
        attributes_x: vec!["x1".into(), "x2".into(), "x3".into()],
        attributes_y: vec!["y1".into(), "y2".into(), "y3".into()],
        level: Level::Word,
        templates: vec![],
        attribute_templates: None,
        variant: None,
    };
    let scorer = FnScorer::new(ScorerInfo::new("table"), m);
    let res: biaseval::AssociationResultF64 = run_association_test(&spec, &scorer, PermutationConfig::new(0)).unwrap();

    let sym = |a: &str, b: &str| 0.5 * (table[idx(a) * 12 + idx(b)] + table[idx(b) * 12 + idx(a)]);
    let r = |w: &str| {
        spec.targets_a.iter().map(|a| sym(w, a)).sum::<f64>() / 3.0
            - spec.targets_b.iter().map(|b| sym(w, b)).sum::<f64>() / 3.0
    };
    let rx: Vec<f64> = spec.attributes_x.iter().map(|w| r(w)).collect();
    let ry: Vec<f64> = spec.attributes_y.iter().map(|w| r(w)).collect();
    let s = rx.iter().sum::<f64>() - ry.iter().sum::<f64>();
    assert!((res.s_value - s).abs() < 1e-12);
    assert!((res.effect_size - direct_d(&rx, &ry)).abs() < 1e-12);
    // p from the oracle on the engine's own r values is exact
    let erx: Vec<f64> = res.r_x.values().copied().collect();
    let ery: Vec<f64> = res.r_y.values().copied().collect();
    assert_eq!(res.p_value, brute_force_p(&erx, &ery));
    assert_eq!(res.num_partitions, 20);
}

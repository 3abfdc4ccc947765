//! Word mover's distance against vertex enumeration of the transport polytope.

use std::collections::BTreeMap;

use biaseval::metrics::{wmd_distance, EmbeddingStore};
use biaseval::Text;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Solves the square or overdetermined system `a x = b` (rows x cols) by
/// Gaussian elimination; None when the columns are dependent or the
/// system is inconsistent.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let rows = a.len();
    let cols = a[0].len();
    let mut pivot_row = 0;
    let mut pivots = Vec::new();
    for c in 0..cols {
        let best = (pivot_row..rows).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[best][c].abs() < 1e-12 {
            return None;
        }
        a.swap(pivot_row, best);
        b.swap(pivot_row, best);
        let pivot = a[pivot_row].clone();
        for i in 0..rows {
            if i != pivot_row {
                let f = a[i][c] / pivot[c];
                for (x, p) in a[i].iter_mut().zip(&pivot) {
                    *x -= f * p;
                }
                b[i] -= f * b[pivot_row];
            }
        }
        pivots.push(c);
        pivot_row += 1;
    }
    if (pivot_row..rows).any(|i| b[i].abs() > 1e-9) {
        return None;
    }
    Some((0..cols).map(|c| b[c] / a[c][c]).collect())
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = combinations(n - 1, k);
    for mut c in combinations(n - 1, k - 1) {
        c.push(n - 1);
        out.push(c);
    }
    out
}

/// Minimum transport cost over all basic feasible solutions.
fn vertex_enumeration(supply: &[f64], demand: &[f64], cost: &[Vec<f64>]) -> f64 {
    let (m, k) = (supply.len(), demand.len());
    let cells: Vec<(usize, usize)> = (0..m).flat_map(|i| (0..k).map(move |j| (i, j))).collect();
    let rhs: Vec<f64> = supply.iter().chain(demand).copied().collect();
    let mut best = f64::INFINITY;
    for basis in combinations(cells.len(), m + k - 1) {
        let a: Vec<Vec<f64>> = (0..m + k)
            .map(|row| {
                basis
                    .iter()
                    .map(|&c| {
                        let (i, j) = cells[c];
                        f64::from(u8::from(if row < m { i == row } else { j == row - m }))
                    })
                    .collect()
            })
            .collect();
        let Some(flow) = solve(a, rhs.clone()) else { continue };
        if flow.iter().any(|&f| f < -1e-12) {
            continue;
        }
        let total: f64 = basis
            .iter()
            .zip(&flow)
            .map(|(&c, f)| f * cost[cells[c].0][cells[c].1])
            .sum();
        best = best.min(total);
    }
    best
}

fn nbow(text: &Text, store: &EmbeddingStore) -> Vec<(Vec<f64>, f64)> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    let found: Vec<&String> = text.tokens().iter().filter(|t| store.get(t).is_some()).collect();
    for t in &found {
        *counts.entry(t.as_str()).or_default() += 1;
    }
    counts
        .into_iter()
        .map(|(t, c)| (store.get(t).unwrap().to_vec(), c as f64 / found.len() as f64))
        .collect()
}

fn oracle(x: &Text, y: &Text, store: &EmbeddingStore) -> f64 {
    let bx = nbow(x, store);
    let by = nbow(y, store);
    let cost: Vec<Vec<f64>> = bx
        .iter()
        .map(|(a, _)| {
            by.iter()
                .map(|(b, _)| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt())
                .collect()
        })
        .collect();
    let supply: Vec<f64> = bx.iter().map(|p| p.1).collect();
    let demand: Vec<f64> = by.iter().map(|p| p.1).collect();
    vertex_enumeration(&supply, &demand, &cost)
}

#[test]
fn matches_vertex_enumeration() {
    let vocab = ["ant", "bee", "cat", "dog", "elk", "fox", "gnu", "hen"];
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..100 {
        let mut store = EmbeddingStore::new(2);
        for w in vocab {
            store
                .insert(w, vec![rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)])
                .unwrap();
        }
        let sentence = |rng: &mut ChaCha8Rng| {
            let len = rng.random_range(1..=4);
            (0..len)
                .map(|_| vocab[rng.random_range(0..vocab.len())])
                .collect::<Vec<_>>()
                .join(" ")
        };
        let x = Text::new(sentence(&mut rng));
        let y = Text::new(sentence(&mut rng));
        let got = wmd_distance(&x, &y, &store).unwrap();
        let want = oracle(&x, &y, &store);
        assert!((got - want).abs() < 1e-6, "case {case}: {x} / {y}: {got} vs {want}");
        assert_eq!(wmd_distance(&x, &x, &store).unwrap(), 0.0);
        assert_eq!(got, wmd_distance(&y, &x, &store).unwrap());
    }
}

#[test]
fn tied_costs_on_a_grid() {
    // integer grid points give many equal distances and degenerate plans
    let vocab = ["ant", "bee", "cat", "dog", "elk", "fox"];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in 0..200 {
        let mut store = EmbeddingStore::new(2);
        for w in vocab {
            let p = vec![
                f64::from(rng.random_range(-1i32..=1)),
                f64::from(rng.random_range(-1i32..=1)),
            ];
            store.insert(w, p).unwrap();
        }
        let sentence = |rng: &mut ChaCha8Rng| {
            let len = rng.random_range(1..=4);
            (0..len)
                .map(|_| vocab[rng.random_range(0..vocab.len())])
                .collect::<Vec<_>>()
                .join(" ")
        };
        let x = Text::new(sentence(&mut rng));
        let y = Text::new(sentence(&mut rng));
        let got = wmd_distance(&x, &y, &store).unwrap();
        let want = oracle(&x, &y, &store);
        assert!((got - want).abs() < 1e-6, "case {case}: {x} / {y}: {got} vs {want}");
    }
}

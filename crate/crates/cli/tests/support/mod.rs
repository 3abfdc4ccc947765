//! Reference computations for the acceptance checks. Nothing here calls
//! into the library's statistics or transport code.

#![allow(dead_code)]

use biaseval::genderswap::GenderLexicon;
use biaseval::metaeval::{MetaEvalDataset, MetaEvalRecord};
use biaseval::Text;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// p over every equal-size split of the pooled values, by bitmask.
pub fn brute_force_p(rx: &[f64], ry: &[f64]) -> f64 {
    let pooled: Vec<f64> = rx.iter().chain(ry).copied().collect();
    let n = rx.len();
    let s = |mask: u32| {
        let (mut a, mut b) = (0.0, 0.0);
        for (i, v) in pooled.iter().enumerate() {
            if mask & (1 << i) != 0 {
                a += v;
            } else {
                b += v;
            }
        }
        a - b
    };
    let observed = s((1u32 << n) - 1);
    let (mut total, mut hits) = (0u64, 0u64);
    for mask in 0u32..1 << (2 * n) {
        if mask.count_ones() as usize == n {
            total += 1;
            hits += u64::from(s(mask) >= observed);
        }
    }
    hits as f64 / total as f64
}

/// Effect size written out longhand.
pub fn direct_d(rx: &[f64], ry: &[f64]) -> f64 {
    let mx = rx.iter().sum::<f64>() / rx.len() as f64;
    let my = ry.iter().sum::<f64>() / ry.len() as f64;
    let all: Vec<f64> = rx.iter().chain(ry).copied().collect();
    let m = all.iter().sum::<f64>() / all.len() as f64;
    let var = all.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / all.len() as f64;
    if var == 0.0 {
        0.0
    } else {
        (mx - my) / var.sqrt()
    }
}

/// Spearman rho by counting ranks, then Pearson on the ranks.
pub fn rho_by_counting(a: &[f64], b: &[f64]) -> f64 {
    let ranks = |v: &[f64]| -> Vec<f64> {
        v.iter()
            .map(|x| {
                let less = v.iter().filter(|y| *y < x).count() as f64;
                let equal = v.iter().filter(|y| *y == x).count() as f64;
                less + (equal + 1.0) / 2.0
            })
            .collect()
    };
    let (ra, rb) = (ranks(a), ranks(b));
    let n = ra.len() as f64;
    let (ma, mb) = (ra.iter().sum::<f64>() / n, rb.iter().sum::<f64>() / n);
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = ra.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = rb.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

/// Gauss-Jordan on `a x = b`; None for dependent columns or an
/// inconsistent system.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let (rows, cols) = (a.len(), a[0].len());
    for c in 0..cols {
        let p = (c..rows).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c].abs() < 1e-12 {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        let pivot = a[c].clone();
        for i in 0..rows {
            if i != c {
                let f = a[i][c] / pivot[c];
                for (x, p) in a[i].iter_mut().zip(&pivot) {
                    *x -= f * p;
                }
                b[i] -= f * b[c];
            }
        }
    }
    if (cols..rows).any(|i| b[i].abs() > 1e-9) {
        return None;
    }
    Some((0..cols).map(|c| b[c] / a[c][c]).collect())
}

fn subsets(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if cur.len() == k {
        out.push(cur.clone());
        return;
    }
    for i in start..n {
        cur.push(i);
        subsets(n, k, i + 1, cur, out);
        cur.pop();
    }
}

/// Cheapest vertex of the transport polytope, found by trying every
/// candidate basis of m + k - 1 cells.
pub fn transport_by_vertices(supply: &[f64], demand: &[f64], cost: &[Vec<f64>]) -> f64 {
    let (m, k) = (supply.len(), demand.len());
    let cells: Vec<(usize, usize)> = (0..m).flat_map(|i| (0..k).map(move |j| (i, j))).collect();
    let rhs: Vec<f64> = supply.iter().chain(demand).copied().collect();
    let mut bases = Vec::new();
    subsets(cells.len(), m + k - 1, 0, &mut Vec::new(), &mut bases);
    let mut best = f64::INFINITY;
    for basis in bases {
        let a: Vec<Vec<f64>> = (0..m + k)
            .map(|row| {
                basis
                    .iter()
                    .map(|&c| {
                        let (i, j) = cells[c];
                        let hit = if row < m { i == row } else { j == row - m };
                        if hit {
                            1.0
                        } else {
                            0.0
                        }
                    })
                    .collect()
            })
            .collect();
        let Some(flow) = solve(a, rhs.clone()) else { continue };
        if flow.iter().all(|&f| f >= -1e-12) {
            let total: f64 = basis
                .iter()
                .zip(&flow)
                .map(|(&c, f)| f * cost[cells[c].0][cells[c].1])
                .sum();
            best = best.min(total);
        }
    }
    best
}

const MALE: &[&str] = &["he", "man", "boy", "father", "his", "husband"];
const NEUTRAL: &[&str] = &[
    "a", "the", "person", "dog", "runs", "plays", "red", "ball", "in", "park", "street", "smiles",
];

fn words(rng: &mut ChaCha8Rng, pool: &[&[&str]], len: usize) -> String {
    (0..len)
        .map(|_| {
            let p = pool[rng.random_range(0..pool.len())];
            p[rng.random_range(0..p.len())]
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Records over a few systems. Every other example has male-only
/// hypotheses and gender-free references; the rest mix genders freely.
pub fn synthetic_dataset(records: usize, systems: usize, seed: u64) -> MetaEvalDataset {
    let lex = GenderLexicon::builtin();
    let female: Vec<String> = MALE
        .iter()
        .map(|w| {
            biaseval::genderswap::swap_gender(&Text::new(*w), &lex)
                .0
                .raw()
                .to_owned()
        })
        .collect();
    let female: Vec<&str> = female.iter().map(String::as_str).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let examples = records / systems;
    let mut out = Vec::new();
    for e in 0..examples {
        let male_only = e % 2 == 0;
        let ref_pool: Vec<&[&str]> = if male_only {
            vec![NEUTRAL]
        } else {
            vec![NEUTRAL, MALE, &female]
        };
        let hyp_pool: Vec<&[&str]> = if male_only {
            vec![NEUTRAL, MALE]
        } else {
            vec![NEUTRAL, MALE, &female]
        };
        let refs: Vec<Text> = (0..3)
            .map(|_| {
                let len = rng.random_range(3..9);
                Text::new(words(&mut rng, &ref_pool, len))
            })
            .collect();
        for s in 0..systems {
            let len = rng.random_range(3..9);
            let mut hyp = words(&mut rng, &hyp_pool, len);
            if male_only {
                hyp.push_str(" he");
            }
            out.push(MetaEvalRecord {
                example_id: format!("ex{e:03}"),
                system_id: format!("sys{s}"),
                hypothesis: Text::new(hyp),
                references: refs.clone(),
                human: [
                    ("fluency".to_string(), f64::from(rng.random_range(1..=5))),
                    ("adequacy".to_string(), rng.random_range(0.0..1.0)),
                ]
                .into(),
            });
        }
    }
    MetaEvalDataset {
        name: "synthetic".into(),
        dimensions: vec!["fluency".into(), "adequacy".into()],
        records: out,
    }
}

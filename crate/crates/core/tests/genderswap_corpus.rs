//! Swap behaviour over generated corpora.

use biaseval::genderswap::{detect_gender, swap_dataset, swap_gender, GenderLexicon};
use biaseval::metaeval::{MetaEvalDataset, MetaEvalRecord};
use biaseval::Text;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SUBJECTS: &[&str] = &[
    "A man",
    "The woman",
    "He",
    "She",
    "Two boys",
    "A girl",
    "The dog",
    "My uncle",
    "Her aunt",
    "His son",
];
const VERBS: &[&str] = &["gave", "saw", "met", "told", "is holding", "walks with"];
const OBJECTS: &[&str] = &[
    "her book",
    "his hat",
    "him",
    "her",
    "him flowers",
    "him a hat",
    "the ball",
    "a lady",
    "his wife",
    "her brother",
    "hers",
    "the kings",
];
const ENDINGS: &[&str] = &[".", " today.", " in the park!", ", again.", ""];

fn corpus(n: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pick = |xs: &[&'static str]| xs[rng.random_range(0..xs.len())];
    (0..n)
        .map(|_| format!("{} {} {}{}", pick(SUBJECTS), pick(VERBS), pick(OBJECTS), pick(ENDINGS)))
        .collect()
}

#[test]
fn bijective_double_swap_is_identity() {
    let lex = GenderLexicon::builtin().bijective();
    for s in corpus(200, 1) {
        let t = Text::new(s.as_str());
        let back = swap_gender(&swap_gender(&t, &lex).0, &lex).0;
        assert_eq!(back.raw(), s);
    }
}

#[test]
fn bijective_swap_mirrors_detection() {
    let lex = GenderLexicon::builtin().bijective();
    for s in corpus(200, 2) {
        let t = Text::new(s);
        let (m, f) = detect_gender(&t, &lex);
        assert_eq!(detect_gender(&swap_gender(&t, &lex).0, &lex), (f, m));
    }
}

/// Tokens that can come back different after two full-lexicon swaps:
/// those whose first image is the source of an ambiguous rule.
fn may_drift(token: &str, lex: &GenderLexicon) -> bool {
    let sources: Vec<&str> = lex.file().ambiguous_rules.iter().map(|r| r.source.as_str()).collect();
    let lower = token.to_lowercase();
    let once = swap_gender(&Text::new(lower.as_str()), lex).0.raw().to_owned();
    sources.contains(&once.as_str())
}

#[test]
fn full_lexicon_double_swap_differs_only_on_ambiguous_images() {
    let lex = GenderLexicon::builtin();
    let mut drifted = 0;
    for s in corpus(50, 3) {
        let t = Text::new(s.as_str());
        let back = swap_gender(&swap_gender(&t, &lex).0, &lex).0;
        assert_eq!(back.len(), t.len());
        let before = biaseval::text::token_spans(&s);
        let after = biaseval::text::token_spans(back.raw());
        for (a, b) in before.iter().zip(&after) {
            let (a, b) = (&s[a.clone()], &back.raw()[b.clone()]);
            if a != b {
                drifted += 1;
                assert!(may_drift(a, &lex), "{a:?} -> {b:?} in {s:?}");
            }
        }
    }
    assert!(drifted > 0, "the corpus should exercise the non-bijective entries");
}

#[test]
fn dataset_swap_keeps_human_scores() {
    let lex = GenderLexicon::builtin();
    let records: Vec<MetaEvalRecord> = corpus(20, 4)
        .chunks(2)
        .enumerate()
        .map(|(i, pair)| MetaEvalRecord {
            example_id: i.to_string(),
            system_id: "sys".into(),
            hypothesis: Text::new(pair[0].as_str()),
            references: vec![Text::new(pair[1].as_str())],
            human: [("overall".to_string(), i as f64)].into(),
        })
        .collect();
    let ds = MetaEvalDataset {
        name: "corpus".into(),
        dimensions: vec!["overall".into()],
        records,
    };
    let (swapped, audit) = swap_dataset(&ds, &lex);
    swapped.validate().unwrap();
    assert_eq!(audit.len(), ds.records.len());
    for ((a, b), log) in ds.records.iter().zip(&swapped.records).zip(&audit) {
        assert_eq!(a.human, b.human);
        assert_eq!(b.hypothesis.raw(), swap_gender(&a.hypothesis, &lex).0.raw());
        let (m, f) = detect_gender(&a.hypothesis, &lex);
        assert_eq!((log.hypothesis.male_hits, log.hypothesis.female_hits), (m, f));
    }
}

//! Association tests shipped with the crate.

use super::spec::{AssociationTestSpec, Level};
use crate::error::{Error, Result};

const SOURCES: &[(&str, &str)] = &[
    (
        "abw_names_sentence",
        include_str!("../../data/tests/abw_names_sentence.json"),
    ),
    ("abw_names_word", include_str!("../../data/tests/abw_names_word.json")),
    (
        "abw_terms_sentence",
        include_str!("../../data/tests/abw_terms_sentence.json"),
    ),
    ("abw_terms_word", include_str!("../../data/tests/abw_terms_word.json")),
    ("c10_sentence", include_str!("../../data/tests/c10_sentence.json")),
    ("c10_word", include_str!("../../data/tests/c10_word.json")),
    ("c1_sentence", include_str!("../../data/tests/c1_sentence.json")),
    ("c1_word", include_str!("../../data/tests/c1_word.json")),
    ("c2_sentence", include_str!("../../data/tests/c2_sentence.json")),
    ("c2_word", include_str!("../../data/tests/c2_word.json")),
    ("c3_sentence", include_str!("../../data/tests/c3_sentence.json")),
    ("c3_word", include_str!("../../data/tests/c3_word.json")),
    ("c4_sentence", include_str!("../../data/tests/c4_sentence.json")),
    ("c4_word", include_str!("../../data/tests/c4_word.json")),
    ("c5_sentence", include_str!("../../data/tests/c5_sentence.json")),
    ("c5_word", include_str!("../../data/tests/c5_word.json")),
    (
        "c6_names_sentence",
        include_str!("../../data/tests/c6_names_sentence.json"),
    ),
    ("c6_names_word", include_str!("../../data/tests/c6_names_word.json")),
    (
        "c6_terms_sentence",
        include_str!("../../data/tests/c6_terms_sentence.json"),
    ),
    ("c6_terms_word", include_str!("../../data/tests/c6_terms_word.json")),
    ("c7_sentence", include_str!("../../data/tests/c7_sentence.json")),
    ("c7_word", include_str!("../../data/tests/c7_word.json")),
    ("c8_sentence", include_str!("../../data/tests/c8_sentence.json")),
    ("c8_word", include_str!("../../data/tests/c8_word.json")),
    (
        "db_competent_sentence",
        include_str!("../../data/tests/db_competent_sentence.json"),
    ),
    (
        "db_competent_sentence_unbleached",
        include_str!("../../data/tests/db_competent_sentence_unbleached.json"),
    ),
    (
        "db_competent_word",
        include_str!("../../data/tests/db_competent_word.json"),
    ),
    (
        "db_likable_sentence",
        include_str!("../../data/tests/db_likable_sentence.json"),
    ),
    (
        "db_likable_sentence_unbleached",
        include_str!("../../data/tests/db_likable_sentence_unbleached.json"),
    ),
    ("db_likable_word", include_str!("../../data/tests/db_likable_word.json")),
];

/// Every bundled test, in file-name order.
pub fn all() -> Result<Vec<AssociationTestSpec>> {
    SOURCES
        .iter()
        .map(|(file, body)| {
            AssociationTestSpec::from_json(body).map_err(|e| Error::invalid(format!("bundled test {file}: {e}")))
        })
        .collect()
}

/// Names of the bundled tests (`C1`, `C6-N`, `DB:C`, ...), without
/// duplicates, in file-name order.
pub fn names() -> Result<Vec<String>> {
    let mut out: Vec<String> = Vec::new();
    for spec in all()? {
        if !out.contains(&spec.name) {
            out.push(spec.name);
        }
    }
    Ok(out)
}

/// The bundled test with this name (case-insensitive) at this level.
pub fn get(name: &str, level: Level) -> Result<AssociationTestSpec> {
    all()?
        .into_iter()
        .find(|s| s.level == level && s.name.eq_ignore_ascii_case(name))
        .ok_or_else(|| Error::invalid(format!("no bundled test {name} at {} level", level.as_str())))
}

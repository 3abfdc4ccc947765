use serde::{Deserialize, Serialize};

use super::lexicon::{Gender, GenderLexicon, Target, POSSESSIVE_LOOKAHEAD};
use crate::text::{is_word_token, token_spans, Text};

/// Words that, following "her"/"his", mark the pronoun reading rather than
/// the determiner one: function words, auxiliaries and particles.
const CLOSED_CLASS: &[&str] = &[
    "a",
    "an",
    "the",
    "this",
    "that",
    "these",
    "those",
    "some",
    "any",
    "every",
    "each",
    "no",
    "all",
    "both",
    "to",
    "in",
    "on",
    "at",
    "by",
    "for",
    "from",
    "with",
    "about",
    "into",
    "onto",
    "over",
    "under",
    "up",
    "down",
    "out",
    "off",
    "away",
    "back",
    "around",
    "through",
    "after",
    "before",
    "of",
    "as",
    "like",
    "near",
    "behind",
    "across",
    "along",
    "toward",
    "towards",
    "and",
    "or",
    "but",
    "so",
    "because",
    "if",
    "when",
    "while",
    "than",
    "then",
    "yet",
    "i",
    "you",
    "he",
    "she",
    "it",
    "we",
    "they",
    "me",
    "him",
    "her",
    "us",
    "them",
    "his",
    "my",
    "your",
    "its",
    "our",
    "their",
    "who",
    "what",
    "which",
    "is",
    "are",
    "was",
    "were",
    "be",
    "been",
    "being",
    "am",
    "has",
    "have",
    "had",
    "do",
    "does",
    "did",
    "will",
    "would",
    "can",
    "could",
    "should",
    "may",
    "might",
    "must",
    "shall",
    "again",
    "now",
    "here",
    "there",
    "too",
    "not",
    "also",
    "just",
    "still",
    "once",
    "today",
    "yesterday",
    "tomorrow",
    "alone",
    "together",
];

/// Rule label recorded for one-to-one replacements.
pub const BIJECTIVE_RULE: &str = "bijective";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Replacement {
    /// Token index in the original text.
    pub position: usize,
    pub old: String,
    pub new: String,
    pub rule: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwapReport {
    pub replacements: Vec<Replacement>,
    pub male_hits: usize,
    pub female_hits: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Case {
    Lower,
    Title,
    Upper,
}

fn case_of(token: &str) -> Case {
    let letters: Vec<char> = token.chars().filter(|c| c.is_alphabetic()).collect();
    if letters.len() > 1 && letters.iter().all(|c| c.is_uppercase()) {
        Case::Upper
    } else if letters.first().is_some_and(|c| c.is_uppercase()) {
        Case::Title
    } else {
        Case::Lower
    }
}

fn apply_case(word: &str, case: Case) -> String {
    match case {
        Case::Lower => word.to_owned(),
        Case::Upper => word.to_uppercase(),
        Case::Title => {
            let mut chars = word.chars();
            match chars.next() {
                Some(first) => first.to_uppercase().chain(chars).collect(),
                None => String::new(),
            }
        }
    }
}

fn opens_noun_phrase(next: Option<&str>) -> bool {
    match next {
        Some(tok) if is_word_token(tok) => !CLOSED_CLASS.contains(&tok.to_lowercase().as_str()),
        _ => false,
    }
}

/// Replaces every gendered token with its counterpart, keeping the rest of
/// the string byte for byte.
pub fn swap_gender(text: &Text, lexicon: &GenderLexicon) -> (Text, SwapReport) {
    let raw = text.raw();
    let spans = token_spans(raw);
    let mut report = SwapReport::default();
    let mut out = String::with_capacity(raw.len());
    let mut copied = 0;
    for (i, span) in spans.iter().enumerate() {
        let token = &raw[span.clone()];
        let Some(entry) = lexicon.entry(token) else {
            continue;
        };
        match entry.gender {
            Gender::Male => report.male_hits += 1,
            Gender::Female => report.female_hits += 1,
        }
        let (target, rule) = match &entry.target {
            Target::Fixed(t) => (t.as_str(), BIJECTIVE_RULE),
            Target::Rule(r) => {
                let rule = lexicon.rule(*r);
                debug_assert_eq!(rule.rule, POSSESSIVE_LOOKAHEAD);
                let next = spans.get(i + 1).map(|s| &raw[s.clone()]);
                let pick = if opens_noun_phrase(next) { 0 } else { 1 };
                (rule.candidates[pick].as_str(), rule.rule.as_str())
            }
        };
        let new = apply_case(target, case_of(token));
        out.push_str(&raw[copied..span.start]);
        out.push_str(&new);
        copied = span.end;
        report.replacements.push(Replacement {
            position: i,
            old: token.to_owned(),
            new,
            rule: rule.to_owned(),
        });
    }
    if report.replacements.is_empty() {
        return (text.clone(), report);
    }
    out.push_str(&raw[copied..]);
    (Text::new(out), report)
}

/// `(male_hits, female_hits)`: lexicon tokens of each gender in `text`.
pub fn detect_gender(text: &Text, lexicon: &GenderLexicon) -> (usize, usize) {
    text.tokens()
        .iter()
        .fold((0, 0), |(m, f), tok| match lexicon.gender(tok) {
            Some(Gender::Male) => (m + 1, f),
            Some(Gender::Female) => (m, f + 1),
            None => (m, f),
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn swap(s: &str) -> String {
        swap_gender(&Text::new(s), &GenderLexicon::builtin()).0.raw().to_owned()
    }

    #[test]
    fn published_examples() {
        assert_eq!(
            swap("A woman in a red shirt with her arm raised."),
            "A man in a red shirt with his arm raised."
        );
        assert_eq!(
            swap("Two girls walking down the street."),
            "Two boys walking down the street."
        );
    }

    #[test]
    fn pronoun_and_possessive_readings() {
        assert_eq!(swap("She gave him her book."), "He gave her his book.");
        assert_eq!(swap("He saw her."), "She saw him.");
        assert_eq!(swap("He gave her the ball"), "She gave him the ball");
        assert_eq!(swap("The book is his."), "The book is hers.");
        assert_eq!(swap("his dog and hers"), "her dog and his");
        assert_eq!(swap("his is red"), "hers is red");
    }

    #[test]
    fn capitalization_is_kept() {
        assert_eq!(swap("HE and His BROTHER"), "SHE and Her SISTER");
        assert_eq!(swap("Woman, woman, WOMAN!"), "Man, man, MAN!");
    }

    #[test]
    fn whole_tokens_only() {
        assert_eq!(swap("manuscript of the heron"), "manuscript of the heron");
        assert_eq!(swap("the man's hat"), "the woman's hat");
    }

    #[test]
    fn no_hits_leaves_text_alone() {
        let (t, r) = swap_gender(&Text::new("  A dog  runs. "), &GenderLexicon::builtin());
        assert_eq!(t.raw(), "  A dog  runs. ");
        assert_eq!(r, SwapReport::default());
    }

    #[test]
    fn report_lists_replacements() {
        let (_, r) = swap_gender(&Text::new("She gave him her book."), &GenderLexicon::builtin());
        let positions: Vec<usize> = r.replacements.iter().map(|x| x.position).collect();
        assert_eq!(positions, vec![0, 2, 3]);
        assert_eq!(r.replacements[2].rule, POSSESSIVE_LOOKAHEAD);
        assert_eq!(r.replacements[1].rule, BIJECTIVE_RULE);
        assert_eq!((r.male_hits, r.female_hits), (1, 2));
    }

    #[test]
    fn detection_counts() {
        let lex = GenderLexicon::builtin();
        assert_eq!(
            detect_gender(&Text::new("Two girls walking down the street."), &lex),
            (0, 1)
        );
        assert_eq!(detect_gender(&Text::new("A dog runs."), &lex), (0, 0));
        // he, brother male; her female
        assert_eq!(detect_gender(&Text::new("He told her brother"), &lex), (2, 1));
    }

    #[test]
    fn full_lexicon_is_not_an_involution() {
        let lex = GenderLexicon::builtin();
        let once = swap_gender(&Text::new("He saw him run."), &lex).0;
        assert_eq!(once.raw(), "She saw her run.");
        let twice = swap_gender(&once, &lex).0;
        assert_eq!(twice.raw(), "He saw his run.");
    }

    const WORDS: &[&str] = &[
        "he", "She", "HIS", "her", "hers", "him", "man", "Woman", "boys", "girl", "dog", "the", "a", "ran", "street",
        "with", "brother", "Queen", "red", ".", ",", "!", "'s", "mr",
    ];

    fn sentence() -> impl Strategy<Value = String> {
        prop::collection::vec(prop::sample::select(WORDS), 0..14).prop_map(|w| w.join(" "))
    }

    proptest! {
        #[test]
        fn bijective_swap_is_an_involution(s in sentence()) {
            let lex = GenderLexicon::builtin().bijective();
            let t = Text::new(s);
            let once = swap_gender(&t, &lex).0;
            let twice = swap_gender(&once, &lex).0;
            prop_assert_eq!(twice.raw(), t.raw());
        }

        #[test]
        fn token_count_preserved(s in sentence()) {
            let t = Text::new(s);
            prop_assert_eq!(swap_gender(&t, &GenderLexicon::builtin()).0.len(), t.len());
        }

        #[test]
        fn bijective_swap_exchanges_hit_counts(s in sentence()) {
            let lex = GenderLexicon::builtin().bijective();
            let t = Text::new(s);
            let (m, f) = detect_gender(&t, &lex);
            let (swapped, report) = swap_gender(&t, &lex);
            prop_assert_eq!(detect_gender(&swapped, &lex), (f, m));
            prop_assert_eq!((report.male_hits, report.female_hits), (m, f));
            prop_assert!(report.replacements.windows(2).all(|w| w[0].position < w[1].position));
        }
    }
}

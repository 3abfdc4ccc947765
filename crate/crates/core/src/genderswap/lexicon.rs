use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rule id for the her/his lookahead: the first candidate when the next
/// token is an open-class word, the second otherwise.
pub const POSSESSIVE_LOOKAHEAD: &str = "possessive_lookahead";

const KNOWN_RULES: &[&str] = &[POSSESSIVE_LOOKAHEAD];

const DEFAULT_LEXICON: &str = include_str!("../../data/lexicon.json");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gender {
    Male,
    Female,
}

impl Gender {
    pub fn opposite(self) -> Gender {
        match self {
            Gender::Male => Gender::Female,
            Gender::Female => Gender::Male,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmbiguousRule {
    pub source: String,
    pub candidates: Vec<String>,
    pub rule: String,
}

/// On-disk layout of a lexicon.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexiconFile {
    pub bijective_pairs: Vec<(String, String)>,
    #[serde(default)]
    pub ambiguous_rules: Vec<AmbiguousRule>,
    #[serde(default)]
    pub neutral_exceptions: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Target {
    Fixed(String),
    Rule(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Entry {
    pub gender: Gender,
    pub target: Target,
}

/// Validated gendered word mapping. Entries are lowercase; lookups are by
/// lowercased token.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "LexiconFile", into = "LexiconFile")]
pub struct GenderLexicon {
    file: LexiconFile,
    index: HashMap<String, Entry>,
}

impl GenderLexicon {
    pub fn new(file: LexiconFile) -> Result<Self> {
        let mut file = file;
        let lower = |s: &mut String| *s = s.to_lowercase();
        for (m, f) in &mut file.bijective_pairs {
            lower(m);
            lower(f);
        }
        for r in &mut file.ambiguous_rules {
            lower(&mut r.source);
            r.candidates.iter_mut().for_each(lower);
        }
        file.neutral_exceptions.iter_mut().for_each(lower);

        let mut gender_of: HashMap<String, Gender> = HashMap::new();
        let mut index: HashMap<String, Entry> = HashMap::new();
        for (m, f) in &file.bijective_pairs {
            for (word, gender) in [(m, Gender::Male), (f, Gender::Female)] {
                if word.is_empty() || word.chars().any(|c| !c.is_alphanumeric()) {
                    return Err(Error::invalid(format!("lexicon entry {word:?} is not a single word")));
                }
                if gender_of.insert(word.clone(), gender).is_some() {
                    return Err(Error::invalid(format!(
                        "{word:?} appears in more than one bijective pair"
                    )));
                }
            }
            index.insert(
                m.clone(),
                Entry {
                    gender: Gender::Male,
                    target: Target::Fixed(f.clone()),
                },
            );
            index.insert(
                f.clone(),
                Entry {
                    gender: Gender::Female,
                    target: Target::Fixed(m.clone()),
                },
            );
        }

        let mut seen_sources = Vec::new();
        for (i, r) in file.ambiguous_rules.iter().enumerate() {
            if seen_sources.contains(&&r.source) {
                return Err(Error::invalid(format!(
                    "{:?} has more than one ambiguous rule",
                    r.source
                )));
            }
            seen_sources.push(&r.source);
            if r.candidates.len() < 2 {
                return Err(Error::invalid(format!(
                    "ambiguous rule for {:?} needs at least two candidates",
                    r.source
                )));
            }
            if !KNOWN_RULES.contains(&r.rule.as_str()) {
                return Err(Error::invalid(format!("unknown disambiguation rule {:?}", r.rule)));
            }
            if r.rule == POSSESSIVE_LOOKAHEAD && r.candidates.len() != 2 {
                return Err(Error::invalid(format!(
                    "{POSSESSIVE_LOOKAHEAD} takes exactly two candidates"
                )));
            }
            let gender = match gender_of.get(&r.source) {
                Some(&g) => g,
                None => {
                    let genders: Vec<Option<Gender>> = r.candidates.iter().map(|c| gender_of.get(c).copied()).collect();
                    match genders[0] {
                        Some(g) if genders.iter().all(|x| *x == Some(g)) => g.opposite(),
                        _ => {
                            return Err(Error::invalid(format!(
                                "cannot tell the gender of ambiguous source {:?}",
                                r.source
                            )))
                        }
                    }
                }
            };
            index.insert(
                r.source.clone(),
                Entry {
                    gender,
                    target: Target::Rule(i),
                },
            );
        }

        for word in &file.neutral_exceptions {
            index.remove(word);
        }
        Ok(GenderLexicon { file, index })
    }

    /// The lexicon bundled with the crate.
    pub fn builtin() -> Self {
        Self::from_json(DEFAULT_LEXICON).expect("bundled lexicon is valid")
    }

    pub fn from_json(body: &str) -> Result<Self> {
        let file: LexiconFile = serde_json::from_str(body).map_err(|e| Error::json("gender lexicon", e))?;
        Self::new(file)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let body = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&body)
    }

    /// The same lexicon without ambiguous rules, so every mapping is a
    /// bijection and swapping is an involution.
    pub fn bijective(&self) -> Self {
        let mut file = self.file.clone();
        file.ambiguous_rules.clear();
        Self::new(file).expect("a subset of a valid lexicon is valid")
    }

    pub fn is_bijective(&self) -> bool {
        self.file.ambiguous_rules.is_empty()
    }

    pub fn file(&self) -> &LexiconFile {
        &self.file
    }

    pub fn gender(&self, token: &str) -> Option<Gender> {
        self.entry(token).map(|e| e.gender)
    }

    pub(crate) fn entry(&self, token: &str) -> Option<&Entry> {
        match self.index.get(token) {
            Some(e) => Some(e),
            None if token.chars().any(char::is_uppercase) => self.index.get(&token.to_lowercase()),
            None => None,
        }
    }

    pub(crate) fn rule(&self, i: usize) -> &AmbiguousRule {
        &self.file.ambiguous_rules[i]
    }
}

impl TryFrom<LexiconFile> for GenderLexicon {
    type Error = Error;

    fn try_from(file: LexiconFile) -> Result<Self> {
        Self::new(file)
    }
}

impl From<GenderLexicon> for LexiconFile {
    fn from(lex: GenderLexicon) -> Self {
        lex.file
    }
}

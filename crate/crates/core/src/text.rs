use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};

/// Byte ranges of the tokens in `raw`.
///
/// A token is either a maximal run of alphanumeric characters or a single
/// character that is neither alphanumeric nor whitespace.
pub fn token_spans(raw: &str) -> Vec<Range<usize>> {
    let mut spans = Vec::new();
    let mut word_start: Option<usize> = None;
    for (i, ch) in raw.char_indices() {
        if ch.is_alphanumeric() {
            word_start.get_or_insert(i);
            continue;
        }
        if let Some(start) = word_start.take() {
            spans.push(start..i);
        }
        if !ch.is_whitespace() {
            spans.push(i..i + ch.len_utf8());
        }
    }
    if let Some(start) = word_start {
        spans.push(start..raw.len());
    }
    spans
}

pub fn tokenize(raw: &str) -> Vec<String> {
    token_spans(raw)
        .into_iter()
        .map(|span| raw[span].to_lowercase())
        .collect()
}

pub fn is_word_token(token: &str) -> bool {
    !token.is_empty() && token.chars().all(char::is_alphanumeric)
}

/// A hypothesis or reference: the raw string and its normalized tokens.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "String", into = "String")]
pub struct Text {
    raw: String,
    tokens: Vec<String>,
}

impl Text {
    pub fn new(raw: impl Into<String>) -> Self {
        let raw = raw.into();
        let tokens = tokenize(&raw);
        Text { raw, tokens }
    }

    pub fn raw(&self) -> &str {
        &self.raw
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

impl From<String> for Text {
    fn from(raw: String) -> Self {
        Text::new(raw)
    }
}

impl From<&str> for Text {
    fn from(raw: &str) -> Self {
        Text::new(raw)
    }
}

impl From<Text> for String {
    fn from(text: Text) -> Self {
        text.raw
    }
}

impl fmt::Debug for Text {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Text({:?})", self.raw)
    }
}

impl fmt::Display for Text {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.raw)
    }
}

//! Input and output labels.
//!
//! Labels are short tokens drawn from a restricted character set so that they
//! can be embedded verbatim in canonical ball keys without escaping.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LabelError {
    #[error("empty label")]
    Empty,
    #[error("label {0:?} contains characters outside [A-Za-z0-9_.+-]")]
    BadCharacter(String),
    #[error("alphabet is empty")]
    EmptyAlphabet,
    #[error("alphabet lists {0:?} twice")]
    Duplicate(String),
}

/// A node label (input or output).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Label(String);

impl Label {
    pub fn new(s: impl Into<String>) -> Result<Self, LabelError> {
        let s = s.into();
        if s.is_empty() {
            return Err(LabelError::Empty);
        }
        if !s
            .chars()
            .all(|ch| ch.is_ascii_alphanumeric() || matches!(ch, '_' | '.' | '+' | '-'))
        {
            return Err(LabelError::BadCharacter(s));
        }
        Ok(Label(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Label::new(s).map_err(serde::de::Error::custom)
    }
}

/// Convenience for literals in tests and built-in problems. Panics on an
/// invalid label.
pub fn label(s: &str) -> Label {
    Label::new(s).expect("invalid label literal")
}

/// A finite, totally ordered label set. The declared order is the order used
/// for every lexicographic tie-break in the crate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Alphabet(Vec<Label>);

impl Alphabet {
    pub fn new(labels: Vec<Label>) -> Result<Self, LabelError> {
        if labels.is_empty() {
            return Err(LabelError::EmptyAlphabet);
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(LabelError::Duplicate(l.to_string()));
            }
        }
        Ok(Alphabet(labels))
    }

    pub fn parse_list<S: AsRef<str>>(items: &[S]) -> Result<Self, LabelError> {
        let labels = items
            .iter()
            .map(|s| Label::new(s.as_ref()))
            .collect::<Result<Vec<_>, _>>()?;
        Alphabet::new(labels)
    }

    pub fn labels(&self) -> &[Label] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> &Label {
        &self.0[0]
    }

    pub fn get(&self, i: usize) -> Option<&Label> {
        self.0.get(i)
    }

    pub fn index_of(&self, l: &Label) -> Option<usize> {
        self.0.iter().position(|x| x == l)
    }

    pub fn contains(&self, l: &Label) -> bool {
        self.0.contains(l)
    }
}

impl<'de> Deserialize<'de> for Alphabet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let labels = Vec::<Label>::deserialize(d)?;
        Alphabet::new(labels).map_err(serde::de::Error::custom)
    }
}

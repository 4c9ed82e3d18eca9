use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use crate::corpus::stopwords::Stopwords;
use crate::error::{Error, Result};

/// A document body that passed format and encoding checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawDocument {
    pub source_name: String,
    pub body: String,
}

/// Value of a structured attribute attached to a document.
#[derive(Debug, Clone, PartialEq)]
pub enum AttributeValue {
    Text(String),
    Number(f64),
}

impl AttributeValue {
    pub fn as_number(&self) -> Option<f64> {
        match self {
            AttributeValue::Number(v) => Some(*v),
            AttributeValue::Text(_) => None,
        }
    }
}

impl fmt::Display for AttributeValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttributeValue::Text(s) => f.write_str(s),
            AttributeValue::Number(v) => write!(f, "{v}"),
        }
    }
}

/// A tokenized document.
///
/// `token_counts` is always the multiset summary of `tokens`; the fields are
/// private so the two cannot drift apart.
#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    id: String,
    tokens: Vec<String>,
    token_counts: BTreeMap<String, usize>,
    label: Option<String>,
    attributes: BTreeMap<String, AttributeValue>,
}

impl Document {
    pub fn new<I, S>(id: impl Into<String>, tokens: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let tokens: Vec<String> = tokens.into_iter().map(Into::into).collect();
        let mut token_counts = BTreeMap::new();
        for t in &tokens {
            *token_counts.entry(t.clone()).or_insert(0) += 1;
        }
        Document {
            id: id.into(),
            tokens,
            token_counts,
            label: None,
            attributes: BTreeMap::new(),
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn with_attribute(mut self, name: impl Into<String>, value: AttributeValue) -> Self {
        self.attributes.insert(name.into(), value);
        self
    }

    /// Same document with the label removed, as seen by the learner when the
    /// gold class is hidden.
    pub fn unlabeled(&self) -> Self {
        Document {
            label: None,
            ..self.clone()
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn token_counts(&self) -> &BTreeMap<String, usize> {
        &self.token_counts
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn set_label(&mut self, label: Option<String>) {
        self.label = label;
    }

    pub fn attributes(&self) -> &BTreeMap<String, AttributeValue> {
        &self.attributes
    }

    pub fn set_attribute(&mut self, name: impl Into<String>, value: AttributeValue) {
        self.attributes.insert(name.into(), value);
    }

    /// Distinct words of the document, in lexicographic order.
    pub fn distinct_words(&self) -> BTreeSet<&str> {
        self.token_counts.keys().map(String::as_str).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

fn check_extension(path: &Path) -> Result<()> {
    let is_txt = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("txt"));
    if is_txt {
        Ok(())
    } else {
        Err(Error::InvalidFormat {
            path: path.to_path_buf(),
        })
    }
}

/// Accept `body` only if `path` names a `.txt` file and the bytes are
/// non-blank UTF-8.
pub fn validate_document(path: &Path, body: &[u8]) -> Result<RawDocument> {
    check_extension(path)?;
    let body = std::str::from_utf8(body).map_err(|_| Error::InvalidEncoding {
        path: path.to_path_buf(),
    })?;
    if body.trim().is_empty() {
        return Err(Error::EmptyDocument {
            path: path.to_path_buf(),
        });
    }
    let source_name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    Ok(RawDocument {
        source_name,
        body: body.to_owned(),
    })
}

/// Read and validate a document file. The format check runs before the file
/// is opened, so a `.pdf` is rejected even if it does not exist.
pub fn load_document(path: &Path) -> Result<RawDocument> {
    check_extension(path)?;
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    validate_document(path, &bytes)
}

/// Split text into lowercase runs of letters and digits, dropping stopwords.
pub fn tokenize_text(text: &str, stopwords: &Stopwords) -> Vec<String> {
    // Lowercase first: some uppercase letters lowercase to a letter plus a
    // combining mark, and the mark must act as a separator here too.
    let lowered = text.to_lowercase();
    lowered
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty() && !stopwords.contains(t))
        .map(str::to_owned)
        .collect()
}

pub fn tokenize(raw: &RawDocument, stopwords: &Stopwords) -> Document {
    Document::new(raw.source_name.clone(), tokenize_text(&raw.body, stopwords))
}

/// Pull `name <number>` pairs out of free text, e.g. `price 23` or
/// `Mileage: 18.5`. The first occurrence of each name wins.
pub fn extract_numeric_attributes(text: &str, names: &[&str]) -> BTreeMap<String, f64> {
    let words: Vec<String> = text
        .split_whitespace()
        .map(|w| {
            w.trim_matches(|c: char| !(c.is_alphanumeric() || c == '.' || c == '-'))
                .trim_end_matches('.')
                .to_lowercase()
        })
        .filter(|w| !w.is_empty())
        .collect();
    let mut out = BTreeMap::new();
    for pair in words.windows(2) {
        if let Some(name) = names.iter().find(|n| **n == pair[0]) {
            if out.contains_key(*name) {
                continue;
            }
            if let Ok(v) = pair[1].parse::<f64>() {
                if v.is_finite() {
                    out.insert((*name).to_owned(), v);
                }
            }
        }
    }
    out
}

/// True iff `doc` contains at least `min_hits` distinct words of `lexicon`.
pub fn domain_check(doc: &Document, lexicon: &BTreeSet<String>, min_hits: usize) -> bool {
    let hits = doc.token_counts().keys().filter(|w| lexicon.contains(*w)).count();
    hits >= min_hits.max(1)
}

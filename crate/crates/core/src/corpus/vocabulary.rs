use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::corpus::document::Document;
use crate::error::{Error, Result};
use crate::model::GenerativeModel;

/// Minimum corpus-wide occurrence count for a word to enter the vocabulary.
pub const MIN_CORPUS_FREQUENCY: usize = 2;

/// Lexicographically ordered word list with its inverse index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    words: Vec<String>,
    index: HashMap<String, usize>,
    doc_frequency: Vec<usize>,
    corpus_frequency: Vec<usize>,
}

impl Vocabulary {
    /// Build from `(word, doc_frequency, corpus_frequency)` entries. Words
    /// must be unique; they are sorted here.
    pub fn from_entries<I>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (String, usize, usize)>,
    {
        let mut entries: Vec<_> = entries.into_iter().collect();
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        if entries.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InsufficientData("duplicate vocabulary word".into()));
        }
        if entries.is_empty() {
            return Err(Error::EmptyVocabulary);
        }
        let mut vocab = Vocabulary {
            words: Vec::with_capacity(entries.len()),
            index: HashMap::with_capacity(entries.len()),
            doc_frequency: Vec::with_capacity(entries.len()),
            corpus_frequency: Vec::with_capacity(entries.len()),
        };
        for (i, (w, df, cf)) in entries.into_iter().enumerate() {
            vocab.index.insert(w.clone(), i);
            vocab.words.push(w);
            vocab.doc_frequency.push(df);
            vocab.corpus_frequency.push(cf);
        }
        Ok(vocab)
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn index_of(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index.contains_key(word)
    }

    pub fn doc_frequency(&self, word: &str) -> Option<usize> {
        self.index_of(word).map(|i| self.doc_frequency[i])
    }

    pub fn corpus_frequency(&self, word: &str) -> Option<usize> {
        self.index_of(word).map(|i| self.corpus_frequency[i])
    }

    pub(crate) fn frequencies_at(&self, i: usize) -> (usize, usize) {
        (self.doc_frequency[i], self.corpus_frequency[i])
    }

    /// Sparse `(word index, count)` bag for a document; out-of-vocabulary
    /// tokens are dropped.
    pub fn bag(&self, doc: &Document) -> Vec<(usize, f64)> {
        let mut bag: Vec<(usize, f64)> = doc
            .token_counts()
            .iter()
            .filter_map(|(w, &n)| self.index_of(w).map(|i| (i, n as f64)))
            .collect();
        bag.sort_unstable_by_key(|&(i, _)| i);
        bag
    }
}

/// Keep every word whose total count across `docs` is at least two.
pub fn build_vocabulary(docs: &[Document]) -> Result<Vocabulary> {
    let mut counts: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for doc in docs {
        for (w, &n) in doc.token_counts() {
            let e = counts.entry(w.as_str()).or_insert((0, 0));
            e.0 += 1;
            e.1 += n;
        }
    }
    Vocabulary::from_entries(
        counts
            .into_iter()
            .filter(|(_, (_, cf))| *cf >= MIN_CORPUS_FREQUENCY)
            .map(|(w, (df, cf))| (w.to_owned(), df, cf)),
    )
}

/// Vocabulary words observed in one class's labeled documents, with their
/// conditional probabilities under that class.
#[derive(Debug, Clone, PartialEq)]
pub struct WordSet {
    pub class_name: String,
    pub words: BTreeSet<String>,
    pub probabilities: BTreeMap<String, f64>,
}

/// Intersection of a document with one class's word set.
#[derive(Debug, Clone, PartialEq)]
pub struct WordSetMatch {
    pub class_name: String,
    pub words: BTreeSet<String>,
    pub probabilities: BTreeMap<String, f64>,
}

/// One word set per model class, built from the labeled documents.
pub fn build_word_sets(labeled: &[Document], vocab: &Vocabulary, model: &GenerativeModel) -> Result<Vec<WordSet>> {
    let mut observed: BTreeMap<&str, BTreeSet<String>> =
        model.classes().iter().map(|c| (c.as_str(), BTreeSet::new())).collect();
    for doc in labeled {
        let Some(label) = doc.label() else { continue };
        let set = observed
            .get_mut(label)
            .ok_or_else(|| Error::UnknownClass(label.to_owned()))?;
        set.extend(doc.token_counts().keys().filter(|w| vocab.contains(w)).cloned());
    }
    observed
        .into_iter()
        .map(|(class, words)| {
            let probabilities = words
                .iter()
                .map(|w| Ok((w.clone(), model.conditional(class, w)?.unwrap_or(0.0))))
                .collect::<Result<_>>()?;
            Ok(WordSet {
                class_name: class.to_owned(),
                words,
                probabilities,
            })
        })
        .collect()
}

/// Classes whose word set shares at least two distinct words with `doc`.
pub fn match_word_sets(doc: &Document, sets: &[WordSet]) -> Vec<WordSetMatch> {
    let doc_words = doc.distinct_words();
    sets.iter()
        .filter_map(|set| {
            let words: BTreeSet<String> = set
                .words
                .iter()
                .filter(|w| doc_words.contains(w.as_str()))
                .cloned()
                .collect();
            if words.len() < 2 {
                return None;
            }
            let probabilities = words
                .iter()
                .filter_map(|w| set.probabilities.get(w).map(|p| (w.clone(), *p)))
                .collect();
            Some(WordSetMatch {
                class_name: set.class_name.clone(),
                words,
                probabilities,
            })
        })
        .collect()
}

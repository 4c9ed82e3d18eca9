//! Shared fixtures and brute-force oracles for the integration tests.
#![allow(dead_code)]

use rand::Rng;
use ssemc::corpus::{Document, Vocabulary};
use ssemc::model::GenerativeModel;

pub fn word(i: usize) -> String {
    format!("w{i}")
}

pub fn class(i: usize) -> String {
    format!("k{i}")
}

/// Every word of the alphabet, with frequencies recounted from `docs`.
pub fn full_vocabulary(vocab_size: usize, docs: &[Document]) -> Vocabulary {
    Vocabulary::from_entries((0..vocab_size).map(|i| {
        let w = word(i);
        let df = docs.iter().filter(|d| d.token_counts().contains_key(&w)).count();
        let cf = docs
            .iter()
            .map(|d| d.token_counts().get(&w).copied().unwrap_or(0))
            .sum();
        (w, df, cf)
    }))
    .unwrap()
}

pub fn random_tokens<R: Rng>(rng: &mut R, vocab_size: usize, max_len: usize) -> Vec<String> {
    let len = rng.random_range(1..=max_len);
    (0..len).map(|_| word(rng.random_range(0..vocab_size))).collect()
}

/// A small random corpus. Labeled document `i` belongs to class
/// `i % n_classes`, so every class is represented when
/// `n_labeled >= n_classes`. Each class prefers its own slice of the
/// alphabet so the corpora are not pure noise.
pub struct SmallCorpus {
    pub labeled: Vec<Document>,
    pub unlabeled: Vec<Document>,
    pub vocab: Vocabulary,
}

pub fn small_corpus<R: Rng>(
    rng: &mut R,
    n_classes: usize,
    vocab_size: usize,
    n_labeled: usize,
    n_unlabeled: usize,
    max_len: usize,
) -> SmallCorpus {
    let draw = |rng: &mut R, c: usize| -> Vec<String> {
        let len = rng.random_range(1..=max_len);
        (0..len)
            .map(|_| {
                if rng.random_bool(0.6) {
                    word((c + rng.random_range(0..vocab_size.div_ceil(n_classes)) * n_classes) % vocab_size)
                } else {
                    word(rng.random_range(0..vocab_size))
                }
            })
            .collect()
    };
    let labeled: Vec<Document> = (0..n_labeled)
        .map(|i| {
            let c = i % n_classes;
            Document::new(format!("l{i}"), draw(rng, c)).with_label(class(c))
        })
        .collect();
    let unlabeled: Vec<Document> = (0..n_unlabeled)
        .map(|i| {
            let c = rng.random_range(0..n_classes);
            Document::new(format!("u{i}"), draw(rng, c))
        })
        .collect();
    let mut all = labeled.clone();
    all.extend(unlabeled.iter().cloned());
    let vocab = full_vocabulary(vocab_size, &all);
    SmallCorpus {
        labeled,
        unlabeled,
        vocab,
    }
}

/// Smoothed supervised estimates computed directly from token counts:
/// `(priors, conditionals[c][w])` in class order.
pub fn oracle_estimates(
    labeled: &[Document],
    classes: &[String],
    vocab: &Vocabulary,
    alpha: f64,
) -> (Vec<f64>, Vec<Vec<f64>>) {
    let k = classes.len() as f64;
    let v = vocab.len() as f64;
    let n = labeled.len() as f64;
    let mut priors = Vec::new();
    let mut conds = Vec::new();
    for c in classes {
        let docs: Vec<&Document> = labeled.iter().filter(|d| d.label() == Some(c)).collect();
        priors.push((docs.len() as f64 + alpha) / (n + k * alpha));
        let count =
            |w: &str| -> f64 { docs.iter().flat_map(|d| d.tokens()).filter(|t| t.as_str() == w).count() as f64 };
        let total: f64 = vocab.words().iter().map(|w| count(w)).sum();
        conds.push(
            vocab
                .words()
                .iter()
                .map(|w| (count(w) + alpha) / (total + v * alpha))
                .collect(),
        );
    }
    (priors, conds)
}

/// `P(d, c)` as a plain product over the document's in-vocabulary tokens.
pub fn oracle_joint(model: &GenerativeModel, doc: &Document, class: &str) -> f64 {
    let mut p = model.prior(class).unwrap();
    for t in doc.tokens() {
        if let Some(q) = model.conditional(class, t).unwrap() {
            p *= q;
        }
    }
    p
}

/// Posterior by enumerating the classes and normalizing the joint products.
pub fn oracle_posterior(model: &GenerativeModel, doc: &Document) -> Vec<f64> {
    let joints: Vec<f64> = model.classes().iter().map(|c| oracle_joint(model, doc, c)).collect();
    let z: f64 = joints.iter().sum();
    joints.iter().map(|j| j / z).collect()
}

/// The penalized weighted objective from products of the model's
/// probabilities.
pub fn oracle_objective(model: &GenerativeModel, labeled: &[Document], unlabeled: &[Document], lambda: f64) -> f64 {
    let mut total = 0.0;
    for d in labeled {
        total += oracle_joint(model, d, d.label().unwrap()).ln();
    }
    for d in unlabeled {
        let marginal: f64 = model.classes().iter().map(|c| oracle_joint(model, d, c)).sum();
        total += lambda * marginal.ln();
    }
    let mut penalty = 0.0;
    for c in model.classes() {
        penalty += model.prior(c).unwrap().ln();
        for w in model.vocab().words() {
            penalty += model.conditional(c, w).unwrap().unwrap().ln();
        }
    }
    total + model.alpha() * penalty
}

/// Every multiset of words of length `1..=max_len` over `vocab_size` words,
/// as a document.
pub fn all_documents(vocab_size: usize, max_len: usize) -> Vec<Document> {
    fn rec(start: usize, vocab_size: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        if left == 0 {
            return;
        }
        for w in start..vocab_size {
            cur.push(w);
            rec(w, vocab_size, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, vocab_size, max_len, &mut Vec::new(), &mut out);
    out.into_iter()
        .enumerate()
        .map(|(i, ws)| Document::new(format!("e{i}"), ws.into_iter().map(word)))
        .collect()
}

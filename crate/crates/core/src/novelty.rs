//! Open-set decisions: does a document fit any known class, and if not,
//! create a new class for it.

use crate::corpus::{build_vocabulary, Document};
use crate::error::{Error, Result};
use crate::model::{population_mean_std, train_with_classes, GenerativeModel};
use crate::store::{ClassOrigin, ClassRegistry};

pub const DEFAULT_THRESHOLD: f64 = 0.5;
pub const DEFAULT_ZSCORE_K: f64 = 3.0;
pub const SPAWNED_PREFIX: &str = "novel-";

/// Acceptable interval `mean ± k·std` of a numeric attribute.
#[derive(Debug, Clone, PartialEq)]
pub struct AttributeRange {
    pub attribute: String,
    pub mean: f64,
    pub std: f64,
    pub k: f64,
    pub low: f64,
    pub high: f64,
}

impl AttributeRange {
    pub fn new(attribute: impl Into<String>, mean: f64, std: f64, k: f64) -> Self {
        AttributeRange {
            attribute: attribute.into(),
            mean,
            std,
            k,
            low: mean - k * std,
            high: mean + k * std,
        }
    }

    pub fn contains(&self, value: f64) -> bool {
        value >= self.low && value <= self.high
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Known(String),
    Novel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoveltyDecision {
    pub verdict: Verdict,
    pub max_posterior: f64,
    /// Class with the highest posterior, whether or not it was accepted.
    pub best_class: String,
    pub out_of_range_attributes: Vec<String>,
    pub threshold: f64,
}

impl NoveltyDecision {
    pub fn is_novel(&self) -> bool {
        self.verdict == Verdict::Novel
    }
}

/// The decision rule: known iff the best posterior reaches the threshold and
/// every attribute is in range.
pub fn verdict_for(best_class: &str, max_posterior: f64, out_of_range: &[String], threshold: f64) -> Verdict {
    if max_posterior >= threshold && out_of_range.is_empty() {
        Verdict::Known(best_class.to_owned())
    } else {
        Verdict::Novel
    }
}

/// Population z-score interval of `values`. Zero spread gives `[mean, mean]`.
pub fn zscore_bounds(attribute: &str, values: &[f64], k: f64) -> Result<AttributeRange> {
    if k.is_nan() || k <= 0.0 {
        return Err(Error::InvalidConfig(format!("k must be positive, got {k}")));
    }
    let stats = population_mean_std(values).ok_or(Error::EmptyValues)?;
    Ok(AttributeRange::new(attribute, stats.mean, stats.std, k))
}

/// Ranges for every numeric attribute whose pooled statistics the model
/// carries.
pub fn ranges_from_model(model: &GenerativeModel, k: f64) -> Vec<AttributeRange> {
    model
        .attribute_stats()
        .iter()
        .map(|(name, s)| AttributeRange::new(name.clone(), s.mean, s.std, k))
        .collect()
}

/// Names of the document's numeric attributes lying strictly outside their
/// range. Attributes missing from the document are skipped.
pub fn check_ranges(doc: &Document, ranges: &[AttributeRange]) -> Vec<String> {
    ranges
        .iter()
        .filter(|r| {
            doc.attributes()
                .get(&r.attribute)
                .and_then(|v| v.as_number())
                .is_some_and(|v| !r.contains(v))
        })
        .map(|r| r.attribute.clone())
        .collect()
}

pub fn detect_novel(
    model: &GenerativeModel,
    doc: &Document,
    threshold: f64,
    ranges: &[AttributeRange],
) -> Result<NoveltyDecision> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "novelty threshold must lie in (0, 1), got {threshold}"
        )));
    }
    let post = model.posterior(doc);
    let out_of_range_attributes = check_ranges(doc, ranges);
    Ok(NoveltyDecision {
        verdict: verdict_for(&post.argmax_class, post.max_prob, &out_of_range_attributes, threshold),
        max_posterior: post.max_prob,
        best_class: post.argmax_class,
        out_of_range_attributes,
        threshold,
    })
}

/// Next free `novel-<n>` name, where `n` is one more than the number of
/// classes the registry already spawned.
pub fn next_spawned_name(registry: &ClassRegistry) -> String {
    let spawned = registry
        .entries()
        .iter()
        .filter(|e| e.origin == ClassOrigin::Spawned)
        .count();
    let mut n = spawned + 1;
    loop {
        let name = format!("{SPAWNED_PREFIX}{n}");
        if !registry.contains(&name) {
            return name;
        }
        n += 1;
    }
}

/// Create a class for `novel_docs`, register it, and retrain over the
/// enlarged class set.
///
/// The vocabulary is rebuilt over `training ∪ novel_docs` so the new class
/// has words of its own. Returns the new model and the new class name.
pub fn spawn_class(
    model: &GenerativeModel,
    training: &[Document],
    novel_docs: &[Document],
    registry: &mut ClassRegistry,
) -> Result<(GenerativeModel, String)> {
    if novel_docs.is_empty() {
        return Err(Error::NoDocuments);
    }
    let name = next_spawned_name(registry);
    let relabeled: Vec<Document> = novel_docs
        .iter()
        .map(|d| d.unlabeled().with_label(name.clone()))
        .collect();
    let mut corpus: Vec<Document> = training.to_vec();
    corpus.extend(relabeled);

    let mut classes: Vec<String> = model.classes().to_vec();
    classes.push(name.clone());
    let vocab = build_vocabulary(&corpus)?;
    let retrained = train_with_classes(&corpus, &classes, &vocab, model.alpha())?;
    registry.push(&name, ClassOrigin::Spawned)?;
    Ok((retrained, name))
}

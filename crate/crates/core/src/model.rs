//! Multinomial naive Bayes over a fixed vocabulary, kept entirely in log
//! space.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::corpus::{Document, Vocabulary};
use crate::error::{Error, Result};

/// Tolerance used when validating externally supplied parameters.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

pub const DEFAULT_ALPHA: f64 = 1.0;

/// Pooled population mean and standard deviation of a numeric attribute.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttributeStats {
    pub mean: f64,
    pub std: f64,
}

/// Population mean and standard deviation. `None` for an empty slice.
pub fn population_mean_std(values: &[f64]) -> Option<AttributeStats> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    Some(AttributeStats { mean, std: var.sqrt() })
}

/// `log(sum(exp(xs)))` with the max shifted out. Returns `-inf` for an empty
/// slice.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Class priors and per-class word conditionals.
///
/// Classes are kept in lexicographic order and every lookup goes through
/// that order, so ties and iteration are deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerativeModel {
    classes: Vec<String>,
    log_priors: Vec<f64>,
    log_conditionals: Vec<Vec<f64>>,
    vocab: Arc<Vocabulary>,
    smoothing_alpha: f64,
    attribute_stats: BTreeMap<String, AttributeStats>,
}

/// Posterior class distribution of one document.
#[derive(Debug, Clone, PartialEq)]
pub struct Posterior {
    pub per_class: BTreeMap<String, f64>,
    pub argmax_class: String,
    pub max_prob: f64,
}

impl Posterior {
    /// Normalize per-class log joints. `classes` must be sorted; the first
    /// class attaining the largest log joint wins ties.
    pub fn from_log_joints(classes: &[String], log_joints: &[f64]) -> Posterior {
        let probs = normalize_log_joints(log_joints);
        let best = argmax(log_joints);
        Posterior {
            per_class: classes.iter().cloned().zip(probs.iter().copied()).collect(),
            argmax_class: classes[best].clone(),
            max_prob: probs[best],
        }
    }

    pub fn prob(&self, class: &str) -> Option<f64> {
        self.per_class.get(class).copied()
    }
}

pub(crate) fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate().skip(1) {
        if x > xs[best] {
            best = i;
        }
    }
    best
}

/// Exponentiate log joints against their log-sum-exp and renormalize.
pub(crate) fn normalize_log_joints(log_joints: &[f64]) -> Vec<f64> {
    let lse = log_sum_exp(log_joints);
    let mut probs: Vec<f64> = log_joints.iter().map(|l| (l - lse).exp()).collect();
    let total: f64 = probs.iter().sum();
    for p in &mut probs {
        *p /= total;
    }
    probs
}

/// Weighted counts from which priors and conditionals are estimated.
#[derive(Debug, Clone)]
pub(crate) struct SufficientStats {
    class_weight: Vec<f64>,
    word_weight: Vec<Vec<f64>>,
}

impl SufficientStats {
    pub(crate) fn new(n_classes: usize, n_words: usize) -> Self {
        SufficientStats {
            class_weight: vec![0.0; n_classes],
            word_weight: vec![vec![0.0; n_words]; n_classes],
        }
    }

    pub(crate) fn add(&mut self, class: usize, bag: &[(usize, f64)], weight: f64) {
        if weight == 0.0 {
            return;
        }
        self.class_weight[class] += weight;
        let row = &mut self.word_weight[class];
        for &(w, n) in bag {
            row[w] += weight * n;
        }
    }

    /// Additive-smoothing estimate: `(count + alpha) / sum(count + alpha)`.
    pub(crate) fn estimate(
        &self,
        classes: Vec<String>,
        vocab: Arc<Vocabulary>,
        alpha: f64,
        attribute_stats: BTreeMap<String, AttributeStats>,
    ) -> GenerativeModel {
        let log_priors = smoothed_log_probs(&self.class_weight, alpha);
        let log_conditionals = self
            .word_weight
            .iter()
            .map(|row| smoothed_log_probs(row, alpha))
            .collect();
        GenerativeModel {
            classes,
            log_priors,
            log_conditionals,
            vocab,
            smoothing_alpha: alpha,
            attribute_stats,
        }
    }
}

fn smoothed_log_probs(counts: &[f64], alpha: f64) -> Vec<f64> {
    let total: f64 = counts.iter().map(|c| c + alpha).sum();
    let log_total = total.ln();
    counts.iter().map(|c| (c + alpha).ln() - log_total).collect()
}

/// Pooled statistics of every numeric attribute carried by `docs`.
pub fn pooled_attribute_stats<'a, I>(docs: I) -> BTreeMap<String, AttributeStats>
where
    I: IntoIterator<Item = &'a Document>,
{
    let mut values: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for doc in docs {
        for (name, value) in doc.attributes() {
            if let Some(v) = value.as_number() {
                values.entry(name.clone()).or_default().push(v);
            }
        }
    }
    values
        .into_iter()
        .filter_map(|(k, v)| population_mean_std(&v).map(|s| (k, s)))
        .collect()
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!(
            "smoothing alpha must be positive, got {alpha}"
        )))
    }
}

/// Estimate a model from labeled documents; the class set is the set of
/// labels present.
pub fn train_supervised(labeled: &[Document], vocab: &Vocabulary, alpha: f64) -> Result<GenerativeModel> {
    let classes: BTreeSet<String> = labeled.iter().filter_map(|d| d.label().map(str::to_owned)).collect();
    train_with_classes(labeled, &classes.into_iter().collect::<Vec<_>>(), vocab, alpha)
}

/// Estimate a model over an explicit class set. Classes without documents
/// get the smoothing mass only.
pub fn train_with_classes(
    labeled: &[Document],
    classes: &[String],
    vocab: &Vocabulary,
    alpha: f64,
) -> Result<GenerativeModel> {
    check_alpha(alpha)?;
    if labeled.is_empty() || classes.is_empty() {
        return Err(Error::NoLabeledData);
    }
    if vocab.is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    let classes = sorted_unique(classes);
    let vocab = Arc::new(vocab.clone());
    let mut stats = SufficientStats::new(classes.len(), vocab.len());
    for doc in labeled {
        let label = doc
            .label()
            .ok_or_else(|| Error::InsufficientData(format!("document `{}` has no label", doc.id())))?;
        let c = classes
            .binary_search_by(|x| x.as_str().cmp(label))
            .map_err(|_| Error::UnknownClass(label.to_owned()))?;
        stats.add(c, &vocab.bag(doc), 1.0);
    }
    Ok(stats.estimate(classes, vocab, alpha, pooled_attribute_stats(labeled)))
}

fn sorted_unique(classes: &[String]) -> Vec<String> {
    classes.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect()
}

impl GenerativeModel {
    /// Assemble a model from explicit log parameters, checking shapes,
    /// class order and normalization.
    pub fn from_parts(
        classes: Vec<String>,
        log_priors: Vec<f64>,
        log_conditionals: Vec<Vec<f64>>,
        vocab: Vocabulary,
        smoothing_alpha: f64,
        attribute_stats: BTreeMap<String, AttributeStats>,
    ) -> Result<Self> {
        check_alpha(smoothing_alpha)?;
        if classes.is_empty() {
            return Err(Error::NoLabeledData);
        }
        if classes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::DimensionMismatch(
                "classes must be unique and lexicographically ordered".into(),
            ));
        }
        if log_priors.len() != classes.len() || log_conditionals.len() != classes.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} classes, {} priors, {} conditional rows",
                classes.len(),
                log_priors.len(),
                log_conditionals.len()
            )));
        }
        if let Some(row) = log_conditionals.iter().find(|r| r.len() != vocab.len()) {
            return Err(Error::DimensionMismatch(format!(
                "conditional row of length {} for vocabulary of {}",
                row.len(),
                vocab.len()
            )));
        }
        let model = GenerativeModel {
            classes,
            log_priors,
            log_conditionals,
            vocab: Arc::new(vocab),
            smoothing_alpha,
            attribute_stats,
        };
        model.check_normalization(NORMALIZATION_TOLERANCE)?;
        Ok(model)
    }

    /// Largest deviation from 1 of the prior sum and of each conditional row sum.
    pub fn normalization_error(&self) -> f64 {
        let sum_exp = |xs: &[f64]| xs.iter().map(|x| x.exp()).sum::<f64>();
        let mut worst = (sum_exp(&self.log_priors) - 1.0).abs();
        for row in &self.log_conditionals {
            worst = worst.max((sum_exp(row) - 1.0).abs());
        }
        worst
    }

    pub fn check_normalization(&self, tolerance: f64) -> Result<()> {
        let all_finite = self.log_priors.iter().all(|x| x.is_finite() && *x <= 0.0)
            && self
                .log_conditionals
                .iter()
                .flatten()
                .all(|x| x.is_finite() && *x <= 0.0);
        let err = self.normalization_error();
        if all_finite && err <= tolerance {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!(
                "parameters are not normalized (error {err:e})"
            )))
        }
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn class_index(&self, class: &str) -> Option<usize> {
        self.classes.binary_search_by(|c| c.as_str().cmp(class)).ok()
    }

    pub fn log_priors(&self) -> &[f64] {
        &self.log_priors
    }

    /// Log conditionals of one class, aligned with the vocabulary.
    pub fn log_conditionals(&self, class_index: usize) -> &[f64] {
        &self.log_conditionals[class_index]
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub(crate) fn shared_vocab(&self) -> Arc<Vocabulary> {
        Arc::clone(&self.vocab)
    }

    pub fn alpha(&self) -> f64 {
        self.smoothing_alpha
    }

    pub fn attribute_stats(&self) -> &BTreeMap<String, AttributeStats> {
        &self.attribute_stats
    }

    pub fn with_attribute_stats(mut self, stats: BTreeMap<String, AttributeStats>) -> Self {
        self.attribute_stats = stats;
        self
    }

    pub fn prior(&self, class: &str) -> Result<f64> {
        let c = self.require_class(class)?;
        Ok(self.log_priors[c].exp())
    }

    /// `P(word | class)`, or `None` when the word is outside the vocabulary.
    pub fn conditional(&self, class: &str, word: &str) -> Result<Option<f64>> {
        let c = self.require_class(class)?;
        Ok(self.vocab.index_of(word).map(|w| self.log_conditionals[c][w].exp()))
    }

    fn require_class(&self, class: &str) -> Result<usize> {
        self.class_index(class)
            .ok_or_else(|| Error::UnknownClass(class.to_owned()))
    }

    pub(crate) fn log_joint_bag(&self, class: usize, bag: &[(usize, f64)]) -> f64 {
        let row = &self.log_conditionals[class];
        self.log_priors[class] + bag.iter().map(|&(w, n)| n * row[w]).sum::<f64>()
    }

    pub(crate) fn log_joints_bag(&self, bag: &[(usize, f64)]) -> Vec<f64> {
        (0..self.classes.len()).map(|c| self.log_joint_bag(c, bag)).collect()
    }

    /// `log P(doc, class)`, ignoring out-of-vocabulary tokens.
    pub fn log_joint(&self, doc: &Document, class: &str) -> Result<f64> {
        let c = self.require_class(class)?;
        Ok(self.log_joint_bag(c, &self.vocab.bag(doc)))
    }

    /// Log joints for every class, in class order.
    pub fn log_joints(&self, doc: &Document) -> Vec<f64> {
        self.log_joints_bag(&self.vocab.bag(doc))
    }

    /// Sum over documents of `log P(doc)`; a labeled document contributes
    /// its joint with the gold class instead of the marginal.
    pub fn marginal_log_likelihood(&self, docs: &[Document]) -> Result<f64> {
        let mut total = 0.0;
        for doc in docs {
            let bag = self.vocab.bag(doc);
            total += match doc.label() {
                Some(label) => self.log_joint_bag(self.require_class(label)?, &bag),
                None => log_sum_exp(&self.log_joints_bag(&bag)),
            };
        }
        Ok(total)
    }

    pub fn posterior(&self, doc: &Document) -> Posterior {
        Posterior::from_log_joints(&self.classes, &self.log_joints(doc))
    }

    /// Most probable class and the full posterior.
    pub fn classify(&self, doc: &Document) -> (String, Posterior) {
        let post = self.posterior(doc);
        (post.argmax_class.clone(), post)
    }
}

//! Semi-supervised expectation-maximization over labeled and unlabeled
//! documents.
//!
//! The objective tracked across iterations is the λ-weighted log-likelihood
//! plus the Dirichlet log-prior that additive smoothing corresponds to:
//!
//! ```text
//! ℓ_λ(θ) = Σ_labeled log P(d, y_d | θ)
//!        + λ Σ_unlabeled log Σ_c P(d, c | θ)
//!        + α (Σ_c log P(c) + Σ_c Σ_w log P(w | c))
//! ```
//!
//! The smoothed M-step is the exact maximizer of the expected version of this
//! quantity, so ℓ_λ never decreases from one iteration to the next.

use std::fmt::Write as _;
use std::sync::Arc;

use crate::corpus::{Document, Vocabulary};
use crate::error::{Error, Result};
use crate::model::{
    log_sum_exp, normalize_log_joints, pooled_attribute_stats, train_supervised, GenerativeModel, SufficientStats,
};

/// Absolute slack below which an objective decrease counts as rounding.
pub const MONOTONICITY_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct EmConfig {
    pub max_iterations: usize,
    /// Stop once the relative objective change drops below this.
    pub tolerance: f64,
    /// Weight of the unlabeled documents, in `[0, 1]`.
    pub lambda: f64,
    pub alpha: f64,
    pub seed: u64,
    /// Check `Q(θ(t+1) | θ(t)) ≥ Q(θ(t) | θ(t))` on every iteration.
    pub check_q: bool,
}

impl Default for EmConfig {
    fn default() -> Self {
        EmConfig {
            max_iterations: 100,
            tolerance: 1e-6,
            lambda: 1.0,
            alpha: 1.0,
            seed: 0,
            check_q: false,
        }
    }
}

impl EmConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(Error::InvalidConfig(format!(
                "lambda must lie in [0, 1], got {}",
                self.lambda
            )));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be at least 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "alpha must be positive, got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

/// Posterior class memberships of the unlabeled documents, one row per
/// document in input order.
#[derive(Debug, Clone, PartialEq)]
pub struct Responsibilities {
    classes: Vec<String>,
    doc_ids: Vec<String>,
    matrix: Vec<Vec<f64>>,
}

impl Responsibilities {
    /// Build from explicit rows; each row must have one entry per class.
    pub fn from_rows(classes: Vec<String>, doc_ids: Vec<String>, matrix: Vec<Vec<f64>>) -> Result<Self> {
        if doc_ids.len() != matrix.len() || matrix.iter().any(|r| r.len() != classes.len()) {
            return Err(Error::DimensionMismatch(format!(
                "{} ids, {} rows, {} classes",
                doc_ids.len(),
                matrix.len(),
                classes.len()
            )));
        }
        Ok(Responsibilities {
            classes,
            doc_ids,
            matrix,
        })
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn doc_ids(&self) -> &[String] {
        &self.doc_ids
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.matrix
    }

    pub fn len(&self) -> usize {
        self.matrix.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrix.is_empty()
    }

    pub fn get(&self, row: usize, class: &str) -> Option<f64> {
        let c = self.classes.iter().position(|x| x == class)?;
        self.matrix.get(row).map(|r| r[c])
    }

    /// Largest absolute entry difference; `None` when shapes differ.
    pub fn max_abs_change(&self, other: &Responsibilities) -> Option<f64> {
        if self.classes != other.classes || self.matrix.len() != other.matrix.len() {
            return None;
        }
        Some(
            self.matrix
                .iter()
                .zip(&other.matrix)
                .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
                .fold(0.0, f64::max),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub iteration: usize,
    pub objective: f64,
    /// `None` on the initial row, which has no previous E-step.
    pub max_resp_change: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EmTrace {
    pub rows: Vec<TraceRow>,
    pub converged: bool,
}

impl EmTrace {
    pub fn final_objective(&self) -> Option<f64> {
        self.rows.last().map(|r| r.objective)
    }

    /// Number of E/M iterations performed (the initial row is not counted).
    pub fn iterations(&self) -> usize {
        self.rows.len().saturating_sub(1)
    }

    /// `iteration,objective,max_resp_change` with LF endings; the change
    /// column is empty on the initial row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iteration,objective,max_resp_change\n");
        for r in &self.rows {
            let _ = write!(out, "{},{}", r.iteration, r.objective);
            match r.max_resp_change {
                Some(c) => {
                    let _ = writeln!(out, ",{c}");
                }
                None => out.push_str(",\n"),
            }
        }
        out
    }
}

/// Documents reduced to sparse bags over a fixed vocabulary.
struct PreparedCorpus {
    labeled: Vec<(usize, Vec<(usize, f64)>)>,
    unlabeled: Vec<Vec<(usize, f64)>>,
}

impl PreparedCorpus {
    fn new(classes: &[String], vocab: &Vocabulary, labeled: &[Document], unlabeled: &[Document]) -> Result<Self> {
        let labeled = labeled
            .iter()
            .map(|d| {
                let label = d
                    .label()
                    .ok_or_else(|| Error::InsufficientData(format!("document `{}` has no label", d.id())))?;
                let c = classes
                    .binary_search_by(|x| x.as_str().cmp(label))
                    .map_err(|_| Error::UnknownClass(label.to_owned()))?;
                Ok((c, vocab.bag(d)))
            })
            .collect::<Result<_>>()?;
        let unlabeled = unlabeled.iter().map(|d| vocab.bag(d)).collect();
        Ok(PreparedCorpus { labeled, unlabeled })
    }

    fn responsibilities(&self, model: &GenerativeModel) -> Vec<Vec<f64>> {
        self.unlabeled
            .iter()
            .map(|bag| normalize_log_joints(&model.log_joints_bag(bag)))
            .collect()
    }

    fn m_step(
        &self,
        classes: &[String],
        vocab: Arc<Vocabulary>,
        resp: &[Vec<f64>],
        lambda: f64,
        alpha: f64,
        attribute_stats: std::collections::BTreeMap<String, crate::model::AttributeStats>,
    ) -> GenerativeModel {
        let mut stats = SufficientStats::new(classes.len(), vocab.len());
        for (c, bag) in &self.labeled {
            stats.add(*c, bag, 1.0);
        }
        if lambda > 0.0 {
            for (bag, row) in self.unlabeled.iter().zip(resp) {
                for (c, r) in row.iter().enumerate() {
                    stats.add(c, bag, lambda * r);
                }
            }
        }
        stats.estimate(classes.to_vec(), vocab, alpha, attribute_stats)
    }

    fn objective(&self, model: &GenerativeModel, lambda: f64) -> f64 {
        let labeled: f64 = self.labeled.iter().map(|(c, bag)| model.log_joint_bag(*c, bag)).sum();
        let unlabeled: f64 = if lambda > 0.0 {
            self.unlabeled
                .iter()
                .map(|bag| log_sum_exp(&model.log_joints_bag(bag)))
                .sum()
        } else {
            0.0
        };
        labeled + lambda * unlabeled + log_prior_penalty(model)
    }

    fn q_value(&self, candidate: &GenerativeModel, resp: &[Vec<f64>], lambda: f64) -> f64 {
        let labeled: f64 = self
            .labeled
            .iter()
            .map(|(c, bag)| candidate.log_joint_bag(*c, bag))
            .sum();
        let expected: f64 = self
            .unlabeled
            .iter()
            .zip(resp)
            .map(|(bag, row)| {
                row.iter()
                    .enumerate()
                    .filter(|(_, r)| **r > 0.0)
                    .map(|(c, r)| r * candidate.log_joint_bag(c, bag))
                    .sum::<f64>()
            })
            .sum();
        labeled + lambda * expected + log_prior_penalty(candidate)
    }
}

/// `α (Σ_c log P(c) + Σ_c Σ_w log P(w | c))`, the log-density of the
/// Dirichlet prior whose MAP estimate is additive smoothing with `α`, up to
/// a constant.
pub fn log_prior_penalty(model: &GenerativeModel) -> f64 {
    let priors: f64 = model.log_priors().iter().sum();
    let conds: f64 = (0..model.classes().len())
        .map(|c| model.log_conditionals(c).iter().sum::<f64>())
        .sum();
    model.alpha() * (priors + conds)
}

/// Posterior of every unlabeled document under `model`.
pub fn e_step(model: &GenerativeModel, unlabeled: &[Document]) -> Responsibilities {
    let vocab = model.vocab();
    Responsibilities {
        classes: model.classes().to_vec(),
        doc_ids: unlabeled.iter().map(|d| d.id().to_owned()).collect(),
        matrix: unlabeled
            .iter()
            .map(|d| normalize_log_joints(&model.log_joints_bag(&vocab.bag(d))))
            .collect(),
    }
}

/// Re-estimate the model: each labeled document adds weight 1 to its gold
/// class, each unlabeled document adds `λ · resp(d, c)` to class `c`.
pub fn m_step(
    labeled: &[Document],
    unlabeled: &[Document],
    resp: &Responsibilities,
    vocab: &Vocabulary,
    config: &EmConfig,
) -> Result<GenerativeModel> {
    config.validate()?;
    if resp.len() != unlabeled.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} responsibility rows for {} unlabeled documents",
            resp.len(),
            unlabeled.len()
        )));
    }
    if labeled.is_empty() && unlabeled.is_empty() {
        return Err(Error::NoDocuments);
    }
    let corpus = PreparedCorpus::new(resp.classes(), vocab, labeled, unlabeled)?;
    Ok(corpus.m_step(
        resp.classes(),
        Arc::new(vocab.clone()),
        resp.rows(),
        config.lambda,
        config.alpha,
        pooled_attribute_stats(labeled),
    ))
}

/// The penalized λ-weighted log-likelihood `ℓ_λ` of `model`.
pub fn weighted_objective(
    model: &GenerativeModel,
    labeled: &[Document],
    unlabeled: &[Document],
    lambda: f64,
) -> Result<f64> {
    let corpus = PreparedCorpus::new(model.classes(), model.vocab(), labeled, unlabeled)?;
    Ok(corpus.objective(model, lambda))
}

/// Expected complete-data log-likelihood of `candidate` under the
/// responsibilities of `current`, plus the smoothing penalty.
pub fn q_function(
    candidate: &GenerativeModel,
    current: &GenerativeModel,
    labeled: &[Document],
    unlabeled: &[Document],
    lambda: f64,
) -> Result<f64> {
    if candidate.classes() != current.classes() || candidate.vocab() != current.vocab() {
        return Err(Error::ClassSetMismatch);
    }
    let corpus = PreparedCorpus::new(current.classes(), current.vocab(), labeled, unlabeled)?;
    let resp = corpus.responsibilities(current);
    Ok(corpus.q_value(candidate, &resp, lambda))
}

/// Initialize from the labeled documents, then alternate E and M steps until
/// the relative objective change drops below `config.tolerance` or
/// `config.max_iterations` is reached.
///
/// Labels on `unlabeled` documents are ignored.
pub fn em_fit(
    labeled: &[Document],
    unlabeled: &[Document],
    vocab: &Vocabulary,
    config: &EmConfig,
) -> Result<(GenerativeModel, EmTrace)> {
    config.validate()?;
    if labeled.is_empty() {
        return Err(Error::NoLabeledData);
    }
    let mut model = train_supervised(labeled, vocab, config.alpha)?;
    let classes = model.classes().to_vec();
    let shared_vocab = model.shared_vocab();
    let attribute_stats = model.attribute_stats().clone();
    let corpus = PreparedCorpus::new(&classes, vocab, labeled, unlabeled)?;

    let mut objective = corpus.objective(&model, config.lambda);
    let mut trace = EmTrace {
        rows: vec![TraceRow {
            iteration: 0,
            objective,
            max_resp_change: None,
        }],
        converged: false,
    };
    let mut previous_resp: Option<Vec<Vec<f64>>> = None;

    for iteration in 1..=config.max_iterations {
        let resp = corpus.responsibilities(&model);
        let next = corpus.m_step(
            &classes,
            Arc::clone(&shared_vocab),
            &resp,
            config.lambda,
            config.alpha,
            attribute_stats.clone(),
        );
        if config.check_q {
            let q_next = corpus.q_value(&next, &resp, config.lambda);
            let q_now = corpus.q_value(&model, &resp, config.lambda);
            if q_next < q_now - slack(q_now) {
                return Err(Error::QFunctionDecrease { iteration });
            }
        }
        let next_objective = corpus.objective(&next, config.lambda);
        if next_objective < objective - slack(objective) {
            return Err(Error::NonMonotoneObjective {
                iteration,
                previous: objective,
                current: next_objective,
            });
        }
        let max_resp_change = previous_resp.as_ref().map(|prev| {
            prev.iter()
                .zip(&resp)
                .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
                .fold(0.0, f64::max)
        });
        trace.rows.push(TraceRow {
            iteration,
            objective: next_objective,
            max_resp_change,
        });
        let relative_change = (next_objective - objective).abs() / objective.abs().max(f64::MIN_POSITIVE);
        model = next;
        objective = next_objective;
        previous_resp = Some(resp);
        if relative_change < config.tolerance {
            trace.converged = true;
            break;
        }
    }
    Ok((model, trace))
}

/// Rounding allowance for the monotonicity guard: the absolute slack, scaled
/// up for objectives large enough that summation error exceeds it.
fn slack(objective: f64) -> f64 {
    MONOTONICITY_SLACK * objective.abs().max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::GenerativeModel;

    fn doc(id: &str, tokens: &[&str]) -> Document {
        Document::new(id, tokens.iter().copied())
    }

    fn vocab(words: &[&str]) -> Vocabulary {
        Vocabulary::from_entries(words.iter().map(|w| (w.to_string(), 1, 2))).unwrap()
    }

    fn toy() -> (Vec<Document>, Vec<Document>, Vocabulary) {
        let labeled = vec![
            doc("l1", &["a", "a", "b"]).with_label("x"),
            doc("l2", &["c", "c", "b"]).with_label("y"),
        ];
        let unlabeled = vec![doc("u1", &["a", "a"]), doc("u2", &["c"]), doc("u3", &["a", "c", "b"])];
        (labeled, unlabeled, vocab(&["a", "b", "c"]))
    }

    #[test]
    fn config_validation() {
        assert!(EmConfig::default().validate().is_ok());
        for bad in [
            EmConfig {
                lambda: 1.5,
                ..Default::default()
            },
            EmConfig {
                lambda: -0.1,
                ..Default::default()
            },
            EmConfig {
                tolerance: 0.0,
                ..Default::default()
            },
            EmConfig {
                max_iterations: 0,
                ..Default::default()
            },
            EmConfig {
                alpha: 0.0,
                ..Default::default()
            },
        ] {
            assert!(bad.validate().is_err(), "{bad:?}");
        }
    }

    #[test]
    fn e_step_on_nothing_is_empty() {
        let (labeled, _, v) = toy();
        let m = train_supervised(&labeled, &v, 1.0).unwrap();
        assert!(e_step(&m, &[]).is_empty());
    }

    #[test]
    fn symmetric_model_gives_even_responsibilities() {
        let row = vec![(1.0f64 / 3.0).ln(); 3];
        let m = GenerativeModel::from_parts(
            vec!["x".into(), "y".into()],
            vec![(0.5f64).ln(); 2],
            vec![row.clone(), row],
            vocab(&["a", "b", "c"]),
            1.0,
            Default::default(),
        )
        .unwrap();
        let (_, unlabeled, _) = toy();
        for row in e_step(&m, &unlabeled).rows() {
            assert_eq!(row, &vec![0.5, 0.5]);
        }
    }

    #[test]
    fn m_step_dimension_mismatch() {
        let (labeled, unlabeled, v) = toy();
        let m = train_supervised(&labeled, &v, 1.0).unwrap();
        let resp = e_step(&m, &unlabeled[..2]);
        assert!(matches!(
            m_step(&labeled, &unlabeled, &resp, &v, &EmConfig::default()),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn m_step_fractional_counts_by_hand() {
        // one labeled doc [a] in x, one unlabeled doc [b] split evenly
        let v = vocab(&["a", "b"]);
        let labeled = vec![doc("l", &["a"]).with_label("x")];
        let unlabeled = vec![doc("u", &["b"])];
        let resp =
            Responsibilities::from_rows(vec!["x".into(), "y".into()], vec!["u".into()], vec![vec![0.5, 0.5]]).unwrap();
        let m = m_step(&labeled, &unlabeled, &resp, &v, &EmConfig::default()).unwrap();
        // class weights x = 1.5, y = 0.5 -> priors 2.5/4, 1.5/4
        assert!((m.prior("x").unwrap() - 2.5 / 4.0).abs() < 1e-15);
        assert!((m.prior("y").unwrap() - 1.5 / 4.0).abs() < 1e-15);
        // x: a = 1, b = 0.5 -> (2, 1.5) / 3.5 ; y: a = 0, b = 0.5 -> (1, 1.5) / 2.5
        assert!((m.conditional("x", "a").unwrap().unwrap() - 2.0 / 3.5).abs() < 1e-15);
        assert!((m.conditional("x", "b").unwrap().unwrap() - 1.5 / 3.5).abs() < 1e-15);
        assert!((m.conditional("y", "a").unwrap().unwrap() - 1.0 / 2.5).abs() < 1e-15);
        assert!((m.conditional("y", "b").unwrap().unwrap() - 1.5 / 2.5).abs() < 1e-15);
    }

    #[test]
    fn zero_unlabeled_is_supervised_after_one_iteration() {
        let (labeled, _, v) = toy();
        let (m, trace) = em_fit(&labeled, &[], &v, &EmConfig::default()).unwrap();
        assert_eq!(m, train_supervised(&labeled, &v, 1.0).unwrap());
        assert_eq!(trace.iterations(), 1);
        assert!(trace.converged);
    }

    #[test]
    fn lambda_zero_ignores_unlabeled() {
        let (labeled, unlabeled, v) = toy();
        let cfg = EmConfig {
            lambda: 0.0,
            ..Default::default()
        };
        let (m, _) = em_fit(&labeled, &unlabeled, &v, &cfg).unwrap();
        assert_eq!(m, train_supervised(&labeled, &v, 1.0).unwrap());
    }

    #[test]
    fn objective_degenerate_cases() {
        let (labeled, unlabeled, v) = toy();
        let m = train_supervised(&labeled, &v, 1.0).unwrap();
        let penalty = log_prior_penalty(&m);
        assert_eq!(weighted_objective(&m, &[], &[], 1.0).unwrap(), penalty);
        let labeled_only = weighted_objective(&m, &labeled, &[], 1.0).unwrap();
        assert_eq!(weighted_objective(&m, &labeled, &unlabeled, 0.0).unwrap(), labeled_only);
        assert!((labeled_only - penalty - m.marginal_log_likelihood(&labeled).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn q_function_degenerate_cases() {
        let (labeled, unlabeled, v) = toy();
        let m = train_supervised(&labeled, &v, 1.0).unwrap();
        let q = q_function(&m, &m, &labeled, &[], 1.0).unwrap();
        assert_eq!(q, weighted_objective(&m, &labeled, &[], 1.0).unwrap());

        let other = train_supervised(&[doc("z", &["a"]).with_label("z")], &v, 1.0).unwrap();
        assert!(matches!(
            q_function(&other, &m, &labeled, &unlabeled, 1.0),
            Err(Error::ClassSetMismatch)
        ));
    }

    #[test]
    fn q_improves_after_m_step() {
        let (labeled, unlabeled, v) = toy();
        let cfg = EmConfig::default();
        let m = train_supervised(&labeled, &v, 1.0).unwrap();
        let next = m_step(&labeled, &unlabeled, &e_step(&m, &unlabeled), &v, &cfg).unwrap();
        let q_next = q_function(&next, &m, &labeled, &unlabeled, 1.0).unwrap();
        let q_now = q_function(&m, &m, &labeled, &unlabeled, 1.0).unwrap();
        assert!(q_next >= q_now, "{q_next} < {q_now}");
    }

    #[test]
    fn trace_is_monotone_and_exports_csv() {
        let (labeled, unlabeled, v) = toy();
        let cfg = EmConfig {
            check_q: true,
            ..Default::default()
        };
        let (_, trace) = em_fit(&labeled, &unlabeled, &v, &cfg).unwrap();
        assert!(trace.converged);
        for w in trace.rows.windows(2) {
            assert!(w[1].objective >= w[0].objective - MONOTONICITY_SLACK);
        }
        let csv = trace.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("iteration,objective,max_resp_change"));
        assert!(lines.next().unwrap().starts_with("0,") && csv.lines().nth(1).unwrap().ends_with(','));
        assert_eq!(csv.lines().count(), trace.rows.len() + 1);
    }

    #[test]
    fn no_labeled_data_is_an_error() {
        let (_, unlabeled, v) = toy();
        assert!(matches!(
            em_fit(&[], &unlabeled, &v, &EmConfig::default()),
            Err(Error::NoLabeledData)
        ));
    }
}

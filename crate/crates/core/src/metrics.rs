//! Confusion counts, accuracy / precision / recall / F1, and the
//! supervised-versus-semi-supervised comparison sweep.
//!
//! Zero-denominator conventions: a class with no gold instances and no
//! predictions scores 1 for precision and recall; otherwise an undefined
//! ratio scores 0. F1 is 0 whenever precision + recall is 0.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::corpus::{build_vocabulary, Document};
use crate::em::{em_fit, EmConfig};
use crate::error::{Error, Result};
use crate::model::{train_supervised, GenerativeModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ClassCounts {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    pub tn: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionCounts {
    pub per_class: BTreeMap<String, ClassCounts>,
    pub total: u64,
}

impl ConfusionCounts {
    pub fn correct(&self) -> u64 {
        self.per_class.values().map(|c| c.tp).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub accuracy: f64,
    pub per_class: BTreeMap<String, ClassScores>,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub counts: ConfusionCounts,
}

/// One-vs-rest tallies for each class in `classes`.
pub fn tally<S: AsRef<str>>(predictions: &[(S, S)], classes: &[String]) -> Result<ConfusionCounts> {
    let mut per_class: BTreeMap<String, ClassCounts> =
        classes.iter().map(|c| (c.clone(), ClassCounts::default())).collect();
    for (gold, pred) in predictions {
        for name in [gold.as_ref(), pred.as_ref()] {
            if !per_class.contains_key(name) {
                return Err(Error::UnknownClass(name.to_owned()));
            }
        }
    }
    let total = predictions.len() as u64;
    for (class, counts) in per_class.iter_mut() {
        for (gold, pred) in predictions {
            let (g, p) = (gold.as_ref() == class, pred.as_ref() == class);
            match (g, p) {
                (true, true) => counts.tp += 1,
                (true, false) => counts.fn_ += 1,
                (false, true) => counts.fp += 1,
                (false, false) => counts.tn += 1,
            }
        }
    }
    Ok(ConfusionCounts { per_class, total })
}

pub fn accuracy(counts: &ConfusionCounts) -> Result<f64> {
    if counts.total == 0 {
        return Err(Error::EmptyEvaluation);
    }
    Ok(counts.correct() as f64 / counts.total as f64)
}

pub fn precision_recall_f1(counts: &ConfusionCounts, class: &str) -> Result<ClassScores> {
    let c = counts
        .per_class
        .get(class)
        .ok_or_else(|| Error::UnknownClass(class.to_owned()))?;
    Ok(scores(c))
}

/// Scores from raw counts. F1 is computed as `2tp / (2tp + fp + fn)`, which
/// equals `2pr / (p + r)` whenever both are defined and takes a single
/// rounding.
pub fn scores(c: &ClassCounts) -> ClassScores {
    let vacuous = c.tp == 0 && c.fp == 0 && c.fn_ == 0;
    if vacuous {
        return ClassScores {
            precision: 1.0,
            recall: 1.0,
            f1: 1.0,
        };
    }
    let ratio = |num: u64, den: u64| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    let precision = ratio(c.tp, c.tp + c.fp);
    let recall = ratio(c.tp, c.tp + c.fn_);
    let f1 = if c.tp == 0 {
        0.0
    } else {
        ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn_)
    };
    ClassScores { precision, recall, f1 }
}

pub fn report_from_counts(counts: ConfusionCounts) -> Result<MetricsReport> {
    let accuracy = accuracy(&counts)?;
    let per_class: BTreeMap<String, ClassScores> =
        counts.per_class.iter().map(|(k, c)| (k.clone(), scores(c))).collect();
    let n = per_class.len().max(1) as f64;
    let mean = |f: fn(&ClassScores) -> f64| per_class.values().map(f).sum::<f64>() / n;
    Ok(MetricsReport {
        accuracy,
        macro_precision: mean(|s| s.precision),
        macro_recall: mean(|s| s.recall),
        macro_f1: mean(|s| s.f1),
        per_class,
        counts,
    })
}

/// Classify every labeled test document and score the predictions. The
/// class set is the model's classes plus any gold label it lacks.
pub fn evaluate(model: &GenerativeModel, test: &[Document]) -> Result<MetricsReport> {
    if test.is_empty() {
        return Err(Error::EmptyEvaluation);
    }
    let mut classes: Vec<String> = model.classes().to_vec();
    let mut predictions = Vec::with_capacity(test.len());
    for doc in test {
        let gold = doc
            .label()
            .ok_or_else(|| Error::InsufficientData(format!("test document `{}` has no label", doc.id())))?;
        if !classes.iter().any(|c| c == gold) {
            classes.push(gold.to_owned());
        }
        predictions.push((gold.to_owned(), model.classify(doc).0));
    }
    classes.sort();
    report_from_counts(tally(&predictions, &classes)?)
}

impl MetricsReport {
    /// Human-readable summary.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "accuracy {:.4} ({} / {})",
            self.accuracy,
            self.counts.correct(),
            self.counts.total
        );
        let _ = writeln!(out, "{:<16} {:>9} {:>9} {:>9}", "class", "precision", "recall", "f1");
        for (class, s) in &self.per_class {
            let _ = writeln!(out, "{class:<16} {:>9.4} {:>9.4} {:>9.4}", s.precision, s.recall, s.f1);
        }
        let _ = writeln!(
            out,
            "{:<16} {:>9.4} {:>9.4} {:>9.4}",
            "macro", self.macro_precision, self.macro_recall, self.macro_f1
        );
        out
    }

    /// `class,precision,recall,f1,tp,fp,fn,tn` rows followed by a `macro`
    /// row and an `accuracy` row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("class,precision,recall,f1,tp,fp,fn,tn\n");
        for (class, s) in &self.per_class {
            let c = self.counts.per_class[class];
            let _ = writeln!(
                out,
                "{class},{},{},{},{},{},{},{}",
                s.precision, s.recall, s.f1, c.tp, c.fp, c.fn_, c.tn
            );
        }
        let _ = writeln!(
            out,
            "macro,{},{},{},,,,",
            self.macro_precision, self.macro_recall, self.macro_f1
        );
        let _ = writeln!(out, "accuracy,{},,,,,,", self.accuracy);
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonRow {
    pub n: usize,
    pub accuracy_supervised: f64,
    pub accuracy_semisupervised: f64,
    pub f1_supervised: f64,
    pub f1_semisupervised: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ComparisonTable {
    pub rows: Vec<ComparisonRow>,
}

impl ComparisonTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,accuracy_supervised,accuracy_semisupervised,f1_supervised,f1_semisupervised\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.n, r.accuracy_supervised, r.accuracy_semisupervised, r.f1_supervised, r.f1_semisupervised
            );
        }
        out
    }
}

/// For each `n` in `sizes`: a supervised model on the first `n` labeled
/// documents and an EM model on the same `n` plus all of `unlabeled`, both
/// scored on `test`.
///
/// The supervised vocabulary comes from the `n` labeled documents alone, so
/// that column does not depend on the unlabeled corpus; the EM vocabulary
/// also counts the unlabeled documents.
pub fn compare_runs(
    labeled: &[Document],
    unlabeled: &[Document],
    test: &[Document],
    sizes: &[usize],
    config: &EmConfig,
) -> Result<ComparisonTable> {
    config.validate()?;
    if sizes.is_empty() {
        return Err(Error::InsufficientData("empty size ladder".into()));
    }
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InsufficientData("sizes must be strictly ascending".into()));
    }
    if sizes[0] == 0 || *sizes.last().unwrap() > labeled.len() {
        return Err(Error::InsufficientData(format!(
            "sizes must lie in 1..={} (labeled documents available)",
            labeled.len()
        )));
    }
    let mut rows = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let train = &labeled[..n];
        let sup_vocab = build_vocabulary(train)?;
        let supervised = train_supervised(train, &sup_vocab, config.alpha)?;
        let sup = evaluate(&supervised, test)?;

        let mut all = train.to_vec();
        all.extend(unlabeled.iter().map(Document::unlabeled));
        let semi_vocab = build_vocabulary(&all)?;
        let (semi_model, _) = em_fit(train, unlabeled, &semi_vocab, config)?;
        let semi = evaluate(&semi_model, test)?;
        rows.push(ComparisonRow {
            n,
            accuracy_supervised: sup.accuracy,
            accuracy_semisupervised: semi.accuracy,
            f1_supervised: sup.macro_f1,
            f1_semisupervised: semi.macro_f1,
        });
    }
    Ok(ComparisonTable { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn classes(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn perfect_predictions() {
        let preds = vec![("c", "c"); 5];
        let counts = tally(&preds, &classes(&["c", "d"])).unwrap();
        assert_eq!(
            counts.per_class["c"],
            ClassCounts {
                tp: 5,
                fp: 0,
                fn_: 0,
                tn: 0
            }
        );
        assert_eq!(accuracy(&counts).unwrap(), 1.0);
    }

    #[test]
    fn hand_tally() {
        let preds = vec![("a", "a"), ("a", "b"), ("b", "b")];
        let counts = tally(&preds, &classes(&["a", "b"])).unwrap();
        assert_eq!(
            counts.per_class["a"],
            ClassCounts {
                tp: 1,
                fp: 0,
                fn_: 1,
                tn: 1
            }
        );
        assert_eq!(
            counts.per_class["b"],
            ClassCounts {
                tp: 1,
                fp: 1,
                fn_: 0,
                tn: 1
            }
        );
        for c in counts.per_class.values() {
            assert_eq!(c.tp + c.fp + c.fn_ + c.tn, counts.total);
        }
    }

    #[test]
    fn empty_and_unknown() {
        let counts = tally::<&str>(&[], &classes(&["a"])).unwrap();
        assert_eq!(counts.total, 0);
        assert_eq!(counts.per_class["a"], ClassCounts::default());
        assert!(matches!(accuracy(&counts), Err(Error::EmptyEvaluation)));
        assert!(matches!(
            tally(&[("a", "z")], &classes(&["a"])),
            Err(Error::UnknownClass(_))
        ));
    }

    #[test]
    fn score_conventions() {
        let s = scores(&ClassCounts {
            tp: 3,
            fp: 1,
            fn_: 2,
            tn: 0,
        });
        assert_eq!((s.precision, s.recall), (0.75, 0.6));
        assert!((s.f1 - 2.0 / 3.0).abs() < 1e-15);
        let s = scores(&ClassCounts::default());
        assert_eq!((s.precision, s.recall, s.f1), (1.0, 1.0, 1.0));
        let s = scores(&ClassCounts {
            tp: 0,
            fp: 5,
            fn_: 5,
            tn: 0,
        });
        assert_eq!((s.precision, s.recall, s.f1), (0.0, 0.0, 0.0));
        let s = scores(&ClassCounts {
            tp: 0,
            fp: 0,
            fn_: 4,
            tn: 2,
        });
        assert_eq!((s.precision, s.recall, s.f1), (0.0, 0.0, 0.0));
    }

    #[test]
    fn accuracy_half() {
        let mut preds = vec![("a", "a"); 750];
        preds.extend(vec![("a", "b"); 750]);
        let counts = tally(&preds, &classes(&["a", "b"])).unwrap();
        assert_eq!(accuracy(&counts).unwrap(), 0.5);
        let none = tally(&[("a", "b")], &classes(&["a", "b"])).unwrap();
        assert_eq!(accuracy(&none).unwrap(), 0.0);
    }

    #[test]
    fn report_csv_shape() {
        let counts = tally(&[("a", "a"), ("b", "a")], &classes(&["a", "b"])).unwrap();
        let report = report_from_counts(counts).unwrap();
        let csv = report.to_csv();
        assert_eq!(csv.lines().count(), 5);
        assert!(csv.ends_with("accuracy,0.5,,,,,,\n"));
        assert!(report.to_text().starts_with("accuracy 0.5000"));
    }
}

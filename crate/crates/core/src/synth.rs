//! Seeded generators for test and demo data: the car-evaluation table and
//! documents drawn from known multinomial class models.

use rand::distr::weighted::WeightedIndex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Normal};

use crate::corpus::{AttributeValue, CarRecord, Document};

pub const DEFAULT_ROWS: usize = 1500;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

struct CarClassProfile {
    label: &'static str,
    share: f64,
    buying: [f64; 4],
    maintenance: [f64; 4],
    safety: [f64; 3],
    price: (f64, f64),
    mileage: (f64, f64),
}

const LEVELS: [&str; 4] = ["low", "med", "high", "vhigh"];
const SAFETY: [&str; 3] = ["low", "med", "high"];

const CAR_PROFILES: [CarClassProfile; 3] = [
    CarClassProfile {
        label: "unacceptable",
        share: 0.5,
        buying: [0.10, 0.15, 0.35, 0.40],
        maintenance: [0.10, 0.20, 0.30, 0.40],
        safety: [0.60, 0.30, 0.10],
        price: (32.0, 6.0),
        mileage: (12.0, 3.0),
    },
    CarClassProfile {
        label: "good",
        share: 0.3,
        buying: [0.20, 0.40, 0.30, 0.10],
        maintenance: [0.25, 0.40, 0.25, 0.10],
        safety: [0.10, 0.50, 0.40],
        price: (22.0, 5.0),
        mileage: (18.0, 3.0),
    },
    CarClassProfile {
        label: "very good",
        share: 0.2,
        buying: [0.50, 0.35, 0.10, 0.05],
        maintenance: [0.45, 0.35, 0.15, 0.05],
        safety: [0.05, 0.20, 0.75],
        price: (15.0, 4.0),
        mileage: (24.0, 3.0),
    },
];

fn pick<'a, R: Rng, const N: usize>(rng: &mut R, values: &[&'a str; N], weights: &[f64; N]) -> &'a str {
    let idx = WeightedIndex::new(weights).expect("static weights are valid");
    values[idx.sample(rng)]
}

fn positive_int<R: Rng>(rng: &mut R, (mean, std): (f64, f64)) -> f64 {
    let n = Normal::new(mean, std).expect("static parameters are valid");
    n.sample(rng).round().max(1.0)
}

/// `rows` car records from fixed per-class distributions. Numeric fields are
/// whole numbers so that each renders as a single token.
pub fn generate_car_records(rows: usize, seed: u64) -> Vec<CarRecord> {
    let mut rng = rng(seed);
    let shares = WeightedIndex::new(CAR_PROFILES.iter().map(|p| p.share)).expect("static shares");
    (0..rows)
        .map(|_| {
            let p = &CAR_PROFILES[shares.sample(&mut rng)];
            CarRecord {
                buying: pick(&mut rng, &LEVELS, &p.buying).to_owned(),
                maintenance: pick(&mut rng, &LEVELS, &p.maintenance).to_owned(),
                price: positive_int(&mut rng, p.price),
                mileage: positive_int(&mut rng, p.mileage),
                safety: pick(&mut rng, &SAFETY, &p.safety).to_owned(),
                label: p.label.to_owned(),
            }
        })
        .collect()
}

/// Numeric attribute attached to every document of one class.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticAttribute {
    pub name: String,
    pub mean: f64,
    pub std: f64,
}

/// A known generative model to draw documents from.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticModel {
    pub classes: Vec<String>,
    pub priors: Vec<f64>,
    pub words: Vec<String>,
    /// `word_probs[c][w]`, each row summing to 1.
    pub word_probs: Vec<Vec<f64>>,
    /// Inclusive document length range.
    pub doc_len: (usize, usize),
    pub attributes: Vec<Option<SyntheticAttribute>>,
}

impl SyntheticModel {
    /// Classes `c0, c1, ...` over words `w00, w01, ...`. Each class mixes a
    /// shared background distribution with its own, both drawn from a
    /// symmetric Dirichlet(`concentration`); `specificity` in `[0, 1]` is
    /// the weight of the class-specific part.
    pub fn random(
        n_classes: usize,
        vocab_size: usize,
        concentration: f64,
        specificity: f64,
        doc_len: (usize, usize),
        seed: u64,
    ) -> Self {
        let mut rng = rng(seed);
        let background = dirichlet(&mut rng, vocab_size, concentration);
        let word_probs = (0..n_classes)
            .map(|_| {
                let own = dirichlet(&mut rng, vocab_size, concentration);
                own.iter()
                    .zip(&background)
                    .map(|(o, b)| specificity * o + (1.0 - specificity) * b)
                    .collect()
            })
            .collect();
        SyntheticModel {
            classes: (0..n_classes).map(|c| format!("c{c}")).collect(),
            priors: vec![1.0 / n_classes as f64; n_classes],
            words: (0..vocab_size).map(|w| format!("w{w:02}")).collect(),
            word_probs,
            doc_len,
            attributes: vec![None; n_classes],
        }
    }

    /// Classes with pairwise disjoint vocabularies of `words_per_class`
    /// words each, uniform within a class.
    pub fn disjoint(n_classes: usize, words_per_class: usize, doc_len: (usize, usize)) -> Self {
        let total = n_classes * words_per_class;
        let words = (0..n_classes)
            .flat_map(|c| (0..words_per_class).map(move |w| format!("c{c}w{w:02}")))
            .collect();
        let word_probs = (0..n_classes)
            .map(|c| {
                let mut row = vec![0.0; total];
                row[c * words_per_class..(c + 1) * words_per_class].fill(1.0 / words_per_class as f64);
                row
            })
            .collect();
        SyntheticModel {
            classes: (0..n_classes).map(|c| format!("c{c}")).collect(),
            priors: vec![1.0 / n_classes as f64; n_classes],
            words,
            word_probs,
            doc_len,
            attributes: vec![None; n_classes],
        }
    }

    pub fn with_attribute(mut self, class: usize, name: &str, mean: f64, std: f64) -> Self {
        self.attributes[class] = Some(SyntheticAttribute {
            name: name.to_owned(),
            mean,
            std,
        });
        self
    }

    /// One labeled document of class `class`.
    pub fn sample_doc<R: Rng>(&self, rng: &mut R, class: usize, id: String) -> Document {
        let len = rng.random_range(self.doc_len.0..=self.doc_len.1);
        let words = WeightedIndex::new(&self.word_probs[class]).expect("class distribution is valid");
        let tokens: Vec<&str> = (0..len).map(|_| self.words[words.sample(rng)].as_str()).collect();
        let mut doc = Document::new(id, tokens).with_label(self.classes[class].clone());
        if let Some(attr) = &self.attributes[class] {
            let v = Normal::new(attr.mean, attr.std)
                .expect("valid attribute spread")
                .sample(rng);
            doc.set_attribute(attr.name.clone(), AttributeValue::Number(v));
        }
        doc
    }

    /// `n` documents with classes drawn from the priors.
    pub fn sample<R: Rng>(&self, rng: &mut R, n: usize, prefix: &str) -> Vec<Document> {
        let classes = WeightedIndex::new(&self.priors).expect("priors are valid");
        (0..n)
            .map(|i| {
                let c = classes.sample(rng);
                self.sample_doc(rng, c, format!("{prefix}-{i:05}"))
            })
            .collect()
    }

    /// `n` documents cycling through the classes, for stratified labeled sets.
    pub fn sample_balanced<R: Rng>(&self, rng: &mut R, n: usize, prefix: &str) -> Vec<Document> {
        (0..n)
            .map(|i| self.sample_doc(rng, i % self.classes.len(), format!("{prefix}-{i:05}")))
            .collect()
    }

    /// `n` documents of one class.
    pub fn sample_class<R: Rng>(&self, rng: &mut R, class: usize, n: usize, prefix: &str) -> Vec<Document> {
        (0..n)
            .map(|i| self.sample_doc(rng, class, format!("{prefix}-{i:05}")))
            .collect()
    }
}

fn dirichlet<R: Rng>(rng: &mut R, k: usize, concentration: f64) -> Vec<f64> {
    let gamma = Gamma::new(concentration, 1.0).expect("positive concentration");
    let draws: Vec<f64> = (0..k).map(|_| gamma.sample(rng).max(1e-12)).collect();
    let total: f64 = draws.iter().sum();
    draws.into_iter().map(|d| d / total).collect()
}

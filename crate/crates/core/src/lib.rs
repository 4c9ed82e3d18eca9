//! Semi-supervised document classification with expectation-maximization.
//!
//! A multinomial naive Bayes model is first trained on a small labeled
//! corpus, then refined by EM over a larger unlabeled corpus. Documents that
//! fit no known class can spawn a new class at classification time.
//!
//! | module      | contents                                                    |
//! |-------------|-------------------------------------------------------------|
//! | [`corpus`]  | validation, tokenization, vocabulary, word sets, car data   |
//! | [`model`]   | priors, conditionals, posteriors, classification            |
//! | [`em`]      | E-step, M-step, penalized objective, Q-function, `em_fit`   |
//! | [`novelty`] | z-score ranges, novelty decisions, class spawning           |
//! | [`metrics`] | confusion counts, accuracy/precision/recall/F1, comparison |
//! | [`store`]   | model files, class registry                                 |
//! | [`cli`]     | the `ssemc` command                                         |
//!
//! ```
//! use ssemc::corpus::{build_vocabulary, Document};
//! use ssemc::em::{em_fit, EmConfig};
//!
//! let labeled = vec![
//!     Document::new("l1", ["cheap", "safe", "cheap"]).with_label("good"),
//!     Document::new("l2", ["pricey", "unsafe", "pricey"]).with_label("bad"),
//! ];
//! let unlabeled = vec![
//!     Document::new("u1", ["cheap", "safe", "safe"]),
//!     Document::new("u2", ["unsafe", "pricey"]),
//! ];
//! let mut all = labeled.clone();
//! all.extend(unlabeled.iter().cloned());
//! let vocab = build_vocabulary(&all).unwrap();
//! let (model, trace) = em_fit(&labeled, &unlabeled, &vocab, &EmConfig::default()).unwrap();
//! assert!(trace.converged);
//! assert_eq!(model.classify(&Document::new("q", ["safe"])).0, "good");
//! ```

pub mod cli;
pub mod config;
pub mod corpus;
pub mod em;
pub mod error;
pub mod metrics;
pub mod model;
pub mod novelty;
pub mod store;
pub mod synth;

pub use error::{Error, Result};

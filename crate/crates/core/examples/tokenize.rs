//! Validate and tokenize raw documents, build a vocabulary and per-class
//! word sets.
//!
//!     cargo run --example tokenize

use std::path::Path;

use ssemc::corpus::{
    build_vocabulary, build_word_sets, domain_check, match_word_sets, tokenize, validate_document, Stopwords,
};
use ssemc::model::train_supervised;

fn main() -> ssemc::Result<()> {
    let stop = Stopwords::default();
    let texts = [
        ("a.txt", "The buying price is LOW and the safety is high.", "very good"),
        (
            "b.txt",
            "Buying price high, maintenance very high, safety low.",
            "unacceptable",
        ),
        ("c.txt", "Low buying price; safety high; maintenance low.", "very good"),
        (
            "d.txt",
            "Maintenance high and safety low for this high price.",
            "unacceptable",
        ),
    ];
    let mut docs = Vec::new();
    for (name, body, label) in texts {
        let raw = validate_document(Path::new(name), body.as_bytes())?;
        let doc = tokenize(&raw, &stop).with_label(label);
        println!("{name}: {:?}", doc.tokens());
        docs.push(doc);
    }

    if let Err(e) = validate_document(Path::new("scan.pdf"), b"buying low") {
        println!("rejected: {e}");
    }

    let vocab = build_vocabulary(&docs)?;
    println!("\nvocabulary ({} words):", vocab.len());
    for w in vocab.words() {
        println!(
            "  {w:<12} df={} cf={}",
            vocab.doc_frequency(w).unwrap(),
            vocab.corpus_frequency(w).unwrap()
        );
    }

    let model = train_supervised(&docs, &vocab, 1.0)?;
    let sets = build_word_sets(&docs, &vocab, &model)?;
    let query = tokenize(
        &validate_document(Path::new("q.txt"), b"safety high, buying price low")?,
        &stop,
    );
    println!("\nquery {:?}", query.tokens());
    for m in match_word_sets(&query, &sets) {
        println!("  shares {:?} with `{}`", m.words, m.class_name);
    }

    let lexicon = vocab.words().iter().cloned().collect();
    let weather = tokenize(
        &validate_document(Path::new("w.txt"), b"sunny and warm tomorrow")?,
        &stop,
    );
    println!(
        "\nin domain? query={} weather={}",
        domain_check(&query, &lexicon, 1),
        domain_check(&weather, &lexicon, 1)
    );
    Ok(())
}

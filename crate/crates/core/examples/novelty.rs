//! Flag documents that fit no known class and give them a class of their
//! own.
//!
//!     cargo run --example novelty

use ssemc::corpus::{build_vocabulary, Document};
use ssemc::model::train_supervised;
use ssemc::novelty::{detect_novel, ranges_from_model, spawn_class, DEFAULT_THRESHOLD, DEFAULT_ZSCORE_K};
use ssemc::store::ClassRegistry;
use ssemc::synth::{rng, SyntheticModel};

fn main() -> ssemc::Result<()> {
    let truth = SyntheticModel::disjoint(3, 20, (8, 16))
        .with_attribute(0, "size", 10.0, 1.0)
        .with_attribute(1, "size", 12.0, 1.0)
        .with_attribute(2, "size", 40.0, 1.0);
    let mut r = rng(5);
    let mut train = truth.sample_class(&mut r, 0, 50, "a");
    train.extend(truth.sample_class(&mut r, 1, 50, "b"));
    let vocab = build_vocabulary(&train)?;
    let model = train_supervised(&train, &vocab, 1.0)?;
    let ranges = ranges_from_model(&model, DEFAULT_ZSCORE_K);
    for range in &ranges {
        println!("{} in [{:.2}, {:.2}]", range.attribute, range.low, range.high);
    }

    let known = truth.sample_class(&mut r, 1, 3, "k");
    let novel = truth.sample_class(&mut r, 2, 10, "n");
    for doc in known.iter().chain(&novel[..3]) {
        let d = detect_novel(&model, doc, DEFAULT_THRESHOLD, &ranges)?;
        println!(
            "{}: {:?} (best {} p={:.3}, out of range {:?})",
            doc.id(),
            d.verdict,
            d.best_class,
            d.max_posterior,
            d.out_of_range_attributes
        );
    }

    let flagged: Vec<Document> = novel
        .iter()
        .filter(|d| detect_novel(&model, d, DEFAULT_THRESHOLD, &ranges).is_ok_and(|x| x.is_novel()))
        .cloned()
        .collect();
    let mut registry = ClassRegistry::with_classes(model.classes().iter().cloned());
    let (grown, name) = spawn_class(&model, &train, &flagged, &mut registry)?;
    println!(
        "\nspawned `{name}` from {} documents; classes now {:?}",
        flagged.len(),
        grown.classes()
    );
    for doc in &novel[..3] {
        println!("{} -> {}", doc.id(), grown.classify(doc).0);
    }
    Ok(())
}

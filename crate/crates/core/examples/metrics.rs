//! Confusion counts, per-class scores and a model evaluation report.
//!
//!     cargo run --example metrics

use ssemc::corpus::{build_vocabulary, Document};
use ssemc::metrics::{accuracy, evaluate, precision_recall_f1, tally};
use ssemc::model::train_supervised;

fn main() -> ssemc::Result<()> {
    let classes = vec!["a".to_string(), "b".to_string(), "c".to_string()];
    let predictions = [("a", "a"), ("a", "b"), ("b", "b"), ("b", "b"), ("c", "a")];
    let counts = tally(&predictions, &classes)?;
    println!("accuracy {:.3}", accuracy(&counts)?);
    for class in &classes {
        let c = counts.per_class[class];
        let s = precision_recall_f1(&counts, class)?;
        println!(
            "{class}: tp={} fp={} fn={} tn={}  p={:.3} r={:.3} f1={:.3}",
            c.tp, c.fp, c.fn_, c.tn, s.precision, s.recall, s.f1
        );
    }

    let train = vec![
        Document::new("1", ["cheap", "safe", "cheap"]).with_label("buy"),
        Document::new("2", ["safe", "roomy"]).with_label("buy"),
        Document::new("3", ["pricey", "unsafe"]).with_label("skip"),
        Document::new("4", ["unsafe", "rusty", "pricey"]).with_label("skip"),
    ];
    let test = vec![
        Document::new("t1", ["cheap", "roomy"]).with_label("buy"),
        Document::new("t2", ["rusty", "unsafe"]).with_label("skip"),
        Document::new("t3", ["pricey", "safe", "safe"]).with_label("skip"),
    ];
    let model = train_supervised(&train, &build_vocabulary(&train)?, 1.0)?;
    let report = evaluate(&model, &test)?;
    print!("\n{}", report.to_text());
    print!("\n{}", report.to_csv());
    Ok(())
}

//! The car-evaluation workflow end to end: generate a dataset, split it,
//! keep a few labels, train with EM and score the held-out half.
//!
//!     cargo run --release --example car_pipeline

use ssemc::corpus::{build_vocabulary, render_records, split_dataset, Document};
use ssemc::em::{em_fit, EmConfig};
use ssemc::metrics::evaluate;
use ssemc::model::train_supervised;
use ssemc::synth::{generate_car_records, DEFAULT_ROWS};

fn main() -> ssemc::Result<()> {
    let records = generate_car_records(DEFAULT_ROWS, 7);
    let (train, test) = split_dataset(&records, 7);
    println!("{} records: {} train, {} test", records.len(), train.len(), test.len());

    let mut labeled = render_records(&train, "train");
    let unlabeled: Vec<Document> = labeled.split_off(40).iter().map(Document::unlabeled).collect();
    let test = render_records(&test, "test");
    println!("example document: {:?}", labeled[0].tokens());

    let mut all = labeled.clone();
    all.extend(unlabeled.iter().cloned());
    let vocab = build_vocabulary(&all)?;

    let supervised = train_supervised(&labeled, &vocab, 1.0)?;
    let (semi, trace) = em_fit(&labeled, &unlabeled, &vocab, &EmConfig::default())?;
    println!(
        "EM: {} iterations, objective {:.3}",
        trace.iterations(),
        trace.final_objective().unwrap()
    );

    println!(
        "\nsupervised ({} labeled):\n{}",
        labeled.len(),
        evaluate(&supervised, &test)?.to_text()
    );
    println!(
        "semi-supervised (+{} unlabeled):\n{}",
        unlabeled.len(),
        evaluate(&semi, &test)?.to_text()
    );
    Ok(())
}

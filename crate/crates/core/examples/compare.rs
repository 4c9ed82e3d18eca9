//! Supervised against semi-supervised accuracy and F1 as the labeled set
//! grows.
//!
//!     cargo run --release --example compare

use ssemc::corpus::Document;
use ssemc::em::EmConfig;
use ssemc::metrics::compare_runs;
use ssemc::synth::{rng, SyntheticModel};

fn main() -> ssemc::Result<()> {
    let truth = SyntheticModel::random(3, 80, 0.8, 0.5, (10, 30), 9);
    let mut r = rng(9);
    let labeled = truth.sample_balanced(&mut r, 200, "l");
    let unlabeled: Vec<Document> = truth
        .sample(&mut r, 1000, "u")
        .iter()
        .map(Document::unlabeled)
        .collect();
    let test = truth.sample(&mut r, 600, "t");

    let table = compare_runs(
        &labeled,
        &unlabeled,
        &test,
        &[6, 12, 25, 50, 100, 200],
        &EmConfig::default(),
    )?;
    print!("{}", table.to_csv());
    Ok(())
}

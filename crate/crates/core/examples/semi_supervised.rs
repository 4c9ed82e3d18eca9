//! Refine a model with unlabeled documents by EM and print the objective
//! trace next to the supervised baseline.
//!
//!     cargo run --example semi_supervised

use ssemc::corpus::{build_vocabulary, Document};
use ssemc::em::{em_fit, EmConfig};
use ssemc::metrics::evaluate;
use ssemc::model::train_supervised;
use ssemc::synth::{rng, SyntheticModel};

fn main() -> ssemc::Result<()> {
    let truth = SyntheticModel::random(2, 50, 1.0, 0.5, (10, 30), 21);
    let mut r = rng(1);
    let labeled = truth.sample_balanced(&mut r, 10, "l");
    let unlabeled: Vec<Document> = truth.sample(&mut r, 500, "u").iter().map(Document::unlabeled).collect();
    let test = truth.sample(&mut r, 500, "t");

    let mut all = labeled.clone();
    all.extend(unlabeled.iter().cloned());
    let vocab = build_vocabulary(&all)?;

    let supervised = train_supervised(&labeled, &vocab, 1.0)?;
    let config = EmConfig {
        check_q: true,
        ..EmConfig::default()
    };
    let (model, trace) = em_fit(&labeled, &unlabeled, &vocab, &config)?;

    print!("{}", trace.to_csv());
    println!("converged={} after {} iterations", trace.converged, trace.iterations());
    println!("supervised accuracy      {:.3}", evaluate(&supervised, &test)?.accuracy);
    println!("semi-supervised accuracy {:.3}", evaluate(&model, &test)?.accuracy);

    // Down-weighting the unlabeled documents interpolates between the two.
    for lambda in [0.0, 0.1, 0.5] {
        let (m, _) = em_fit(
            &labeled,
            &unlabeled,
            &vocab,
            &EmConfig {
                lambda,
                ..EmConfig::default()
            },
        )?;
        println!("lambda {lambda:<4} accuracy {:.3}", evaluate(&m, &test)?.accuracy);
    }
    Ok(())
}

//! Train a multinomial naive Bayes model from labeled documents and look at
//! its parameters and posteriors.
//!
//!     cargo run --example supervised

use ssemc::corpus::{build_vocabulary, Document};
use ssemc::model::train_supervised;

fn main() -> ssemc::Result<()> {
    let labeled = vec![
        Document::new("s1", ["goal", "match", "team", "goal"]).with_label("sport"),
        Document::new("s2", ["team", "coach", "match"]).with_label("sport"),
        Document::new("s3", ["goal", "coach", "league"]).with_label("sport"),
        Document::new("p1", ["vote", "party", "election"]).with_label("politics"),
        Document::new("p2", ["party", "minister", "vote", "vote"]).with_label("politics"),
    ];
    let vocab = build_vocabulary(&labeled)?;
    let model = train_supervised(&labeled, &vocab, 1.0)?;

    for class in model.classes() {
        print!("{class:<9} prior {:.3} |", model.prior(class)?);
        for w in vocab.words() {
            print!(" {w}={:.3}", model.conditional(class, w)?.unwrap());
        }
        println!();
    }

    for tokens in [&["goal", "team"][..], &["vote", "party", "goal"], &["weather"]] {
        let doc = Document::new("q", tokens.iter().copied());
        let (class, post) = model.classify(&doc);
        println!("{tokens:?} -> {class} ({:?})", post.per_class);
    }
    Ok(())
}

//! Save and reload a model bit-for-bit, and grow the class registry on disk.
//!
//!     cargo run --example persistence

use ssemc::corpus::{build_vocabulary, Document};
use ssemc::model::train_supervised;
use ssemc::store::{append_class, load_model, load_registry_or_default, model_to_string, save_model, ClassOrigin};

fn main() -> ssemc::Result<()> {
    let dir = std::env::temp_dir().join(format!("ssemc-persistence-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| ssemc::Error::Io {
        path: dir.clone(),
        source: e,
    })?;

    let docs = vec![
        Document::new("1", ["low", "price", "low"]).with_label("good"),
        Document::new("2", ["high", "price", "high"]).with_label("unacceptable"),
    ];
    let model = train_supervised(&docs, &build_vocabulary(&docs)?, 0.5)?;
    let path = dir.join("model.ssemc");
    save_model(&model, &path)?;
    print!("{}", model_to_string(&model));
    let back = load_model(&path)?;
    println!("round trip identical: {}", back == model);

    let registry_path = dir.join("registry.csv");
    let registry = load_registry_or_default(&registry_path)?;
    let registry = append_class(&registry, "novel-1", ClassOrigin::Spawned, &registry_path)?;
    println!("\nregistry: {:?}", registry.names());
    let _ = std::fs::remove_dir_all(&dir);
    Ok(())
}

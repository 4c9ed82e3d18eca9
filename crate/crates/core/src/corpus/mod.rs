//! Document ingestion: validation, tokenization, vocabulary and word sets,
//! plus the car-evaluation dataset.

mod car;
mod document;
mod split;
mod stopwords;
mod vocabulary;

pub use car::{
    car_dataset_to_string, car_lexicon, load_car_dataset, read_car_dataset, render_record, render_records,
    write_car_dataset, CarRecord, LabelPolicy, CAR_ATTRIBUTES, CAR_HEADER, NUMERIC_ATTRIBUTES, PREDEFINED_CLASSES,
};
pub use document::{
    domain_check, extract_numeric_attributes, load_document, tokenize, tokenize_text, validate_document,
    AttributeValue, Document, RawDocument,
};
pub use split::split_dataset;
pub use stopwords::Stopwords;
pub use vocabulary::{
    build_vocabulary, build_word_sets, match_word_sets, Vocabulary, WordSet, WordSetMatch, MIN_CORPUS_FREQUENCY,
};

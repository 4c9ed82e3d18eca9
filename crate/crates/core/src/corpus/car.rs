//! The tabular car-evaluation dataset and its bridge into documents.

use std::collections::BTreeSet;
use std::path::Path;

use crate::corpus::document::{tokenize_text, AttributeValue, Document};
use crate::corpus::stopwords::Stopwords;
use crate::error::{Error, Result};

/// Column order of the dataset file.
pub const CAR_HEADER: [&str; 6] = ["buying", "maintenance", "price", "mileage", "safety", "class"];

/// The five attributes, in rendering order.
pub const CAR_ATTRIBUTES: [&str; 5] = ["buying", "maintenance", "price", "mileage", "safety"];

pub const NUMERIC_ATTRIBUTES: [&str; 2] = ["price", "mileage"];

/// Classes every registry starts with.
pub const PREDEFINED_CLASSES: [&str; 3] = ["unacceptable", "good", "very good"];

#[derive(Debug, Clone, PartialEq)]
pub struct CarRecord {
    pub buying: String,
    pub maintenance: String,
    pub price: f64,
    pub mileage: f64,
    pub safety: String,
    pub label: String,
}

/// Label checking applied while loading.
#[derive(Debug, Clone, Default)]
pub enum LabelPolicy {
    /// Accept any label.
    #[default]
    Lenient,
    /// Reject labels outside the given class list.
    Strict(Vec<String>),
}

fn parse_number(field: &str, name: &str, line: u64) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::Parse {
            line,
            message: format!("{name}: `{field}` is not a decimal number"),
        })
}

/// Parse a dataset from any reader. Line numbers in errors are 1-based and
/// count the header.
pub fn read_car_dataset<R: std::io::Read>(reader: R, policy: &LabelPolicy) -> Result<Vec<CarRecord>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let header = rdr.headers().map_err(|e| Error::Parse {
        line: 1,
        message: e.to_string(),
    })?;
    let names: Vec<String> = header.iter().map(|h| h.trim().to_lowercase()).collect();
    if names != CAR_HEADER {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header `{}`", CAR_HEADER.join(",")),
        });
    }
    let mut records = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = row.position().map_or(0, |p| p.line());
        if row.len() != CAR_HEADER.len() {
            return Err(Error::Parse {
                line,
                message: format!("expected {} fields, found {}", CAR_HEADER.len(), row.len()),
            });
        }
        let cat = |i: usize| row[i].trim().to_lowercase();
        let label = cat(5);
        if let LabelPolicy::Strict(classes) = policy {
            if !classes.contains(&label) {
                return Err(Error::UnknownLabel { line, label });
            }
        }
        records.push(CarRecord {
            buying: cat(0),
            maintenance: cat(1),
            price: parse_number(&row[2], "price", line)?,
            mileage: parse_number(&row[3], "mileage", line)?,
            safety: cat(4),
            label,
        });
    }
    Ok(records)
}

pub fn load_car_dataset(path: &Path, policy: &LabelPolicy) -> Result<Vec<CarRecord>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_car_dataset(std::io::BufReader::new(file), policy)
}

/// Serialize records as CSV text with the canonical header and LF endings.
pub fn car_dataset_to_string(records: &[CarRecord]) -> String {
    let mut out = CAR_HEADER.join(",");
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.buying, r.maintenance, r.price, r.mileage, r.safety, r.label
        ));
    }
    out
}

pub fn write_car_dataset(path: &Path, records: &[CarRecord]) -> Result<()> {
    std::fs::write(path, car_dataset_to_string(records)).map_err(|e| Error::io(path, e))
}

/// Render a record as `buying <v> maintenance <v> price <v> mileage <v>
/// safety <v>` and tokenize it. The document keeps the label and all five
/// attribute values.
pub fn render_record(rec: &CarRecord, id: impl Into<String>) -> Document {
    let text = format!(
        "buying {} maintenance {} price {} mileage {} safety {}",
        rec.buying, rec.maintenance, rec.price, rec.mileage, rec.safety
    );
    Document::new(id, tokenize_text(&text, &Stopwords::empty()))
        .with_label(rec.label.clone())
        .with_attribute("buying", AttributeValue::Text(rec.buying.clone()))
        .with_attribute("maintenance", AttributeValue::Text(rec.maintenance.clone()))
        .with_attribute("price", AttributeValue::Number(rec.price))
        .with_attribute("mileage", AttributeValue::Number(rec.mileage))
        .with_attribute("safety", AttributeValue::Text(rec.safety.clone()))
}

/// Render a list of records with ids `<prefix>-<position>`.
pub fn render_records(records: &[CarRecord], prefix: &str) -> Vec<Document> {
    records
        .iter()
        .enumerate()
        .map(|(i, r)| render_record(r, format!("{prefix}-{i:05}")))
        .collect()
}

/// Attribute names plus the tokens of every attribute value seen in `records`.
pub fn car_lexicon(records: &[CarRecord]) -> BTreeSet<String> {
    let mut lexicon: BTreeSet<String> = CAR_ATTRIBUTES.iter().map(|s| s.to_string()).collect();
    for r in records {
        let values = format!("{} {} {} {} {}", r.buying, r.maintenance, r.price, r.mileage, r.safety);
        lexicon.extend(tokenize_text(&values, &Stopwords::empty()));
    }
    lexicon
}

//! Flat-file persistence for models and the class registry.
//!
//! Model file layout (UTF-8, LF, tab-separated fields):
//!
//! ```text
//! ssemc-model v1
//! alpha <hex>
//! classes <n>
//! <class name>\t<hex log prior>            (n lines)
//! vocabulary <m>
//! <word>\t<doc freq>\t<corpus freq>        (m lines, lexicographic)
//! conditionals <class name>                (once per class)
//! <word>\t<hex log conditional>            (m lines)
//! attributes <k>
//! <name>\t<hex mean>\t<hex std>            (k lines)
//! ```
//!
//! Every real number is written as a hexadecimal float so that loading
//! reproduces the exact bits.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::{DateTime, SecondsFormat, Utc};

use crate::corpus::{Vocabulary, PREDEFINED_CLASSES};
use crate::error::{Error, Result};
use crate::model::{AttributeStats, GenerativeModel};

pub const MODEL_VERSION_LINE: &str = "ssemc-model v1";

/// Format an `f64` as a C99-style hexadecimal float (`0x1.8p-1`).
pub fn format_hex_float(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { "-" } else { "" };
    let exponent = ((bits >> 52) & 0x7ff) as i64;
    let mantissa = bits & ((1u64 << 52) - 1);
    if exponent == 0 && mantissa == 0 {
        return format!("{sign}0x0p+0");
    }
    let (lead, exp) = if exponent == 0 {
        (0, -1022)
    } else {
        (1, exponent - 1023)
    };
    let mut frac = format!("{mantissa:013x}");
    while frac.ends_with('0') {
        frac.pop();
    }
    let exp_sign = if exp < 0 { '-' } else { '+' };
    if frac.is_empty() {
        format!("{sign}0x{lead}p{exp_sign}{}", exp.abs())
    } else {
        format!("{sign}0x{lead}.{frac}p{exp_sign}{}", exp.abs())
    }
}

/// Parse the output of [`format_hex_float`]. Only the normalized forms it
/// produces are accepted.
pub fn parse_hex_float(s: &str) -> Option<f64> {
    match s {
        "nan" => return Some(f64::NAN),
        "inf" => return Some(f64::INFINITY),
        "-inf" => return Some(f64::NEG_INFINITY),
        _ => {}
    }
    let (negative, rest) = match s.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, s),
    };
    let rest = rest.strip_prefix("0x")?;
    let (significand, exp) = rest.split_once('p')?;
    let exp: i64 = exp.parse().ok()?;
    let (lead, frac) = match significand.split_once('.') {
        Some((l, f)) if !f.is_empty() => (l, f),
        Some(_) => return None,
        None => (significand, ""),
    };
    if frac.len() > 13 || !frac.bytes().all(|b| b.is_ascii_hexdigit()) {
        return None;
    }
    let mantissa = if frac.is_empty() {
        0
    } else {
        u64::from_str_radix(frac, 16).ok()? << (4 * (13 - frac.len()))
    };
    let magnitude = match lead {
        "1" => {
            let biased = exp + 1023;
            if !(1..=2046).contains(&biased) {
                return None;
            }
            ((biased as u64) << 52) | mantissa
        }
        "0" if mantissa == 0 && exp == 0 => 0,
        "0" if exp == -1022 => mantissa,
        _ => return None,
    };
    let sign = if negative { 1u64 << 63 } else { 0 };
    Some(f64::from_bits(sign | magnitude))
}

/// A write staged to a sibling temporary file, published by
/// [`StagedWrite::commit`]. Until then the target keeps its old content.
#[derive(Debug)]
pub struct StagedWrite {
    temp: PathBuf,
    target: PathBuf,
}

impl StagedWrite {
    pub fn stage(target: &Path, contents: &[u8]) -> Result<Self> {
        let temp = temp_path(target);
        let mut file = File::create(&temp).map_err(|e| Error::io(&temp, e))?;
        file.write_all(contents).map_err(|e| Error::io(&temp, e))?;
        file.sync_all().map_err(|e| Error::io(&temp, e))?;
        Ok(StagedWrite {
            temp,
            target: target.to_path_buf(),
        })
    }

    pub fn temp_path(&self) -> &Path {
        &self.temp
    }

    pub fn commit(self) -> Result<()> {
        std::fs::rename(&self.temp, &self.target).map_err(|e| Error::io(&self.target, e))
    }
}

fn temp_path(target: &Path) -> PathBuf {
    let mut name = target.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".tmp");
    target.with_file_name(name)
}

/// Write-temp-then-rename.
pub fn write_atomic(target: &Path, contents: &[u8]) -> Result<()> {
    StagedWrite::stage(target, contents)?.commit()
}

pub fn model_to_string(model: &GenerativeModel) -> String {
    let mut out = String::new();
    let vocab = model.vocab();
    out.push_str(MODEL_VERSION_LINE);
    out.push('\n');
    out.push_str(&format!("alpha {}\n", format_hex_float(model.alpha())));
    out.push_str(&format!("classes {}\n", model.classes().len()));
    for (name, lp) in model.classes().iter().zip(model.log_priors()) {
        out.push_str(&format!("{name}\t{}\n", format_hex_float(*lp)));
    }
    out.push_str(&format!("vocabulary {}\n", vocab.len()));
    for (i, w) in vocab.words().iter().enumerate() {
        let (df, cf) = vocab.frequencies_at(i);
        out.push_str(&format!("{w}\t{df}\t{cf}\n"));
    }
    for (c, name) in model.classes().iter().enumerate() {
        out.push_str(&format!("conditionals {name}\n"));
        for (w, lp) in vocab.words().iter().zip(model.log_conditionals(c)) {
            out.push_str(&format!("{w}\t{}\n", format_hex_float(*lp)));
        }
    }
    out.push_str(&format!("attributes {}\n", model.attribute_stats().len()));
    for (name, s) in model.attribute_stats() {
        out.push_str(&format!(
            "{name}\t{}\t{}\n",
            format_hex_float(s.mean),
            format_hex_float(s.std)
        ));
    }
    out
}

pub fn save_model(model: &GenerativeModel, path: &Path) -> Result<()> {
    write_atomic(path, model_to_string(model).as_bytes())
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn corrupt(&self, message: impl Into<String>) -> Error {
        Error::CorruptModel {
            line: self.line,
            message: message.into(),
        }
    }

    fn next_line(&mut self) -> Result<&'a str> {
        match self.inner.next() {
            Some((i, l)) => {
                self.line = i + 1;
                Ok(l)
            }
            None => {
                self.line += 1;
                Err(self.corrupt("unexpected end of file"))
            }
        }
    }

    /// `<keyword> <value>` header line.
    fn header(&mut self, keyword: &str) -> Result<&'a str> {
        let line = self.next_line()?;
        line.strip_prefix(keyword)
            .and_then(|r| r.strip_prefix(' '))
            .ok_or_else(|| self.corrupt(format!("expected `{keyword} ...`")))
    }

    fn count(&mut self, keyword: &str) -> Result<usize> {
        let v = self.header(keyword)?;
        v.parse()
            .map_err(|_| self.corrupt(format!("bad {keyword} count `{v}`")))
    }

    fn fields(&mut self, n: usize) -> Result<Vec<&'a str>> {
        let line = self.next_line()?;
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != n {
            return Err(self.corrupt(format!("expected {n} tab-separated fields")));
        }
        Ok(fields)
    }

    fn float(&self, s: &str) -> Result<f64> {
        parse_hex_float(s).ok_or_else(|| self.corrupt(format!("bad hex float `{s}`")))
    }

    fn int(&self, s: &str) -> Result<usize> {
        s.parse().map_err(|_| self.corrupt(format!("bad integer `{s}`")))
    }
}

pub fn model_from_str(text: &str) -> Result<GenerativeModel> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        line: 0,
    };
    let version = lines.next_line()?;
    if version != MODEL_VERSION_LINE {
        return Err(lines.corrupt(format!("unsupported version line `{version}`")));
    }
    let alpha_text = lines.header("alpha")?;
    let alpha = lines.float(alpha_text)?;

    let n_classes = lines.count("classes")?;
    let mut classes = Vec::with_capacity(n_classes);
    let mut log_priors = Vec::with_capacity(n_classes);
    for _ in 0..n_classes {
        let f = lines.fields(2)?;
        classes.push(f[0].to_owned());
        log_priors.push(lines.float(f[1])?);
    }

    let n_words = lines.count("vocabulary")?;
    let mut entries = Vec::with_capacity(n_words);
    for _ in 0..n_words {
        let f = lines.fields(3)?;
        entries.push((f[0].to_owned(), lines.int(f[1])?, lines.int(f[2])?));
    }
    if entries.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(lines.corrupt("vocabulary is not strictly lexicographic"));
    }
    let words: Vec<String> = entries.iter().map(|e| e.0.clone()).collect();
    let vocab = Vocabulary::from_entries(entries).map_err(|e| lines.corrupt(e.to_string()))?;

    let mut log_conditionals = Vec::with_capacity(n_classes);
    for class in &classes {
        let name = lines.header("conditionals")?;
        if name != class {
            return Err(lines.corrupt(format!("expected conditionals for `{class}`, found `{name}`")));
        }
        let mut row = Vec::with_capacity(n_words);
        for w in &words {
            let f = lines.fields(2)?;
            if f[0] != w {
                return Err(lines.corrupt(format!("expected word `{w}`, found `{}`", f[0])));
            }
            row.push(lines.float(f[1])?);
        }
        log_conditionals.push(row);
    }

    let n_attrs = lines.count("attributes")?;
    let mut attribute_stats = BTreeMap::new();
    for _ in 0..n_attrs {
        let f = lines.fields(3)?;
        let stats = AttributeStats {
            mean: lines.float(f[1])?,
            std: lines.float(f[2])?,
        };
        attribute_stats.insert(f[0].to_owned(), stats);
    }
    if let Some((i, extra)) = lines.inner.next() {
        if !extra.is_empty() {
            return Err(Error::CorruptModel {
                line: i + 1,
                message: "trailing content".into(),
            });
        }
    }
    let end = lines.line;
    GenerativeModel::from_parts(classes, log_priors, log_conditionals, vocab, alpha, attribute_stats).map_err(|e| {
        Error::CorruptModel {
            line: end,
            message: e.to_string(),
        }
    })
}

pub fn load_model(path: &Path) -> Result<GenerativeModel> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    model_from_str(&text)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassOrigin {
    Predefined,
    Spawned,
}

impl ClassOrigin {
    pub fn as_str(self) -> &'static str {
        match self {
            ClassOrigin::Predefined => "predefined",
            ClassOrigin::Spawned => "spawned",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegistryEntry {
    pub name: String,
    pub origin: ClassOrigin,
    pub created_at: DateTime<Utc>,
}

/// Ordered list of known classes with unique names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassRegistry {
    entries: Vec<RegistryEntry>,
}

impl Default for ClassRegistry {
    /// The three predefined car classes.
    fn default() -> Self {
        Self::with_classes(PREDEFINED_CLASSES)
    }
}

fn check_class_name(name: &str) -> Result<()> {
    if name.trim().is_empty() || name.contains([',', '\n', '\r', '\t']) {
        Err(Error::InvalidConfig(format!("invalid class name `{name}`")))
    } else {
        Ok(())
    }
}

impl ClassRegistry {
    /// Predefined classes stamped with the Unix epoch, so the default
    /// registry is reproducible.
    pub fn with_classes<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut entries: Vec<RegistryEntry> = Vec::new();
        for name in names {
            let name = name.into();
            if entries.iter().all(|e| e.name != name) {
                entries.push(RegistryEntry {
                    name,
                    origin: ClassOrigin::Predefined,
                    created_at: DateTime::UNIX_EPOCH,
                });
            }
        }
        ClassRegistry { entries }
    }

    pub fn entries(&self) -> &[RegistryEntry] {
        &self.entries
    }

    pub fn names(&self) -> Vec<String> {
        self.entries.iter().map(|e| e.name.clone()).collect()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.iter().any(|e| e.name == name)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Append in memory only.
    pub fn push(&mut self, name: &str, origin: ClassOrigin) -> Result<()> {
        check_class_name(name)?;
        if self.contains(name) {
            return Err(Error::DuplicateClass(name.to_owned()));
        }
        // second precision keeps the file format round-trippable
        let now = DateTime::from_timestamp(Utc::now().timestamp(), 0).unwrap_or(DateTime::UNIX_EPOCH);
        self.entries.push(RegistryEntry {
            name: name.to_owned(),
            origin,
            created_at: now,
        });
        Ok(())
    }

    /// One `name,origin,created_at` line per class.
    pub fn to_file_string(&self) -> String {
        self.entries
            .iter()
            .map(|e| {
                format!(
                    "{},{},{}\n",
                    e.name,
                    e.origin.as_str(),
                    e.created_at.to_rfc3339_opts(SecondsFormat::Secs, true)
                )
            })
            .collect()
    }

    pub fn from_file_str(text: &str) -> Result<Self> {
        let mut registry = ClassRegistry { entries: vec![] };
        for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let parse_err = |message: String| Error::Parse {
                line: i as u64 + 1,
                message,
            };
            let fields: Vec<&str> = line.split(',').collect();
            let [name, origin, created] = fields[..] else {
                return Err(parse_err("expected `name,origin,created_at`".into()));
            };
            let origin = match origin {
                "predefined" => ClassOrigin::Predefined,
                "spawned" => ClassOrigin::Spawned,
                other => return Err(parse_err(format!("unknown origin `{other}`"))),
            };
            let created_at = DateTime::parse_from_rfc3339(created)
                .map_err(|e| parse_err(format!("bad timestamp `{created}`: {e}")))?
                .with_timezone(&Utc);
            if registry.contains(name) {
                return Err(Error::DuplicateClass(name.to_owned()));
            }
            registry.entries.push(RegistryEntry {
                name: name.to_owned(),
                origin,
                created_at,
            });
        }
        Ok(registry)
    }
}

pub fn load_registry(path: &Path) -> Result<ClassRegistry> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    ClassRegistry::from_file_str(&text)
}

/// Load the registry at `path`, or the default registry if the file does
/// not exist yet.
pub fn load_registry_or_default(path: &Path) -> Result<ClassRegistry> {
    if path.exists() {
        load_registry(path)
    } else {
        Ok(ClassRegistry::default())
    }
}

pub fn save_registry(registry: &ClassRegistry, path: &Path) -> Result<()> {
    with_registry_lock(path, || write_atomic(path, registry.to_file_string().as_bytes()))
}

/// Append `name` and persist atomically under the registry's writer lock.
pub fn append_class(registry: &ClassRegistry, name: &str, origin: ClassOrigin, path: &Path) -> Result<ClassRegistry> {
    let mut next = registry.clone();
    next.push(name, origin)?;
    save_registry(&next, path)?;
    Ok(next)
}

/// Run `f` holding an exclusive lock on `<registry>.lock`. The lock lives
/// on a sidecar file because the registry itself is replaced by rename.
fn with_registry_lock<T>(path: &Path, f: impl FnOnce() -> Result<T>) -> Result<T> {
    let mut lock_name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    lock_name.push(".lock");
    let lock_path = path.with_file_name(lock_name);
    let lock = OpenOptions::new()
        .create(true)
        .truncate(false)
        .write(true)
        .open(&lock_path)
        .map_err(|e| Error::io(&lock_path, e))?;
    lock.lock().map_err(|e| Error::io(&lock_path, e))?;
    let result = f();
    let _ = lock.unlock();
    result
}

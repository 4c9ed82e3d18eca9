//! Command-line front end: `dataset-gen`, `train`, `classify`, `evaluate`,
//! `compare`.
//!
//! Exit codes: 0 success, 1 internal error, 2 usage or missing path,
//! 3 invalid document format, 4 document outside the car domain.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::RunConfig;
use crate::corpus::{
    build_vocabulary, car_lexicon, domain_check, extract_numeric_attributes, load_car_dataset, load_document,
    render_records, split_dataset, tokenize, write_car_dataset, AttributeValue, CarRecord, Document, LabelPolicy,
    Stopwords, NUMERIC_ATTRIBUTES,
};
use crate::em::{em_fit, EmTrace, TraceRow};
use crate::error::Error;
use crate::metrics::{compare_runs, evaluate};
use crate::model::train_supervised;
use crate::novelty::{detect_novel, ranges_from_model, spawn_class, Verdict};
use crate::store::{load_model, load_registry_or_default, save_model, save_registry, write_atomic};
use crate::synth::{generate_car_records, DEFAULT_ROWS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INVALID_FORMAT: i32 = 3;
pub const EXIT_OUT_OF_DOMAIN: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "ssemc", version, about = "Semi-supervised EM document classifier")]
pub struct Cli {
    /// `key = value` configuration file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub output_dir: Option<PathBuf>,
    #[command(flatten)]
    pub knobs: Knobs,
    #[command(subcommand)]
    pub command: Command,
}

/// Model and data knobs shared by every command.
#[derive(Debug, Args, Default)]
pub struct Knobs {
    #[arg(long, global = true)]
    pub dataset: Option<PathBuf>,
    #[arg(long, global = true)]
    pub stopwords: Option<PathBuf>,
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    #[arg(long, global = true)]
    pub lambda: Option<f64>,
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    #[arg(long, global = true)]
    pub max_iterations: Option<usize>,
    #[arg(long, global = true)]
    pub threshold: Option<f64>,
    #[arg(long, global = true)]
    pub zscore_k: Option<f64>,
    /// Number of training records that keep their labels.
    #[arg(long, global = true)]
    pub labeled: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic car-evaluation dataset.
    DatasetGen {
        #[arg(long, default_value_t = DEFAULT_ROWS)]
        rows: usize,
        /// Defaults to the configured dataset path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train on the training half and save the model and EM trace.
    Train {
        /// Fit on the labeled records only.
        #[arg(long)]
        supervised_only: bool,
    },
    /// Check, classify and optionally spawn a class for one document.
    Classify {
        document: PathBuf,
        #[arg(long)]
        model: Option<PathBuf>,
        /// Create a new class when the document is judged novel.
        #[arg(long)]
        spawn: bool,
    },
    /// Score a saved model on the test half.
    Evaluate {
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Supervised versus semi-supervised accuracy and F1 over a size ladder.
    Compare {
        #[arg(long, value_delimiter = ',', default_values_t = [10usize, 20, 50, 100, 200])]
        sizes: Vec<usize>,
    },
}

/// Failure carrying the process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::InvalidFormat { .. } | Error::InvalidEncoding { .. } | Error::EmptyDocument { .. } => {
                EXIT_INVALID_FORMAT
            }
            Error::Io { source, .. } if source.kind() == std::io::ErrorKind::NotFound => EXIT_USAGE,
            Error::InvalidConfig(_) => EXIT_USAGE,
            _ => EXIT_INTERNAL,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

/// Parse `args` (including the program name) and run the command. Output
/// goes to `out`, diagnostics to `err`; the return value is the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message);
            e.code
        }
    }
}

pub fn resolve_config(cli: &Cli) -> CliResult<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let k = &cli.knobs;
    if let Some(v) = cli.seed {
        cfg.seed = v;
    }
    if let Some(v) = &cli.output_dir {
        cfg.output_dir = v.clone();
    }
    if let Some(v) = &k.dataset {
        cfg.dataset_path = Some(v.clone());
    }
    if let Some(v) = &k.stopwords {
        cfg.stopword_path = Some(v.clone());
    }
    macro_rules! set {
        ($($field:ident <- $flag:ident),*) => {$(if let Some(v) = k.$flag { cfg.$field = v; })*};
    }
    set!(alpha <- alpha, lambda <- lambda, tolerance <- tolerance, max_iterations <- max_iterations,
         novelty_threshold <- threshold, zscore_k <- zscore_k, labeled_count <- labeled);
    cfg.validate()?;
    Ok(cfg)
}

fn execute(cli: &Cli, out: &mut dyn Write) -> CliResult<i32> {
    let cfg = resolve_config(cli)?;
    match &cli.command {
        Command::DatasetGen { rows, out: path } => cmd_dataset_gen(&cfg, *rows, path.as_deref(), out),
        Command::Train { supervised_only } => cmd_train(&cfg, *supervised_only, out),
        Command::Classify { document, model, spawn } => cmd_classify(&cfg, model.as_deref(), document, *spawn, out),
        Command::Evaluate { model } => cmd_evaluate(&cfg, model.as_deref(), out),
        Command::Compare { sizes } => cmd_compare(&cfg, sizes, out),
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    Error::Io {
        path: path.to_path_buf(),
        source: e,
    }
    .into()
}

fn say(out: &mut dyn Write, text: impl std::fmt::Display) -> CliResult<()> {
    writeln!(out, "{text}").map_err(|e| io_err(Path::new("<stdout>"), e))
}

fn ensure_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))
}

fn write_output(path: &Path, contents: &str) -> CliResult<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        ensure_dir(parent)?;
    }
    Ok(write_atomic(path, contents.as_bytes())?)
}

pub fn cmd_dataset_gen(cfg: &RunConfig, rows: usize, path: Option<&Path>, out: &mut dyn Write) -> CliResult<i32> {
    if rows == 0 {
        return Err(CliError {
            code: EXIT_USAGE,
            message: "--rows must be at least 1".into(),
        });
    }
    let path = path.map(Path::to_path_buf).unwrap_or_else(|| cfg.dataset());
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        ensure_dir(parent)?;
    }
    write_car_dataset(&path, &generate_car_records(rows, cfg.seed))?;
    say(out, format!("wrote {rows} rows to {}", path.display()))?;
    Ok(EXIT_OK)
}

/// The dataset split into rendered documents.
pub struct PreparedData {
    pub train_records: Vec<CarRecord>,
    pub labeled: Vec<Document>,
    pub unlabeled: Vec<Document>,
    pub test: Vec<Document>,
}

pub fn prepare_data(cfg: &RunConfig) -> CliResult<PreparedData> {
    let path = cfg.dataset();
    let records = load_car_dataset(&path, &LabelPolicy::Lenient)?;
    if records.is_empty() {
        return Err(Error::InsufficientData(format!("{} has no records", path.display())).into());
    }
    let (train_records, test_records) = split_dataset(&records, cfg.seed);
    let mut train = render_records(&train_records, "train");
    let test = render_records(&test_records, "test");
    let rest = train.split_off(cfg.labeled_count.min(train.len()));
    Ok(PreparedData {
        train_records,
        labeled: train,
        unlabeled: rest.iter().map(Document::unlabeled).collect(),
        test,
    })
}

pub fn cmd_train(cfg: &RunConfig, supervised_only: bool, out: &mut dyn Write) -> CliResult<i32> {
    let data = prepare_data(cfg)?;
    let mut all = data.labeled.clone();
    all.extend(data.unlabeled.iter().cloned());
    let vocab = build_vocabulary(&all)?;
    let (model, trace) = if supervised_only {
        let model = train_supervised(&data.labeled, &vocab, cfg.alpha)?;
        let objective = crate::em::weighted_objective(&model, &data.labeled, &data.unlabeled, 0.0)?;
        let trace = EmTrace {
            rows: vec![TraceRow {
                iteration: 0,
                objective,
                max_resp_change: None,
            }],
            converged: true,
        };
        (model, trace)
    } else {
        em_fit(&data.labeled, &data.unlabeled, &vocab, &cfg.em_config())?
    };
    ensure_dir(&cfg.output_dir)?;
    let model_path = cfg.model_path();
    save_model(&model, &model_path)?;
    let trace_path = cfg.output_dir.join("trace.csv");
    write_output(&trace_path, &trace.to_csv())?;
    say(
        out,
        format!(
            "trained {} classes over {} words from {} labeled + {} unlabeled documents; {} iterations, objective {}",
            model.classes().len(),
            model.vocab().len(),
            data.labeled.len(),
            data.unlabeled.len(),
            trace.iterations(),
            trace.final_objective().unwrap_or(f64::NAN)
        ),
    )?;
    say(out, format!("model: {}", model_path.display()))?;
    say(out, format!("trace: {}", trace_path.display()))?;
    Ok(EXIT_OK)
}

pub fn cmd_evaluate(cfg: &RunConfig, model_path: Option<&Path>, out: &mut dyn Write) -> CliResult<i32> {
    let model_path = model_path.map(Path::to_path_buf).unwrap_or_else(|| cfg.model_path());
    let model = load_model(&model_path)?;
    let data = prepare_data(cfg)?;
    let report = evaluate(&model, &data.test)?;
    write!(out, "{}", report.to_text()).map_err(|e| io_err(Path::new("<stdout>"), e))?;
    write_output(&cfg.output_dir.join("metrics.csv"), &report.to_csv())?;
    Ok(EXIT_OK)
}

pub fn cmd_compare(cfg: &RunConfig, sizes: &[usize], out: &mut dyn Write) -> CliResult<i32> {
    let data = prepare_data(cfg)?;
    let max = sizes.iter().copied().max().unwrap_or(0);
    let mut pool = render_records(&data.train_records, "train");
    if max > pool.len() {
        return Err(CliError {
            code: EXIT_USAGE,
            message: format!("largest size {max} exceeds the {} training records", pool.len()),
        });
    }
    let unlabeled: Vec<Document> = pool.split_off(max).iter().map(Document::unlabeled).collect();
    let table = compare_runs(&pool, &unlabeled, &data.test, sizes, &cfg.em_config())?;
    let csv = table.to_csv();
    write_output(&cfg.output_dir.join("compare.csv"), &csv)?;
    write!(out, "{csv}").map_err(|e| io_err(Path::new("<stdout>"), e))?;
    Ok(EXIT_OK)
}

fn stopwords(cfg: &RunConfig) -> CliResult<Stopwords> {
    Ok(match &cfg.stopword_path {
        Some(p) => Stopwords::load(p)?,
        None => Stopwords::default(),
    })
}

/// Documents previously filed under `<output_dir>/spawned/<class>/`.
fn load_spawned(dir: &Path, stop: &Stopwords) -> CliResult<Vec<Document>> {
    let mut docs = Vec::new();
    if !dir.is_dir() {
        return Ok(docs);
    }
    let mut class_dirs: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| io_err(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_dir())
        .collect();
    class_dirs.sort();
    for class_dir in class_dirs {
        let class = class_dir.file_name().unwrap_or_default().to_string_lossy().into_owned();
        let mut files: Vec<PathBuf> = std::fs::read_dir(&class_dir)
            .map_err(|e| io_err(&class_dir, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .collect();
        files.sort();
        for f in files {
            let raw = load_document(&f)?;
            docs.push(with_numeric_attributes(tokenize(&raw, stop), &raw.body).with_label(class.clone()));
        }
    }
    Ok(docs)
}

fn with_numeric_attributes(mut doc: Document, body: &str) -> Document {
    for (name, v) in extract_numeric_attributes(body, &NUMERIC_ATTRIBUTES) {
        doc.set_attribute(name, AttributeValue::Number(v));
    }
    doc
}

pub fn cmd_classify(
    cfg: &RunConfig,
    model_path: Option<&Path>,
    doc_path: &Path,
    spawn: bool,
    out: &mut dyn Write,
) -> CliResult<i32> {
    // format check first, then domain, then classification
    let raw = load_document(doc_path)?;
    let stop = stopwords(cfg)?;
    let doc = with_numeric_attributes(tokenize(&raw, &stop), &raw.body);

    let data = prepare_data(cfg)?;
    let lexicon: BTreeSet<String> = car_lexicon(&data.train_records);
    if !domain_check(&doc, &lexicon, 1) {
        say(out, format!("{} OutOfDomain - p=0", raw.source_name))?;
        return Err(CliError {
            code: EXIT_OUT_OF_DOMAIN,
            message: format!("{} is outside the car domain", doc_path.display()),
        });
    }

    let model_path = model_path.map(Path::to_path_buf).unwrap_or_else(|| cfg.model_path());
    let model = load_model(&model_path)?;
    let ranges = ranges_from_model(&model, cfg.zscore_k);
    let decision = detect_novel(&model, &doc, cfg.novelty_threshold, &ranges)?;
    let p = decision.max_posterior;
    match (&decision.verdict, spawn) {
        (Verdict::Known(class), _) => say(out, format!("{} Known {class} p={p:.6}", raw.source_name))?,
        (Verdict::Novel, false) => say(out, format!("{} Novel - p={p:.6}", raw.source_name))?,
        (Verdict::Novel, true) => {
            let registry_path = cfg.registry_path();
            let mut registry = load_registry_or_default(&registry_path)?;
            let spawned_dir = cfg.output_dir.join("spawned");
            let mut training = data.labeled.clone();
            training.extend(load_spawned(&spawned_dir, &stop)?);
            let (retrained, class) = spawn_class(&model, &training, &[doc], &mut registry)?;
            let class_dir = spawned_dir.join(&class);
            ensure_dir(&class_dir)?;
            write_output(&class_dir.join(&raw.source_name), &raw.body)?;
            save_model(&retrained, &model_path)?;
            save_registry(&registry, &registry_path)?;
            say(out, format!("{} Novel {class} p={p:.6}", raw.source_name))?;
        }
    }
    Ok(EXIT_OK)
}

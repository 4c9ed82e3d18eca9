//! Run configuration: flat `key = value` files, overridable from the
//! command line.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::em::EmConfig;
use crate::error::{Error, Result};
use crate::novelty::{DEFAULT_THRESHOLD, DEFAULT_ZSCORE_K};

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Defaults to `<output_dir>/cars.csv`.
    pub dataset_path: Option<PathBuf>,
    pub stopword_path: Option<PathBuf>,
    pub alpha: f64,
    pub lambda: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub novelty_threshold: f64,
    pub zscore_k: f64,
    pub seed: u64,
    pub output_dir: PathBuf,
    /// How many training-half records keep their label; the rest are
    /// treated as unlabeled.
    pub labeled_count: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let em = EmConfig::default();
        RunConfig {
            dataset_path: None,
            stopword_path: None,
            alpha: em.alpha,
            lambda: em.lambda,
            tolerance: em.tolerance,
            max_iterations: em.max_iterations,
            novelty_threshold: DEFAULT_THRESHOLD,
            zscore_k: DEFAULT_ZSCORE_K,
            seed: 7,
            output_dir: PathBuf::from("out"),
            labeled_count: 50,
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str, line: usize) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("line {line}: bad value `{value}` for `{key}`")))
}

impl RunConfig {
    pub fn dataset(&self) -> PathBuf {
        self.dataset_path
            .clone()
            .unwrap_or_else(|| self.output_dir.join("cars.csv"))
    }

    pub fn model_path(&self) -> PathBuf {
        self.output_dir.join("model.ssemc")
    }

    pub fn registry_path(&self) -> PathBuf {
        self.output_dir.join("registry.csv")
    }

    pub fn em_config(&self) -> EmConfig {
        EmConfig {
            max_iterations: self.max_iterations,
            tolerance: self.tolerance,
            lambda: self.lambda,
            alpha: self.alpha,
            seed: self.seed,
            check_q: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.em_config().validate()?;
        if !(self.novelty_threshold > 0.0 && self.novelty_threshold < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "novelty_threshold must lie in (0, 1), got {}",
                self.novelty_threshold
            )));
        }
        if self.zscore_k.is_nan() || self.zscore_k <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "zscore_k must be positive, got {}",
                self.zscore_k
            )));
        }
        if self.labeled_count == 0 {
            return Err(Error::InvalidConfig("labeled_count must be at least 1".into()));
        }
        Ok(())
    }

    /// Apply `key = value` lines on top of `self`. Blank lines and `#`
    /// comments are ignored; unknown keys are errors.
    pub fn merge_str(mut self, text: &str) -> Result<Self> {
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| Error::InvalidConfig(format!("line {line}: expected `key = value`")))?;
            match key {
                "dataset_path" => self.dataset_path = Some(PathBuf::from(value)),
                "stopword_path" => self.stopword_path = Some(PathBuf::from(value)),
                "alpha" => self.alpha = parse(key, value, line)?,
                "lambda" => self.lambda = parse(key, value, line)?,
                "tolerance" => self.tolerance = parse(key, value, line)?,
                "max_iterations" => self.max_iterations = parse(key, value, line)?,
                "novelty_threshold" => self.novelty_threshold = parse(key, value, line)?,
                "zscore_k" => self.zscore_k = parse(key, value, line)?,
                "seed" => self.seed = parse(key, value, line)?,
                "output_dir" => self.output_dir = PathBuf::from(value),
                "labeled_count" => self.labeled_count = parse(key, value, line)?,
                other => return Err(Error::InvalidConfig(format!("line {line}: unknown key `{other}`"))),
            }
        }
        Ok(self)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        RunConfig::default().merge_str(&text)
    }

    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        if let Some(p) = &self.dataset_path {
            let _ = writeln!(out, "dataset_path = {}", p.display());
        }
        if let Some(p) = &self.stopword_path {
            let _ = writeln!(out, "stopword_path = {}", p.display());
        }
        let _ = writeln!(out, "alpha = {}", self.alpha);
        let _ = writeln!(out, "lambda = {}", self.lambda);
        let _ = writeln!(out, "tolerance = {}", self.tolerance);
        let _ = writeln!(out, "max_iterations = {}", self.max_iterations);
        let _ = writeln!(out, "novelty_threshold = {}", self.novelty_threshold);
        let _ = writeln!(out, "zscore_k = {}", self.zscore_k);
        let _ = writeln!(out, "seed = {}", self.seed);
        let _ = writeln!(out, "output_dir = {}", self.output_dir.display());
        let _ = writeln!(out, "labeled_count = {}", self.labeled_count);
        out
    }
}

//! Run configuration: a flat `key = value` text file.
//!
//! Blank lines and lines starting with `#` are ignored. Every other line is
//! `key = value` with surrounding whitespace trimmed. Keys may appear at most
//! once. Lists are comma separated; booleans are `true` or `false`.
//!
//! | key | value |
//! |-----|-------|
//! | `min_word_length` | integer ≥ 1 |
//! | `lowercase`, `strip_emails`, `strip_urls`, `letters_only`, `stem` | bool |
//! | `stopwords` | `english`, `none`, or a path to a file with one word per line |
//! | `min_df`, `max_df` | document-fraction bounds, `0 ≤ min_df < max_df ≤ 1` |
//! | `dims` | list of positive integers |
//! | `norm` | `none`, `l1` or `l2` |
//! | `metrics` | list drawn from `ed`, `cs`, `tsss` |
//! | `train`, `test`, `out` | paths |
//! | `seed` | unsigned integer, used when `test` is absent |
//! | `test_fraction` | fraction of `train` held out when `test` is absent |

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use docsim::eval::{SweepSpec, DEFAULT_DIMS};
use docsim::preprocess::english_stopwords;
use docsim::{MetricKind, NormMode, PreprocessConfig};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("unknown key {0:?}")]
    UnknownKey(String),
    #[error("key {0:?} given twice")]
    Duplicate(String),
    #[error("bad value {value:?} for {key}: {reason}")]
    Value {
        key: String,
        value: String,
        reason: String,
    },
    #[error("cannot read stopword file {path}: {reason}")]
    Stopwords { path: PathBuf, reason: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StopwordSource {
    English,
    None,
    File(PathBuf),
}

impl StopwordSource {
    fn load(&self) -> Result<Vec<String>, ConfigError> {
        match self {
            StopwordSource::English => Ok(english_stopwords()),
            StopwordSource::None => Ok(Vec::new()),
            StopwordSource::File(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Stopwords {
                    path: path.clone(),
                    reason: e.to_string(),
                })?;
                Ok(text
                    .lines()
                    .map(str::trim)
                    .filter(|w| !w.is_empty())
                    .map(str::to_owned)
                    .collect())
            }
        }
    }

    fn render(&self) -> String {
        match self {
            StopwordSource::English => "english".into(),
            StopwordSource::None => "none".into(),
            StopwordSource::File(p) => p.display().to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub preprocess: PreprocessConfig,
    pub stopwords: StopwordSource,
    pub min_df: f64,
    pub max_df: f64,
    pub dims: Vec<usize>,
    pub norm: NormMode,
    pub metrics: Vec<MetricKind>,
    pub train: Option<PathBuf>,
    pub test: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub test_fraction: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let sweep = SweepSpec::default();
        RunConfig {
            preprocess: sweep.preprocess,
            stopwords: StopwordSource::English,
            min_df: sweep.min_df,
            max_df: sweep.max_df,
            dims: DEFAULT_DIMS.to_vec(),
            norm: sweep.norm,
            metrics: sweep.metrics,
            train: None,
            test: None,
            out: None,
            seed: 0,
            test_fraction: 0.2,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e: T::Err| ConfigError::Value {
        key: key.into(),
        value: value.into(),
        reason: e.to_string(),
    })
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>, ConfigError>
where
    T::Err: std::fmt::Display,
{
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse(key, s))
        .collect()
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

pub const KEYS: [&str; 17] = [
    "min_word_length",
    "lowercase",
    "stopwords",
    "strip_emails",
    "strip_urls",
    "letters_only",
    "stem",
    "min_df",
    "max_df",
    "dims",
    "norm",
    "metrics",
    "train",
    "test",
    "out",
    "seed",
    "test_fraction",
];

impl RunConfig {
    /// Sets one key from its textual value. Stopword files are read immediately.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let p = &mut self.preprocess;
        match key {
            "min_word_length" => p.min_word_length = parse(key, value)?,
            "lowercase" => p.lowercase = parse(key, value)?,
            "strip_emails" => p.strip_emails = parse(key, value)?,
            "strip_urls" => p.strip_urls = parse(key, value)?,
            "letters_only" => p.letters_only = parse(key, value)?,
            "stem" => p.stem = parse(key, value)?,
            "stopwords" => {
                let source = match value {
                    "english" => StopwordSource::English,
                    "none" => StopwordSource::None,
                    path => StopwordSource::File(PathBuf::from(path)),
                };
                p.stopwords = source.load()?;
                self.stopwords = source;
            }
            "min_df" => self.min_df = parse(key, value)?,
            "max_df" => self.max_df = parse(key, value)?,
            "dims" => self.dims = parse_list(key, value)?,
            "norm" => self.norm = parse(key, value)?,
            "metrics" => self.metrics = parse_list(key, value)?,
            "train" => self.train = Some(PathBuf::from(value)),
            "test" => self.test = Some(PathBuf::from(value)),
            "out" => self.out = Some(PathBuf::from(value)),
            "seed" => self.seed = parse(key, value)?,
            "test_fraction" => self.test_fraction = parse(key, value)?,
            _ => return Err(ConfigError::UnknownKey(key.into())),
        }
        Ok(())
    }

    /// Applies every `key = value` line of `text` on top of `self`.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        let mut seen = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or(ConfigError::Syntax { line: n + 1 })?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() {
                return Err(ConfigError::Syntax { line: n + 1 });
            }
            if seen.contains(&key) {
                return Err(ConfigError::Duplicate(key.into()));
            }
            seen.push(key);
            self.set(key, value)?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = RunConfig::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            ConfigError::Invalid(format!("cannot read config {}: {e}", path.display()))
        })?;
        Self::from_text(&text)
    }

    /// Every key in canonical order; `from_text(&cfg.to_text())` equals `cfg`.
    pub fn to_text(&self) -> String {
        let p = &self.preprocess;
        let mut s = String::new();
        let mut kv = |k: &str, v: String| writeln!(s, "{k} = {v}").expect("string write");
        kv("min_word_length", p.min_word_length.to_string());
        kv("lowercase", p.lowercase.to_string());
        kv("stopwords", self.stopwords.render());
        kv("strip_emails", p.strip_emails.to_string());
        kv("strip_urls", p.strip_urls.to_string());
        kv("letters_only", p.letters_only.to_string());
        kv("stem", p.stem.to_string());
        kv("min_df", self.min_df.to_string());
        kv("max_df", self.max_df.to_string());
        kv("dims", join(&self.dims));
        kv("norm", self.norm.to_string());
        kv("metrics", join(&self.metrics));
        for (k, v) in [("train", &self.train), ("test", &self.test), ("out", &self.out)] {
            if let Some(path) = v {
                kv(k, path.display().to_string());
            }
        }
        kv("seed", self.seed.to_string());
        kv("test_fraction", self.test_fraction.to_string());
        s
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.preprocess
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if !(0.0 <= self.min_df && self.min_df < self.max_df && self.max_df <= 1.0) {
            return Err(ConfigError::Invalid(format!(
                "need 0 <= min_df < max_df <= 1, got {} and {}",
                self.min_df, self.max_df
            )));
        }
        if self.dims.is_empty() || self.dims.contains(&0) {
            return Err(ConfigError::Invalid("dims must be positive integers".into()));
        }
        if self.metrics.is_empty() {
            return Err(ConfigError::Invalid("metrics must not be empty".into()));
        }
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(ConfigError::Invalid(format!(
                "test_fraction must lie strictly between 0 and 1, got {}",
                self.test_fraction
            )));
        }
        for (key, path) in [("train", &self.train), ("test", &self.test), ("out", &self.out)] {
            if let Some(p) = path {
                if p.display().to_string().contains('\n') || p.as_os_str().is_empty() {
                    return Err(ConfigError::Invalid(format!("{key} path is empty or spans lines")));
                }
            }
        }
        Ok(())
    }

    pub fn sweep_spec(&self) -> SweepSpec {
        SweepSpec {
            preprocess: self.preprocess.clone(),
            min_df: self.min_df,
            max_df: self.max_df,
            dims: self.dims.clone(),
            norm: self.norm,
            metrics: self.metrics.clone(),
        }
    }
}

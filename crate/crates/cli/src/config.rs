//! Flat `key=value` pipeline configuration.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use tableqna::training_data::Mix;
use tableqna::{Error, Result};

pub const CONFIG_FILE_NAME: &str = "tableqna.conf";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaggerMode {
    Tdl,
    TdlEr,
    TdlErDp,
    Dnn,
}

impl FromStr for TaggerMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['+', '_'], "-").as_str() {
            "tdl" => Ok(TaggerMode::Tdl),
            "tdl-er" => Ok(TaggerMode::TdlEr),
            "tdl-er-dp" => Ok(TaggerMode::TdlErDp),
            "dnn" => Ok(TaggerMode::Dnn),
            _ => Err(Error::Config(format!("unknown tagger mode {s:?}; expected tdl, tdl-er, tdl-er-dp or dnn"))),
        }
    }
}

impl fmt::Display for TaggerMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TaggerMode::Tdl => "tdl",
            TaggerMode::TdlEr => "tdl-er",
            TaggerMode::TdlErDp => "tdl-er-dp",
            TaggerMode::Dnn => "dnn",
        })
    }
}

/// Every setting a stage may need. Paths are absolute or relative to the
/// working directory once loaded.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub types: Option<PathBuf>,
    pub superlatives: Option<PathBuf>,
    pub entities: Option<PathBuf>,
    pub query_log: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
    pub tagger_model: Option<PathBuf>,
    /// Type identifiers the neural tagger learns; all dictionary types if unset.
    pub tagger_types: Option<Vec<String>>,
    pub corpus: Option<PathBuf>,
    pub ranking: Option<PathBuf>,
    pub idf: Option<PathBuf>,
    pub selector_model: Option<PathBuf>,
    pub tagger_mode: TaggerMode,
    pub rho: f64,
    pub theta: f64,
    pub k: usize,
    pub m: usize,
    pub n: usize,
    pub seed: u64,
    pub min_impressions: u64,
    pub mix: Mix,
    pub epochs: usize,
    pub rounds: usize,
    pub depth: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            types: None,
            superlatives: None,
            entities: None,
            query_log: None,
            embeddings: None,
            tagger_model: None,
            tagger_types: None,
            corpus: None,
            ranking: None,
            idf: None,
            selector_model: None,
            tagger_mode: TaggerMode::TdlErDp,
            rho: 0.4,
            theta: 0.5,
            k: 5,
            m: 5,
            n: 3,
            seed: 7,
            min_impressions: 100,
            mix: Mix::default(),
            epochs: 10,
            rounds: 200,
            depth: 4,
        }
    }
}

pub const KEYS: &[&str] = &[
    "types",
    "superlatives",
    "entities",
    "query_log",
    "embeddings",
    "tagger_model",
    "tagger_types",
    "corpus",
    "ranking",
    "idf",
    "selector_model",
    "tagger_mode",
    "rho",
    "theta",
    "k",
    "m",
    "n",
    "seed",
    "min_impressions",
    "mix",
    "epochs",
    "rounds",
    "depth",
];

fn number<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value.parse().map_err(|e| Error::Config(format!("{key}: cannot parse {value:?}: {e}")))
}

impl PipelineConfig {
    /// Sets one key; relative paths resolve against `base`.
    pub fn set(&mut self, key: &str, value: &str, base: &Path) -> Result<()> {
        let value = value.trim();
        let path = || Some(base.join(value));
        match key {
            "types" => self.types = path(),
            "superlatives" => self.superlatives = path(),
            "entities" => self.entities = path(),
            "query_log" => self.query_log = path(),
            "embeddings" => self.embeddings = path(),
            "tagger_model" => self.tagger_model = path(),
            "corpus" => self.corpus = path(),
            "ranking" => self.ranking = path(),
            "idf" => self.idf = path(),
            "selector_model" => self.selector_model = path(),
            "tagger_types" => {
                self.tagger_types = Some(value.split(',').map(|t| t.trim().to_string()).filter(|t| !t.is_empty()).collect())
            }
            "tagger_mode" => self.tagger_mode = value.parse()?,
            "rho" => self.rho = number(key, value)?,
            "theta" => self.theta = number(key, value)?,
            "k" => self.k = number(key, value)?,
            "m" => self.m = number(key, value)?,
            "n" => self.n = number(key, value)?,
            "seed" => self.seed = number(key, value)?,
            "min_impressions" => self.min_impressions = number(key, value)?,
            "mix" => self.mix = value.parse()?,
            "epochs" => self.epochs = number(key, value)?,
            "rounds" => self.rounds = number(key, value)?,
            "depth" => self.depth = number(key, value)?,
            _ => return Err(Error::Config(format!("unknown config key {key:?}; known keys: {}", KEYS.join(", ")))),
        }
        Ok(())
    }

    /// Applies `key=value` lines; `#` starts a comment line.
    pub fn apply_text(&mut self, text: &str, source_name: &str, base: &Path) -> Result<()> {
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("{source_name}:{}: expected key=value", idx + 1)))?;
            self.set(key.trim(), value, base)
                .map_err(|e| Error::Config(format!("{source_name}:{}: {}", idx + 1, strip_prefix(&e))))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        self.apply_text(&text, &path.display().to_string(), base)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("rho", self.rho), ("theta", self.theta)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::Config(format!("{name} must lie in (0, 1), got {v}")));
            }
        }
        for (name, v) in [("k", self.k), ("m", self.m), ("n", self.n)] {
            if v == 0 {
                return Err(Error::Config(format!("{name} must be at least 1")));
            }
        }
        Ok(())
    }
}

fn strip_prefix(e: &Error) -> String {
    let s = e.to_string();
    s.strip_prefix("config error: ").map(str::to_string).unwrap_or(s)
}

/// The path behind an optional key, or a config error naming the key.
pub fn required<'a>(value: &'a Option<PathBuf>, key: &str) -> Result<&'a Path> {
    let path = value
        .as_deref()
        .ok_or_else(|| Error::Config(format!("no {key} configured; set {key}= in the config or pass --set {key}=PATH")))?;
    existing(path)
}

/// `path` if it exists, else a config error naming it.
pub fn existing(path: &Path) -> Result<&Path> {
    if path.exists() {
        Ok(path)
    } else {
        Err(Error::Config(format!("missing input {}", path.display())))
    }
}

//! Command-line and config-file parsing.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, ValueEnum};

use topicforge_core::corpus::{DEFAULT_KEEP_N, DEFAULT_NO_ABOVE, DEFAULT_NO_BELOW};
use topicforge_core::ingest::DEFAULT_TRAIN_FRAC;
use topicforge_core::lda::{DEFAULT_BETA, DEFAULT_SWEEPS, DEFAULT_TOPICS};
use topicforge_core::sentiment::DEFAULT_FEATURES;
use topicforge_core::slda::DEFAULT_SIGMA2;

use crate::CliError;

pub const SEED_ENV: &str = "TOPICFORGE_SEED";
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_TOP_N: usize = 10;
pub const DEFAULT_OUT: &str = "topicforge-out";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Clean troll tweets and write the filtered corpus and vocabulary
    Preprocess,
    /// Train an unsupervised topic model
    LdaTrain,
    /// Print the top words of a saved topic model
    LdaTopics,
    /// Train a supervised topic model on left/right labels
    SldaTrain,
    /// Train on a split and report held-out error
    SldaEval,
    /// Predict labels with a saved supervised model
    SldaPredict,
    /// Train the sentiment ensemble
    SentiTrain,
    /// Classify one text per line with a saved ensemble
    SentiClassify,
    /// Summarize a run directory
    Report,
}

#[derive(Debug, Parser)]
#[command(name = "topicforge", version, about = "Topic models and sentiment for troll tweets")]
struct Args {
    command: Command,
    /// Input files (CSV, model, text or run directory depending on the command)
    inputs: Vec<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    topics: Option<usize>,
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    sigma2: Option<f64>,
    #[arg(long)]
    year: Option<i32>,
    #[arg(long)]
    tfidf: bool,
    #[arg(long)]
    no_below: Option<usize>,
    #[arg(long)]
    no_above: Option<f64>,
    #[arg(long)]
    keep_n: Option<usize>,
    #[arg(long)]
    train_frac: Option<f64>,
    #[arg(long)]
    features: Option<usize>,
    #[arg(long)]
    senti_fraction: Option<f64>,
    /// Also store per-document sampler state in model.json
    #[arg(long)]
    save_state: bool,
    #[arg(long)]
    top_n: Option<usize>,
    #[arg(long)]
    vocab: Option<PathBuf>,
    #[arg(long)]
    model: Option<PathBuf>,
}

/// Keys accepted in a config file; identical to the long flag names.
pub const CONFIG_KEYS: &[&str] = &[
    "out",
    "topics",
    "iters",
    "seed",
    "alpha",
    "beta",
    "sigma2",
    "year",
    "tfidf",
    "no-below",
    "no-above",
    "keep-n",
    "train-frac",
    "features",
    "senti-fraction",
    "save-state",
    "top-n",
    "vocab",
    "model",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub inputs: Vec<PathBuf>,
    pub out: PathBuf,
    pub topics: usize,
    pub alpha: f64,
    pub beta: f64,
    pub iters: usize,
    pub sigma2: f64,
    pub seed: u64,
    pub year: Option<i32>,
    pub tfidf: bool,
    pub no_below: usize,
    pub no_above: f64,
    pub keep_n: usize,
    pub train_frac: f64,
    pub features: usize,
    pub senti_fraction: f64,
    pub save_state: bool,
    pub top_n: usize,
    pub vocab: Option<PathBuf>,
    pub model: Option<PathBuf>,
}

/// Parses `argv` (including the program name), reading the seed fallback
/// from the environment.
pub fn parse_args<I, T>(argv: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    parse_args_with_env(argv, std::env::var(SEED_ENV).ok())
}

pub fn parse_args_with_env<I, T>(argv: I, env_seed: Option<String>) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = Args::try_parse_from(argv)?;
    let file = match &args.config {
        Some(path) => read_config(path)?,
        None => BTreeMap::new(),
    };
    let env_seed = env_seed.map(|s| parse_value::<u64>(SEED_ENV, &s)).transpose()?;

    let topics = pick(args.topics, &file, "topics")?.unwrap_or(DEFAULT_TOPICS);
    let cfg = RunConfig {
        command: args.command,
        inputs: args.inputs,
        out: pick(args.out, &file, "out")?.unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
        topics,
        alpha: pick(args.alpha, &file, "alpha")?.unwrap_or(50.0 / topics.max(1) as f64),
        beta: pick(args.beta, &file, "beta")?.unwrap_or(DEFAULT_BETA),
        iters: pick(args.iters, &file, "iters")?.unwrap_or(DEFAULT_SWEEPS),
        sigma2: pick(args.sigma2, &file, "sigma2")?.unwrap_or(DEFAULT_SIGMA2),
        seed: pick(args.seed, &file, "seed")?.or(env_seed).unwrap_or(DEFAULT_SEED),
        year: pick(args.year, &file, "year")?,
        tfidf: args.tfidf || pick(None, &file, "tfidf")?.unwrap_or(false),
        no_below: pick(args.no_below, &file, "no-below")?.unwrap_or(DEFAULT_NO_BELOW),
        no_above: pick(args.no_above, &file, "no-above")?.unwrap_or(DEFAULT_NO_ABOVE),
        keep_n: pick(args.keep_n, &file, "keep-n")?.unwrap_or(DEFAULT_KEEP_N),
        train_frac: pick(args.train_frac, &file, "train-frac")?.unwrap_or(DEFAULT_TRAIN_FRAC),
        features: pick(args.features, &file, "features")?.unwrap_or(DEFAULT_FEATURES),
        senti_fraction: pick(args.senti_fraction, &file, "senti-fraction")?.unwrap_or(1.0),
        save_state: args.save_state || pick(None, &file, "save-state")?.unwrap_or(false),
        top_n: pick(args.top_n, &file, "top-n")?.unwrap_or(DEFAULT_TOP_N),
        vocab: pick(args.vocab, &file, "vocab")?,
        model: pick(args.model, &file, "model")?,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn pick<T: FromStr>(flag: Option<T>, file: &BTreeMap<String, String>, key: &str) -> Result<Option<T>, CliError> {
    match flag {
        Some(v) => Ok(Some(v)),
        None => file.get(key).map(|s| parse_value(key, s)).transpose(),
    }
}

fn parse_value<T: FromStr>(key: &str, text: &str) -> Result<T, CliError> {
    text.parse()
        .map_err(|_| CliError::Usage(format!("invalid value for {key}: {text:?}")))
}

/// Reads a flat `key=value` file. Blank lines and `#` comments are skipped.
pub fn read_config(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Usage(format!("config line {}: expected key=value", n + 1)));
        };
        let key = key.trim();
        if !CONFIG_KEYS.contains(&key) {
            return Err(CliError::Usage(format!("config line {}: unknown key {key:?}", n + 1)));
        }
        out.insert(key.to_owned(), value.trim().to_owned());
    }
    Ok(out)
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Usage(msg));
        if self.topics == 0 {
            return bad("--topics must be at least 1".into());
        }
        if self.iters == 0 {
            return bad("--iters must be at least 1".into());
        }
        for (name, v) in [("alpha", self.alpha), ("beta", self.beta), ("sigma2", self.sigma2)] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("--{name} must be positive, got {v}"));
            }
        }
        if !(self.train_frac > 0.0 && self.train_frac < 1.0) {
            return bad(format!("--train-frac must be in (0, 1), got {}", self.train_frac));
        }
        if !(self.no_above > 0.0 && self.no_above <= 1.0) {
            return bad(format!("--no-above must be in (0, 1], got {}", self.no_above));
        }
        if !(self.senti_fraction > 0.0 && self.senti_fraction <= 1.0) {
            return bad(format!(
                "--senti-fraction must be in (0, 1], got {}",
                self.senti_fraction
            ));
        }
        if self.features == 0 {
            return bad("--features must be at least 1".into());
        }
        if self.top_n == 0 {
            return bad("--top-n must be at least 1".into());
        }

        let n = self.inputs.len();
        match self.command {
            Command::LdaTopics | Command::SentiClassify | Command::Report if n != 1 => {
                bad(format!("{} takes exactly one input, got {n}", self.command_name()))
            }
            _ if n == 0 => bad(format!("{} needs an input path", self.command_name())),
            Command::SldaPredict | Command::SentiClassify if self.model.is_none() => {
                bad(format!("{} needs --model", self.command_name()))
            }
            _ => Ok(()),
        }
    }

    pub fn command_name(&self) -> String {
        self.command
            .to_possible_value()
            .map(|v| v.get_name().to_owned())
            .unwrap_or_default()
    }
}

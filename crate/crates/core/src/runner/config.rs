//! Run configuration and its `key = value` file format.

use std::borrow::Cow;
use std::fmt;
use std::str::FromStr;

use super::{RunError, StreamRecord};
use crate::evaluation::{CvConfig, EvalOptions};
use crate::scorers::{DetectorConfig, ScoreError, ScorerKind};
use crate::tdf::DecayKind;
use crate::weighting::WeightingScheme;

/// Which part of a record is scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    /// Title followed by the snippet, or by the text when there is none.
    TitleSnippet,
    Content,
}

impl Field {
    pub fn name(self) -> &'static str {
        match self {
            Field::TitleSnippet => "title_snippet",
            Field::Content => "content",
        }
    }

    pub fn text_of(self, record: &StreamRecord) -> Cow<'_, str> {
        match self {
            Field::Content => Cow::Borrowed(&record.text),
            Field::TitleSnippet => {
                let body = record.snippet.as_deref().unwrap_or(&record.text);
                match &record.title {
                    Some(title) => Cow::Owned(format!("{title} {body}")),
                    None => Cow::Borrowed(body),
                }
            }
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Field {
    type Err = RunError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "title_snippet" | "snippet" => Ok(Field::TitleSnippet),
            "content" => Ok(Field::Content),
            _ => Err(RunError::Config(format!("unknown field {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scorer: ScorerKind,
    /// `None` uses the scorer's default scheme.
    pub scheme: Option<WeightingScheme>,
    pub window: usize,
    pub decay: DecayKind,
    pub alpha: f64,
    pub lambda: f64,
    pub k1: f64,
    pub b: f64,
    pub field: Field,
    /// Leave the first `window` documents out of evaluation.
    pub exclude_warmup: bool,
    /// Evaluate documents that were empty after preprocessing.
    pub include_zero_length: bool,
    pub folds: usize,
    /// Seed for shuffled folds; contiguous folds when `None`.
    pub shuffle: Option<u64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            scorer: ScorerKind::Ns,
            scheme: None,
            window: 60,
            decay: DecayKind::Sigmoid,
            alpha: 50.0,
            lambda: 0.9,
            k1: 1.2,
            b: 0.75,
            field: Field::Content,
            exclude_warmup: false,
            include_zero_length: false,
            folds: 5,
            shuffle: None,
        }
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T, RunError> {
    value
        .parse()
        .map_err(|_| RunError::Config(format!("{key}: cannot parse {value:?}")))
}

impl RunConfig {
    /// The effective scheme with this run's BM25 parameters.
    pub fn scheme(&self) -> WeightingScheme {
        let base = self.scheme.unwrap_or_else(|| self.scorer.default_scheme());
        WeightingScheme {
            k1: self.k1,
            b: self.b,
            ..base
        }
    }

    pub fn detector_config(&self) -> Result<DetectorConfig, ScoreError> {
        let config = DetectorConfig {
            kind: self.scorer,
            scheme: self.scheme(),
            window: self.window,
            decay: self.decay,
            alpha: self.alpha,
            lambda: self.lambda,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn eval_options(&self) -> EvalOptions {
        EvalOptions {
            exclude_zero_length: !self.include_zero_length,
            warmup: if self.exclude_warmup { self.window } else { 0 },
        }
    }

    pub fn cv_config(&self) -> CvConfig {
        CvConfig {
            folds: self.folds,
            shuffle: self.shuffle,
        }
    }

    /// Sets one option by name.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), RunError> {
        let cfg_err = |e: &dyn fmt::Display| RunError::Config(format!("{key}: {e}"));
        match key {
            "scorer" => self.scorer = value.parse().map_err(|e: ScoreError| cfg_err(&e))?,
            "scheme" => {
                self.scheme = Some(WeightingScheme::parse(value).map_err(|e| cfg_err(&e))?);
            }
            "window" | "n" => self.window = parse_num(key, value)?,
            "decay" => self.decay = value.parse().map_err(|e: crate::tdf::TdfError| cfg_err(&e))?,
            "alpha" => self.alpha = parse_num(key, value)?,
            "lambda" => self.lambda = parse_num(key, value)?,
            "k1" => self.k1 = parse_num(key, value)?,
            "b" => self.b = parse_num(key, value)?,
            "field" => self.field = value.parse()?,
            "warmup" => {
                self.exclude_warmup = match value {
                    "none" => false,
                    "exclude" => true,
                    _ => return Err(cfg_err(&"expected none or exclude")),
                }
            }
            "zero_length" => {
                self.include_zero_length = match value {
                    "exclude" => false,
                    "include" => true,
                    _ => return Err(cfg_err(&"expected exclude or include")),
                }
            }
            "folds" => self.folds = parse_num(key, value)?,
            "shuffle" => {
                self.shuffle = match value {
                    "none" => None,
                    seed => Some(parse_num(key, seed)?),
                }
            }
            _ => return Err(RunError::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Applies `key = value` lines. Blank lines and `#` comments are
    /// ignored; later lines win.
    pub fn apply_file(&mut self, text: &str) -> Result<(), RunError> {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| RunError::Parse {
                line: i + 1,
                reason: "expected key = value".into(),
            })?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }
}

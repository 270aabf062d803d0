//! Novelty scorers.
//!
//! `ns` aggregates the IDF of a document's terms against the window and
//! `ns_t` does the same with temporal document frequencies. The baselines
//! compare the document with every window document (`max_cs`, `mean_cs`,
//! `min_kl`) or with the window's concatenation (`agg_cs`).
//!
//! Every formula is kept in its natural direction. Which end of the scale
//! means "novel" is carried by [`Orientation`].

mod detector;
mod lm;
mod vector;

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use thiserror::Error;

use crate::tdf::{TdfError, TdfIndex};
use crate::text::Document;
use crate::weighting::{TermStats, WeightingError, WeightingScheme};

pub use detector::{Detector, DetectorConfig};
pub use lm::{build_lm, kl_div, min_kl, LanguageModel, MIN_KL_EMPTY_WINDOW};
pub use vector::{agg_cs, cosine, max_cs, mean_cs, term_weights, TermWeights};

#[derive(Debug, Error)]
pub enum ScoreError {
    #[error(transparent)]
    Weighting(#[from] WeightingError),
    #[error(transparent)]
    Tdf(#[from] TdfError),
    #[error("cannot build a language model: document and corpus are both empty")]
    EmptyModel,
    #[error("zero probability for term {0:?}: the reference model is unsmoothed")]
    ZeroProbability(String),
    #[error("smoothing weight lambda must lie in [0, 1], got {0}")]
    InvalidLambda(f64),
    #[error("temporal scoring needs a smoothed idf variant (s or b), scheme is {0}")]
    UnsmoothedTemporalIdf(String),
    #[error("unknown scorer {0:?}")]
    UnknownScorer(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    HigherIsNovel,
    LowerIsNovel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScorerKind {
    Ns,
    NsT,
    MaxCs,
    MeanCs,
    MinKl,
    AggCs,
}

impl ScorerKind {
    pub const ALL: [ScorerKind; 6] = [
        ScorerKind::Ns,
        ScorerKind::NsT,
        ScorerKind::MaxCs,
        ScorerKind::MeanCs,
        ScorerKind::MinKl,
        ScorerKind::AggCs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScorerKind::Ns => "ns",
            ScorerKind::NsT => "ns_t",
            ScorerKind::MaxCs => "max_cs",
            ScorerKind::MeanCs => "mean_cs",
            ScorerKind::MinKl => "min_kl",
            ScorerKind::AggCs => "agg_cs",
        }
    }

    pub fn orientation(self) -> Orientation {
        match self {
            ScorerKind::Ns | ScorerKind::NsT | ScorerKind::MinKl => Orientation::HigherIsNovel,
            ScorerKind::MaxCs | ScorerKind::MeanCs | ScorerKind::AggCs => Orientation::LowerIsNovel,
        }
    }

    /// Baselines default to BM25 weights.
    pub fn default_scheme(self) -> WeightingScheme {
        match self {
            ScorerKind::Ns | ScorerKind::NsT => WeightingScheme::default(),
            _ => WeightingScheme::parse("kbn").expect("valid scheme"),
        }
    }
}

impl fmt::Display for ScorerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScorerKind {
    type Err = ScoreError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ScorerKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| ScoreError::UnknownScorer(s.to_owned()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRecord {
    pub doc_id: String,
    pub raw_score: f64,
    pub scorer: ScorerKind,
    /// Scoring time only; index maintenance is excluded.
    pub elapsed: Duration,
    /// The document was empty after preprocessing and scored 0.
    pub zero_length: bool,
}

impl ScoreRecord {
    pub fn orientation(&self) -> Orientation {
        self.scorer.orientation()
    }
}

/// Threshold decision with strict inequality in both directions: a score
/// equal to the threshold is never novel.
pub fn is_novel(score: f64, orientation: Orientation, threshold: f64) -> bool {
    match orientation {
        Orientation::HigherIsNovel => score > threshold,
        Orientation::LowerIsNovel => score < threshold,
    }
}

/// Novelty score: the normalized sum of tf x idf over the distinct terms of
/// `doc`, with frequencies taken from `stats` before `doc` is added to them.
/// O(|doc|) lookups regardless of collection size. Empty documents score 0.
pub fn ns<S: TermStats>(doc: &Document, stats: &S, scheme: &WeightingScheme) -> Result<f64, WeightingError> {
    if doc.is_zero_length() {
        return Ok(0.0);
    }
    let n = stats.collection_size();
    let avdl = stats.avdl();
    let mut sum = 0.0;
    for (term, tf) in doc.terms() {
        let idf = scheme.idf_component(stats.doc_freq(term), n)?;
        sum += scheme.tf_component(tf, doc.dl(), avdl) * idf;
    }
    Ok(sum / scheme.norm_component(doc, avdl)?)
}

/// Novelty score against temporal document frequencies; `tdf` must not yet
/// contain `doc`.
pub fn ns_t(doc: &Document, tdf: &TdfIndex, scheme: &WeightingScheme) -> Result<f64, ScoreError> {
    if !scheme.idf.is_smoothed() {
        return Err(ScoreError::UnsmoothedTemporalIdf(scheme.code()));
    }
    Ok(ns(doc, &tdf.stats(), scheme)?)
}

//! A scorer bundled with the index it reads, driven one document at a time.

use std::time::Instant;

use super::{agg_cs, max_cs, mean_cs, min_kl, ns, ns_t, ScoreError, ScoreRecord, ScorerKind};
use crate::tdf::{DecayConfig, DecayKind, TdfIndex};
use crate::text::Document;
use crate::weighting::WeightingScheme;
use crate::window::WindowIndex;

#[derive(Debug, Clone, PartialEq)]
pub struct DetectorConfig {
    pub kind: ScorerKind,
    pub scheme: WeightingScheme,
    /// Window length N; also the horizon of the temporal decay.
    pub window: usize,
    pub decay: DecayKind,
    pub alpha: f64,
    /// Interpolation weight of the document model for `min_kl`.
    pub lambda: f64,
}

impl DetectorConfig {
    /// Defaults for `kind`: its usual scheme, sigmoid decay with alpha 50 and
    /// lambda 0.9.
    pub fn new(kind: ScorerKind, window: usize) -> Self {
        DetectorConfig {
            kind,
            scheme: kind.default_scheme(),
            window,
            decay: DecayKind::Sigmoid,
            alpha: 50.0,
            lambda: 0.9,
        }
    }

    pub fn with_scheme(mut self, scheme: WeightingScheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn with_decay(mut self, decay: DecayKind, alpha: f64) -> Self {
        self.decay = decay;
        self.alpha = alpha;
        self
    }

    pub fn decay_config(&self) -> Result<DecayConfig, ScoreError> {
        Ok(DecayConfig::new(self.decay, self.window, self.alpha)?)
    }

    pub fn validate(&self) -> Result<(), ScoreError> {
        self.scheme.validate()?;
        match self.kind {
            ScorerKind::NsT => {
                if !self.scheme.idf.is_smoothed() {
                    return Err(ScoreError::UnsmoothedTemporalIdf(self.scheme.code()));
                }
                self.decay_config()?;
            }
            ScorerKind::MinKl if !(0.0..=1.0).contains(&self.lambda) => {
                return Err(ScoreError::InvalidLambda(self.lambda));
            }
            _ => {}
        }
        if self.window == 0 {
            return Err(crate::tdf::TdfError::ZeroWindow.into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
enum State {
    Window(WindowIndex),
    Tdf(TdfIndex),
}

#[derive(Debug, Clone)]
pub struct Detector {
    config: DetectorConfig,
    state: State,
}

impl Detector {
    pub fn new(config: DetectorConfig) -> Result<Self, ScoreError> {
        config.validate()?;
        let state = match config.kind {
            ScorerKind::NsT => State::Tdf(TdfIndex::new(config.decay_config()?)?),
            _ => State::Window(WindowIndex::new(config.window)),
        };
        Ok(Detector { config, state })
    }

    /// Resumes temporal scoring from a restored index. The window length
    /// and decay are taken from the index.
    pub fn from_tdf(mut config: DetectorConfig, index: TdfIndex) -> Result<Self, ScoreError> {
        let decay = *index.decay();
        config.kind = ScorerKind::NsT;
        config.window = decay.window;
        config.decay = decay.kind;
        config.alpha = decay.alpha;
        config.validate()?;
        Ok(Detector {
            config,
            state: State::Tdf(index),
        })
    }

    pub fn config(&self) -> &DetectorConfig {
        &self.config
    }

    pub fn window_index(&self) -> Option<&WindowIndex> {
        match &self.state {
            State::Window(w) => Some(w),
            State::Tdf(_) => None,
        }
    }

    pub fn tdf_index(&self) -> Option<&TdfIndex> {
        match &self.state {
            State::Tdf(t) => Some(t),
            State::Window(_) => None,
        }
    }

    /// Documents currently held in memory. Always 0 in temporal mode.
    pub fn stored_documents(&self) -> usize {
        match &self.state {
            State::Window(w) => w.len(),
            State::Tdf(_) => 0,
        }
    }

    /// Scores `doc` against the current state without changing it. Empty
    /// documents score 0.
    pub fn score(&self, doc: &Document) -> Result<f64, ScoreError> {
        if doc.is_zero_length() {
            return Ok(0.0);
        }
        let scheme = &self.config.scheme;
        match (&self.state, self.config.kind) {
            (State::Tdf(t), _) => ns_t(doc, t, scheme),
            (State::Window(w), ScorerKind::Ns) => Ok(ns(doc, &w.stats(), scheme)?),
            (State::Window(w), ScorerKind::MaxCs) => Ok(max_cs(doc, w, scheme)?),
            (State::Window(w), ScorerKind::MeanCs) => Ok(mean_cs(doc, w, scheme)?),
            (State::Window(w), ScorerKind::AggCs) => Ok(agg_cs(doc, w, scheme)?),
            (State::Window(w), ScorerKind::MinKl) => min_kl(doc, w, self.config.lambda),
            (State::Window(_), ScorerKind::NsT) => unreachable!("temporal scorer always owns a tdf index"),
        }
    }

    /// Adds `doc` to the index. Empty documents still advance the window.
    pub fn update(&mut self, doc: Document) {
        match &mut self.state {
            State::Window(w) => {
                w.push(doc);
            }
            State::Tdf(t) => t.observe(&doc),
        }
    }

    /// Score, then update. Only the scoring step is timed.
    pub fn process(&mut self, doc: Document) -> Result<ScoreRecord, ScoreError> {
        let start = Instant::now();
        let raw_score = self.score(&doc)?;
        let elapsed = start.elapsed();
        let record = ScoreRecord {
            doc_id: doc.id.clone(),
            raw_score,
            scorer: self.config.kind,
            elapsed,
            zero_length: doc.is_zero_length(),
        };
        self.update(doc);
        Ok(record)
    }
}

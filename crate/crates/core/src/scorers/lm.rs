//! Unigram language models with linear interpolation smoothing, and the
//! minimum KL divergence baseline.
//!
//! The smoothing corpus for a scoring step is the window concatenated with
//! the incoming document. Without the incoming document, terms it
//! introduces would have zero probability under every window model.

use std::collections::HashMap;

use super::ScoreError;
use crate::text::Document;
use crate::window::WindowIndex;

/// Score reported by `min_kl` on an empty window, standing in for +inf so
/// it survives serialization. Any finite threshold marks it novel.
pub const MIN_KL_EMPTY_WINDOW: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct LanguageModel {
    probs: HashMap<String, f64>,
    /// Terms of the modelled document; KL sums run over these only.
    support: Vec<String>,
}

impl LanguageModel {
    /// A model from explicit probabilities. `support` lists the terms of
    /// the modelled document.
    pub fn from_parts(probs: HashMap<String, f64>, support: Vec<String>) -> Self {
        LanguageModel { probs, support }
    }

    pub fn prob(&self, term: &str) -> f64 {
        self.probs.get(term).copied().unwrap_or(0.0)
    }

    /// Total mass over the smoothed vocabulary.
    pub fn total(&self) -> f64 {
        self.probs.values().sum()
    }

    pub fn support(&self) -> &[String] {
        &self.support
    }
}

fn check_lambda(lambda: f64) -> Result<(), ScoreError> {
    if (0.0..=1.0).contains(&lambda) {
        Ok(())
    } else {
        Err(ScoreError::InvalidLambda(lambda))
    }
}

/// theta(q) = lambda * tf_d(q)/dl_d + (1 - lambda) * count_C(q)/|C| over the
/// union vocabulary. An empty side contributes its whole weight to the
/// other.
pub fn build_lm(doc: &Document, corpus: &Document, lambda: f64) -> Result<LanguageModel, ScoreError> {
    check_lambda(lambda)?;
    if doc.is_zero_length() && corpus.is_zero_length() {
        return Err(ScoreError::EmptyModel);
    }
    let (w_doc, w_corpus) = match (doc.is_zero_length(), corpus.is_zero_length()) {
        (true, _) => (0.0, 1.0),
        (_, true) => (1.0, 0.0),
        _ => (lambda, 1.0 - lambda),
    };
    let mut probs: HashMap<String, f64> = HashMap::new();
    if w_doc > 0.0 {
        let dl = doc.dl() as f64;
        for (term, tf) in doc.terms() {
            *probs.entry(term.to_owned()).or_default() += w_doc * f64::from(tf) / dl;
        }
    }
    if w_corpus > 0.0 {
        let total = corpus.dl() as f64;
        for (term, c) in corpus.terms() {
            *probs.entry(term.to_owned()).or_default() += w_corpus * f64::from(c) / total;
        }
    }
    // keep zero-probability vocabulary visible for lambda in {0, 1}
    for (term, _) in doc.terms().chain(corpus.terms()) {
        probs.entry(term.to_owned()).or_insert(0.0);
    }
    Ok(LanguageModel {
        probs,
        support: doc.terms().map(|(t, _)| t.to_owned()).collect(),
    })
}

/// KL(theta_d || theta_d') summed over the terms of d only.
pub fn kl_div(model: &LanguageModel, reference: &LanguageModel) -> Result<f64, ScoreError> {
    let mut sum = 0.0;
    for term in &model.support {
        let p = model.prob(term);
        if p == 0.0 {
            continue;
        }
        let q = reference.prob(term);
        if q == 0.0 {
            return Err(ScoreError::ZeroProbability(term.clone()));
        }
        sum += p * (p / q).ln();
    }
    Ok(sum)
}

/// Smallest divergence from `doc` to any window document.
pub fn min_kl(doc: &Document, window: &WindowIndex, lambda: f64) -> Result<f64, ScoreError> {
    check_lambda(lambda)?;
    if window.is_empty() {
        return Ok(MIN_KL_EMPTY_WINDOW);
    }
    if doc.is_zero_length() {
        return Ok(0.0);
    }
    let total = (window.sum_dl() + doc.dl()) as f64;
    let dl = doc.dl() as f64;
    // (term, theta_d(q), corpus probability)
    let terms: Vec<(&str, f64, f64)> = doc
        .terms()
        .map(|(term, tf)| {
            let pc = (window.summary_tf(term) + u64::from(tf)) as f64 / total;
            (term, lambda * f64::from(tf) / dl + (1.0 - lambda) * pc, pc)
        })
        .collect();

    let mut best = f64::INFINITY;
    for other in window.documents() {
        let (w_doc, w_corpus) = if other.is_zero_length() {
            (0.0, 1.0)
        } else {
            (lambda, 1.0 - lambda)
        };
        let other_dl = other.dl() as f64;
        let mut kl = 0.0;
        for &(term, p, pc) in &terms {
            if p == 0.0 {
                continue;
            }
            let doc_part = if w_doc > 0.0 {
                w_doc * f64::from(other.tf(term)) / other_dl
            } else {
                0.0
            };
            let q = doc_part + w_corpus * pc;
            if q == 0.0 {
                return Err(ScoreError::ZeroProbability(term.to_owned()));
            }
            kl += p * (p / q).ln();
        }
        best = best.min(kl);
    }
    Ok(best)
}

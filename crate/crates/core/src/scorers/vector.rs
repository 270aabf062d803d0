//! Vector-space baselines: cosine similarity against each window document
//! (max and mean) and against the window summary.

use crate::text::Document;
use crate::weighting::{TermStats, WeightingError, WeightingScheme};
use crate::window::WindowIndex;

/// tf x idf weights of one document, sorted by term, with the Euclidean
/// norm precomputed.
#[derive(Debug, Clone, PartialEq)]
pub struct TermWeights<'a> {
    weights: Vec<(&'a str, f64)>,
    norm: f64,
}

impl<'a> TermWeights<'a> {
    /// Weights must be sorted by term with no duplicates.
    pub fn from_sorted(weights: Vec<(&'a str, f64)>) -> Self {
        debug_assert!(weights.windows(2).all(|w| w[0].0 < w[1].0));
        let norm = weights.iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
        TermWeights { weights, norm }
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'a str, f64)> + '_ {
        self.weights.iter().copied()
    }
}

pub fn term_weights<'a, S: TermStats>(
    doc: &'a Document,
    stats: &S,
    scheme: &WeightingScheme,
) -> Result<TermWeights<'a>, WeightingError> {
    let n = stats.collection_size();
    let avdl = stats.avdl();
    let weights = doc
        .terms()
        .map(|(term, tf)| {
            let idf = scheme.idf_component(stats.doc_freq(term), n)?;
            Ok((term, scheme.tf_component(tf, doc.dl(), avdl) * idf))
        })
        .collect::<Result<Vec<_>, WeightingError>>()?;
    Ok(TermWeights::from_sorted(weights))
}

/// Dot product over common terms divided by the product of the full
/// Euclidean norms; 0 when either vector is all zero.
pub fn cosine(a: &TermWeights<'_>, b: &TermWeights<'_>) -> f64 {
    if a.norm == 0.0 || b.norm == 0.0 {
        return 0.0;
    }
    let (mut i, mut j) = (0, 0);
    let mut dot = 0.0;
    while i < a.weights.len() && j < b.weights.len() {
        let (ta, wa) = a.weights[i];
        let (tb, wb) = b.weights[j];
        match ta.cmp(tb) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                dot += wa * wb;
                i += 1;
                j += 1;
            }
        }
    }
    dot / (a.norm * b.norm)
}

/// Highest cosine similarity to any window document; 0 on an empty window.
pub fn max_cs(doc: &Document, window: &WindowIndex, scheme: &WeightingScheme) -> Result<f64, WeightingError> {
    if window.is_empty() {
        return Ok(0.0);
    }
    let stats = window.stats();
    let incoming = term_weights(doc, &stats, scheme)?;
    let mut best = f64::NEG_INFINITY;
    for other in window.documents() {
        best = best.max(cosine(&incoming, &term_weights(other, &stats, scheme)?));
    }
    Ok(best)
}

/// Mean cosine similarity over window documents; 0 on an empty window.
pub fn mean_cs(doc: &Document, window: &WindowIndex, scheme: &WeightingScheme) -> Result<f64, WeightingError> {
    if window.is_empty() {
        return Ok(0.0);
    }
    let stats = window.stats();
    let incoming = term_weights(doc, &stats, scheme)?;
    let mut sum = 0.0;
    for other in window.documents() {
        sum += cosine(&incoming, &term_weights(other, &stats, scheme)?);
    }
    Ok(sum / window.len() as f64)
}

/// Cosine similarity to the concatenation of the window documents; 0 on an
/// empty window.
pub fn agg_cs(doc: &Document, window: &WindowIndex, scheme: &WeightingScheme) -> Result<f64, WeightingError> {
    if window.is_empty() {
        return Ok(0.0);
    }
    let stats = window.stats();
    let incoming = term_weights(doc, &stats, scheme)?;
    let n = stats.collection_size();
    let avdl = stats.avdl();
    let summary_dl = window.sum_dl();
    let summary_weight = |term: &str, count: u64| -> Result<f64, WeightingError> {
        let tf = u32::try_from(count).unwrap_or(u32::MAX);
        Ok(scheme.tf_component(tf, summary_dl, avdl) * scheme.idf_component(stats.doc_freq(term), n)?)
    };

    let mut norm_sq = 0.0;
    for (term, count) in window.summary_counts() {
        let w = summary_weight(term, count)?;
        norm_sq += w * w;
    }
    if incoming.norm() == 0.0 || norm_sq == 0.0 {
        return Ok(0.0);
    }
    let mut dot = 0.0;
    for (term, w) in incoming.iter() {
        let count = window.summary_tf(term);
        if count > 0 {
            dot += w * summary_weight(term, count)?;
        }
    }
    Ok(dot / (incoming.norm() * norm_sq.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tw(pairs: &[(&'static str, f64)]) -> TermWeights<'static> {
        TermWeights::from_sorted(pairs.to_vec())
    }

    fn doc(id: &str, counts: &[(&str, u32)]) -> Document {
        Document::from_counts(id, 0, counts.iter().map(|&(t, c)| (t, c)))
    }

    #[test]
    fn cosine_examples() {
        let a = tw(&[("a", 0.3), ("b", 2.0)]);
        assert!((cosine(&a, &a) - 1.0).abs() < 1e-12);
        let v = cosine(&tw(&[("a", 1.0), ("b", 1.0)]), &tw(&[("a", 1.0)]));
        assert!((v - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert_eq!(cosine(&tw(&[("a", 1.0)]), &tw(&[("b", 1.0)])), 0.0);
        assert_eq!(cosine(&tw(&[]), &tw(&[("b", 1.0)])), 0.0);
        assert_eq!(cosine(&tw(&[("a", 0.0)]), &tw(&[("a", 1.0)])), 0.0);
    }

    #[test]
    fn summary_cosine_hand_case() {
        // raw counts as weights: summary {a:3, b:1} vs {a:1}
        let v = cosine(&tw(&[("a", 3.0), ("b", 1.0)]), &tw(&[("a", 1.0)]));
        assert!((v - 0.948_683_298_050_513_8).abs() < 1e-12);
    }

    #[test]
    fn empty_window_scores_zero() {
        let w = WindowIndex::new(3);
        let d = doc("d", &[("a", 1)]);
        let s = WeightingScheme::parse("kbn").unwrap();
        assert_eq!(max_cs(&d, &w, &s).unwrap(), 0.0);
        assert_eq!(mean_cs(&d, &w, &s).unwrap(), 0.0);
        assert_eq!(agg_cs(&d, &w, &s).unwrap(), 0.0);
    }

    #[test]
    fn max_and_mean_over_window() {
        // N = 2, df(a) = df(b) = 2, df(c) = 1. d and y have identical
        // weights; x differs by the extra c component.
        let s = WeightingScheme::parse("nsn").unwrap();
        let mut w = WindowIndex::new(2);
        w.push(doc("x", &[("a", 1), ("b", 1), ("c", 1)]));
        w.push(doc("y", &[("a", 1), ("b", 1)]));
        let d = doc("d", &[("a", 1), ("b", 1)]);
        let idf_a = (3.0f64 / 2.5).ln();
        let idf_c = (3.0f64 / 1.5).ln();
        let cos_x = 2.0 * idf_a * idf_a / ((2.0f64).sqrt() * idf_a * (2.0 * idf_a * idf_a + idf_c * idf_c).sqrt());
        assert!((max_cs(&d, &w, &s).unwrap() - 1.0).abs() < 1e-12);
        assert!((mean_cs(&d, &w, &s).unwrap() - (1.0 + cos_x) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn identical_to_a_window_document() {
        let s = WeightingScheme::parse("kbn").unwrap();
        let mut w = WindowIndex::new(4);
        for (i, terms) in [[("a", 1), ("b", 2)], [("c", 1), ("d", 1)], [("e", 3), ("f", 1)]]
            .iter()
            .enumerate()
        {
            w.push(doc(&i.to_string(), terms));
        }
        let d = doc("d", &[("c", 1), ("d", 1)]);
        assert!((max_cs(&d, &w, &s).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn agg_cs_of_single_document_window() {
        let s = WeightingScheme::parse("nsn").unwrap();
        let mut w = WindowIndex::new(3);
        let d = doc("d", &[("a", 2), ("b", 1)]);
        w.push(d.clone());
        assert!((agg_cs(&d, &w, &s).unwrap() - 1.0).abs() < 1e-12);
    }
}

//! Raw text to bag-of-words.
//!
//! The pipeline is tokenize, drop stopwords, stem, count. Stopwords are
//! matched on surface forms, so filtering happens before stemming.

mod porter;
mod stopwords;

use std::collections::BTreeMap;

pub use porter::porter_stem;
pub use stopwords::Stoplist;

/// Lowercased maximal runs of alphanumeric characters. Everything else is a
/// delimiter.
pub fn tokenize(raw: &str) -> Vec<String> {
    raw.split(|c: char| !c.is_alphanumeric())
        .filter(|s| !s.is_empty())
        .map(str::to_lowercase)
        .collect()
}

pub fn remove_stopwords(tokens: Vec<String>, stoplist: &Stoplist) -> Vec<String> {
    tokens.into_iter().filter(|t| !stoplist.contains(t)).collect()
}

/// A timestamped bag of words.
///
/// Terms are kept in a sorted map so iteration order, and therefore every
/// floating-point sum over a document, is deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub id: String,
    /// Stream position (arrival order).
    pub timestamp: u64,
    tf: BTreeMap<String, u32>,
    dl: u64,
}

impl Document {
    /// Builds a document from term counts. Zero counts are dropped.
    pub fn from_counts<I, S>(id: impl Into<String>, timestamp: u64, counts: I) -> Self
    where
        I: IntoIterator<Item = (S, u32)>,
        S: Into<String>,
    {
        let mut tf = BTreeMap::new();
        for (term, count) in counts {
            if count > 0 {
                *tf.entry(term.into()).or_insert(0) += count;
            }
        }
        let dl = tf.values().map(|&c| u64::from(c)).sum();
        Document {
            id: id.into(),
            timestamp,
            tf,
            dl,
        }
    }

    pub fn from_tokens<I, S>(id: impl Into<String>, timestamp: u64, tokens: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::from_counts(id, timestamp, tokens.into_iter().map(|t| (t, 1)))
    }

    pub fn tf(&self, term: &str) -> u32 {
        self.tf.get(term).copied().unwrap_or(0)
    }

    /// Distinct terms with their counts, in term order.
    pub fn terms(&self) -> impl ExactSizeIterator<Item = (&str, u32)> + '_ {
        self.tf.iter().map(|(t, &c)| (t.as_str(), c))
    }

    /// Length in tokens (L1 norm of the tf vector).
    pub fn dl(&self) -> u64 {
        self.dl
    }

    /// Number of distinct terms.
    pub fn uniq(&self) -> usize {
        self.tf.len()
    }

    /// Set when nothing survived preprocessing. Such documents still occupy
    /// a slot in the stream.
    pub fn is_zero_length(&self) -> bool {
        self.tf.is_empty()
    }
}

pub fn build_document(id: impl Into<String>, timestamp: u64, raw: &str, stoplist: &Stoplist) -> Document {
    let tokens = remove_stopwords(tokenize(raw), stoplist);
    Document::from_tokens(id, timestamp, tokens.iter().map(|t| porter_stem(t)))
}

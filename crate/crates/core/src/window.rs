//! Count-based sliding window over the last N documents.
//!
//! Document frequencies, total length and the aggregate term counts of the
//! window (the summary pseudo-document) are maintained incrementally: a push
//! adds the incoming document and subtracts the evicted one, so no update
//! ever rescans the window.

use std::collections::{HashMap, VecDeque};

use crate::text::Document;
use crate::weighting::{CollectionStats, TermStats};

#[derive(Debug, Clone)]
pub struct WindowIndex {
    capacity: usize,
    docs: VecDeque<Document>,
    df: HashMap<String, u32>,
    sum_dl: u64,
    summary_tf: HashMap<String, u64>,
}

impl WindowIndex {
    /// # Panics
    /// If `capacity` is zero.
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "window capacity must be positive");
        WindowIndex {
            capacity,
            docs: VecDeque::with_capacity(capacity + 1),
            df: HashMap::new(),
            sum_dl: 0,
            summary_tf: HashMap::new(),
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn documents(&self) -> impl ExactSizeIterator<Item = &Document> + '_ {
        self.docs.iter()
    }

    /// Appends `doc`, returning the evicted oldest document once the window
    /// is full.
    pub fn push(&mut self, doc: Document) -> Option<Document> {
        self.sum_dl += doc.dl();
        for (term, count) in doc.terms() {
            *self.df.entry(term.to_owned()).or_insert(0) += 1;
            *self.summary_tf.entry(term.to_owned()).or_insert(0) += u64::from(count);
        }
        self.docs.push_back(doc);
        if self.docs.len() <= self.capacity {
            return None;
        }
        let old = self.docs.pop_front()?;
        self.sum_dl -= old.dl();
        for (term, count) in old.terms() {
            decrement(&mut self.df, term, 1);
            decrement(&mut self.summary_tf, term, u64::from(count));
        }
        Some(old)
    }

    /// Borrowed statistics view; O(1).
    pub fn stats(&self) -> WindowStats<'_> {
        WindowStats { index: self }
    }

    pub fn df(&self, term: &str) -> u32 {
        self.df.get(term).copied().unwrap_or(0)
    }

    pub fn sum_dl(&self) -> u64 {
        self.sum_dl
    }

    /// Mean document length, 1 when the window is empty.
    pub fn avdl(&self) -> f64 {
        if self.docs.is_empty() {
            1.0
        } else {
            self.sum_dl as f64 / self.docs.len() as f64
        }
    }

    /// Aggregate count of `term` across the window.
    pub fn summary_tf(&self, term: &str) -> u64 {
        self.summary_tf.get(term).copied().unwrap_or(0)
    }

    /// Number of distinct terms present in the window.
    pub fn vocabulary_size(&self) -> usize {
        self.df.len()
    }

    pub(crate) fn summary_counts(&self) -> impl Iterator<Item = (&str, u64)> + '_ {
        self.summary_tf.iter().map(|(t, &c)| (t.as_str(), c))
    }

    /// Concatenation of every window document as one pseudo-document.
    pub fn summary_document(&self) -> Document {
        Document::from_counts(
            "summary",
            0,
            self.summary_tf
                .iter()
                .map(|(t, &c)| (t.clone(), u32::try_from(c).expect("summary count fits u32"))),
        )
    }
}

fn decrement<V>(map: &mut HashMap<String, V>, term: &str, by: V)
where
    V: Copy + PartialOrd + std::ops::SubAssign,
{
    // the caller only removes terms that a stored document contributed
    let Some(v) = map.get_mut(term) else {
        unreachable!("term {term:?} missing from window counts");
    };
    if *v <= by {
        map.remove(term);
    } else {
        *v -= by;
    }
}

/// Statistics view over a [`WindowIndex`]. Borrowing keeps it consistent:
/// the window cannot be pushed while a view is alive.
#[derive(Debug, Clone, Copy)]
pub struct WindowStats<'a> {
    index: &'a WindowIndex,
}

impl WindowStats<'_> {
    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn snapshot(&self) -> CollectionStats {
        CollectionStats {
            n: self.index.len(),
            avdl: self.index.avdl(),
            df: self.index.df.clone(),
        }
    }
}

impl TermStats for WindowStats<'_> {
    fn collection_size(&self) -> f64 {
        self.index.len() as f64
    }
    fn avdl(&self) -> f64 {
        self.index.avdl()
    }
    fn doc_freq(&self, term: &str) -> f64 {
        f64::from(self.index.df(term))
    }
}

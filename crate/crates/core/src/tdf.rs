//! Temporal document frequency.
//!
//! Each term carries a value that grows by one whenever the term occurs and
//! is scaled down by a decay function of the gap since its previous
//! occurrence:
//!
//! ```text
//! tdf(q, t) = tdf(q, t_last) * f(t - t_last) + 1      (first occurrence: 1)
//! ```
//!
//! Time is the document counter. Decay is applied lazily, on update and on
//! read, so nothing has to happen for terms that do not occur. A term whose
//! last occurrence is N or more documents back has left the window and reads
//! as zero; such entries can be purged at any time without changing a
//! query. No documents are stored.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::io::{self, BufRead, Write};
use std::str::FromStr;

use thiserror::Error;

use crate::text::Document;
use crate::weighting::{TermStats, WeightingError, WeightingScheme};

#[derive(Debug, Error)]
pub enum TdfError {
    #[error("decay window length must be positive")]
    ZeroWindow,
    #[error("decay rate alpha must be positive and finite, got {0}")]
    InvalidAlpha(f64),
    #[error("unknown decay function {0:?} (expected linear, exp1, exp2 or sigmoid)")]
    UnknownDecay(String),
    #[error("decay gap {delta} outside [1, {window}]")]
    DeltaOutOfRange { delta: u64, window: usize },
    #[error("snapshot line {line}: {reason}")]
    Snapshot { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DecayKind {
    /// 1 - (δ-1)/N
    Linear,
    /// e^{-(δ-1)/α}, concave in the sense of forgetting slowly at first
    Exp1,
    /// 1 - e^{(δ-N)/α}
    Exp2,
    /// 1 / (1 + e^{(δ-N/2)/α})
    Sigmoid,
}

impl DecayKind {
    pub const ALL: [DecayKind; 4] = [DecayKind::Linear, DecayKind::Exp1, DecayKind::Exp2, DecayKind::Sigmoid];

    pub fn name(self) -> &'static str {
        match self {
            DecayKind::Linear => "linear",
            DecayKind::Exp1 => "exp1",
            DecayKind::Exp2 => "exp2",
            DecayKind::Sigmoid => "sigmoid",
        }
    }
}

impl fmt::Display for DecayKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DecayKind {
    type Err = TdfError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DecayKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| TdfError::UnknownDecay(s.to_owned()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayConfig {
    pub kind: DecayKind,
    /// Window length N the decay reaches zero at.
    pub window: usize,
    /// Decay rate; ignored by `Linear`.
    pub alpha: f64,
}

impl DecayConfig {
    pub fn new(kind: DecayKind, window: usize, alpha: f64) -> Result<Self, TdfError> {
        let config = DecayConfig { kind, window, alpha };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), TdfError> {
        if self.window == 0 {
            return Err(TdfError::ZeroWindow);
        }
        if self.kind != DecayKind::Linear && !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(TdfError::InvalidAlpha(self.alpha));
        }
        Ok(())
    }

    /// Decay factor for a gap of `delta` documents, `1 <= delta <= N`.
    pub fn factor(&self, delta: u64) -> Result<f64, TdfError> {
        let n = self.window as u64;
        if delta < 1 || delta > n {
            return Err(TdfError::DeltaOutOfRange {
                delta,
                window: self.window,
            });
        }
        let d = delta as f64;
        let nf = n as f64;
        let alpha = self.alpha;
        Ok(match self.kind {
            DecayKind::Linear => 1.0 - (d - 1.0) / nf,
            DecayKind::Exp1 if delta == n => 0.0,
            DecayKind::Exp1 => (-(d - 1.0) / alpha).exp(),
            DecayKind::Exp2 => 1.0 - ((d - nf) / alpha).exp(),
            DecayKind::Sigmoid if delta == n => 0.0,
            DecayKind::Sigmoid => 1.0 / (1.0 + ((d - nf / 2.0) / alpha).exp()),
        })
    }
}

pub fn decay_factor(config: &DecayConfig, delta: u64) -> Result<f64, TdfError> {
    config.factor(delta)
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Entry {
    value: f64,
    t_last: u64,
}

#[derive(Debug, Clone)]
pub struct TdfIndex {
    decay: DecayConfig,
    now: u64,
    entries: HashMap<String, Entry>,
    /// Lengths of the last N documents, for the BM25 and pivot components.
    lengths: VecDeque<u64>,
    sum_lengths: u64,
    since_purge: usize,
}

impl TdfIndex {
    pub fn new(decay: DecayConfig) -> Result<Self, TdfError> {
        decay.validate()?;
        Ok(TdfIndex {
            decay,
            now: 0,
            entries: HashMap::new(),
            lengths: VecDeque::with_capacity(decay.window + 1),
            sum_lengths: 0,
            since_purge: 0,
        })
    }

    pub fn decay(&self) -> &DecayConfig {
        &self.decay
    }

    /// Number of documents observed so far.
    pub fn now(&self) -> u64 {
        self.now
    }

    pub fn window(&self) -> usize {
        self.decay.window
    }

    /// Stored entries, including stale ones not yet purged.
    pub fn entry_count(&self) -> usize {
        self.entries.len()
    }

    /// Advances time by one document and folds its distinct terms in.
    /// In-document multiplicity is ignored.
    pub fn observe(&mut self, doc: &Document) {
        self.now += 1;
        let now = self.now;
        let n = self.decay.window as u64;
        for (term, _) in doc.terms() {
            match self.entries.get_mut(term) {
                Some(e) => {
                    let delta = now - e.t_last;
                    e.value = if delta < n {
                        let f = self.decay.factor(delta).expect("1 <= delta < N");
                        e.value * f + 1.0
                    } else {
                        1.0
                    };
                    e.t_last = now;
                }
                None => {
                    self.entries.insert(
                        term.to_owned(),
                        Entry {
                            value: 1.0,
                            t_last: now,
                        },
                    );
                }
            }
        }

        self.lengths.push_back(doc.dl());
        self.sum_lengths += doc.dl();
        if self.lengths.len() > self.decay.window {
            self.sum_lengths -= self.lengths.pop_front().unwrap_or(0);
        }

        self.since_purge += 1;
        if self.since_purge >= self.decay.window {
            self.purge();
        }
    }

    /// Current decayed value; does not modify the entry.
    pub fn query_tdf(&self, term: &str) -> f64 {
        let Some(e) = self.entries.get(term) else {
            return 0.0;
        };
        let delta = self.now - e.t_last;
        if delta == 0 {
            return e.value;
        }
        if delta >= self.decay.window as u64 {
            return 0.0;
        }
        e.value * self.decay.factor(delta).expect("1 <= delta < N")
    }

    /// Inverse temporal document frequency. The decayed frequency is
    /// clamped to N so it keeps the `df <= N` meaning of a window count.
    pub fn itdf(&self, term: &str, scheme: &WeightingScheme) -> Result<f64, WeightingError> {
        let stats = self.stats();
        scheme.idf_component(stats.doc_freq(term), stats.collection_size())
    }

    pub fn stats(&self) -> TdfStats<'_> {
        TdfStats { index: self }
    }

    /// Drops entries that have left the window or decayed to zero.
    pub fn purge(&mut self) {
        self.since_purge = 0;
        let now = self.now;
        let n = self.decay.window as u64;
        let decay = self.decay;
        self.entries.retain(|_, e| {
            let delta = now - e.t_last;
            delta == 0 || (delta < n && decay.factor(delta).is_ok_and(|f| e.value * f > 0.0))
        });
    }

    pub fn write_snapshot<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "#tdf-index\t1")?;
        writeln!(out, "#now\t{}", self.now)?;
        writeln!(
            out,
            "#decay\t{}\t{}\t{}",
            self.decay.kind, self.decay.window, self.decay.alpha
        )?;
        let lengths: Vec<String> = self.lengths.iter().map(u64::to_string).collect();
        writeln!(out, "#lengths\t{}", lengths.join(","))?;
        let mut terms: Vec<_> = self.entries.iter().collect();
        terms.sort_by(|a, b| a.0.cmp(b.0));
        for (term, e) in terms {
            writeln!(out, "{term}\t{}\t{}", e.value, e.t_last)?;
        }
        Ok(())
    }

    pub fn read_snapshot<R: BufRead>(input: R) -> Result<Self, TdfError> {
        let mut now = None;
        let mut decay = None;
        let mut lengths = VecDeque::new();
        let mut entries = HashMap::new();
        for (i, line) in input.lines().enumerate() {
            let line = line?;
            let lineno = i + 1;
            let bad = |reason: &str| TdfError::Snapshot {
                line: lineno,
                reason: reason.to_owned(),
            };
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            match fields[0] {
                "#tdf-index" => {
                    if fields.get(1) != Some(&"1") {
                        return Err(bad("unsupported snapshot version"));
                    }
                }
                "#now" => {
                    now = Some(parse_field::<u64>(&fields, 1).ok_or_else(|| bad("bad #now"))?);
                }
                "#decay" => {
                    let kind: DecayKind = fields.get(1).ok_or_else(|| bad("missing decay kind"))?.parse()?;
                    let window = parse_field(&fields, 2).ok_or_else(|| bad("bad window"))?;
                    let alpha = parse_field(&fields, 3).ok_or_else(|| bad("bad alpha"))?;
                    decay = Some(DecayConfig::new(kind, window, alpha)?);
                }
                "#lengths" => {
                    let list = fields.get(1).copied().unwrap_or("");
                    for v in list.split(',').filter(|s| !s.is_empty()) {
                        lengths.push_back(v.parse().map_err(|_| bad("bad length"))?);
                    }
                }
                h if h.starts_with('#') => {}
                term => {
                    let value: f64 = parse_field(&fields, 1).ok_or_else(|| bad("bad value"))?;
                    let t_last = parse_field(&fields, 2).ok_or_else(|| bad("bad t_last"))?;
                    if fields.len() != 3 || value.is_nan() || value <= 0.0 {
                        return Err(bad("expected term, positive value, t_last"));
                    }
                    entries.insert(term.to_owned(), Entry { value, t_last });
                }
            }
        }
        let decay = decay.ok_or(TdfError::Snapshot {
            line: 0,
            reason: "missing #decay header".into(),
        })?;
        let now = now.ok_or(TdfError::Snapshot {
            line: 0,
            reason: "missing #now header".into(),
        })?;
        if entries.values().any(|e: &Entry| e.t_last > now) || lengths.len() > decay.window {
            return Err(TdfError::Snapshot {
                line: 0,
                reason: "entries inconsistent with header".into(),
            });
        }
        Ok(TdfIndex {
            decay,
            now,
            sum_lengths: lengths.iter().sum(),
            lengths,
            entries,
            since_purge: 0,
        })
    }
}

fn parse_field<T: FromStr>(fields: &[&str], i: usize) -> Option<T> {
    fields.get(i)?.parse().ok()
}

/// Statistics view used to plug temporal frequencies into the IDF formulas:
/// N is the window length and df is the decayed frequency clamped to N.
#[derive(Debug, Clone, Copy)]
pub struct TdfStats<'a> {
    index: &'a TdfIndex,
}

impl TermStats for TdfStats<'_> {
    fn collection_size(&self) -> f64 {
        self.index.decay.window as f64
    }
    fn avdl(&self) -> f64 {
        let lengths = &self.index.lengths;
        if lengths.is_empty() {
            1.0
        } else {
            self.index.sum_lengths as f64 / lengths.len() as f64
        }
    }
    fn doc_freq(&self, term: &str) -> f64 {
        self.index.query_tdf(term).min(self.collection_size())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg(kind: DecayKind, n: usize, alpha: f64) -> DecayConfig {
        DecayConfig::new(kind, n, alpha).unwrap()
    }

    fn doc(terms: &[&str]) -> Document {
        Document::from_tokens("d", 0, terms.iter().copied())
    }

    /// Stream where `term` occurs exactly at the given 1-based ticks.
    fn index_with_occurrences(decay: DecayConfig, ticks: &[u64], upto: u64) -> TdfIndex {
        let mut idx = TdfIndex::new(decay).unwrap();
        for t in 1..=upto {
            if ticks.contains(&t) {
                idx.observe(&doc(&["q"]));
            } else {
                idx.observe(&doc(&["filler"]));
            }
        }
        idx
    }

    #[test]
    fn decay_examples() {
        assert_eq!(cfg(DecayKind::Linear, 100, 1.0).factor(1).unwrap(), 1.0);
        assert_eq!(cfg(DecayKind::Sigmoid, 100, 10.0).factor(50).unwrap(), 0.5);
        for alpha in [0.5, 3.0, 40.0] {
            assert_eq!(cfg(DecayKind::Exp2, 100, alpha).factor(100).unwrap(), 0.0);
            assert_eq!(cfg(DecayKind::Exp1, 100, alpha).factor(100).unwrap(), 0.0);
            assert_eq!(cfg(DecayKind::Sigmoid, 100, alpha).factor(100).unwrap(), 0.0);
        }
        assert_eq!(cfg(DecayKind::Linear, 100, 1.0).factor(51).unwrap(), 0.5);
        assert_eq!(cfg(DecayKind::Exp1, 100, 5.0).factor(1).unwrap(), 1.0);
    }

    #[test]
    fn decay_rejects_out_of_range_gaps() {
        let c = cfg(DecayKind::Linear, 10, 1.0);
        assert!(matches!(c.factor(0), Err(TdfError::DeltaOutOfRange { delta: 0, .. })));
        assert!(matches!(c.factor(11), Err(TdfError::DeltaOutOfRange { delta: 11, .. })));
        assert!(c.factor(10).is_ok());
    }

    #[test]
    fn config_validation() {
        assert!(matches!(
            DecayConfig::new(DecayKind::Exp1, 10, 0.0),
            Err(TdfError::InvalidAlpha(_))
        ));
        assert!(matches!(
            DecayConfig::new(DecayKind::Sigmoid, 0, 1.0),
            Err(TdfError::ZeroWindow)
        ));
        // alpha is unused for linear
        assert!(DecayConfig::new(DecayKind::Linear, 10, 0.0).is_ok());
        assert_eq!("exp2".parse::<DecayKind>().unwrap(), DecayKind::Exp2);
        assert!("cubic".parse::<DecayKind>().is_err());
    }

    #[test]
    fn first_occurrence_sets_one() {
        let mut idx = TdfIndex::new(cfg(DecayKind::Sigmoid, 100, 10.0)).unwrap();
        assert_eq!(idx.query_tdf("nexus"), 0.0);
        idx.observe(&doc(&["nexus", "nexus"]));
        assert_eq!(idx.query_tdf("nexus"), 1.0);
    }

    #[test]
    fn recurrence_examples() {
        let linear = cfg(DecayKind::Linear, 100, 1.0);
        // three consecutive occurrences ending at t=10 give value 3 at t_last=10
        let mut idx = index_with_occurrences(linear, &[8, 9, 10], 10);
        assert_eq!(idx.query_tdf("q"), 3.0);
        idx.observe(&doc(&["q"]));
        assert_eq!(idx.query_tdf("q"), 4.0);

        // reappearing 51 documents later: 3 * 0.5 + 1
        let mut idx = index_with_occurrences(linear, &[8, 9, 10], 60);
        idx.observe(&doc(&["q"]));
        assert_eq!(idx.now(), 61);
        assert_eq!(idx.query_tdf("q"), 2.5);
    }

    #[test]
    fn query_is_lazy_and_read_only() {
        let linear = cfg(DecayKind::Linear, 10, 1.0);
        let mut idx = index_with_occurrences(linear, &[1, 2, 3, 4], 4);
        assert_eq!(idx.query_tdf("q"), 4.0);
        idx.observe(&doc(&["x"]));
        idx.observe(&doc(&["x"]));
        // delta = 2: 4 * (1 - 1/10)
        assert_eq!(idx.query_tdf("q"), 4.0 * 0.9);
        assert_eq!(idx.query_tdf("q"), 4.0 * 0.9);
        for _ in 0..8 {
            idx.observe(&doc(&["x"]));
        }
        assert_eq!(idx.now() - 4, 10);
        assert_eq!(idx.query_tdf("q"), 0.0);
    }

    #[test]
    fn itdf_examples() {
        let scheme = WeightingScheme::parse("nsd").unwrap();
        let mut idx = TdfIndex::new(cfg(DecayKind::Linear, 100, 1.0)).unwrap();
        let unseen = idx.itdf("q", &scheme).unwrap();
        assert!((unseen - 5.308_267_697_401_205).abs() < 1e-9);

        // dense term over 140 documents: tdf 140, clamped to N
        for _ in 0..140 {
            idx.observe(&doc(&["q"]));
        }
        assert_eq!(idx.query_tdf("q"), 140.0);
        let clamped = idx.itdf("q", &scheme).unwrap();
        assert!((clamped - 0.004_962_789_342_129_097).abs() < 1e-9);
    }

    #[test]
    fn itdf_of_fractional_frequency() {
        // tdf = 9.5 via linear decay: value 10 read at delta = 6 on N = 100
        // gives 10 * 0.95
        let scheme = WeightingScheme::parse("nsd").unwrap();
        let linear = cfg(DecayKind::Linear, 100, 1.0);
        let ticks: Vec<u64> = (1..=10).collect();
        let idx = index_with_occurrences(linear, &ticks, 16);
        assert!((idx.query_tdf("q") - 9.5).abs() < 1e-12);
        let v = idx.itdf("q", &scheme).unwrap();
        assert!((v - 2.312_535_423_847_214).abs() < 1e-9);
    }

    #[test]
    fn purge_keeps_query_results() {
        let decay = cfg(DecayKind::Exp2, 5, 2.0);
        let mut idx = TdfIndex::new(decay).unwrap();
        let words = ["a", "b", "c", "d", "e", "f", "g"];
        for (i, w) in words.iter().enumerate() {
            idx.observe(&doc(&[w, words[i / 3]]));
        }
        let before: Vec<f64> = words.iter().map(|w| idx.query_tdf(w)).collect();
        idx.purge();
        let after: Vec<f64> = words.iter().map(|w| idx.query_tdf(w)).collect();
        assert_eq!(before, after);
    }

    #[test]
    fn snapshot_roundtrip_and_errors() {
        let mut idx = TdfIndex::new(cfg(DecayKind::Sigmoid, 7, 1.5)).unwrap();
        for i in 0..20u32 {
            let terms = [format!("t{}", i % 5), format!("u{}", i % 3)];
            idx.observe(&Document::from_tokens("d", 0, terms.iter().map(String::as_str)));
        }
        let mut buf = Vec::new();
        idx.write_snapshot(&mut buf).unwrap();
        let back = TdfIndex::read_snapshot(buf.as_slice()).unwrap();
        assert_eq!(back.now(), idx.now());
        assert_eq!(back.entries, idx.entries);
        assert_eq!(back.lengths, idx.lengths);
        assert_eq!(back.decay, idx.decay);

        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("#tdf-index\t1\n#now\t20\n#decay\tsigmoid\t7\t1.5\n"));
        assert!(TdfIndex::read_snapshot("#now\t3\n".as_bytes()).is_err());
        assert!(TdfIndex::read_snapshot("#now\t3\n#decay\tlinear\t5\t1\nq\tx\t1\n".as_bytes()).is_err());
        assert!(TdfIndex::read_snapshot("#now\t3\n#decay\tlinear\t5\t1\nq\t2\t9\n".as_bytes()).is_err());
    }

    proptest! {
        #[test]
        fn decay_non_increasing_and_bounded(
            kind in prop::sample::select(DecayKind::ALL.to_vec()),
            n in 1usize..300,
            alpha in 0.01f64..100.0,
        ) {
            let c = cfg(kind, n, alpha);
            let mut prev = f64::INFINITY;
            for delta in 1..=n as u64 {
                let f = c.factor(delta).unwrap();
                prop_assert!((0.0..=1.0).contains(&f), "{kind} f({delta})={f}");
                prop_assert!(f <= prev);
                prev = f;
            }
        }

        #[test]
        fn dense_linear_tdf_counts_occurrences(n in 1usize..50, k in 1usize..50) {
            prop_assume!(k <= n);
            let mut idx = TdfIndex::new(cfg(DecayKind::Linear, n, 1.0)).unwrap();
            for _ in 0..k {
                idx.observe(&doc(&["q"]));
            }
            prop_assert_eq!(idx.query_tdf("q"), k as f64);
        }

        #[test]
        fn query_never_exceeds_last_value(
            kind in prop::sample::select(DecayKind::ALL.to_vec()),
            n in 2usize..30,
            occurrences in prop::collection::vec(any::<bool>(), 1..120),
        ) {
            let mut idx = TdfIndex::new(cfg(kind, n, 3.0)).unwrap();
            let mut at_last = 0.0;
            for occurs in occurrences {
                if occurs {
                    idx.observe(&doc(&["q"]));
                    at_last = idx.query_tdf("q");
                } else {
                    idx.observe(&doc(&["z"]));
                }
                prop_assert!(idx.query_tdf("q") <= at_last);
            }
        }

        /// Per-tick (eager) decay gives the same values as lazy decay for
        /// exp1 (constant per-step ratio) and for linear (telescoping ratios).
        #[test]
        fn eager_and_lazy_decay_agree(
            kind in prop::sample::select(vec![DecayKind::Linear, DecayKind::Exp1]),
            n in 2usize..40,
            occurrences in prop::collection::vec(any::<bool>(), 1..150),
        ) {
            let decay = cfg(kind, n, 4.0);
            let mut idx = TdfIndex::new(decay).unwrap();
            // eager state: value already decayed to the current tick, plus gap
            let mut eager: Option<(f64, u64)> = None;
            for occurs in occurrences {
                if let Some((v, gap)) = eager.as_mut() {
                    *gap += 1;
                    if *gap >= n as u64 {
                        eager = None;
                    } else if *gap >= 2 {
                        let ratio = decay.factor(*gap).unwrap() / decay.factor(*gap - 1).unwrap();
                        *v *= ratio;
                    }
                }
                if occurs {
                    idx.observe(&doc(&["q"]));
                    eager = Some((eager.map_or(0.0, |(v, _)| v) + 1.0, 0));
                } else {
                    idx.observe(&doc(&["z"]));
                }
                let expected = eager.map_or(0.0, |(v, _)| v);
                let got = idx.query_tdf("q");
                prop_assert!((got - expected).abs() <= 1e-12 * expected.max(1.0), "{got} vs {expected}");
            }
        }

        #[test]
        fn purged_entries_bounded_by_window_vocabulary(
            n in 1usize..12,
            stream in prop::collection::vec(prop::collection::vec(0u8..30, 0..5), 1..80),
        ) {
            let mut idx = TdfIndex::new(cfg(DecayKind::Sigmoid, n, 2.0)).unwrap();
            for (i, terms) in stream.iter().enumerate() {
                let tokens: Vec<String> = terms.iter().map(|t| format!("t{t}")).collect();
                idx.observe(&Document::from_tokens("d", 0, tokens.iter().map(String::as_str)));
                idx.purge();
                let lo = (i + 1).saturating_sub(n);
                let recent: std::collections::HashSet<u8> =
                    stream[lo..=i].iter().flatten().copied().collect();
                prop_assert!(idx.entry_count() <= recent.len());
            }
        }
    }
}

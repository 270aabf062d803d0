//! SMART-style term weighting: TF, IDF and normalization components,
//! extended with the BM25 saturation and pivot pieces.
//!
//! A scheme is named by three letters, e.g. `nsd` (natural tf, smoothed idf,
//! document-length normalization) or `kbn` (BM25). All logarithms are
//! natural.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::text::Document;

pub const DEFAULT_K1: f64 = 1.2;
pub const DEFAULT_B: f64 = 0.75;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WeightingError {
    #[error("invalid weighting scheme {0:?}: expected three SMART letters (tf in bnlk, idf in tspb, norm in nudcp)")]
    InvalidScheme(String),
    #[error("scheme {0} normalizes twice: BM25 tf with b > 0 already includes length normalization")]
    DoubleNormalization(String),
    #[error("invalid BM25 parameters k1={k1}, b={b}")]
    InvalidParameters { k1: f64, b: f64 },
    #[error("idf variant {variant} undefined for df={df}, N={n}")]
    DegenerateFrequency { variant: char, df: f64, n: f64 },
    #[error("normalization {0} of an empty document")]
    ZeroNorm(char),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TfVariant {
    Boolean,
    Natural,
    Log,
    Bm25,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IdfVariant {
    /// log(N/df)
    Plain,
    /// log((N+1)/(df+0.5))
    Smoothed,
    /// log((N-df)/df)
    Probabilistic,
    /// log((N-df+0.5)/(df+0.5))
    Bm25,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NormVariant {
    None,
    Unique,
    Length,
    Cosine,
    Pivot,
}

impl TfVariant {
    pub fn letter(self) -> char {
        match self {
            TfVariant::Boolean => 'b',
            TfVariant::Natural => 'n',
            TfVariant::Log => 'l',
            TfVariant::Bm25 => 'k',
        }
    }
    fn from_letter(c: char) -> Option<Self> {
        Some(match c {
            'b' => TfVariant::Boolean,
            'n' => TfVariant::Natural,
            'l' => TfVariant::Log,
            'k' => TfVariant::Bm25,
            _ => return None,
        })
    }
}

impl IdfVariant {
    pub fn letter(self) -> char {
        match self {
            IdfVariant::Plain => 't',
            IdfVariant::Smoothed => 's',
            IdfVariant::Probabilistic => 'p',
            IdfVariant::Bm25 => 'b',
        }
    }
    fn from_letter(c: char) -> Option<Self> {
        Some(match c {
            't' => IdfVariant::Plain,
            's' => IdfVariant::Smoothed,
            'p' => IdfVariant::Probabilistic,
            'b' => IdfVariant::Bm25,
            _ => return None,
        })
    }
    /// Smoothed variants are total over 0 <= df <= N.
    pub fn is_smoothed(self) -> bool {
        matches!(self, IdfVariant::Smoothed | IdfVariant::Bm25)
    }
}

impl NormVariant {
    pub fn letter(self) -> char {
        match self {
            NormVariant::None => 'n',
            NormVariant::Unique => 'u',
            NormVariant::Length => 'd',
            NormVariant::Cosine => 'c',
            NormVariant::Pivot => 'p',
        }
    }
    fn from_letter(c: char) -> Option<Self> {
        Some(match c {
            'n' => NormVariant::None,
            'u' => NormVariant::Unique,
            'd' => NormVariant::Length,
            'c' => NormVariant::Cosine,
            'p' => NormVariant::Pivot,
            _ => return None,
        })
    }
}

/// A SMART triplet plus the BM25 parameters shared by the `k` tf and the
/// `p` normalization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightingScheme {
    pub tf: TfVariant,
    pub idf: IdfVariant,
    pub norm: NormVariant,
    pub k1: f64,
    pub b: f64,
}

impl WeightingScheme {
    /// Parses a scheme with default BM25 parameters and validates it.
    pub fn parse(code: &str) -> Result<Self, WeightingError> {
        code.parse()
    }

    pub fn with_bm25(mut self, k1: f64, b: f64) -> Result<Self, WeightingError> {
        self.k1 = k1;
        self.b = b;
        self.validate()?;
        Ok(self)
    }

    pub fn code(&self) -> String {
        [self.tf.letter(), self.idf.letter(), self.norm.letter()]
            .iter()
            .collect()
    }

    pub fn validate(&self) -> Result<(), WeightingError> {
        if !(self.k1 > 0.0 && self.k1.is_finite()) || !(0.0..=1.0).contains(&self.b) {
            return Err(WeightingError::InvalidParameters { k1: self.k1, b: self.b });
        }
        if self.tf == TfVariant::Bm25 && self.b > 0.0 && self.norm != NormVariant::None {
            return Err(WeightingError::DoubleNormalization(self.code()));
        }
        Ok(())
    }

    pub fn tf_component(&self, tf: u32, dl: u64, avdl: f64) -> f64 {
        if tf == 0 {
            return 0.0;
        }
        let tf = f64::from(tf);
        match self.tf {
            TfVariant::Boolean => 1.0,
            TfVariant::Natural => tf,
            TfVariant::Log => 1.0 + tf.ln(),
            TfVariant::Bm25 => {
                let k1 = self.k1;
                (k1 + 1.0) * tf / (k1 * self.pivot(dl, avdl) + tf)
            }
        }
    }

    /// Takes real-valued frequencies so temporal document frequencies can
    /// be plugged in directly.
    pub fn idf_component(&self, df: f64, n: f64) -> Result<f64, WeightingError> {
        let degenerate = || WeightingError::DegenerateFrequency {
            variant: self.idf.letter(),
            df,
            n,
        };
        match self.idf {
            IdfVariant::Plain => {
                if df <= 0.0 {
                    return Err(degenerate());
                }
                Ok((n / df).ln())
            }
            IdfVariant::Smoothed => Ok(((n + 1.0) / (df + 0.5)).ln()),
            IdfVariant::Probabilistic => {
                if df <= 0.0 || df >= n {
                    return Err(degenerate());
                }
                Ok(((n - df) / df).ln())
            }
            IdfVariant::Bm25 => Ok(((n - df + 0.5) / (df + 0.5)).ln()),
        }
    }

    pub fn norm_component(&self, doc: &Document, avdl: f64) -> Result<f64, WeightingError> {
        if self.norm == NormVariant::None {
            return Ok(1.0);
        }
        if doc.is_zero_length() {
            return Err(WeightingError::ZeroNorm(self.norm.letter()));
        }
        Ok(match self.norm {
            NormVariant::None => 1.0,
            NormVariant::Unique => doc.uniq() as f64,
            NormVariant::Length => doc.dl() as f64,
            NormVariant::Cosine => doc
                .terms()
                .map(|(_, c)| f64::from(c) * f64::from(c))
                .sum::<f64>()
                .sqrt(),
            NormVariant::Pivot => self.pivot(doc.dl(), avdl),
        })
    }

    fn pivot(&self, dl: u64, avdl: f64) -> f64 {
        1.0 - self.b + self.b * dl as f64 / avdl
    }
}

impl Default for WeightingScheme {
    /// `nsd`, the best performing scheme in the reference experiments.
    fn default() -> Self {
        WeightingScheme {
            tf: TfVariant::Natural,
            idf: IdfVariant::Smoothed,
            norm: NormVariant::Length,
            k1: DEFAULT_K1,
            b: DEFAULT_B,
        }
    }
}

impl FromStr for WeightingScheme {
    type Err = WeightingError;

    fn from_str(code: &str) -> Result<Self, Self::Err> {
        let invalid = || WeightingError::InvalidScheme(code.to_owned());
        let letters: Vec<char> = code.chars().collect();
        let [t, i, n] = letters[..] else {
            return Err(invalid());
        };
        let scheme = WeightingScheme {
            tf: TfVariant::from_letter(t).ok_or_else(invalid)?,
            idf: IdfVariant::from_letter(i).ok_or_else(invalid)?,
            norm: NormVariant::from_letter(n).ok_or_else(invalid)?,
            k1: DEFAULT_K1,
            b: DEFAULT_B,
        };
        scheme.validate()?;
        Ok(scheme)
    }
}

impl fmt::Display for WeightingScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.code())
    }
}

/// Corpus statistics consumed by the weighting functions.
///
/// Implemented by the sliding window (exact integer document frequencies),
/// by the temporal index (decayed frequencies) and by [`CollectionStats`].
pub trait TermStats {
    /// N, the number of documents in memory.
    fn collection_size(&self) -> f64;
    /// Mean document length; 1 for an empty collection.
    fn avdl(&self) -> f64;
    fn doc_freq(&self, term: &str) -> f64;
}

/// An owned statistics snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct CollectionStats {
    pub n: usize,
    pub avdl: f64,
    pub df: HashMap<String, u32>,
}

impl CollectionStats {
    /// Recomputes statistics from scratch over a set of documents.
    pub fn from_documents<'a, I>(docs: I) -> Self
    where
        I: IntoIterator<Item = &'a Document>,
    {
        let mut n = 0;
        let mut total = 0u64;
        let mut df = HashMap::new();
        for doc in docs {
            n += 1;
            total += doc.dl();
            for (term, _) in doc.terms() {
                *df.entry(term.to_owned()).or_insert(0) += 1;
            }
        }
        let avdl = if n == 0 { 1.0 } else { total as f64 / n as f64 };
        CollectionStats { n, avdl, df }
    }
}

impl TermStats for CollectionStats {
    fn collection_size(&self) -> f64 {
        self.n as f64
    }
    fn avdl(&self) -> f64 {
        self.avdl
    }
    fn doc_freq(&self, term: &str) -> f64 {
        self.df.get(term).copied().map_or(0.0, f64::from)
    }
}

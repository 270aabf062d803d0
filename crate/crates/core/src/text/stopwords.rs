use std::collections::HashSet;
use std::io::{self, BufRead};

const DEFAULT_ENGLISH: &str = include_str!("../../data/stopwords_en.txt");

/// A set of lowercase surface forms to drop before stemming.
#[derive(Debug, Clone, Default)]
pub struct Stoplist {
    words: HashSet<String>,
}

impl Stoplist {
    pub fn empty() -> Self {
        Self::default()
    }

    /// The bundled English list.
    pub fn english() -> Self {
        Self::parse(DEFAULT_ENGLISH)
    }

    pub fn from_words<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Stoplist {
            words: words.into_iter().map(|w| w.as_ref().to_lowercase()).collect(),
        }
    }

    /// One token per line; blank lines and lines starting with `#` are
    /// ignored.
    pub fn parse(text: &str) -> Self {
        Self::from_words(text.lines().filter_map(parse_line))
    }

    pub fn read<R: BufRead>(reader: R) -> io::Result<Self> {
        let mut words = HashSet::new();
        for line in reader.lines() {
            if let Some(w) = parse_line(&line?) {
                words.insert(w.to_lowercase());
            }
        }
        Ok(Stoplist { words })
    }

    pub fn contains(&self, token: &str) -> bool {
        self.words.contains(token)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

fn parse_line(line: &str) -> Option<&str> {
    let w = line.trim();
    (!w.is_empty() && !w.starts_with('#')).then_some(w)
}

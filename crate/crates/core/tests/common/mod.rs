//! From-scratch reference implementations used as oracles. Documents are
//! plain token lists here and every statistic is recomputed per call, so
//! nothing is shared with the incremental code under test.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap, HashSet};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type Tokens = Vec<String>;

pub fn counts(doc: &[String]) -> BTreeMap<&str, f64> {
    let mut m = BTreeMap::new();
    for t in doc {
        *m.entry(t.as_str()).or_insert(0.0) += 1.0;
    }
    m
}

pub fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * b.abs().max(1.0)
}

/// Random stream of token lists over `vocab` words; roughly one document
/// in twenty is empty.
pub fn random_stream(rng: &mut ChaCha8Rng, docs: usize, vocab: usize, max_len: usize) -> Vec<Tokens> {
    (0..docs)
        .map(|_| {
            let len = if rng.gen_bool(0.05) {
                0
            } else {
                rng.gen_range(1..=max_len)
            };
            // skewed draw so some terms are frequent
            (0..len)
                .map(|_| {
                    let u: f64 = rng.gen();
                    format!("w{}", ((u * u) * vocab as f64) as usize)
                })
                .collect()
        })
        .collect()
}

pub struct Stats {
    pub n: f64,
    pub avdl: f64,
    pub df: HashMap<String, f64>,
}

pub fn stats(window: &[Tokens]) -> Stats {
    let mut df = HashMap::new();
    let mut total = 0.0;
    for d in window {
        total += d.len() as f64;
        for t in d.iter().collect::<HashSet<_>>() {
            *df.entry(t.clone()).or_insert(0.0) += 1.0;
        }
    }
    let n = window.len() as f64;
    Stats {
        n,
        avdl: if window.is_empty() { 1.0 } else { total / n },
        df,
    }
}

/// Weighting scheme by letters, e.g. "nsd".
pub fn weight(code: &str, tf: f64, dl: f64, df: f64, s: &Stats) -> f64 {
    let c: Vec<char> = code.chars().collect();
    let (k1, b) = (1.2, 0.75);
    let tfw = match c[0] {
        'b' => 1.0,
        'n' => tf,
        'l' => 1.0 + tf.ln(),
        'k' => (k1 + 1.0) * tf / (k1 * (1.0 - b + b * dl / s.avdl) + tf),
        other => panic!("tf {other}"),
    };
    let n = s.n;
    let idf = match c[1] {
        's' => ((n + 1.0) / (df + 0.5)).ln(),
        'b' => ((n - df + 0.5) / (df + 0.5)).ln(),
        't' => (n / df).ln(),
        'p' => ((n - df) / df).ln(),
        other => panic!("idf {other}"),
    };
    tfw * idf
}

pub fn norm(code: &str, doc: &[String], s: &Stats) -> f64 {
    let c = counts(doc);
    match code.chars().nth(2).unwrap() {
        'n' => 1.0,
        'u' => c.len() as f64,
        'd' => doc.len() as f64,
        'c' => c.values().map(|v| v * v).sum::<f64>().sqrt(),
        'p' => 1.0 - 0.75 + 0.75 * doc.len() as f64 / s.avdl,
        other => panic!("norm {other}"),
    }
}

pub fn ns(code: &str, doc: &[String], window: &[Tokens]) -> f64 {
    if doc.is_empty() {
        return 0.0;
    }
    let s = stats(window);
    let sum: f64 = counts(doc)
        .iter()
        .map(|(t, &tf)| weight(code, tf, doc.len() as f64, s.df.get(*t).copied().unwrap_or(0.0), &s))
        .sum();
    sum / norm(code, doc, &s)
}

fn vector(code: &str, doc: &[String], s: &Stats) -> HashMap<String, f64> {
    counts(doc)
        .into_iter()
        .map(|(t, tf)| {
            let df = s.df.get(t).copied().unwrap_or(0.0);
            (t.to_owned(), weight(code, tf, doc.len() as f64, df, s))
        })
        .collect()
}

fn cos(a: &HashMap<String, f64>, b: &HashMap<String, f64>) -> f64 {
    let na = a.values().map(|v| v * v).sum::<f64>().sqrt();
    let nb = b.values().map(|v| v * v).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    let dot: f64 = a.iter().map(|(t, w)| w * b.get(t).copied().unwrap_or(0.0)).sum();
    dot / (na * nb)
}

pub fn similarities(code: &str, doc: &[String], window: &[Tokens]) -> Vec<f64> {
    let s = stats(window);
    let d = vector(code, doc, &s);
    window.iter().map(|w| cos(&d, &vector(code, w, &s))).collect()
}

pub fn max_cs(code: &str, doc: &[String], window: &[Tokens]) -> f64 {
    if window.is_empty() {
        return 0.0;
    }
    similarities(code, doc, window)
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn mean_cs(code: &str, doc: &[String], window: &[Tokens]) -> f64 {
    if window.is_empty() {
        return 0.0;
    }
    similarities(code, doc, window).iter().sum::<f64>() / window.len() as f64
}

pub fn agg_cs(code: &str, doc: &[String], window: &[Tokens]) -> f64 {
    if window.is_empty() {
        return 0.0;
    }
    let s = stats(window);
    let summary: Tokens = window.iter().flatten().cloned().collect();
    cos(&vector(code, doc, &s), &vector(code, &summary, &s))
}

/// Minimum detection cost at default costs over the given thresholds,
/// higher scores meaning novel.
pub fn min_cost_over(scores: &[f64], targets: &[bool], thresholds: &[f64]) -> (f64, f64) {
    let nt = targets.iter().filter(|&&t| t).count() as f64;
    let nn = targets.len() as f64 - nt;
    let mut best = (f64::INFINITY, f64::NAN, f64::INFINITY);
    for &th in thresholds {
        let mut miss = 0.0;
        let mut fa = 0.0;
        for (&s, &t) in scores.iter().zip(targets) {
            if t && s <= th {
                miss += 1.0;
            }
            if !t && s > th {
                fa += 1.0;
            }
        }
        let cost = 0.5 * miss / nt + 0.5 * fa / nn;
        let pm = miss / nt;
        if cost < best.0 - 1e-12 || ((cost - best.0).abs() <= 1e-12 && pm < best.2) {
            best = (cost, th, pm);
        }
    }
    (best.0, best.1)
}

/// Every midpoint of every pair of distinct scores plus both infinities,
/// in ascending order.
pub fn all_midpoints(scores: &[f64]) -> Vec<f64> {
    let mut ts = vec![f64::NEG_INFINITY, f64::INFINITY];
    let mut v = scores.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    for w in v.windows(2) {
        ts.push(w[0] + (w[1] - w[0]) / 2.0);
    }
    ts.sort_by(f64::total_cmp);
    ts
}

/// Contiguous k-fold cross-validation computed directly.
pub fn cv_cost(scores: &[f64], targets: &[bool], k: usize) -> Vec<f64> {
    let n = scores.len();
    (0..k)
        .map(|f| {
            let (lo, hi) = (f * n / k, (f + 1) * n / k);
            let train_s: Vec<f64> = scores[..lo].iter().chain(&scores[hi..]).copied().collect();
            let train_t: Vec<bool> = targets[..lo].iter().chain(&targets[hi..]).copied().collect();
            let (_, th) = min_cost_over(&train_s, &train_t, &all_midpoints(&train_s));
            min_cost_over(&scores[lo..hi], &targets[lo..hi], &[th]).0
        })
        .collect()
}

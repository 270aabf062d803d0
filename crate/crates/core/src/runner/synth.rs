//! Labelled synthetic streams: clusters of documents drawn from private
//! topic vocabularies plus a shared background vocabulary.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{StreamRecord, Timestamp};

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub seed: u64,
    pub clusters: usize,
    /// Inclusive range of documents per cluster.
    pub cluster_size: (usize, usize),
    /// Distinct topic words per cluster; no two clusters share one.
    pub topic_vocab: usize,
    pub background_vocab: usize,
    /// Share of each document's tokens drawn from the background words.
    pub background_fraction: f64,
    /// Inclusive token-count range, sampled log-uniformly.
    pub doc_length: (usize, usize),
    /// 0 keeps clusters as contiguous runs; larger values let documents of
    /// neighbouring clusters interleave.
    pub overlap: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            seed: 0,
            clusters: 100,
            cluster_size: (1, 10),
            topic_vocab: 20,
            background_vocab: 200,
            background_fraction: 0.3,
            doc_length: (20, 400),
            overlap: 0.0,
        }
    }
}

/// Documents carry `cluster_id`; the first one of each cluster in stream
/// order is the novel one.
pub fn generate_synthetic(config: &SynthConfig) -> Vec<StreamRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let (min_size, max_size) = config.cluster_size;
    let (min_len, max_len) = config.doc_length;
    let mean_size = (min_size + max_size) as f64 / 2.0;

    // (sort key, cluster, text)
    let mut docs: Vec<(f64, usize, String)> = Vec::new();
    for cluster in 0..config.clusters {
        let size = rng.gen_range(min_size..=max_size.max(min_size));
        for _ in 0..size {
            let len = log_uniform(&mut rng, min_len.max(1), max_len.max(min_len).max(1));
            let mut words = Vec::with_capacity(len);
            for _ in 0..len {
                let background =
                    config.background_vocab > 0 && rng.gen_bool(config.background_fraction.clamp(0.0, 1.0));
                if background || config.topic_vocab == 0 {
                    words.push(format!("bg{}", rng.gen_range(0..config.background_vocab.max(1))));
                } else {
                    words.push(format!("c{cluster}t{}", rng.gen_range(0..config.topic_vocab)));
                }
            }
            let position = docs.len() as f64;
            let jitter = if config.overlap > 0.0 {
                config.overlap * 2.0 * mean_size * rng.gen::<f64>()
            } else {
                0.0
            };
            docs.push((position + jitter, cluster, words.join(" ")));
        }
    }
    docs.sort_by(|a, b| a.0.total_cmp(&b.0));
    docs.into_iter()
        .enumerate()
        .map(|(i, (_, cluster, text))| StreamRecord {
            id: format!("d{i}"),
            timestamp: Timestamp::Seconds(i as u64),
            title: None,
            snippet: None,
            text,
            cluster_id: Some(format!("c{cluster}")),
        })
        .collect()
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: usize, hi: usize) -> usize {
    if lo >= hi {
        return lo;
    }
    let x = rng.gen_range((lo as f64).ln()..=((hi as f64) + 1.0).ln()).exp();
    (x.floor() as usize).clamp(lo, hi)
}

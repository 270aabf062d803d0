//! Per-document scoring latency across scorers and window lengths.

use std::io::{self, Write};
use std::time::{Duration, Instant};

use super::RunError;
use crate::scorers::{Detector, DetectorConfig, ScorerKind};
use crate::text::Document;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub scorers: Vec<ScorerKind>,
    pub windows: Vec<usize>,
    /// Timed passes over the documents, after one discarded warm-up pass.
    pub repetitions: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            scorers: vec![ScorerKind::Ns, ScorerKind::MeanCs],
            windows: (1..=10).map(|i| i * 20).collect(),
            repetitions: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub scorer: ScorerKind,
    pub window: usize,
    pub mean_score: Duration,
    pub p95_score: Duration,
    /// Index maintenance, reported apart from scoring.
    pub mean_update: Duration,
}

impl BenchRow {
    pub const HEADER: &'static str = "scorer\tN\tmean_score_us\tp95_score_us\tmean_update_us";

    pub fn write_tsv<W: Write>(rows: &[BenchRow], mut out: W) -> io::Result<()> {
        writeln!(out, "{}", Self::HEADER)?;
        for r in rows {
            writeln!(
                out,
                "{}\t{}\t{:.3}\t{:.3}\t{:.3}",
                r.scorer,
                r.window,
                micros(r.mean_score),
                micros(r.p95_score),
                micros(r.mean_update)
            )?;
        }
        Ok(())
    }
}

fn micros(d: Duration) -> f64 {
    d.as_secs_f64() * 1e6
}

/// Streams `docs` through each scorer at each window length, timing the
/// scoring and update steps of every document separately.
pub fn bench(docs: &[Document], config: &BenchConfig) -> Result<Vec<BenchRow>, RunError> {
    let mut rows = Vec::new();
    for &scorer in &config.scorers {
        for &window in &config.windows {
            let detector_config = DetectorConfig::new(scorer, window);
            pass(docs, &detector_config)?;
            let mut score_times = Vec::with_capacity(docs.len() * config.repetitions);
            let mut update_total = Duration::ZERO;
            for _ in 0..config.repetitions.max(1) {
                let (s, u) = pass(docs, &detector_config)?;
                score_times.extend(s);
                update_total += u;
            }
            score_times.sort_unstable();
            let n = score_times.len().max(1);
            let total: Duration = score_times.iter().sum();
            let p95 = score_times
                .get(((n as f64 * 0.95).ceil() as usize).saturating_sub(1))
                .copied()
                .unwrap_or_default();
            rows.push(BenchRow {
                scorer,
                window,
                mean_score: total / n as u32,
                p95_score: p95,
                mean_update: update_total / n as u32,
            });
        }
    }
    Ok(rows)
}

fn pass(docs: &[Document], config: &DetectorConfig) -> Result<(Vec<Duration>, Duration), RunError> {
    let mut detector = Detector::new(config.clone())?;
    let mut score_times = Vec::with_capacity(docs.len());
    let mut update = Duration::ZERO;
    for doc in docs {
        let doc = doc.clone();
        let start = Instant::now();
        std::hint::black_box(detector.score(&doc)?);
        score_times.push(start.elapsed());
        let start = Instant::now();
        detector.update(doc);
        update += start.elapsed();
    }
    Ok((score_times, update))
}

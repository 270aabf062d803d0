//! Detection cost evaluation: first-of-cluster labels, threshold sweeps,
//! DET points and cross-validated cost.

use std::collections::{HashMap, HashSet};
use std::io::{self, BufRead, Write};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

use crate::scorers::{is_novel, Orientation, ScoreRecord};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("no target (novel) documents to evaluate")]
    NoTargets,
    #[error("no non-target documents to evaluate")]
    NoNonTargets,
    #[error("fold {fold} lacks targets or non-targets")]
    FoldTooSmall { fold: usize },
    #[error("cannot split {n} documents into {k} folds")]
    InvalidFolds { k: usize, n: usize },
    #[error("invalid cost configuration: {0}")]
    InvalidCost(String),
    #[error("document {0:?} has no ground-truth label")]
    Unlabeled(String),
    #[error("records mix scorers with different orientations")]
    MixedOrientation,
    #[error("truth file line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Novel,
    NotNovel,
    Excluded,
}

impl Label {
    pub fn name(self) -> &'static str {
        match self {
            Label::Novel => "novel",
            Label::NotNovel => "not_novel",
            Label::Excluded => "excluded",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct GroundTruth {
    labels: HashMap<String, Label>,
    /// Insertion order, kept for serialization.
    order: Vec<String>,
}

impl GroundTruth {
    pub fn insert(&mut self, id: impl Into<String>, label: Label) {
        let id = id.into();
        if self.labels.insert(id.clone(), label).is_none() {
            self.order.push(id);
        }
    }

    pub fn get(&self, id: &str) -> Option<Label> {
        self.labels.get(id).copied()
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn count(&self, label: Label) -> usize {
        self.labels.values().filter(|&&l| l == label).count()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Label)> + '_ {
        self.order.iter().map(|id| (id.as_str(), self.labels[id]))
    }

    /// `doc_id \t label` lines.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (id, label) in self.iter() {
            writeln!(out, "{id}\t{}", label.name())?;
        }
        Ok(())
    }

    pub fn read_tsv<R: BufRead>(input: R) -> Result<Self, EvalError> {
        let mut truth = GroundTruth::default();
        for (i, line) in input.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let parse_err = |reason: &str| EvalError::Parse {
                line: i + 1,
                reason: reason.to_owned(),
            };
            let (id, label) = line
                .split_once('\t')
                .ok_or_else(|| parse_err("expected two tab-separated fields"))?;
            let label = match label.trim() {
                "novel" => Label::Novel,
                "not_novel" => Label::NotNovel,
                "excluded" => Label::Excluded,
                other => return Err(parse_err(&format!("unknown label {other:?}"))),
            };
            truth.insert(id, label);
        }
        Ok(truth)
    }
}

/// First document of each cluster is novel, later ones are not. Documents
/// in `mixed` clusters, or without a cluster, are excluded.
pub fn derive_labels<'a, I>(docs: I, mixed: &HashSet<String>) -> GroundTruth
where
    I: IntoIterator<Item = (&'a str, Option<&'a str>)>,
{
    let mut seen: HashSet<&str> = HashSet::new();
    let mut truth = GroundTruth::default();
    for (id, cluster) in docs {
        let label = match cluster {
            None => Label::Excluded,
            Some(c) if mixed.contains(c) => Label::Excluded,
            Some(c) if seen.insert(c) => Label::Novel,
            Some(_) => Label::NotNovel,
        };
        truth.insert(id, label);
    }
    truth
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostConfig {
    pub c_miss: f64,
    pub c_fa: f64,
    pub p_target: f64,
}

impl Default for CostConfig {
    fn default() -> Self {
        CostConfig {
            c_miss: 1.0,
            c_fa: 1.0,
            p_target: 0.5,
        }
    }
}

impl CostConfig {
    pub fn validate(&self) -> Result<(), EvalError> {
        if !(self.p_target > 0.0 && self.p_target < 1.0) {
            return Err(EvalError::InvalidCost(format!(
                "p_target {} not in (0, 1)",
                self.p_target
            )));
        }
        if !(self.c_miss >= 0.0 && self.c_fa >= 0.0) {
            return Err(EvalError::InvalidCost("costs must be non-negative".into()));
        }
        Ok(())
    }
}

pub fn detection_cost(p_miss: f64, p_fa: f64, config: &CostConfig) -> f64 {
    config.c_miss * p_miss * config.p_target + config.c_fa * p_fa * (1.0 - config.p_target)
}

/// Inverse standard normal CDF with p clipped to [1e-6, 1 - 1e-6].
pub fn probit(p: f64) -> f64 {
    const EPS: f64 = 1e-6;
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    normal.inverse_cdf(p.clamp(EPS, 1.0 - EPS))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetPoint {
    pub threshold: f64,
    pub p_miss: f64,
    pub p_fa: f64,
    pub cost: f64,
}

impl DetPoint {
    fn new(threshold: f64, misses: usize, fas: usize, targets: usize, non_targets: usize, cost: &CostConfig) -> Self {
        let p_miss = misses as f64 / targets as f64;
        let p_fa = fas as f64 / non_targets as f64;
        DetPoint {
            threshold,
            p_miss,
            p_fa,
            cost: detection_cost(p_miss, p_fa, cost),
        }
    }

    pub fn probit_miss(&self) -> f64 {
        probit(self.p_miss)
    }

    pub fn probit_fa(&self) -> f64 {
        probit(self.p_fa)
    }
}

/// Scores with binary target labels, in stream order.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledScores {
    pub orientation: Orientation,
    pub scores: Vec<f64>,
    pub targets: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalOptions {
    /// Drop documents that were empty after preprocessing.
    pub exclude_zero_length: bool,
    /// Drop this many leading documents (e.g. the window warm-up).
    pub warmup: usize,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            exclude_zero_length: true,
            warmup: 0,
        }
    }
}

impl LabeledScores {
    pub fn new(orientation: Orientation) -> Self {
        LabeledScores {
            orientation,
            scores: Vec::new(),
            targets: Vec::new(),
        }
    }

    pub fn push(&mut self, score: f64, target: bool) {
        self.scores.push(score);
        self.targets.push(target);
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn target_count(&self) -> usize {
        self.targets.iter().filter(|&&t| t).count()
    }

    /// Joins records with labels, dropping excluded documents.
    pub fn from_records(
        records: &[ScoreRecord],
        truth: &GroundTruth,
        options: &EvalOptions,
    ) -> Result<Self, EvalError> {
        let orientation = records
            .first()
            .map_or(Orientation::HigherIsNovel, ScoreRecord::orientation);
        let mut out = LabeledScores::new(orientation);
        for r in records.iter().skip(options.warmup) {
            if r.orientation() != orientation {
                return Err(EvalError::MixedOrientation);
            }
            if options.exclude_zero_length && r.zero_length {
                continue;
            }
            match truth.get(&r.doc_id) {
                None => return Err(EvalError::Unlabeled(r.doc_id.clone())),
                Some(Label::Excluded) => {}
                Some(label) => out.push(r.raw_score, label == Label::Novel),
            }
        }
        Ok(out)
    }

    fn subset(&self, idx: &[usize]) -> LabeledScores {
        LabeledScores {
            orientation: self.orientation,
            scores: idx.iter().map(|&i| self.scores[i]).collect(),
            targets: idx.iter().map(|&i| self.targets[i]).collect(),
        }
    }

    /// Miss and false-alarm rates at a fixed threshold.
    pub fn point_at(&self, threshold: f64, cost: &CostConfig) -> Result<DetPoint, EvalError> {
        let (targets, non_targets) = self.class_sizes()?;
        let mut misses = 0;
        let mut fas = 0;
        for (&s, &t) in self.scores.iter().zip(&self.targets) {
            let novel = is_novel(s, self.orientation, threshold);
            match (t, novel) {
                (true, false) => misses += 1,
                (false, true) => fas += 1,
                _ => {}
            }
        }
        Ok(DetPoint::new(threshold, misses, fas, targets, non_targets, cost))
    }

    fn class_sizes(&self) -> Result<(usize, usize), EvalError> {
        let targets = self.target_count();
        if targets == 0 {
            return Err(EvalError::NoTargets);
        }
        if targets == self.len() {
            return Err(EvalError::NoNonTargets);
        }
        Ok((targets, self.len() - targets))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    /// One point per candidate threshold, thresholds ascending.
    pub points: Vec<DetPoint>,
    best: usize,
}

impl Sweep {
    /// The minimum-cost point.
    pub fn best(&self) -> &DetPoint {
        &self.points[self.best]
    }
}

/// Costs within this distance count as tied.
const COST_TIE: f64 = 1e-12;

/// Evaluates every threshold that changes a decision: midpoints between
/// consecutive distinct scores plus -inf and +inf. Among minimum-cost
/// points the one with lower p_miss wins, then the lower threshold.
pub fn sweep(data: &LabeledScores, cost: &CostConfig) -> Result<Sweep, EvalError> {
    cost.validate()?;
    let (targets, non_targets) = data.class_sizes()?;
    let mut order: Vec<(f64, bool)> = data.scores.iter().copied().zip(data.targets.iter().copied()).collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0));

    // Walk thresholds upward. `below_t` / `below_n` count targets and
    // non-targets with score < threshold.
    let mut points = Vec::with_capacity(order.len() + 1);
    let mut below_t = 0;
    let mut below_n = 0;
    let mut i = 0;
    let mut threshold = f64::NEG_INFINITY;
    loop {
        let (misses, fas) = match data.orientation {
            Orientation::HigherIsNovel => (below_t, non_targets - below_n),
            Orientation::LowerIsNovel => (targets - below_t, below_n),
        };
        points.push(DetPoint::new(threshold, misses, fas, targets, non_targets, cost));
        if i == order.len() {
            break;
        }
        let value = order[i].0;
        while i < order.len() && order[i].0 == value {
            if order[i].1 {
                below_t += 1;
            } else {
                below_n += 1;
            }
            i += 1;
        }
        threshold = match order.get(i) {
            Some(&(next, _)) => value + (next - value) / 2.0,
            None => f64::INFINITY,
        };
    }

    let mut best = 0;
    for (k, p) in points.iter().enumerate().skip(1) {
        let b = &points[best];
        if p.cost < b.cost - COST_TIE || ((p.cost - b.cost).abs() <= COST_TIE && p.p_miss < b.p_miss) {
            best = k;
        }
    }
    Ok(Sweep { points, best })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CvConfig {
    pub folds: usize,
    /// Shuffle documents with this seed before splitting; contiguous
    /// chronological blocks when `None`.
    pub shuffle: Option<u64>,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig {
            folds: 5,
            shuffle: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvReport {
    /// Threshold chosen on each training part.
    pub thresholds: Vec<f64>,
    /// Cost on each test part.
    pub fold_costs: Vec<f64>,
}

impl CvReport {
    pub fn average_cost(&self) -> f64 {
        self.fold_costs.iter().sum::<f64>() / self.fold_costs.len() as f64
    }
}

/// For each fold, picks the minimum-cost threshold on the other folds and
/// measures the cost on this one.
pub fn cross_validate(data: &LabeledScores, cv: &CvConfig, cost: &CostConfig) -> Result<CvReport, EvalError> {
    let n = data.len();
    let k = cv.folds;
    if k < 2 || k > n {
        return Err(EvalError::InvalidFolds { k, n });
    }
    let mut idx: Vec<usize> = (0..n).collect();
    if let Some(seed) = cv.shuffle {
        idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    let mut report = CvReport {
        thresholds: Vec::with_capacity(k),
        fold_costs: Vec::with_capacity(k),
    };
    for fold in 0..k {
        let (lo, hi) = (fold * n / k, (fold + 1) * n / k);
        let test = data.subset(&idx[lo..hi]);
        let train_idx: Vec<usize> = idx[..lo].iter().chain(&idx[hi..]).copied().collect();
        let train = data.subset(&train_idx);
        let t = test.target_count();
        if t == 0 || t == test.len() {
            return Err(EvalError::FoldTooSmall { fold });
        }
        let threshold = sweep(&train, cost)?.best().threshold;
        report.thresholds.push(threshold);
        report.fold_costs.push(test.point_at(threshold, cost)?.cost);
    }
    Ok(report)
}

/// DET curve as TSV: threshold, p_miss, p_fa, probit_miss, probit_fa.
pub fn write_det_tsv<W: Write>(points: &[DetPoint], mut out: W) -> io::Result<()> {
    writeln!(out, "threshold\tp_miss\tp_fa\tprobit_miss\tprobit_fa")?;
    for p in points {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            p.threshold,
            p.p_miss,
            p.p_fa,
            p.probit_miss(),
            p.probit_fa()
        )?;
    }
    Ok(())
}

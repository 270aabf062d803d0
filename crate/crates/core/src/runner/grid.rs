//! Cross-validated cost over a grid of scorer configurations.

use std::io::{self, Write};

use log::warn;
use rayon::prelude::*;

use super::{score_documents, RunConfig, RunError};
use crate::evaluation::{cross_validate, CostConfig, GroundTruth, LabeledScores};
use crate::scorers::ScorerKind;
use crate::tdf::DecayKind;
use crate::text::Document;
use crate::weighting::WeightingScheme;

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    /// Settings shared by every cell (field, folds, BM25 parameters, ...).
    pub base: RunConfig,
    pub scorers: Vec<ScorerKind>,
    /// `None` stands for each scorer's default scheme.
    pub schemes: Vec<Option<WeightingScheme>>,
    pub windows: Vec<usize>,
    /// Decay settings; only the temporal scorer iterates over them.
    pub decays: Vec<(DecayKind, f64)>,
}

impl GridSpec {
    pub fn configs(&self) -> Vec<RunConfig> {
        let mut out = Vec::new();
        for &scorer in &self.scorers {
            for scheme in &self.schemes {
                for &window in &self.windows {
                    let decays: Vec<(DecayKind, f64)> = if scorer == ScorerKind::NsT {
                        self.decays.clone()
                    } else {
                        vec![(self.base.decay, self.base.alpha)]
                    };
                    for (decay, alpha) in decays {
                        out.push(RunConfig {
                            scorer,
                            scheme: *scheme,
                            window,
                            decay,
                            alpha,
                            ..self.base.clone()
                        });
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CostRow {
    pub scorer: ScorerKind,
    pub scheme: String,
    pub window: usize,
    pub decay: Option<(DecayKind, f64)>,
    /// NaN when the configuration could not be evaluated.
    pub avg_cost: f64,
}

fn evaluate_cell(
    docs: &[Document],
    truth: &GroundTruth,
    config: &RunConfig,
    cost: &CostConfig,
) -> Result<f64, RunError> {
    let records = score_documents(docs.iter().cloned(), config)?;
    let data = LabeledScores::from_records(&records, truth, &config.eval_options())?;
    Ok(cross_validate(&data, &config.cv_config(), cost)?.average_cost())
}

/// Evaluates every grid cell in parallel. Rows come back in
/// `GridSpec::configs` order.
pub fn run_grid(docs: &[Document], truth: &GroundTruth, spec: &GridSpec, cost: &CostConfig) -> Vec<CostRow> {
    spec.configs()
        .par_iter()
        .map(|config| {
            let avg_cost = evaluate_cell(docs, truth, config, cost).unwrap_or_else(|e| {
                warn!("{} {} N={}: {e}", config.scorer, config.scheme().code(), config.window);
                f64::NAN
            });
            CostRow {
                scorer: config.scorer,
                scheme: config.scheme().code(),
                window: config.window,
                decay: (config.scorer == ScorerKind::NsT).then_some((config.decay, config.alpha)),
                avg_cost,
            }
        })
        .collect()
}

pub fn write_cost_csv<W: Write>(rows: &[CostRow], mut out: W) -> io::Result<()> {
    writeln!(out, "scorer,scheme,N,decay,alpha,avgC_Det")?;
    for r in rows {
        let (decay, alpha) = match r.decay {
            Some((d, a)) => (d.name().to_owned(), a.to_string()),
            None => ("-".to_owned(), "-".to_owned()),
        };
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.scorer, r.scheme, r.window, decay, alpha, r.avg_cost
        )?;
    }
    Ok(())
}

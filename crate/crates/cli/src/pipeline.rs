//! End-to-end scoring of datasets: evaluation runs, threshold sweeps and
//! the string baselines.

use gted_core::evalkit::{self, ConfusionMatrix, MetricReport, SweepPoint};
use gted_core::parser::tokenize;
use gted_core::parser::TokenKind;
use gted_core::standardize::CANONICAL_NAME;
use gted_core::{passes_threshold, score, tree_of, OperatorTree, Score};
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::config::Config;
use crate::dataset::{Dataset, EvalRecord, MalformedLine};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("record `{0}` has no human verdict")]
    MissingVerdict(String),
    #[error(transparent)]
    Eval(#[from] evalkit::EvalError),
}

/// Serializes an infinite distance as the string `"inf"`.
fn ser_distance<S: Serializer>(d: &f64, s: S) -> Result<S::Ok, S::Error> {
    if d.is_finite() {
        s.serialize_f64(*d)
    } else {
        s.serialize_str("inf")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecordRow {
    pub id: String,
    #[serde(serialize_with = "ser_distance")]
    pub distance: f64,
    pub similarity: Option<f64>,
    pub decision: bool,
    pub human: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedRecord {
    pub id: String,
    pub reason: String,
    pub human: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub dataset: String,
    pub config: Config,
    pub records: usize,
    pub rows: Vec<RecordRow>,
    /// Unscorable records; each counts as a negative decision.
    pub skipped: Vec<SkippedRecord>,
    pub malformed_lines: Vec<MalformedLine>,
    pub confusion: ConfusionMatrix,
    pub metrics: MetricReport,
}

fn trees(record: &EvalRecord, config: &Config) -> Result<(OperatorTree, OperatorTree), String> {
    let label =
        tree_of(&record.label_fl, &config.standardize).map_err(|e| format!("label_fl: {e}"))?;
    let pred =
        tree_of(&record.pred_fl, &config.standardize).map_err(|e| format!("pred_fl: {e}"))?;
    Ok((label, pred))
}

/// Scores one record, or explains why it cannot be scored.
pub fn score_record(record: &EvalRecord, config: &Config) -> Result<Score, String> {
    let (label, pred) = trees(record, config)?;
    Ok(score(
        &label,
        &pred,
        &config.transformations(),
        config.gted.clamp_negative,
    ))
}

fn verdicts(dataset: &Dataset) -> Result<Vec<bool>, RunError> {
    dataset
        .records
        .iter()
        .map(|r| {
            r.human
                .ok_or_else(|| RunError::MissingVerdict(r.id.clone()))
        })
        .collect()
}

pub fn evaluate(dataset: &Dataset, config: &Config) -> Result<RunReport, RunError> {
    let humans = verdicts(dataset)?;
    // Order-preserving parallel map: results come back in dataset order.
    let scores: Vec<Result<Score, String>> = dataset
        .records
        .par_iter()
        .map(|r| score_record(r, config))
        .collect();

    let theta = config.gted.theta;
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    let mut confusion = ConfusionMatrix::default();
    for ((record, human), scored) in dataset.records.iter().zip(humans).zip(scores) {
        match scored {
            Ok(s) => {
                let decision = passes_threshold(s.similarity, theta);
                confusion.record(decision, human);
                rows.push(RecordRow {
                    id: record.id.clone(),
                    distance: s.distance,
                    similarity: s.similarity,
                    decision,
                    human,
                });
            }
            Err(reason) => {
                confusion.record(false, human);
                skipped.push(SkippedRecord {
                    id: record.id.clone(),
                    reason,
                    human,
                });
            }
        }
    }
    debug_assert_eq!(rows.len() + skipped.len(), dataset.records.len());
    Ok(RunReport {
        dataset: dataset.path.display().to_string(),
        config: config.clone(),
        records: dataset.records.len(),
        rows,
        skipped,
        malformed_lines: dataset.malformed.clone(),
        metrics: evalkit::report(&confusion)?,
        confusion,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMetric {
    Gted,
    Bleu,
}

/// Computes every record's score once, then evaluates each threshold.
pub fn sweep_command(
    dataset: &Dataset,
    config: &Config,
    metric: SweepMetric,
    thetas: &[f64],
) -> Result<Vec<SweepPoint>, RunError> {
    let humans = verdicts(dataset)?;
    let sims: Vec<Option<f64>> = dataset
        .records
        .par_iter()
        .map(|r| match metric {
            SweepMetric::Gted => score_record(r, config).ok().and_then(|s| s.similarity),
            SweepMetric::Bleu => bleu_score(r),
        })
        .collect();
    let pairs: Vec<(Option<f64>, bool)> = sims.into_iter().zip(humans).collect();
    Ok(evalkit::sweep(&pairs, thetas)?)
}

/// Replaces the declared theorem name with `thm`, leaving everything else
/// (including whitespace) untouched.
pub fn normalize_theorem_name(text: &str) -> String {
    let tokens = tokenize(text);
    if let [kw, name, ..] = tokens.as_slice() {
        if kw.kind == TokenKind::Keyword
            && matches!(kw.text.as_str(), "theorem" | "lemma")
            && name.kind == TokenKind::Identifier
        {
            return format!(
                "{}{CANONICAL_NAME}{}",
                &text[..name.span.start],
                &text[name.span.end..]
            );
        }
    }
    text.to_string()
}

fn bleu_score(r: &EvalRecord) -> Option<f64> {
    evalkit::bleu(
        &normalize_theorem_name(&r.pred_fl),
        &normalize_theorem_name(&r.label_fl),
    )
    .ok()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Baseline {
    Identity,
    Bleu,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BaselineReport {
    pub metric: Baseline,
    /// Threshold applied to BLEU; absent for identity match.
    pub theta: Option<f64>,
    pub confusion: ConfusionMatrix,
    pub metrics: MetricReport,
}

pub fn baselines(
    dataset: &Dataset,
    baseline: Baseline,
    theta: f64,
) -> Result<BaselineReport, RunError> {
    let humans = verdicts(dataset)?;
    let mut confusion = ConfusionMatrix::default();
    for (r, human) in dataset.records.iter().zip(humans) {
        let decision = match baseline {
            Baseline::Identity => evalkit::identity_match(
                &normalize_theorem_name(&r.label_fl),
                &normalize_theorem_name(&r.pred_fl),
            ),
            Baseline::Bleu => passes_threshold(bleu_score(r), theta),
        };
        confusion.record(decision, human);
    }
    Ok(BaselineReport {
        metric: baseline,
        theta: (baseline == Baseline::Bleu).then_some(theta),
        metrics: evalkit::report(&confusion)?,
        confusion,
    })
}

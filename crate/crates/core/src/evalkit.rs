//! Evaluation harness: confusion matrices, precision/recall/accuracy/kappa,
//! the Identity Match and BLEU baselines, and threshold sweeps.

use std::collections::HashMap;
use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::gted::passes_threshold;
use crate::parser::tokenize;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("{decisions} decisions but {truth} truth values")]
    LengthMismatch { decisions: usize, truth: usize },
    #[error("no items to evaluate")]
    EmptyMatrix,
    #[error("input has no tokens")]
    EmptyInput,
    #[error("invalid threshold grid: {0}")]
    InvalidGrid(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl ConfusionMatrix {
    pub const fn new(tp: u64, tn: u64, fp: u64, fn_: u64) -> Self {
        ConfusionMatrix { tp, tn, fp, fn_ }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.tn + self.fp + self.fn_
    }

    pub fn predicted_positive(&self) -> u64 {
        self.tp + self.fp
    }

    /// Adds one (decision, truth) observation.
    pub fn record(&mut self, decision: bool, truth: bool) {
        match (decision, truth) {
            (true, true) => self.tp += 1,
            (false, false) => self.tn += 1,
            (true, false) => self.fp += 1,
            (false, true) => self.fn_ += 1,
        }
    }
}

/// Derived statistics. Precision and recall are `None` when their
/// denominator is zero and print as `0/0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricReport {
    #[serde(serialize_with = "ser_ratio")]
    pub precision: Option<f64>,
    #[serde(serialize_with = "ser_ratio")]
    pub recall: Option<f64>,
    pub accuracy: f64,
    pub kappa: f64,
}

fn ser_ratio<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.serialize_f64(*x),
        None => s.serialize_str(UNDEFINED),
    }
}

pub const UNDEFINED: &str = "0/0";

/// Percentage with two decimals, e.g. `58.20%`, or `0/0`.
pub fn format_percent(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{:.2}%", x * 100.0),
        None => UNDEFINED.to_string(),
    }
}

pub fn format_kappa(k: f64) -> String {
    let s = format!("{k:.3}");
    // Avoid printing "-0.000" for tiny negative values.
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

impl fmt::Display for MetricReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "precision {}  recall {}  accuracy {}  kappa {}",
            format_percent(self.precision),
            format_percent(self.recall),
            format_percent(Some(self.accuracy)),
            format_kappa(self.kappa)
        )
    }
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

pub fn report(cm: &ConfusionMatrix) -> Result<MetricReport, EvalError> {
    let total = cm.total();
    if total == 0 {
        return Err(EvalError::EmptyMatrix);
    }
    let n = total as f64;
    let (tp, tn, fp, fn_) = (cm.tp as f64, cm.tn as f64, cm.fp as f64, cm.fn_ as f64);
    let p_o = (tp + tn) / n;
    let p_e = ((tp + fp) * (tp + fn_) + (fn_ + tn) * (fp + tn)) / (n * n);
    let kappa = if p_e >= 1.0 {
        0.0
    } else {
        (p_o - p_e) / (1.0 - p_e)
    };
    Ok(MetricReport {
        precision: ratio(cm.tp, cm.tp + cm.fp),
        recall: ratio(cm.tp, cm.tp + cm.fn_),
        accuracy: p_o,
        kappa,
    })
}

pub fn confusion(decisions: &[bool], truth: &[bool]) -> Result<ConfusionMatrix, EvalError> {
    if decisions.len() != truth.len() {
        return Err(EvalError::LengthMismatch {
            decisions: decisions.len(),
            truth: truth.len(),
        });
    }
    if decisions.is_empty() {
        return Err(EvalError::EmptyMatrix);
    }
    let mut cm = ConfusionMatrix::default();
    for (&d, &t) in decisions.iter().zip(truth) {
        cm.record(d, t);
    }
    Ok(cm)
}

// ---------------------------------------------------------------------------
// Baselines

/// Equality after deleting every whitespace character.
pub fn identity_match(label: &str, pred: &str) -> bool {
    let strip = |s: &str| s.chars().filter(|c| !c.is_whitespace()).collect::<String>();
    strip(label) == strip(pred)
}

pub const BLEU_MAX_ORDER: usize = 4;

fn ngram_counts(tokens: &[&str], n: usize) -> HashMap<Vec<String>, usize> {
    let mut counts = HashMap::new();
    for w in tokens.windows(n) {
        *counts
            .entry(w.iter().map(|s| s.to_string()).collect())
            .or_insert(0) += 1;
    }
    counts
}

/// Sentence BLEU over lexer tokens, without smoothing.
///
/// The n-gram order goes up to 4 but never beyond the shorter input, so
/// that two identical short statements still score 1.
pub fn bleu(pred: &str, reference: &str) -> Result<f64, EvalError> {
    let pred_tokens = tokenize(pred);
    let ref_tokens = tokenize(reference);
    let p: Vec<&str> = pred_tokens.iter().map(|t| t.text.as_str()).collect();
    let r: Vec<&str> = ref_tokens.iter().map(|t| t.text.as_str()).collect();
    if p.is_empty() || r.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    let max_n = BLEU_MAX_ORDER.min(p.len()).min(r.len());
    let mut log_sum = 0.0;
    for n in 1..=max_n {
        let cand = ngram_counts(&p, n);
        let refc = ngram_counts(&r, n);
        let clipped: usize = cand
            .iter()
            .map(|(g, &c)| c.min(refc.get(g).copied().unwrap_or(0)))
            .sum();
        if clipped == 0 {
            return Ok(0.0);
        }
        let total = p.len() + 1 - n;
        log_sum += (clipped as f64 / total as f64).ln();
    }
    let (c, r) = (p.len() as f64, r.len() as f64);
    let bp = if c < r { (1.0 - r / c).exp() } else { 1.0 };
    Ok(bp * (log_sum / max_n as f64).exp())
}

// ---------------------------------------------------------------------------
// Sweeps

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub theta: f64,
    pub confusion: ConfusionMatrix,
    pub report: MetricReport,
}

fn check_grid(thetas: &[f64]) -> Result<(), EvalError> {
    if thetas.is_empty() {
        return Err(EvalError::InvalidGrid("no thresholds".into()));
    }
    if let Some(t) = thetas.iter().find(|t| !(0.0..=1.0).contains(*t)) {
        return Err(EvalError::InvalidGrid(format!("{t} is outside [0, 1]")));
    }
    if let Some(w) = thetas.windows(2).find(|w| w[0] >= w[1]) {
        return Err(EvalError::InvalidGrid(format!(
            "{} does not follow {}",
            w[1], w[0]
        )));
    }
    Ok(())
}

/// For each θ, decides `similarity > θ` on every pair (an undefined
/// similarity is negative) and reports against the paired truth value.
pub fn sweep(pairs: &[(Option<f64>, bool)], thetas: &[f64]) -> Result<Vec<SweepPoint>, EvalError> {
    check_grid(thetas)?;
    thetas
        .iter()
        .map(|&theta| {
            let mut cm = ConfusionMatrix::default();
            for &(sim, truth) in pairs {
                cm.record(passes_threshold(sim, theta), truth);
            }
            Ok(SweepPoint {
                theta,
                confusion: cm,
                report: report(&cm)?,
            })
        })
        .collect()
}

/// Parses `start:end:step` (inclusive of `end` when it lies on the grid)
/// or a comma-separated list.
pub fn parse_theta_grid(text: &str) -> Result<Vec<f64>, EvalError> {
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| EvalError::InvalidGrid(format!("`{}` is not a number", s.trim())))
    };
    let grid = if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        let [start, end, step] = parts.as_slice() else {
            return Err(EvalError::InvalidGrid("expected start:end:step".into()));
        };
        let (start, end, step) = (num(start)?, num(end)?, num(step)?);
        if step.is_nan() || step <= 0.0 || end < start {
            return Err(EvalError::InvalidGrid(
                "step must be positive and end ≥ start".into(),
            ));
        }
        let steps = ((end - start) / step + 1e-9).floor() as usize;
        // Computing each point from its index keeps rounding error from
        // accumulating; the final rounding gives clean CSV values.
        (0..=steps)
            .map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9)
            .collect()
    } else {
        text.split(',').map(num).collect::<Result<Vec<_>, _>>()?
    };
    check_grid(&grid)?;
    Ok(grid)
}

pub const SWEEP_HEADER: [&str; 9] = [
    "theta",
    "tp",
    "tn",
    "fp",
    "fn",
    "precision",
    "recall",
    "accuracy",
    "kappa",
];

/// Writes one CSV row per point. Percentages carry two decimals and kappa
/// three; an undefined precision or recall is an empty cell.
pub fn write_sweep_csv<W: Write>(points: &[SweepPoint], out: W) -> Result<(), EvalError> {
    let pct = |v: Option<f64>| v.map(|x| format!("{:.2}", x * 100.0)).unwrap_or_default();
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER)?;
    for p in points {
        let cm = p.confusion;
        w.write_record([
            p.theta.to_string(),
            cm.tp.to_string(),
            cm.tn.to_string(),
            cm.fp.to_string(),
            cm.fn_.to_string(),
            pct(p.report.precision),
            pct(p.report.recall),
            pct(Some(p.report.accuracy)),
            format_kappa(p.report.kappa),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn gted_rows() {
        let r = report(&ConfusionMatrix::new(71, 74, 9, 51)).unwrap();
        assert_eq!(format_percent(r.precision), "88.75%");
        assert_eq!(format_percent(r.recall), "58.20%");
        assert_eq!(format_percent(Some(r.accuracy)), "70.73%");
        assert!(close(r.kappa, 0.438, 0.001));

        let r = report(&ConfusionMatrix::new(31, 34, 10, 18)).unwrap();
        assert_eq!(
            r.to_string(),
            "precision 75.61%  recall 63.27%  accuracy 69.89%  kappa 0.402"
        );
    }

    #[test]
    fn degenerate_rows() {
        let r = report(&ConfusionMatrix::new(122, 0, 83, 0)).unwrap();
        assert_eq!(format_percent(r.precision), "59.51%");
        assert_eq!(r.recall, Some(1.0));
        assert_eq!(format_kappa(r.kappa), "0.000");

        let r = report(&ConfusionMatrix::new(0, 44, 0, 49)).unwrap();
        assert_eq!(format_percent(r.precision), "0/0");
        assert_eq!(format_percent(r.recall), "0.00%");
        assert_eq!(format_kappa(r.kappa), "0.000");

        let r = report(&ConfusionMatrix::new(5, 0, 0, 0)).unwrap();
        assert_eq!(r.kappa, 0.0);
        assert_eq!(r.recall, Some(1.0));
        let r = report(&ConfusionMatrix::new(0, 5, 0, 0)).unwrap();
        assert_eq!((r.precision, r.recall), (None, None));

        assert!(matches!(
            report(&ConfusionMatrix::default()),
            Err(EvalError::EmptyMatrix)
        ));
    }

    #[test]
    fn kappa_identities() {
        for (a, b) in [(1, 1), (3, 7), (50, 2)] {
            assert!(close(
                report(&ConfusionMatrix::new(a, b, 0, 0)).unwrap().kappa,
                1.0,
                1e-12
            ));
        }
        // Decisions independent of truth: positive rate 1/3 in both classes.
        let r = report(&ConfusionMatrix::new(2, 8, 4, 4)).unwrap();
        assert!(close(r.kappa, 0.0, 1e-12));
    }

    #[test]
    fn confusion_counts() {
        assert_eq!(
            confusion(&[true; 3], &[true; 3]).unwrap(),
            ConfusionMatrix::new(3, 0, 0, 0)
        );
        assert_eq!(
            confusion(&[false; 2], &[true; 2]).unwrap(),
            ConfusionMatrix::new(0, 0, 0, 2)
        );
        assert_eq!(
            confusion(&[true, false, true, false], &[true, true, false, false]).unwrap(),
            ConfusionMatrix::new(1, 1, 1, 1)
        );
        assert!(matches!(
            confusion(&[true], &[true, false]),
            Err(EvalError::LengthMismatch {
                decisions: 1,
                truth: 2
            })
        ));
    }

    #[test]
    fn confusion_serializes_fn_key() {
        let mut w = csv::Writer::from_writer(vec![]);
        w.serialize(ConfusionMatrix::new(1, 2, 3, 4)).unwrap();
        let text = String::from_utf8(w.into_inner().unwrap()).unwrap();
        assert_eq!(text, "tp,tn,fp,fn\n1,2,3,4\n");
    }

    #[test]
    fn identity_match_ignores_whitespace_only() {
        assert!(identity_match(
            "theorem thm : 1 = 1",
            "theorem  thm :  1 = 1"
        ));
        assert!(identity_match("a\n\tb", "ab"));
        assert!(!identity_match(
            "theorem thm (x : Nat) : P x",
            "theorem thm (y : Nat) : P y"
        ));
    }

    #[test]
    fn bleu_examples() {
        let s = bleu("a b c d e", "a b c d f").unwrap();
        let expected = (4.0 / 5.0 * 3.0 / 4.0 * 2.0 / 3.0 * 1.0 / 2.0_f64).powf(0.25);
        assert!(close(s, expected, 1e-12));
        assert!(close(s, 0.6687, 1e-4));
        assert_eq!(bleu("x y z", "p q r").unwrap(), 0.0);
        assert_eq!(
            bleu("theorem thm : True", "theorem thm : True").unwrap(),
            1.0
        );
        assert_eq!(bleu("a", "a").unwrap(), 1.0);
        assert!(matches!(bleu("  ", "a"), Err(EvalError::EmptyInput)));
        // Short candidate: brevity penalty applies.
        let s = bleu("a b", "a b c d").unwrap();
        assert!(close(s, (1.0 - 2.0_f64).exp(), 1e-12));
    }

    #[test]
    fn sweep_examples() {
        let pts = sweep(&[(Some(1.0), true)], &[0.0, 0.5, 0.99]).unwrap();
        assert!(pts
            .iter()
            .all(|p| p.confusion == ConfusionMatrix::new(1, 0, 0, 0)));

        let pts = sweep(&[(Some(0.0), true), (Some(0.0), false)], &[0.0, 0.3]).unwrap();
        assert!(pts.iter().all(|p| p.confusion.predicted_positive() == 0));

        let pairs = [
            (Some(0.2), false),
            (Some(0.5), true),
            (Some(0.7), false),
            (Some(0.9), true),
            (None, true),
        ];
        let pts = sweep(&pairs, &[0.1, 0.6, 0.8]).unwrap();
        let counts: Vec<_> = pts.iter().map(|p| p.confusion).collect();
        assert_eq!(
            counts,
            vec![
                ConfusionMatrix::new(2, 0, 2, 1),
                ConfusionMatrix::new(1, 1, 1, 2),
                ConfusionMatrix::new(1, 2, 0, 2),
            ]
        );

        assert!(sweep(&pairs, &[0.5, 0.5]).is_err());
        assert!(sweep(&pairs, &[1.5]).is_err());
        assert!(matches!(sweep(&[], &[0.5]), Err(EvalError::EmptyMatrix)));
    }

    #[test]
    fn grid_parsing() {
        let g = parse_theta_grid("0:1:0.1").unwrap();
        assert_eq!(g.len(), 11);
        assert_eq!(g[3], 0.3);
        assert_eq!(g[10], 1.0);
        assert_eq!(
            parse_theta_grid("0.2, 0.5,0.9").unwrap(),
            vec![0.2, 0.5, 0.9]
        );
        assert!(parse_theta_grid("0:1").is_err());
        assert!(parse_theta_grid("0:1:0").is_err());
        assert!(parse_theta_grid("0.5,0.2").is_err());
        assert!(parse_theta_grid("a,b").is_err());
    }

    #[test]
    fn csv_layout() {
        let pts = sweep(&[(Some(0.9), true), (Some(0.1), false)], &[0.0, 0.95]).unwrap();
        let mut buf = Vec::new();
        write_sweep_csv(&pts, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(
            lines[0],
            "theta,tp,tn,fp,fn,precision,recall,accuracy,kappa"
        );
        assert_eq!(lines[1], "0,1,0,1,0,50.00,100.00,50.00,0.000");
        assert_eq!(lines[2], "0.95,0,1,0,1,,0.00,50.00,0.000");
    }
}

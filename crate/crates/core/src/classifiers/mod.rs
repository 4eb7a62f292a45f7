//! Classifier tiers: the heavy RBF-kernel SVM used as the reference
//! classifier and the linear SVMs used as on-sensor surrogates, plus the
//! operation-count cost model that stands in for per-prediction energy.

mod dcd;
mod smo;

pub use dcd::{train_linear_svm, train_linear_svm_on, LinearSvmParams};
pub use smo::{train_rbf_svm, RbfSvmParams};

use crate::error::{Error, Result};

/// Linear decision function `w·x + bias - threshold`; class 1 iff >= 0.
///
/// The threshold is a post-training decision offset: sweeping it trades
/// false negatives against transmitted volume without refitting.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub threshold: f64,
}

/// RBF-kernel SVM decision function
/// `sum_i coef_i * exp(-gamma * ||x - s_i||^2) + bias`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelModel {
    pub support_points: Vec<Vec<f64>>,
    /// Signed dual coefficients `alpha_i * y_i`.
    pub dual_coefs: Vec<f64>,
    pub bias: f64,
    pub rbf_gamma: f64,
}

/// Anything that maps an observation to a signed decision value.
/// Ties at zero classify as positive: boundary cases are forwarded,
/// not dropped.
pub trait Classifier {
    fn dimension(&self) -> usize;

    fn decision_value(&self, x: &[f64]) -> Result<f64>;

    fn predict(&self, x: &[f64]) -> Result<bool> {
        Ok(self.decision_value(x)? >= 0.0)
    }
}

impl LinearModel {
    /// A classifier that outputs the same verdict everywhere.
    pub fn constant(dimension: usize, positive: bool) -> LinearModel {
        LinearModel {
            weights: vec![0.0; dimension],
            bias: if positive { 1.0 } else { -1.0 },
            threshold: 0.0,
        }
    }

    pub fn with_threshold(&self, threshold: f64) -> LinearModel {
        LinearModel {
            weights: self.weights.clone(),
            bias: self.bias,
            threshold,
        }
    }

    /// Raw score before the threshold offset.
    pub fn score(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.weights.len() {
            return Err(Error::DimensionMismatch {
                expected: self.weights.len(),
                got: x.len(),
            });
        }
        Ok(self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.bias)
    }

    /// Operation count of one prediction: d multiplies, d-1 adds, the bias
    /// add, the threshold compare, and the sign read.
    pub fn prediction_ops(&self) -> u64 {
        2 * self.weights.len() as u64 + 2
    }
}

impl Classifier for LinearModel {
    fn dimension(&self) -> usize {
        self.weights.len()
    }

    fn decision_value(&self, x: &[f64]) -> Result<f64> {
        Ok(self.score(x)? - self.threshold)
    }
}

impl KernelModel {
    pub fn n_support(&self) -> usize {
        self.support_points.len()
    }

    /// Operation count of one prediction: per support point d subtractions,
    /// d squarings, d-1 adds, the gamma scale, the exponential (counted as
    /// one), and a multiply-accumulate; plus the final bias add and compare.
    pub fn prediction_ops(&self) -> u64 {
        let d = self.dimension() as u64;
        let n = self.n_support() as u64;
        n * (3 * d + 3) + n + 1
    }
}

impl Classifier for KernelModel {
    fn dimension(&self) -> usize {
        self.support_points.first().map_or(0, Vec::len)
    }

    fn decision_value(&self, x: &[f64]) -> Result<f64> {
        let d = self.dimension();
        if x.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: x.len() });
        }
        let mut acc = self.bias;
        for (s, coef) in self.support_points.iter().zip(&self.dual_coefs) {
            let sq: f64 = x.iter().zip(s).map(|(a, b)| (a - b) * (a - b)).sum();
            acc += coef * (-self.rbf_gamma * sq).exp();
        }
        Ok(acc)
    }
}

/// Agreement of a model's verdicts with a reference labeling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccuracyReport {
    pub accuracy: f64,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub n: usize,
}

/// Fraction of points where the model's prediction matches the reference
/// label, with the confusion split.
pub fn accuracy<C: Classifier>(
    model: &C,
    points: &[Vec<f64>],
    reference: &[bool],
) -> Result<AccuracyReport> {
    if points.is_empty() || points.len() != reference.len() {
        return Err(Error::EmptyReference);
    }
    let mut fp = 0;
    let mut fn_ = 0;
    for (x, &label) in points.iter().zip(reference) {
        let predicted = model.predict(x)?;
        match (predicted, label) {
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            _ => {}
        }
    }
    let n = points.len();
    Ok(AccuracyReport {
        accuracy: 1.0 - (fp + fn_) as f64 / n as f64,
        false_positives: fp,
        false_negatives: fn_,
        n,
    })
}

// ---------------------------------------------------------------------------
// Plain-text model persistence.
//
// Version line, then `key value` fields. Floats carry 17 significant digits
// so parsing reproduces the exact f64.

const FORMAT_HEADER: &str = "semcomp-model v1";

fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

impl KernelModel {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(FORMAT_HEADER);
        out.push_str("\nkind kernel\n");
        out.push_str(&format!("dimension {}\n", self.dimension()));
        out.push_str(&format!("rbf_gamma {}\n", fmt_f64(self.rbf_gamma)));
        out.push_str(&format!("bias {}\n", fmt_f64(self.bias)));
        out.push_str(&format!("n_support {}\n", self.n_support()));
        for (s, coef) in self.support_points.iter().zip(&self.dual_coefs) {
            out.push_str("sv ");
            out.push_str(&fmt_f64(*coef));
            for v in s {
                out.push(' ');
                out.push_str(&fmt_f64(*v));
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<KernelModel> {
        let mut lines = ModelLines::new(text, "kernel model")?;
        lines.expect_kind("kernel")?;
        let dimension = lines.field_usize("dimension")?;
        let rbf_gamma = lines.field_f64("rbf_gamma")?;
        let bias = lines.field_f64("bias")?;
        let n_support = lines.field_usize("n_support")?;
        let mut support_points = Vec::with_capacity(n_support);
        let mut dual_coefs = Vec::with_capacity(n_support);
        for _ in 0..n_support {
            let values = lines.row("sv", dimension + 1)?;
            dual_coefs.push(values[0]);
            support_points.push(values[1..].to_vec());
        }
        if n_support == 0 {
            return Err(lines.err("kernel model needs at least one support point"));
        }
        Ok(KernelModel {
            support_points,
            dual_coefs,
            bias,
            rbf_gamma,
        })
    }
}

impl LinearModel {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(FORMAT_HEADER);
        out.push_str("\nkind linear\n");
        out.push_str(&format!("dimension {}\n", self.weights.len()));
        out.push_str(&format!("bias {}\n", fmt_f64(self.bias)));
        out.push_str(&format!("threshold {}\n", fmt_f64(self.threshold)));
        out.push_str("weights");
        for w in &self.weights {
            out.push(' ');
            out.push_str(&fmt_f64(*w));
        }
        out.push('\n');
        out
    }

    pub fn from_text(text: &str) -> Result<LinearModel> {
        let mut lines = ModelLines::new(text, "linear model")?;
        lines.expect_kind("linear")?;
        let dimension = lines.field_usize("dimension")?;
        let bias = lines.field_f64("bias")?;
        let threshold = lines.field_f64("threshold")?;
        let weights = lines.row("weights", dimension)?;
        Ok(LinearModel { weights, bias, threshold })
    }
}

struct ModelLines<'a> {
    lines: std::str::Lines<'a>,
    what: &'static str,
}

impl<'a> ModelLines<'a> {
    fn new(text: &'a str, what: &'static str) -> Result<ModelLines<'a>> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h == FORMAT_HEADER => Ok(ModelLines { lines, what }),
            Some(h) => Err(Error::MalformedData {
                what: what.into(),
                detail: format!("unsupported header {h:?}"),
            }),
            None => Err(Error::MalformedData {
                what: what.into(),
                detail: "empty file".into(),
            }),
        }
    }

    fn err(&self, detail: &str) -> Error {
        Error::MalformedData {
            what: self.what.into(),
            detail: detail.into(),
        }
    }

    fn field(&mut self, key: &str) -> Result<&'a str> {
        match self.lines.next() {
            Some(line) => line
                .strip_prefix(key)
                .and_then(|rest| rest.strip_prefix(' '))
                .ok_or_else(|| self.err(&format!("expected field {key:?}, got {line:?}"))),
            None => Err(self.err(&format!("missing field {key:?}"))),
        }
    }

    fn expect_kind(&mut self, kind: &str) -> Result<()> {
        let got = self.field("kind")?;
        if got == kind {
            Ok(())
        } else {
            Err(self.err(&format!("expected kind {kind:?}, got {got:?}")))
        }
    }

    fn field_usize(&mut self, key: &str) -> Result<usize> {
        let raw = self.field(key)?;
        raw.parse()
            .map_err(|_| self.err(&format!("field {key:?} is not an integer: {raw:?}")))
    }

    fn field_f64(&mut self, key: &str) -> Result<f64> {
        let raw = self.field(key)?;
        raw.parse()
            .map_err(|_| self.err(&format!("field {key:?} is not a float: {raw:?}")))
    }

    fn row(&mut self, key: &str, arity: usize) -> Result<Vec<f64>> {
        let raw = self.field(key)?;
        let values: Vec<f64> = raw
            .split(' ')
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| self.err(&format!("row {key:?} holds a bad float")))?;
        if values.len() != arity {
            return Err(self.err(&format!(
                "row {key:?} has {} values, expected {arity}",
                values.len()
            )));
        }
        Ok(values)
    }
}

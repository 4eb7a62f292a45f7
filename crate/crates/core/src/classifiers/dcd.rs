//! Soft-margin linear SVM trained by dual coordinate descent.
//!
//! The bias is handled as an augmented constant feature, so the primal
//! objective is `0.5*(||w||^2 + b^2) + sum_i C_i * hinge_i` with per-class
//! costs `C_i = c * weight(class_i)`. Sweeps are cyclic; the solver stops
//! when the largest projected gradient over a sweep drops below `tol`.

use crate::error::{Error, Result};
use crate::worldgen::Dataset;

use super::LinearModel;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearSvmParams {
    pub c: f64,
    /// Cost multiplier for negative-class (label 0) examples.
    pub weight_neg: f64,
    /// Cost multiplier for positive-class (label 1) examples.
    pub weight_pos: f64,
    /// Projected-gradient tolerance that stops the solver.
    pub tol: f64,
    /// Cap on full sweeps before reporting non-convergence.
    pub max_sweeps: usize,
}

impl Default for LinearSvmParams {
    fn default() -> Self {
        LinearSvmParams {
            c: 10.0,
            weight_neg: 1.0,
            weight_pos: 1.0,
            tol: 1e-3,
            max_sweeps: 10_000,
        }
    }
}

/// Trains on the dataset's labels. For surrogate fitting the labels are the
/// reference classifier's verdicts, not ground truth.
pub fn train_linear_svm(data: &Dataset, params: &LinearSvmParams) -> Result<LinearModel> {
    train_linear_svm_on(
        &data.points().collect::<Vec<_>>(),
        &data.labels().collect::<Vec<_>>(),
        params,
    )
}

/// Slice-level entry point used by the surrogate fitter, which relabels
/// points without materializing a new dataset.
pub fn train_linear_svm_on(
    points: &[&[f64]],
    labels: &[bool],
    params: &LinearSvmParams,
) -> Result<LinearModel> {
    if !(params.c > 0.0 && params.weight_neg > 0.0 && params.weight_pos > 0.0 && params.tol > 0.0)
    {
        return Err(Error::InvalidParameter(
            "c, class weights, and tol must all be positive".into(),
        ));
    }
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n_pos = labels.iter().filter(|&&l| l).count();
    if n_pos == 0 || n_pos == labels.len() {
        return Err(Error::SingleClassData);
    }

    let n = points.len();
    let d = points[0].len();
    let y: Vec<f64> = labels.iter().map(|&l| if l { 1.0 } else { -1.0 }).collect();
    let cost: Vec<f64> = labels
        .iter()
        .map(|&l| params.c * if l { params.weight_pos } else { params.weight_neg })
        .collect();
    // Squared norms of the augmented points (x, 1).
    let q_diag: Vec<f64> = points
        .iter()
        .map(|x| x.iter().map(|v| v * v).sum::<f64>() + 1.0)
        .collect();

    let mut alpha = vec![0.0_f64; n];
    // w_aug = (w, b), maintained incrementally.
    let mut w = vec![0.0_f64; d + 1];

    for _ in 0..params.max_sweeps {
        let mut max_pg: f64 = 0.0;
        for i in 0..n {
            let xi = points[i];
            let margin: f64 =
                w[..d].iter().zip(xi).map(|(wv, xv)| wv * xv).sum::<f64>() + w[d];
            let g = y[i] * margin - 1.0;
            let pg = if alpha[i] <= 0.0 {
                g.min(0.0)
            } else if alpha[i] >= cost[i] {
                g.max(0.0)
            } else {
                g
            };
            max_pg = max_pg.max(pg.abs());
            if pg != 0.0 {
                let new_alpha = (alpha[i] - g / q_diag[i]).clamp(0.0, cost[i]);
                let step = (new_alpha - alpha[i]) * y[i];
                if step != 0.0 {
                    for (wv, xv) in w[..d].iter_mut().zip(xi) {
                        *wv += step * xv;
                    }
                    w[d] += step;
                    alpha[i] = new_alpha;
                }
            }
        }
        if max_pg < params.tol {
            let bias = w[d];
            w.truncate(d);
            return Ok(LinearModel {
                weights: w,
                bias,
                threshold: 0.0,
            });
        }
    }

    Err(Error::NonConvergence {
        iterations: params.max_sweeps,
    })
}

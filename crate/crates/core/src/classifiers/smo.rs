//! Soft-margin RBF-kernel SVM trained by sequential minimal optimization.
//!
//! Working pairs are chosen by the maximal-violating-pair rule with the
//! second-order tie objective; kernel rows are memoized in a bounded FIFO
//! cache since the active set concentrates on a small fraction of the data.

use std::collections::{HashMap, VecDeque};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::worldgen::Dataset;

use super::KernelModel;

#[derive(Debug, Clone, PartialEq)]
pub struct RbfSvmParams {
    /// Box constraint on the dual variables.
    pub c: f64,
    /// RBF kernel width parameter.
    pub gamma: f64,
    /// KKT violation tolerance that stops the solver.
    pub tol: f64,
    /// Cap on pair updates before reporting non-convergence.
    pub max_iter: usize,
    /// Kernel row cache budget in mebibytes.
    pub cache_mb: usize,
}

impl Default for RbfSvmParams {
    fn default() -> Self {
        RbfSvmParams {
            c: 10.0,
            gamma: 30.0,
            tol: 1e-3,
            max_iter: 1_000_000,
            cache_mb: 256,
        }
    }
}

struct RowCache<'a> {
    points: &'a [&'a [f64]],
    gamma: f64,
    rows: HashMap<usize, Vec<f64>>,
    order: VecDeque<usize>,
    cap: usize,
}

impl<'a> RowCache<'a> {
    fn new(points: &'a [&'a [f64]], gamma: f64, cache_mb: usize) -> RowCache<'a> {
        let bytes_per_row = 8 * points.len().max(1);
        let cap = ((cache_mb * 1024 * 1024) / bytes_per_row).max(2);
        RowCache {
            points,
            gamma,
            rows: HashMap::new(),
            order: VecDeque::new(),
            cap,
        }
    }

    fn compute(points: &[&[f64]], gamma: f64, i: usize) -> Vec<f64> {
        let xi = points[i];
        points
            .iter()
            .map(|xj| {
                let sq: f64 = xi.iter().zip(*xj).map(|(a, b)| (a - b) * (a - b)).sum();
                (-gamma * sq).exp()
            })
            .collect()
    }

    fn row(&mut self, i: usize) -> &[f64] {
        if !self.rows.contains_key(&i) {
            if self.rows.len() >= self.cap {
                if let Some(oldest) = self.order.pop_front() {
                    self.rows.remove(&oldest);
                }
            }
            let row = Self::compute(self.points, self.gamma, i);
            self.rows.insert(i, row);
            self.order.push_back(i);
        }
        &self.rows[&i]
    }
}

/// Trains the reference classifier on the full dataset.
///
/// The random source only permutes the training order; the solved QP optimum
/// is the same up to tolerance, so the decision function is seed-stable.
pub fn train_rbf_svm<R: Rng>(
    data: &Dataset,
    params: &RbfSvmParams,
    rng: &mut R,
) -> Result<KernelModel> {
    if !(params.c > 0.0 && params.gamma > 0.0 && params.tol > 0.0) {
        return Err(Error::InvalidParameter(
            "c, gamma, and tol must all be positive".into(),
        ));
    }
    if data.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n_pos = data.labels().filter(|&l| l).count();
    if n_pos == 0 || n_pos == data.len() {
        return Err(Error::SingleClassData);
    }

    let mut perm: Vec<usize> = (0..data.len()).collect();
    perm.shuffle(rng);
    let points: Vec<&[f64]> = perm.iter().map(|&i| data.samples[i].point.as_slice()).collect();
    let y: Vec<f64> = perm
        .iter()
        .map(|&i| if data.samples[i].label { 1.0 } else { -1.0 })
        .collect();

    let n = points.len();
    let c = params.c;
    let tol = params.tol;
    let mut alpha = vec![0.0_f64; n];
    let mut grad = vec![-1.0_f64; n];
    let mut cache = RowCache::new(&points, params.gamma, params.cache_mb);

    let in_up = |a: f64, yi: f64| (yi > 0.0 && a < c) || (yi < 0.0 && a > 0.0);
    let in_low = |a: f64, yi: f64| (yi > 0.0 && a > 0.0) || (yi < 0.0 && a < c);

    let mut converged = false;
    for _ in 0..params.max_iter {
        // Maximal violating pair: first index maximizes -y*grad over the
        // ascent set, second minimizes the second-order objective decrease.
        let mut gmax = f64::NEG_INFINITY;
        let mut gmin = f64::INFINITY;
        let mut i_best: Option<usize> = None;
        for t in 0..n {
            let v = -y[t] * grad[t];
            if in_up(alpha[t], y[t]) && v > gmax {
                gmax = v;
                i_best = Some(t);
            }
            if in_low(alpha[t], y[t]) && v < gmin {
                gmin = v;
            }
        }
        if gmax - gmin < tol {
            converged = true;
            break;
        }
        let i = match i_best {
            Some(i) => i,
            None => {
                converged = true;
                break;
            }
        };

        let row_i = cache.row(i).to_vec();
        let mut j_best: Option<usize> = None;
        let mut obj_min = f64::INFINITY;
        for t in 0..n {
            if !in_low(alpha[t], y[t]) {
                continue;
            }
            let v = -y[t] * grad[t];
            if v >= gmax {
                continue;
            }
            let b = gmax - v;
            // K_ii = K_jj = 1 for the RBF kernel.
            let a = (2.0 - 2.0 * row_i[t]).max(1e-12);
            let obj = -(b * b) / a;
            if obj < obj_min {
                obj_min = obj;
                j_best = Some(t);
            }
        }
        let j = match j_best {
            Some(j) => j,
            None => {
                converged = true;
                break;
            }
        };

        let row_j = cache.row(j).to_vec();
        let old_i = alpha[i];
        let old_j = alpha[j];
        let quad = (2.0 - 2.0 * row_i[j]).max(1e-12);
        if y[i] != y[j] {
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        let di = alpha[i] - old_i;
        let dj = alpha[j] - old_j;
        for k in 0..n {
            grad[k] += y[k] * (y[i] * row_i[k] * di + y[j] * row_j[k] * dj);
        }
    }

    if !converged {
        return Err(Error::NonConvergence {
            iterations: params.max_iter,
        });
    }

    // rho from the KKT conditions: y_i * grad_i for free points, else the
    // midpoint of the feasible interval.
    let mut n_free = 0usize;
    let mut sum_free = 0.0;
    let mut ub = f64::INFINITY;
    let mut lb = f64::NEG_INFINITY;
    for t in 0..n {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if y[t] > 0.0 {
                lb = lb.max(yg);
            } else {
                ub = ub.min(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            n_free += 1;
            sum_free += yg;
        }
    }
    let rho = if n_free > 0 {
        sum_free / n_free as f64
    } else {
        (ub + lb) / 2.0
    };

    let mut support_points = Vec::new();
    let mut dual_coefs = Vec::new();
    for t in 0..n {
        if alpha[t].abs() > 1e-12 {
            support_points.push(points[t].to_vec());
            dual_coefs.push(alpha[t] * y[t]);
        }
    }
    if support_points.is_empty() {
        // Solver converged with all multipliers at zero; cannot happen with
        // both classes present and finite data, but guard the invariant.
        return Err(Error::NonConvergence { iterations: 0 });
    }

    Ok(KernelModel {
        support_points,
        dual_coefs,
        bias: -rho,
        rbf_gamma: params.gamma,
    })
}

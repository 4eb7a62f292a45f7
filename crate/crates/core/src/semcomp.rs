//! Constrained surrogate fitting and the update-period controller.
//!
//! A surrogate is judged by its disagreement with the reference classifier
//! over the observation window, subject to hinge penalties on per-prediction
//! operations (energy) and on expected transmitted payload (bandwidth). The
//! linear family satisfies the energy constraint structurally, so the
//! decision threshold is the one lever coupling loss to bandwidth; sweeping
//! it over the midpoints of the window's decision values is exactly optimal
//! over that lever.

use std::collections::BTreeMap;

use crate::classifiers::{
    train_linear_svm_on, Classifier, KernelModel, LinearModel, LinearSvmParams,
};
use crate::error::{Error, Result};
use crate::worldgen::Dataset;

/// Per-period resource budgets and tolerances.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSpec {
    /// Allowed per-prediction operations.
    pub energy_budget: f64,
    /// Allowed mean payload per observation.
    pub bandwidth_budget: f64,
    /// Tolerance on the expected energy penalty.
    pub energy_tolerance: f64,
    /// Tolerance on the expected bandwidth penalty.
    pub bandwidth_tolerance: f64,
    /// Payload transmitted per positive prediction.
    pub payload_size: f64,
}

impl Default for ConstraintSpec {
    fn default() -> Self {
        ConstraintSpec {
            energy_budget: 1000.0,
            bandwidth_budget: 1.0,
            energy_tolerance: 0.0,
            bandwidth_tolerance: 0.0,
            payload_size: 1.0,
        }
    }
}

/// Loss comparing the surrogate to the reference verdict.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LossKind {
    /// `(a - b)^2` on hard predictions; 0/1 disagreement.
    Squared,
    /// Cross-entropy on the sigmoid of the decision value, with scores
    /// clamped to `[delta, 1 - delta]` to stay finite.
    Logistic { delta: f64 },
}

impl LossKind {
    pub const DEFAULT_LOGISTIC_DELTA: f64 = 1e-6;

    fn validate(self) -> Result<()> {
        if let LossKind::Logistic { delta } = self {
            if !(delta > 0.0 && delta < 0.5) {
                return Err(Error::InvalidParameter(
                    "logistic clamp delta must lie in (0, 0.5)".into(),
                ));
            }
        }
        Ok(())
    }
}

/// How a window's surrogate came to be.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FallbackKind {
    None,
    ConstantPositive,
    ConstantNegative,
    /// A surrogate trained for an earlier window, re-evaluated without
    /// refitting (the aging analysis).
    ReusedPrevious,
}

impl FallbackKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            FallbackKind::None => "none",
            FallbackKind::ConstantPositive => "constant_positive",
            FallbackKind::ConstantNegative => "constant_negative",
            FallbackKind::ReusedPrevious => "reused_previous",
        }
    }

    pub fn parse(s: &str) -> Option<FallbackKind> {
        match s {
            "none" => Some(FallbackKind::None),
            "constant_positive" => Some(FallbackKind::ConstantPositive),
            "constant_negative" => Some(FallbackKind::ConstantNegative),
            "reused_previous" => Some(FallbackKind::ReusedPrevious),
            _ => None,
        }
    }
}

/// A fitted surrogate with its window-empirical objective and penalties.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalFitResult {
    pub model: LinearModel,
    pub expected_loss: f64,
    pub energy_ops: u64,
    pub energy_penalty: f64,
    pub expected_bandwidth: f64,
    pub bandwidth_penalty: f64,
    pub feasible: bool,
    pub fallback_kind: FallbackKind,
}

/// Controller parameters for choosing the update period.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlSpec {
    pub target_accuracy: f64,
    /// Strictly increasing candidate periods, all >= 2.
    pub gamma_grid: Vec<usize>,
    pub control_distribution: ControlDistribution,
}

/// Which inputs the controller monitors quality on. Only the empirical
/// choice (the trajectory subsequences themselves) is implemented.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ControlDistribution {
    #[default]
    EmpiricalWindows,
}

impl ControlSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.target_accuracy > 0.0 && self.target_accuracy <= 1.0) {
            return Err(Error::InvalidParameter(
                "target_accuracy must lie in (0, 1]".into(),
            ));
        }
        if self.gamma_grid.is_empty() {
            return Err(Error::InvalidParameter("gamma grid is empty".into()));
        }
        if self.gamma_grid.iter().any(|&g| g < 2)
            || self.gamma_grid.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(Error::InvalidParameter(
                "gamma grid must be strictly increasing with every entry >= 2".into(),
            ));
        }
        Ok(())
    }
}

/// The chosen update period and whether the accuracy target was met.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PeriodChoice {
    pub gamma: usize,
    pub target_met: bool,
}

pub fn sigmoid(v: f64) -> f64 {
    1.0 / (1.0 + (-v).exp())
}

/// Loss between the reference verdict and the surrogate's output: the hard
/// prediction for the squared loss, the clamped sigmoid score for the
/// logistic loss.
pub fn loss(kind: LossKind, f_label: bool, g_value: f64) -> f64 {
    let a = if f_label { 1.0 } else { 0.0 };
    match kind {
        LossKind::Squared => (a - g_value) * (a - g_value),
        LossKind::Logistic { delta } => {
            let b = g_value.clamp(delta, 1.0 - delta);
            -a * b.ln() - (1.0 - a) * (1.0 - b).ln()
        }
    }
}

/// Zero on and under budget, the excess above it.
pub fn energy_penalty(ops: u64, budget: f64) -> f64 {
    (ops as f64 - budget).max(0.0)
}

/// Hinge on the expected payload; same sign structure as the energy side.
pub fn bandwidth_penalty(expected: f64, budget: f64) -> f64 {
    (expected - budget).max(0.0)
}

/// Mean payload the model would transmit over the window: payload size
/// times its positive-prediction rate.
pub fn expected_bandwidth(
    model: &LinearModel,
    eval_points: &[Vec<f64>],
    payload_size: f64,
) -> Result<f64> {
    if eval_points.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut positives = 0usize;
    for p in eval_points {
        if model.predict(p)? {
            positives += 1;
        }
    }
    Ok(payload_size * positives as f64 / eval_points.len() as f64)
}

fn model_loss_on(
    kind: LossKind,
    model: &LinearModel,
    x: &[f64],
    f_label: bool,
) -> Result<f64> {
    let decision = model.decision_value(x)?;
    let g_value = match kind {
        LossKind::Squared => {
            if decision >= 0.0 {
                1.0
            } else {
                0.0
            }
        }
        LossKind::Logistic { .. } => sigmoid(decision),
    };
    Ok(loss(kind, f_label, g_value))
}

/// Evaluates an existing surrogate on a window: the window-empirical loss,
/// penalties, and feasibility, tagged with how the model was obtained.
pub fn evaluate_on_window(
    model: LinearModel,
    eval_points: &[Vec<f64>],
    f_eval_verdicts: &[bool],
    constraints: &ConstraintSpec,
    loss_kind: LossKind,
    fallback_kind: FallbackKind,
) -> Result<LocalFitResult> {
    if eval_points.is_empty() || eval_points.len() != f_eval_verdicts.len() {
        return Err(Error::EmptyInput);
    }
    loss_kind.validate()?;
    let mut total_loss = 0.0;
    for (x, &label) in eval_points.iter().zip(f_eval_verdicts) {
        total_loss += model_loss_on(loss_kind, &model, x, label)?;
    }
    let expected_loss = total_loss / eval_points.len() as f64;
    let energy_ops = model.prediction_ops();
    let e_pen = energy_penalty(energy_ops, constraints.energy_budget);
    let bw = expected_bandwidth(&model, eval_points, constraints.payload_size)?;
    let b_pen = bandwidth_penalty(bw, constraints.bandwidth_budget);
    let feasible =
        e_pen <= constraints.energy_tolerance && b_pen <= constraints.bandwidth_tolerance;
    Ok(LocalFitResult {
        model,
        expected_loss,
        energy_ops,
        energy_penalty: e_pen,
        expected_bandwidth: bw,
        bandwidth_penalty: b_pen,
        feasible,
        fallback_kind,
    })
}

/// Fits a surrogate to the reference classifier over a locality.
///
/// Relabels the local sample by the reference verdicts, trains a linear SVM
/// on the relabeled data, then picks the decision threshold minimizing the
/// window-empirical loss among thresholds whose bandwidth penalty is within
/// tolerance. Single-class verdicts short-circuit to a constant surrogate.
pub fn fit_local(
    reference: &KernelModel,
    local_data: &Dataset,
    constraints: &ConstraintSpec,
    loss_kind: LossKind,
    svm_params: &LinearSvmParams,
    eval_points: &[Vec<f64>],
) -> Result<LocalFitResult> {
    if local_data.is_empty() {
        return Err(Error::EmptyLocalData);
    }
    let mut local_verdicts = Vec::with_capacity(local_data.len());
    for p in local_data.points() {
        local_verdicts.push(reference.predict(p)?);
    }
    let mut eval_verdicts = Vec::with_capacity(eval_points.len());
    for p in eval_points {
        eval_verdicts.push(reference.predict(p)?);
    }
    let local_points: Vec<&[f64]> = local_data.points().collect();
    fit_local_with_verdicts(
        &local_points,
        &local_verdicts,
        constraints,
        loss_kind,
        svm_params,
        eval_points,
        &eval_verdicts,
    )
}

/// `fit_local` with the reference verdicts precomputed; the pipeline caches
/// the reference classifier's verdicts once and reuses them across windows.
#[allow(clippy::too_many_arguments)]
pub fn fit_local_with_verdicts(
    local_points: &[&[f64]],
    f_local_verdicts: &[bool],
    constraints: &ConstraintSpec,
    loss_kind: LossKind,
    svm_params: &LinearSvmParams,
    eval_points: &[Vec<f64>],
    f_eval_verdicts: &[bool],
) -> Result<LocalFitResult> {
    if local_points.is_empty() {
        return Err(Error::EmptyLocalData);
    }
    if eval_points.is_empty() || eval_points.len() != f_eval_verdicts.len() {
        return Err(Error::EmptyInput);
    }
    loss_kind.validate()?;
    let d = local_points[0].len();

    let positives = f_local_verdicts.iter().filter(|&&v| v).count();
    if positives == 0 || positives == f_local_verdicts.len() {
        let positive = positives > 0;
        let fallback = if positive {
            FallbackKind::ConstantPositive
        } else {
            FallbackKind::ConstantNegative
        };
        return evaluate_on_window(
            LinearModel::constant(d, positive),
            eval_points,
            f_eval_verdicts,
            constraints,
            loss_kind,
            fallback,
        );
    }

    let base = train_linear_svm_on(local_points, f_local_verdicts, svm_params)?;

    let mut scores = Vec::with_capacity(eval_points.len());
    for p in eval_points {
        scores.push(base.score(p)?);
    }
    let threshold = select_threshold(
        &base,
        &scores,
        eval_points,
        f_eval_verdicts,
        constraints,
        loss_kind,
    )?;

    evaluate_on_window(
        base.with_threshold(threshold),
        eval_points,
        f_eval_verdicts,
        constraints,
        loss_kind,
        FallbackKind::None,
    )
}

/// Candidate thresholds realizing every distinct labeling of the window:
/// below the smallest score (all positive), the midpoints between distinct
/// consecutive scores, and above the largest (all negative).
pub fn threshold_candidates(scores: &[f64]) -> Vec<f64> {
    let mut sorted: Vec<f64> = scores.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    sorted.dedup();
    let mut candidates = Vec::with_capacity(sorted.len() + 1);
    candidates.push(sorted[0] - 1.0);
    for pair in sorted.windows(2) {
        candidates.push((pair[0] + pair[1]) / 2.0);
    }
    candidates.push(sorted[sorted.len() - 1] + 1.0);
    candidates
}

fn select_threshold(
    base: &LinearModel,
    scores: &[f64],
    eval_points: &[Vec<f64>],
    f_eval_verdicts: &[bool],
    constraints: &ConstraintSpec,
    loss_kind: LossKind,
) -> Result<f64> {
    let n = eval_points.len() as f64;
    // (loss, false negatives, threshold): ties break toward fewer misses,
    // then toward the more forwarding threshold.
    let mut best: Option<(f64, usize, f64)> = None;
    for theta in threshold_candidates(scores) {
        let mut positives = 0usize;
        for &s in scores {
            if s >= theta {
                positives += 1;
            }
        }
        let bw = constraints.payload_size * positives as f64 / n;
        if bandwidth_penalty(bw, constraints.bandwidth_budget)
            > constraints.bandwidth_tolerance
        {
            continue;
        }
        let candidate = base.with_threshold(theta);
        let mut total_loss = 0.0;
        let mut false_negatives = 0usize;
        for ((x, &s), &label) in eval_points.iter().zip(scores).zip(f_eval_verdicts) {
            total_loss += model_loss_on(loss_kind, &candidate, x, label)?;
            if label && s < theta {
                false_negatives += 1;
            }
        }
        let key = (total_loss / n, false_negatives, theta);
        let better = match &best {
            None => true,
            Some((l, f, t)) => {
                key.0 < *l || (key.0 == *l && (key.1 < *f || (key.1 == *f && key.2 < *t)))
            }
        };
        if better {
            best = Some(key);
        }
    }
    // The all-negative threshold transmits nothing, so with a nonnegative
    // budget the feasible set is never empty.
    best.map(|(_, _, theta)| theta)
        .ok_or_else(|| Error::InvalidParameter("no bandwidth-feasible threshold".into()))
}

/// Mean disagreement with the reference per update period, from per-window
/// accuracy statistics `(gamma, accuracy)`.
pub fn control_quality(
    records: &[(usize, f64)],
    spec: &ControlSpec,
) -> Result<BTreeMap<usize, f64>> {
    spec.validate()?;
    if records.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut sums: BTreeMap<usize, (f64, usize)> = BTreeMap::new();
    for &(gamma, acc) in records {
        let entry = sums.entry(gamma).or_insert((0.0, 0));
        entry.0 += 1.0 - acc;
        entry.1 += 1;
    }
    Ok(sums
        .into_iter()
        .map(|(gamma, (total, count))| (gamma, total / count as f64))
        .collect())
}

/// The largest grid period whose quality stays within `1 - target_accuracy`;
/// falls back to the smallest period, flagged, when none qualifies.
pub fn choose_update_period(
    per_gamma_quality: &BTreeMap<usize, f64>,
    spec: &ControlSpec,
) -> Result<PeriodChoice> {
    spec.validate()?;
    let threshold = 1.0 - spec.target_accuracy;
    let mut chosen: Option<usize> = None;
    for &gamma in &spec.gamma_grid {
        let quality = per_gamma_quality.get(&gamma).ok_or_else(|| {
            Error::InvalidParameter(format!("no quality measurement for gamma {gamma}"))
        })?;
        if *quality <= threshold {
            chosen = Some(gamma);
        }
    }
    Ok(match chosen {
        Some(gamma) => PeriodChoice {
            gamma,
            target_met: true,
        },
        None => PeriodChoice {
            gamma: spec.gamma_grid[0],
            target_met: false,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from;
    use rand::Rng;

    #[test]
    fn squared_loss_values() {
        assert_eq!(loss(LossKind::Squared, true, 1.0), 0.0);
        assert_eq!(loss(LossKind::Squared, true, 0.0), 1.0);
        assert_eq!(loss(LossKind::Squared, false, 1.0), 1.0);
        assert_eq!(loss(LossKind::Squared, false, 0.0), 0.0);
    }

    #[test]
    fn logistic_loss_at_midpoint_is_ln_two() {
        let l = loss(LossKind::Logistic { delta: 1e-6 }, true, 0.5);
        assert!((l - std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn logistic_loss_is_clamped_finite() {
        let l = loss(LossKind::Logistic { delta: 1e-6 }, true, 0.0);
        assert!(l.is_finite());
        assert!((l - (-(1e-6_f64).ln())).abs() < 1e-9);
    }

    #[test]
    fn penalties_hinge_at_the_budget() {
        assert_eq!(energy_penalty(6, 10.0), 0.0);
        assert_eq!(energy_penalty(101, 50.0), 51.0);
        assert_eq!(energy_penalty(50, 50.0), 0.0);
        // sign structure over a grid
        for value in 0..20u64 {
            for budget in 0..20u64 {
                let pen = energy_penalty(value, budget as f64);
                if value <= budget {
                    assert_eq!(pen, 0.0);
                } else {
                    assert!(pen > 0.0);
                }
                let bw_pen = bandwidth_penalty(value as f64 * 0.1, budget as f64 * 0.1);
                if value <= budget {
                    assert_eq!(bw_pen, 0.0);
                } else {
                    assert!(bw_pen > 0.0);
                }
            }
        }
    }

    #[test]
    fn expected_bandwidth_counts_positives() {
        let points: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64 - 4.5]).collect();
        let all_neg = LinearModel::constant(1, false);
        let all_pos = LinearModel::constant(1, true);
        assert_eq!(expected_bandwidth(&all_neg, &points, 1.0).unwrap(), 0.0);
        assert_eq!(expected_bandwidth(&all_pos, &points, 1.0).unwrap(), 1.0);

        let mut rng = rng_from(2);
        for _ in 0..10 {
            let model = LinearModel {
                weights: vec![rng.random::<f64>() * 2.0 - 1.0],
                bias: rng.random::<f64>() - 0.5,
                threshold: 0.0,
            };
            let payload = 3.5;
            let got = expected_bandwidth(&model, &points, payload).unwrap();
            let count = points.iter().filter(|p| model.predict(p).unwrap()).count();
            assert_eq!(got, payload * count as f64 / points.len() as f64);
        }
    }

    fn constant_verdict_inputs(positive: bool) -> (Vec<&'static [f64]>, Vec<bool>) {
        const POINTS: [[f64; 2]; 4] = [[0.1, 0.1], [0.2, 0.1], [0.1, 0.3], [0.25, 0.2]];
        (
            POINTS.iter().map(|p| p.as_slice()).collect(),
            vec![positive; 4],
        )
    }

    #[test]
    fn single_class_window_short_circuits_to_constant() {
        let (local, verdicts) = constant_verdict_inputs(true);
        let eval: Vec<Vec<f64>> = local.iter().map(|p| p.to_vec()).collect();
        let result = fit_local_with_verdicts(
            &local,
            &verdicts,
            &ConstraintSpec::default(),
            LossKind::Squared,
            &LinearSvmParams::default(),
            &eval,
            &verdicts,
        )
        .unwrap();
        assert_eq!(result.fallback_kind, FallbackKind::ConstantPositive);
        assert_eq!(result.expected_loss, 0.0);
        assert!(result.feasible);
        assert_eq!(result.expected_bandwidth, 1.0);
    }

    #[test]
    fn zero_bandwidth_budget_forces_all_negative() {
        let local: Vec<&[f64]> = vec![&[0.0, 0.0], &[0.0, 1.0], &[1.0, 0.0], &[1.0, 1.0]];
        let verdicts = vec![false, false, true, true];
        let eval: Vec<Vec<f64>> = local.iter().map(|p| p.to_vec()).collect();
        let constraints = ConstraintSpec {
            bandwidth_budget: 0.0,
            ..Default::default()
        };
        let result = fit_local_with_verdicts(
            &local,
            &verdicts,
            &constraints,
            LossKind::Squared,
            &LinearSvmParams::default(),
            &eval,
            &verdicts,
        )
        .unwrap();
        assert_eq!(result.expected_bandwidth, 0.0);
        // squared loss of the silent filter equals the reference positive rate
        assert_eq!(result.expected_loss, 0.5);
        for p in &eval {
            assert!(!result.model.predict(p).unwrap());
        }
    }

    #[test]
    fn feasibility_flag_matches_penalties() {
        let (local, verdicts) = constant_verdict_inputs(true);
        let eval: Vec<Vec<f64>> = local.iter().map(|p| p.to_vec()).collect();
        let constraints = ConstraintSpec {
            bandwidth_budget: 0.25,
            ..Default::default()
        };
        // constant positive transmits payload 1.0 > 0.25: infeasible but returned
        let result = fit_local_with_verdicts(
            &local,
            &verdicts,
            &constraints,
            LossKind::Squared,
            &LinearSvmParams::default(),
            &eval,
            &verdicts,
        )
        .unwrap();
        assert!(!result.feasible);
        assert!(result.bandwidth_penalty > 0.0);
        assert_eq!(
            result.feasible,
            result.energy_penalty <= constraints.energy_tolerance
                && result.bandwidth_penalty <= constraints.bandwidth_tolerance
        );
    }

    #[test]
    fn empty_local_data_is_reported() {
        let eval = vec![vec![0.0, 0.0]];
        let result = fit_local_with_verdicts(
            &[],
            &[],
            &ConstraintSpec::default(),
            LossKind::Squared,
            &LinearSvmParams::default(),
            &eval,
            &[true],
        );
        assert!(matches!(result, Err(Error::EmptyLocalData)));
    }

    #[test]
    fn control_quality_is_mean_disagreement() {
        let spec = ControlSpec {
            target_accuracy: 0.95,
            gamma_grid: vec![2, 8],
            control_distribution: ControlDistribution::EmpiricalWindows,
        };
        let records = vec![(2, 1.0), (2, 0.9), (8, 0.9)];
        let quality = control_quality(&records, &spec).unwrap();
        assert!((quality[&2] - 0.05).abs() < 1e-12);
        assert!((quality[&8] - 0.1).abs() < 1e-12);
    }

    #[test]
    fn period_choice_maximizes_under_threshold() {
        let spec = ControlSpec {
            target_accuracy: 0.95,
            gamma_grid: vec![2, 8, 32],
            control_distribution: ControlDistribution::EmpiricalWindows,
        };
        let quality: BTreeMap<usize, f64> =
            [(2, 0.01), (8, 0.03), (32, 0.12)].into_iter().collect();
        let choice = choose_update_period(&quality, &spec).unwrap();
        assert_eq!(choice.gamma, 8);
        assert!(choice.target_met);
    }

    #[test]
    fn period_choice_flags_unmet_target() {
        let spec = ControlSpec {
            target_accuracy: 0.99,
            gamma_grid: vec![2, 8, 32],
            control_distribution: ControlDistribution::EmpiricalWindows,
        };
        let quality: BTreeMap<usize, f64> =
            [(2, 0.05), (8, 0.08), (32, 0.2)].into_iter().collect();
        let choice = choose_update_period(&quality, &spec).unwrap();
        assert_eq!(choice.gamma, 2);
        assert!(!choice.target_met);
    }

    #[test]
    fn period_choice_matches_linear_scan_and_survives_rescaling() {
        let mut rng = rng_from(5);
        let spec = ControlSpec {
            target_accuracy: 0.95,
            gamma_grid: vec![2, 4, 8, 16, 32],
            control_distribution: ControlDistribution::EmpiricalWindows,
        };
        let threshold = 1.0 - spec.target_accuracy;
        for _ in 0..50 {
            let quality: BTreeMap<usize, f64> = spec
                .gamma_grid
                .iter()
                .map(|&g| (g, rng.random::<f64>() * 0.15))
                .collect();
            let choice = choose_update_period(&quality, &spec).unwrap();

            // independent linear scan
            let mut expect = None;
            for &g in &spec.gamma_grid {
                if quality[&g] <= threshold {
                    expect = Some(g);
                }
            }
            match expect {
                Some(g) => {
                    assert_eq!(choice.gamma, g);
                    assert!(choice.target_met);
                }
                None => {
                    assert_eq!(choice.gamma, 2);
                    assert!(!choice.target_met);
                }
            }

            // monotone rescaling preserving the threshold comparisons
            let rescaled: BTreeMap<usize, f64> = quality
                .iter()
                .map(|(&g, &q)| {
                    let q2 = if q <= threshold {
                        q * 0.5
                    } else {
                        threshold + (q - threshold) * 3.0 + 0.01
                    };
                    (g, q2)
                })
                .collect();
            assert_eq!(choice, choose_update_period(&rescaled, &spec).unwrap());
        }
    }
}

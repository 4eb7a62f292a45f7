//! The end-to-end evaluation loop: sample windows of consecutive
//! observations per update period, capture each window's locality, fit a
//! surrogate from the training points inside it, and score the surrogate's
//! agreement with the reference classifier on the window itself. The aging
//! run re-evaluates each surrogate on later windows without refitting.
//!
//! Cells are independent and may run in parallel; every cell derives its own
//! random stream from the experiment seed and the `(gamma, window)` key, so
//! output is identical regardless of thread count or execution order.

use rayon::prelude::*;

use crate::classifiers::{accuracy, Classifier, KernelModel, LinearSvmParams};
use crate::error::{Error, Result};
use crate::locality::{enclosing_sphere, inside_indices};
use crate::seed::{cell_seed, rng_from, stage_seed};
use crate::semcomp::{
    evaluate_on_window, fit_local_with_verdicts, ConstraintSpec, FallbackKind, LocalFitResult,
    LossKind,
};
use crate::worldgen::Dataset;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Update periods, in observations per refit.
    pub gamma_grid: Vec<usize>,
    /// Fraction of window points the locality sphere must enclose.
    pub coverage: f64,
    /// Subsequences sampled per period.
    pub windows_per_gamma: usize,
    /// Below this many training points inside the sphere, fall back to a
    /// constant surrogate matching the reference's majority verdict.
    pub min_local_points: usize,
    /// Delay multiples of gamma evaluated by the aging run.
    pub aging_delays: Vec<usize>,
    /// Stage seed; window sampling and sphere shuffles derive from it.
    pub seed: u64,
    /// Hyperparameters of the per-window linear fits.
    pub local_svm: LinearSvmParams,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            gamma_grid: vec![5, 10, 20, 40, 80, 160, 320],
            coverage: 0.95,
            windows_per_gamma: 200,
            min_local_points: 10,
            aging_delays: vec![0, 1, 2, 4, 8],
            seed: 0,
            local_svm: LinearSvmParams::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.gamma_grid.is_empty() || self.gamma_grid.iter().any(|&g| g < 2) {
            return Err(Error::InvalidParameter("every gamma must be >= 2".into()));
        }
        if self.gamma_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(
                "gamma grid must be strictly increasing".into(),
            ));
        }
        if self.windows_per_gamma < 1 {
            return Err(Error::InvalidParameter("windows_per_gamma must be >= 1".into()));
        }
        if !(self.coverage > 0.0 && self.coverage <= 1.0) {
            return Err(Error::InvalidParameter("coverage must lie in (0, 1]".into()));
        }
        Ok(())
    }
}

/// One cell of the duplex procedure: a window, its locality, and the fitted
/// surrogate's agreement with the reference on that window.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsequenceRecord {
    pub gamma: usize,
    /// Index of the window's last observation.
    pub t: usize,
    pub radius: f64,
    pub accuracy: f64,
    pub local_sample_size: usize,
    pub fallback_kind: FallbackKind,
    pub feasible: bool,
    pub energy_penalty: f64,
    pub bandwidth_penalty: f64,
}

/// Per-window accuracy of a reused surrogate at one delay multiple.
#[derive(Debug, Clone, PartialEq)]
pub struct AgingSample {
    pub gamma: usize,
    pub t: usize,
    pub delay_multiple: usize,
    pub accuracy: f64,
}

/// Mean accuracy at a delay, relative to the mean at delay zero.
#[derive(Debug, Clone, PartialEq)]
pub struct AgingRecord {
    pub gamma: usize,
    pub delay_multiple: usize,
    pub relative_accuracy: f64,
    pub n_windows: usize,
}

/// Per-period mean and quartiles of radius and accuracy.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaSummary {
    pub gamma: usize,
    pub n: usize,
    pub radius_mean: f64,
    pub radius_q25: f64,
    pub radius_q75: f64,
    pub accuracy_mean: f64,
    pub accuracy_q25: f64,
    pub accuracy_q75: f64,
    pub fallbacks: usize,
    pub infeasible: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryStats {
    pub per_gamma: Vec<GammaSummary>,
}

/// Reference verdicts for a point set, computed once and reused across
/// windows; evaluating the kernel model dominates the pipeline otherwise.
pub fn reference_verdicts(f: &KernelModel, points: &[Vec<f64>]) -> Result<Vec<bool>> {
    points
        .par_iter()
        .map(|p| f.predict(p))
        .collect::<Result<Vec<bool>>>()
}

/// Window end indices for one period: a uniform draw without replacement
/// from all valid ends, ascending. `reserve_tail` keeps room after the
/// window (the aging run evaluates up to `max_delay * gamma` later).
pub fn sample_window_ends(
    gamma: usize,
    trajectory_len: usize,
    count: usize,
    reserve_tail: usize,
    seed: u64,
) -> Result<Vec<usize>> {
    let needed = gamma + reserve_tail;
    if trajectory_len < needed {
        return Err(Error::TrajectoryTooShort {
            needed,
            len: trajectory_len,
        });
    }
    let n_valid = trajectory_len - needed + 1;
    let k = count.min(n_valid);
    let mut offsets: Vec<usize> = (0..n_valid).collect();
    let mut rng = rng_from(seed);
    // partial Fisher-Yates: the first k entries become the sample
    for i in 0..k {
        let j = i + rand::Rng::random_range(&mut rng, 0..n_valid - i);
        offsets.swap(i, j);
    }
    let mut ends: Vec<usize> = offsets[..k].iter().map(|&o| gamma - 1 + o).collect();
    ends.sort_unstable();
    Ok(ends)
}

struct CellOutcome {
    radius: f64,
    fit: LocalFitResult,
    local_n: usize,
}

/// Shared per-cell work: sphere over the window, training subset of `z`
/// inside it, and the fitted (or fallback) surrogate.
fn run_cell(
    z: &Dataset,
    f_on_z: &[bool],
    window: &[Vec<f64>],
    window_verdicts: &[bool],
    config: &ExperimentConfig,
    constraints: &ConstraintSpec,
    loss_kind: LossKind,
    welzl_seed: u64,
) -> Result<CellOutcome> {
    let sphere = enclosing_sphere(window, config.coverage, &mut rng_from(welzl_seed))?;
    let indices = inside_indices(z, &sphere)?;
    let local_n = indices.len();

    let fit = if local_n < config.min_local_points {
        let positives = window_verdicts.iter().filter(|&&v| v).count();
        let positive = 2 * positives >= window_verdicts.len();
        let fallback = if positive {
            FallbackKind::ConstantPositive
        } else {
            FallbackKind::ConstantNegative
        };
        evaluate_on_window(
            crate::classifiers::LinearModel::constant(z.dimension, positive),
            window,
            window_verdicts,
            constraints,
            loss_kind,
            fallback,
        )?
    } else {
        let local_points: Vec<&[f64]> = indices.iter().map(|&i| z.samples[i].point.as_slice()).collect();
        let local_verdicts: Vec<bool> = indices.iter().map(|&i| f_on_z[i]).collect();
        fit_local_with_verdicts(
            &local_points,
            &local_verdicts,
            constraints,
            loss_kind,
            &config.local_svm,
            window,
            window_verdicts,
        )?
    };

    Ok(CellOutcome {
        radius: sphere.radius,
        fit,
        local_n,
    })
}

/// Runs the duplex procedure over every period and sampled window.
pub fn run_duplex(
    f: &KernelModel,
    z: &Dataset,
    trajectory: &[Vec<f64>],
    config: &ExperimentConfig,
    constraints: &ConstraintSpec,
    loss_kind: LossKind,
) -> Result<Vec<SubsequenceRecord>> {
    config.validate()?;
    if z.is_empty() {
        return Err(Error::EmptyInput);
    }
    let f_on_z = reference_verdicts(f, &z.points().map(<[f64]>::to_vec).collect::<Vec<_>>())?;
    let traj_verdicts = reference_verdicts(f, trajectory)?;

    let window_seed = stage_seed(config.seed, "duplex_windows");
    let welzl_stage = stage_seed(config.seed, "duplex_welzl");

    let mut cells: Vec<(usize, usize)> = Vec::new();
    for &gamma in &config.gamma_grid {
        let ends = sample_window_ends(
            gamma,
            trajectory.len(),
            config.windows_per_gamma,
            0,
            cell_seed(window_seed, gamma as u64, 0),
        )?;
        cells.extend(ends.into_iter().map(|t| (gamma, t)));
    }

    cells
        .par_iter()
        .map(|&(gamma, t)| {
            let window = &trajectory[t + 1 - gamma..=t];
            let verdicts = &traj_verdicts[t + 1 - gamma..=t];
            let outcome = run_cell(
                z,
                &f_on_z,
                window,
                verdicts,
                config,
                constraints,
                loss_kind,
                cell_seed(welzl_stage, gamma as u64, t as u64),
            )?;
            let report = accuracy(&outcome.fit.model, window, verdicts)?;
            Ok(SubsequenceRecord {
                gamma,
                t,
                radius: outcome.radius,
                accuracy: report.accuracy,
                local_sample_size: outcome.local_n,
                fallback_kind: outcome.fit.fallback_kind,
                feasible: outcome.fit.feasible,
                energy_penalty: outcome.fit.energy_penalty,
                bandwidth_penalty: outcome.fit.bandwidth_penalty,
            })
        })
        .collect()
}

/// Per-window aging measurements: each sampled window's surrogate is
/// re-applied to the windows ending `k * gamma` observations later.
pub fn run_aging_raw(
    f: &KernelModel,
    z: &Dataset,
    trajectory: &[Vec<f64>],
    config: &ExperimentConfig,
    constraints: &ConstraintSpec,
    loss_kind: LossKind,
) -> Result<Vec<AgingSample>> {
    config.validate()?;
    if z.is_empty() {
        return Err(Error::EmptyInput);
    }
    if config.aging_delays.is_empty() {
        return Err(Error::InvalidParameter("aging_delays is empty".into()));
    }
    let f_on_z = reference_verdicts(f, &z.points().map(<[f64]>::to_vec).collect::<Vec<_>>())?;
    let traj_verdicts = reference_verdicts(f, trajectory)?;
    let max_delay = *config.aging_delays.iter().max().unwrap();

    let window_seed = stage_seed(config.seed, "aging_windows");
    let welzl_stage = stage_seed(config.seed, "aging_welzl");

    let mut cells: Vec<(usize, usize)> = Vec::new();
    for &gamma in &config.gamma_grid {
        let ends = sample_window_ends(
            gamma,
            trajectory.len(),
            config.windows_per_gamma,
            max_delay * gamma,
            cell_seed(window_seed, gamma as u64, 0),
        )?;
        cells.extend(ends.into_iter().map(|t| (gamma, t)));
    }

    let nested: Vec<Vec<AgingSample>> = cells
        .par_iter()
        .map(|&(gamma, t)| {
            let window = &trajectory[t + 1 - gamma..=t];
            let verdicts = &traj_verdicts[t + 1 - gamma..=t];
            let outcome = run_cell(
                z,
                &f_on_z,
                window,
                verdicts,
                config,
                constraints,
                loss_kind,
                cell_seed(welzl_stage, gamma as u64, t as u64),
            )?;
            let mut samples = Vec::with_capacity(config.aging_delays.len());
            for &k in &config.aging_delays {
                let end = t + k * gamma;
                let delayed = &trajectory[end + 1 - gamma..=end];
                let delayed_verdicts = &traj_verdicts[end + 1 - gamma..=end];
                let report = accuracy(&outcome.fit.model, delayed, delayed_verdicts)?;
                samples.push(AgingSample {
                    gamma,
                    t,
                    delay_multiple: k,
                    accuracy: report.accuracy,
                });
            }
            Ok(samples)
        })
        .collect::<Result<_>>()?;

    Ok(nested.into_iter().flatten().collect())
}

/// Collapses raw aging samples into the per-(gamma, delay) relative means.
pub fn aggregate_aging(raw: &[AgingSample]) -> Result<Vec<AgingRecord>> {
    if raw.is_empty() {
        return Err(Error::EmptyInput);
    }
    use std::collections::BTreeMap;
    let mut sums: BTreeMap<(usize, usize), (f64, usize)> = BTreeMap::new();
    for s in raw {
        let e = sums.entry((s.gamma, s.delay_multiple)).or_insert((0.0, 0));
        e.0 += s.accuracy;
        e.1 += 1;
    }
    let mut records = Vec::with_capacity(sums.len());
    for (&(gamma, delay), &(total, n)) in &sums {
        let base = sums
            .get(&(gamma, 0))
            .ok_or_else(|| Error::InvalidParameter("aging run lacks delay 0".into()))?;
        let base_mean = base.0 / base.1 as f64;
        if base_mean <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "zero baseline accuracy at gamma {gamma}"
            )));
        }
        records.push(AgingRecord {
            gamma,
            delay_multiple: delay,
            relative_accuracy: (total / n as f64) / base_mean,
            n_windows: n,
        });
    }
    Ok(records)
}

/// The aging analysis end to end.
pub fn run_aging(
    f: &KernelModel,
    z: &Dataset,
    trajectory: &[Vec<f64>],
    config: &ExperimentConfig,
    constraints: &ConstraintSpec,
    loss_kind: LossKind,
) -> Result<Vec<AgingRecord>> {
    aggregate_aging(&run_aging_raw(f, z, trajectory, config, constraints, loss_kind)?)
}

fn nearest_rank(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    let rank = ((q * n as f64).ceil() as usize).clamp(1, n);
    sorted[rank - 1]
}

/// Per-period means and nearest-rank quartiles of radius and accuracy.
pub fn summarize(records: &[SubsequenceRecord]) -> Result<SummaryStats> {
    if records.is_empty() {
        return Err(Error::EmptyInput);
    }
    use std::collections::BTreeMap;
    let mut groups: BTreeMap<usize, Vec<&SubsequenceRecord>> = BTreeMap::new();
    for r in records {
        groups.entry(r.gamma).or_default().push(r);
    }
    let per_gamma = groups
        .into_iter()
        .map(|(gamma, rs)| {
            let n = rs.len();
            let mut radii: Vec<f64> = rs.iter().map(|r| r.radius).collect();
            let mut accs: Vec<f64> = rs.iter().map(|r| r.accuracy).collect();
            radii.sort_by(|a, b| a.partial_cmp(b).unwrap());
            accs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            GammaSummary {
                gamma,
                n,
                radius_mean: radii.iter().sum::<f64>() / n as f64,
                radius_q25: nearest_rank(&radii, 0.25),
                radius_q75: nearest_rank(&radii, 0.75),
                accuracy_mean: accs.iter().sum::<f64>() / n as f64,
                accuracy_q25: nearest_rank(&accs, 0.25),
                accuracy_q75: nearest_rank(&accs, 0.75),
                fallbacks: rs
                    .iter()
                    .filter(|r| r.fallback_kind != FallbackKind::None)
                    .count(),
                infeasible: rs.iter().filter(|r| !r.feasible).count(),
            }
        })
        .collect();
    Ok(SummaryStats { per_gamma })
}

// ---------------------------------------------------------------------------
// CSV formats. Column order and headers are part of the external contract.

pub const RECORDS_HEADER: &str =
    "gamma,t,radius,accuracy,local_n,fallback,feasible,energy_pen,bandwidth_pen";
pub const AGING_HEADER: &str = "gamma,delay_multiple,relative_accuracy,n_windows";
pub const SUMMARY_HEADER: &str = "gamma,metric,mean,q25,q75,n";

pub fn records_to_csv(records: &[SubsequenceRecord]) -> String {
    let mut out = String::from(RECORDS_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.gamma,
            r.t,
            r.radius,
            r.accuracy,
            r.local_sample_size,
            r.fallback_kind.as_str(),
            r.feasible,
            r.energy_penalty,
            r.bandwidth_penalty,
        ));
    }
    out
}

pub fn records_from_csv(text: &str) -> Result<Vec<SubsequenceRecord>> {
    let malformed = |detail: String| Error::MalformedData {
        what: "records csv".into(),
        detail,
    };
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == RECORDS_HEADER => {}
        other => return Err(malformed(format!("bad header {other:?}"))),
    }
    let mut records = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 9 {
            return Err(malformed(format!("row {i} has {} fields", fields.len())));
        }
        let parse_f = |s: &str| -> Result<f64> {
            s.parse().map_err(|_| malformed(format!("bad float {s:?} on row {i}")))
        };
        let parse_u = |s: &str| -> Result<usize> {
            s.parse().map_err(|_| malformed(format!("bad integer {s:?} on row {i}")))
        };
        records.push(SubsequenceRecord {
            gamma: parse_u(fields[0])?,
            t: parse_u(fields[1])?,
            radius: parse_f(fields[2])?,
            accuracy: parse_f(fields[3])?,
            local_sample_size: parse_u(fields[4])?,
            fallback_kind: FallbackKind::parse(fields[5])
                .ok_or_else(|| malformed(format!("bad fallback {:?} on row {i}", fields[5])))?,
            feasible: match fields[6] {
                "true" => true,
                "false" => false,
                other => return Err(malformed(format!("bad flag {other:?} on row {i}"))),
            },
            energy_penalty: parse_f(fields[7])?,
            bandwidth_penalty: parse_f(fields[8])?,
        });
    }
    Ok(records)
}

pub fn aging_to_csv(records: &[AgingRecord]) -> String {
    let mut out = String::from(AGING_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.gamma, r.delay_multiple, r.relative_accuracy, r.n_windows
        ));
    }
    out
}

pub fn aging_from_csv(text: &str) -> Result<Vec<AgingRecord>> {
    let malformed = |detail: String| Error::MalformedData {
        what: "aging csv".into(),
        detail,
    };
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == AGING_HEADER => {}
        other => return Err(malformed(format!("bad header {other:?}"))),
    }
    let mut records = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(malformed(format!("row {i} has {} fields", fields.len())));
        }
        records.push(AgingRecord {
            gamma: fields[0]
                .parse()
                .map_err(|_| malformed(format!("bad gamma on row {i}")))?,
            delay_multiple: fields[1]
                .parse()
                .map_err(|_| malformed(format!("bad delay on row {i}")))?,
            relative_accuracy: fields[2]
                .parse()
                .map_err(|_| malformed(format!("bad ratio on row {i}")))?,
            n_windows: fields[3]
                .parse()
                .map_err(|_| malformed(format!("bad count on row {i}")))?,
        });
    }
    Ok(records)
}

pub fn summary_to_csv(stats: &SummaryStats) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for g in &stats.per_gamma {
        out.push_str(&format!(
            "{},radius,{},{},{},{}\n",
            g.gamma, g.radius_mean, g.radius_q25, g.radius_q75, g.n
        ));
        out.push_str(&format!(
            "{},accuracy,{},{},{},{}\n",
            g.gamma, g.accuracy_mean, g.accuracy_q25, g.accuracy_q75, g.n
        ));
    }
    out
}

/// One parsed summary row.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryCsvRow {
    pub gamma: usize,
    pub metric: String,
    pub mean: f64,
    pub q25: f64,
    pub q75: f64,
    pub n: usize,
}

pub fn summary_rows_from_csv(text: &str) -> Result<Vec<SummaryCsvRow>> {
    let malformed = |detail: String| Error::MalformedData {
        what: "summary csv".into(),
        detail,
    };
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == SUMMARY_HEADER => {}
        other => return Err(malformed(format!("bad header {other:?}"))),
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(malformed(format!("row {i} has {} fields", fields.len())));
        }
        let bad = |what: &str| malformed(format!("bad {what} on row {i}"));
        rows.push(SummaryCsvRow {
            gamma: fields[0].parse().map_err(|_| bad("gamma"))?,
            metric: fields[1].to_string(),
            mean: fields[2].parse().map_err(|_| bad("mean"))?,
            q25: fields[3].parse().map_err(|_| bad("q25"))?,
            q75: fields[4].parse().map_err(|_| bad("q75"))?,
            n: fields[5].parse().map_err(|_| bad("n"))?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from;
    use crate::trajectory::{sample_trajectory, MhConfig};
    use crate::worldgen::{build_mixture, sample_labeled, MixtureConfig, MixtureSpec};
    use crate::classifiers::{train_rbf_svm, RbfSvmParams};

    fn small_world() -> MixtureSpec {
        build_mixture(&MixtureConfig {
            dimension: 2,
            lines_per_class: 1,
            components_per_line: 3,
            line_offset: 0.15,
            component_spacing: 0.2,
            component_stddev: 0.05,
        })
        .unwrap()
    }

    fn small_setup() -> (KernelModel, Dataset, Vec<Vec<f64>>) {
        let world = small_world();
        let z = sample_labeled(&world, 800, &mut rng_from(1)).unwrap();
        let f = train_rbf_svm(
            &z,
            &RbfSvmParams {
                gamma: 40.0,
                ..Default::default()
            },
            &mut rng_from(2),
        )
        .unwrap();
        let traj = sample_trajectory(
            &world,
            600,
            &MhConfig {
                proposal_stddev: 0.05,
                burn_in: 200,
            },
            3,
        )
        .unwrap();
        (f, z, traj.points)
    }

    fn small_config() -> ExperimentConfig {
        ExperimentConfig {
            gamma_grid: vec![5, 20],
            windows_per_gamma: 15,
            aging_delays: vec![0, 1, 2],
            seed: 7,
            ..Default::default()
        }
    }

    #[test]
    fn duplex_emits_every_cell_and_is_deterministic() {
        let (f, z, traj) = small_setup();
        let config = small_config();
        let constraints = ConstraintSpec::default();
        let a = run_duplex(&f, &z, &traj, &config, &constraints, LossKind::Squared).unwrap();
        let b = run_duplex(&f, &z, &traj, &config, &constraints, LossKind::Squared).unwrap();
        assert_eq!(a.len(), 30);
        assert_eq!(a, b);
        assert_eq!(records_to_csv(&a), records_to_csv(&b));
    }

    #[test]
    fn longer_windows_have_larger_localities() {
        let (f, z, traj) = small_setup();
        let config = small_config();
        let records =
            run_duplex(&f, &z, &traj, &config, &ConstraintSpec::default(), LossKind::Squared)
                .unwrap();
        let mean_radius = |g: usize| {
            let rs: Vec<f64> = records
                .iter()
                .filter(|r| r.gamma == g)
                .map(|r| r.radius)
                .collect();
            rs.iter().sum::<f64>() / rs.len() as f64
        };
        assert!(mean_radius(20) > mean_radius(5));
    }

    #[test]
    fn sphere_encloses_the_required_share_of_its_window() {
        let (f, z, traj) = small_setup();
        let config = small_config();
        let records =
            run_duplex(&f, &z, &traj, &config, &ConstraintSpec::default(), LossKind::Squared)
                .unwrap();
        // replay each record's sphere from its window
        let welzl_stage = stage_seed(config.seed, "duplex_welzl");
        for r in &records {
            let window = &traj[r.t + 1 - r.gamma..=r.t];
            let sphere = enclosing_sphere(
                window,
                config.coverage,
                &mut rng_from(cell_seed(welzl_stage, r.gamma as u64, r.t as u64)),
            )
            .unwrap();
            assert_eq!(sphere.radius, r.radius);
            let needed = (config.coverage * r.gamma as f64).ceil() as usize;
            let inside = window
                .iter()
                .filter(|p| sphere.contains(p).unwrap())
                .count();
            assert!(inside >= needed, "gamma {} t {}: {inside} < {needed}", r.gamma, r.t);
        }
    }

    /// A reference model that is positive everywhere, regardless of the
    /// ground truth; recorded accuracy must measure agreement with it.
    #[test]
    fn accuracy_is_agreement_with_the_reference_not_ground_truth() {
        let (_, z, traj) = small_setup();
        let constant_positive = KernelModel {
            support_points: vec![vec![0.5, 0.5]],
            dual_coefs: vec![0.0],
            bias: 10.0,
            rbf_gamma: 1.0,
        };
        let config = small_config();
        let records = run_duplex(
            &constant_positive,
            &z,
            &traj,
            &config,
            &ConstraintSpec::default(),
            LossKind::Squared,
        )
        .unwrap();
        for r in &records {
            assert_eq!(r.accuracy, 1.0);
            assert_eq!(r.fallback_kind, FallbackKind::ConstantPositive);
        }
    }

    #[test]
    fn aging_at_delay_zero_is_exactly_one() {
        let (f, z, traj) = small_setup();
        let config = small_config();
        let records =
            run_aging(&f, &z, &traj, &config, &ConstraintSpec::default(), LossKind::Squared)
                .unwrap();
        for r in records.iter().filter(|r| r.delay_multiple == 0) {
            assert_eq!(r.relative_accuracy, 1.0);
        }
        // every (gamma, delay) pair appears
        assert_eq!(records.len(), 2 * 3);
    }

    #[test]
    fn constant_reference_never_ages() {
        let (_, z, traj) = small_setup();
        let constant_positive = KernelModel {
            support_points: vec![vec![0.5, 0.5]],
            dual_coefs: vec![0.0],
            bias: 10.0,
            rbf_gamma: 1.0,
        };
        let config = small_config();
        let records = run_aging(
            &constant_positive,
            &z,
            &traj,
            &config,
            &ConstraintSpec::default(),
            LossKind::Squared,
        )
        .unwrap();
        for r in &records {
            assert_eq!(r.relative_accuracy, 1.0);
        }
    }

    #[test]
    fn aging_aggregation_matches_raw_recomputation() {
        let (f, z, traj) = small_setup();
        let config = small_config();
        let constraints = ConstraintSpec::default();
        let raw =
            run_aging_raw(&f, &z, &traj, &config, &constraints, LossKind::Squared).unwrap();
        let records = aggregate_aging(&raw).unwrap();
        for rec in &records {
            let at = |k: usize| {
                let accs: Vec<f64> = raw
                    .iter()
                    .filter(|s| s.gamma == rec.gamma && s.delay_multiple == k)
                    .map(|s| s.accuracy)
                    .collect();
                accs.iter().sum::<f64>() / accs.len() as f64
            };
            let expect = at(rec.delay_multiple) / at(0);
            assert!((rec.relative_accuracy - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn trajectory_too_short_is_detected() {
        let (f, z, traj) = small_setup();
        let config = ExperimentConfig {
            gamma_grid: vec![5, 2000],
            ..small_config()
        };
        let result =
            run_duplex(&f, &z, &traj[..100].to_vec(), &config, &ConstraintSpec::default(), LossKind::Squared);
        assert!(matches!(result, Err(Error::TrajectoryTooShort { .. })));
    }

    #[test]
    fn summarize_singleton_collapses_to_the_value() {
        let record = SubsequenceRecord {
            gamma: 5,
            t: 10,
            radius: 0.2,
            accuracy: 0.9,
            local_sample_size: 50,
            fallback_kind: FallbackKind::None,
            feasible: true,
            energy_penalty: 0.0,
            bandwidth_penalty: 0.0,
        };
        let stats = summarize(&[record]).unwrap();
        let g = &stats.per_gamma[0];
        assert_eq!((g.radius_mean, g.radius_q25, g.radius_q75), (0.2, 0.2, 0.2));
        assert_eq!((g.accuracy_mean, g.accuracy_q25, g.accuracy_q75), (0.9, 0.9, 0.9));
    }

    #[test]
    fn summarize_uses_nearest_rank_quantiles() {
        let mk = |acc: f64| SubsequenceRecord {
            gamma: 5,
            t: 0,
            radius: acc,
            accuracy: acc,
            local_sample_size: 1,
            fallback_kind: FallbackKind::None,
            feasible: true,
            energy_penalty: 0.0,
            bandwidth_penalty: 0.0,
        };
        let stats = summarize(&[mk(0.9), mk(1.0), mk(0.8)]).unwrap();
        let g = &stats.per_gamma[0];
        assert!((g.accuracy_mean - 0.9).abs() < 1e-15);
        assert_eq!(g.accuracy_q25, 0.8);
        assert_eq!(g.accuracy_q75, 1.0);
    }

    #[test]
    fn csv_round_trips() {
        let (f, z, traj) = small_setup();
        let config = small_config();
        let constraints = ConstraintSpec::default();
        let records =
            run_duplex(&f, &z, &traj, &config, &constraints, LossKind::Squared).unwrap();
        assert_eq!(records_from_csv(&records_to_csv(&records)).unwrap(), records);

        let aging =
            run_aging(&f, &z, &traj, &config, &constraints, LossKind::Squared).unwrap();
        assert_eq!(aging_from_csv(&aging_to_csv(&aging)).unwrap(), aging);

        let stats = summarize(&records).unwrap();
        let rows = summary_rows_from_csv(&summary_to_csv(&stats)).unwrap();
        assert_eq!(rows.len(), 2 * stats.per_gamma.len());
        assert_eq!(rows[0].metric, "radius");
        assert_eq!(rows[1].metric, "accuracy");
    }
}

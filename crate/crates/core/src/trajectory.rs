//! Sensor observation trajectories: a Markov chain over the world
//! distribution generated with a Gaussian random-walk Metropolis-Hastings
//! sampler. Consecutive states are recorded without thinning, because
//! localities are built from runs of consecutive observations.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::seed::rng_from;
use crate::worldgen::MixtureSpec;

#[derive(Debug, Clone, PartialEq)]
pub struct MhConfig {
    /// Isotropic stddev of the random-walk proposal.
    pub proposal_stddev: f64,
    /// Discarded steps before recording starts.
    pub burn_in: usize,
}

impl Default for MhConfig {
    fn default() -> Self {
        MhConfig {
            proposal_stddev: 0.05,
            burn_in: 1000,
        }
    }
}

/// A recorded chain of consecutive observations.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub points: Vec<Vec<f64>>,
    /// Seed the chain was generated from.
    pub seed: u64,
    /// Fraction of accepted proposals over the recorded steps.
    pub accept_rate: f64,
}

/// The acceptance rule for a symmetric proposal: accept iff
/// `u < pdf(proposal) / pdf(current)`.
///
/// A zero-density proposal is never accepted; a proposal at least as dense
/// as the current state always is.
pub(crate) fn accept_decision(pdf_current: f64, pdf_proposal: f64, u: f64) -> bool {
    u * pdf_current < pdf_proposal
}

/// One Metropolis-Hastings step from `current`, which must have positive
/// density. Returns the next state and whether the proposal was accepted;
/// on rejection the next state is `current` itself, bit for bit.
pub fn mh_step<R: Rng>(
    spec: &MixtureSpec,
    current: &[f64],
    config: &MhConfig,
    rng: &mut R,
) -> Result<(Vec<f64>, bool)> {
    let pdf_current = spec.pdf(current, None)?;
    let proposal: Vec<f64> = current
        .iter()
        .map(|&x| {
            x + config.proposal_stddev
                * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng)
        })
        .collect();
    let pdf_proposal = spec.pdf(&proposal, None)?;
    let u: f64 = rng.random();
    if accept_decision(pdf_current, pdf_proposal, u) {
        Ok((proposal, true))
    } else {
        Ok((current.to_vec(), false))
    }
}

/// Runs the chain from a start point drawn from the world, discards the
/// burn-in, then records `length` consecutive states.
pub fn sample_trajectory(
    spec: &MixtureSpec,
    length: usize,
    config: &MhConfig,
    seed: u64,
) -> Result<Trajectory> {
    if length < 1 {
        return Err(Error::InvalidParameter("trajectory length must be >= 1".into()));
    }
    if !(config.proposal_stddev > 0.0) {
        return Err(Error::InvalidParameter("proposal_stddev must be > 0".into()));
    }
    let mut rng = rng_from(seed);
    let mut state = spec.sample_point(&mut rng);
    for _ in 0..config.burn_in {
        let (next, _) = mh_step(spec, &state, config, &mut rng)?;
        state = next;
    }
    let mut points = Vec::with_capacity(length);
    let mut accepted = 0usize;
    for _ in 0..length {
        let (next, was_accepted) = mh_step(spec, &state, config, &mut rng)?;
        state = next;
        if was_accepted {
            accepted += 1;
        }
        points.push(state.clone());
    }
    Ok(Trajectory {
        points,
        seed,
        accept_rate: accepted as f64 / length as f64,
    })
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.points.first().map_or(0, Vec::len)
    }

    /// Serializes to CSV with header `t,x_0,…,x_{d-1}`, `t` zero-based.
    pub fn to_csv(&self) -> String {
        let d = self.dimension();
        let mut out = String::from("t");
        for i in 0..d {
            out.push_str(&format!(",x_{i}"));
        }
        out.push('\n');
        for (t, p) in self.points.iter().enumerate() {
            out.push_str(&format!("{t}"));
            for x in p {
                out.push_str(&format!(",{x}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Reads back the points of a persisted trajectory.
pub fn points_from_csv(text: &str) -> Result<Vec<Vec<f64>>> {
    let malformed = |detail: String| Error::MalformedData {
        what: "trajectory csv".into(),
        detail,
    };
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| malformed("missing header".into()))?;
    if !header.starts_with("t,x_0") {
        return Err(malformed(format!("unexpected header {header:?}")));
    }
    let dimension = header.split(',').count() - 1;
    let mut points = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let t: usize = fields
            .next()
            .and_then(|f| f.parse().ok())
            .ok_or_else(|| malformed(format!("bad index on row {i}")))?;
        if t != i {
            return Err(malformed(format!("row {i} is indexed {t}")));
        }
        let point: Vec<f64> = fields
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| malformed(format!("bad float on row {i}")))?;
        if point.len() != dimension {
            return Err(malformed(format!("row {i} has wrong arity")));
        }
        points.push(point);
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::worldgen::{build_mixture, MixtureConfig};

    fn default_world() -> MixtureSpec {
        build_mixture(&MixtureConfig::default()).unwrap()
    }

    #[test]
    fn denser_proposals_are_always_accepted() {
        for u in [0.0, 0.3, 0.999_999] {
            assert!(accept_decision(0.2, 0.2, u));
            assert!(accept_decision(0.2, 5.0, u));
        }
    }

    #[test]
    fn zero_density_proposals_are_always_rejected() {
        for u in [0.0, 0.5, 0.999_999] {
            assert!(!accept_decision(0.7, 0.0, u));
        }
    }

    #[test]
    fn rejected_steps_repeat_the_state_bitwise() {
        let spec = default_world();
        let mut rng = rng_from(31);
        let config = MhConfig {
            proposal_stddev: 50.0, // nearly every proposal lands in dead space
            burn_in: 0,
        };
        let mut state = spec.sample_point(&mut rng);
        let mut saw_rejection = false;
        for _ in 0..200 {
            let (next, accepted) = mh_step(&spec, &state, &config, &mut rng).unwrap();
            if !accepted {
                assert_eq!(next, state);
                saw_rejection = true;
            }
            state = next;
        }
        assert!(saw_rejection);
    }

    #[test]
    fn length_one_trajectory_is_one_step_from_start() {
        let spec = default_world();
        let config = MhConfig {
            proposal_stddev: 0.05,
            burn_in: 0,
        };
        let traj = sample_trajectory(&spec, 1, &config, 77).unwrap();
        assert_eq!(traj.len(), 1);

        // replay: the recorded point is the state after exactly one step
        let mut rng = rng_from(77);
        let start = spec.sample_point(&mut rng);
        let (next, _) = mh_step(&spec, &start, &config, &mut rng).unwrap();
        assert_eq!(traj.points[0], next);
    }

    #[test]
    fn trajectories_are_deterministic_per_seed() {
        let spec = default_world();
        let config = MhConfig::default();
        let a = sample_trajectory(&spec, 500, &config, 5).unwrap();
        let b = sample_trajectory(&spec, 500, &config, 5).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn default_step_size_keeps_the_chain_live() {
        let spec = default_world();
        let config = MhConfig {
            proposal_stddev: 0.05,
            burn_in: 100,
        };
        let traj = sample_trajectory(&spec, 50_000, &config, 9).unwrap();
        assert!(
            (0.2..=0.8).contains(&traj.accept_rate),
            "acceptance rate {} outside [0.2, 0.8]",
            traj.accept_rate
        );
    }

    #[test]
    fn zero_length_is_rejected() {
        let spec = default_world();
        assert!(matches!(
            sample_trajectory(&spec, 0, &MhConfig::default(), 1),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn csv_round_trips_points() {
        let spec = default_world();
        let traj = sample_trajectory(&spec, 64, &MhConfig::default(), 13).unwrap();
        let text = traj.to_csv();
        let points = points_from_csv(&text).unwrap();
        assert_eq!(points, traj.points);
    }
}

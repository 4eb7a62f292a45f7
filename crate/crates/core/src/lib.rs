//! Simulation library for locality-constrained surrogate classification.
//!
//! An expensive kernel classifier lives at an edge processor; cheap linear
//! surrogates are fitted to the neighborhood of a sensor's recent
//! observations and used on-device to filter what gets transmitted. The
//! modules here build the synthetic world, train both classifier tiers,
//! generate observation trajectories, capture localities, fit surrogates
//! under bandwidth and energy budgets, and measure how surrogate quality
//! trades off against the update period.

pub mod classifiers;
pub mod error;
pub mod experiment;
pub mod locality;
pub mod seed;
pub mod semcomp;
pub mod trajectory;
pub mod worldgen;

pub use classifiers::{AccuracyReport, KernelModel, LinearModel, LinearSvmParams, RbfSvmParams};
pub use error::{Error, Result};
pub use experiment::{AgingRecord, ExperimentConfig, GammaSummary, SubsequenceRecord, SummaryStats};
pub use locality::Sphere;
pub use semcomp::{ConstraintSpec, ControlSpec, FallbackKind, LocalFitResult, LossKind, PeriodChoice};
pub use trajectory::{MhConfig, Trajectory};
pub use worldgen::{Dataset, LabeledSample, MixtureConfig, MixtureSpec};

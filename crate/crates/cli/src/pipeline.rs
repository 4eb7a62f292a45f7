//! Subcommand implementations: each stage reads the artifacts of earlier
//! stages from the output directory and writes its own, so expensive stages
//! (global training, trajectory generation) are reused across sweeps.

use std::path::{Path, PathBuf};

use semcomp_core::classifiers::{accuracy, train_rbf_svm, KernelModel};
use semcomp_core::experiment::{
    aging_from_csv, aging_to_csv, records_from_csv, records_to_csv, run_aging, run_duplex,
    summarize, summary_rows_from_csv, summary_to_csv, ExperimentConfig,
};
use semcomp_core::seed::{rng_from, stage_seed};
use semcomp_core::semcomp::{
    choose_update_period, control_quality, ConstraintSpec, ControlDistribution, ControlSpec,
};
use semcomp_core::trajectory::{points_from_csv, sample_trajectory};
use semcomp_core::worldgen::{build_mixture, sample_labeled, Dataset, MixtureSpec};

use crate::config::RunConfig;
use crate::plot;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] crate::config::ConfigError),
    #[error("configuration rejected: {0}")]
    BadConfig(String),
    #[error("missing artifact {artifact:?} ({path}); run `{produced_by}` first")]
    MissingArtifact {
        artifact: &'static str,
        path: PathBuf,
        produced_by: &'static str,
    },
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::BadConfig(_) => 1,
            CliError::MissingArtifact { .. } => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

impl From<semcomp_core::Error> for CliError {
    fn from(e: semcomp_core::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub const DATASET_FILE: &str = "dataset.csv";
pub const GLOBAL_MODEL_FILE: &str = "global_model.txt";
pub const GLOBAL_EVAL_FILE: &str = "global_eval.txt";
pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const RECORDS_FILE: &str = "records.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const AGING_FILE: &str = "aging.csv";
pub const RADIUS_PLOT_FILE: &str = "radius_vs_gamma.svg";
pub const ACCURACY_PLOT_FILE: &str = "accuracy_vs_gamma.svg";
pub const AGING_PLOT_FILE: &str = "aging.svg";

/// Execution context shared by every subcommand.
pub struct Context {
    pub config: RunConfig,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub quiet: bool,
}

impl Context {
    fn say(&self, message: impl AsRef<str>) {
        if !self.quiet {
            println!("{}", message.as_ref());
        }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }

    fn read_artifact(
        &self,
        name: &'static str,
        artifact: &'static str,
        produced_by: &'static str,
    ) -> CliResult<String> {
        let path = self.path(name);
        if !path.exists() {
            return Err(CliError::MissingArtifact {
                artifact,
                path,
                produced_by,
            });
        }
        std::fs::read_to_string(&path)
            .map_err(|e| CliError::Runtime(format!("cannot read {}: {e}", path.display())))
    }

    fn write_artifact(&self, name: &str, contents: &str) -> CliResult<()> {
        std::fs::create_dir_all(&self.out_dir)
            .map_err(|e| CliError::Runtime(format!("cannot create out dir: {e}")))?;
        let path = self.path(name);
        std::fs::write(&path, contents)
            .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))?;
        Ok(())
    }

    fn world(&self) -> CliResult<MixtureSpec> {
        build_mixture(&self.config.world).map_err(|e| CliError::BadConfig(e.to_string()))
    }

    fn experiment_config(&self) -> ExperimentConfig {
        ExperimentConfig {
            gamma_grid: self.config.gamma_grid.clone(),
            coverage: self.config.coverage,
            windows_per_gamma: self.config.windows_per_gamma,
            min_local_points: self.config.min_local_points,
            aging_delays: self.config.aging_delays.clone(),
            seed: stage_seed(self.seed, "experiment"),
            local_svm: self.config.local_svm.clone(),
        }
    }

    fn constraints(&self) -> ConstraintSpec {
        ConstraintSpec {
            energy_budget: self.config.energy_budget,
            bandwidth_budget: self.config.bandwidth_budget,
            energy_tolerance: self.config.energy_tolerance,
            bandwidth_tolerance: self.config.bandwidth_tolerance,
            payload_size: self.config.payload_size,
        }
    }

    fn load_dataset(&self) -> CliResult<Dataset> {
        let text = self.read_artifact(DATASET_FILE, "dataset", "gen-world")?;
        Ok(Dataset::from_csv(&text)?)
    }

    fn load_model(&self) -> CliResult<KernelModel> {
        let text = self.read_artifact(GLOBAL_MODEL_FILE, "global_model", "train-global")?;
        Ok(KernelModel::from_text(&text)?)
    }

    fn load_trajectory(&self) -> CliResult<Vec<Vec<f64>>> {
        let text = self.read_artifact(TRAJECTORY_FILE, "trajectory", "gen-trajectory")?;
        Ok(points_from_csv(&text)?)
    }
}

pub fn gen_world(ctx: &Context) -> CliResult<()> {
    let world = ctx.world()?;
    let mut rng = rng_from(stage_seed(ctx.seed, "world"));
    let dataset = sample_labeled(&world, ctx.config.dataset_size, &mut rng)
        .map_err(|e| CliError::BadConfig(e.to_string()))?;
    ctx.write_artifact(DATASET_FILE, &dataset.to_csv())?;
    ctx.say(format!(
        "wrote {} ({} samples, dimension {})",
        DATASET_FILE,
        dataset.len(),
        dataset.dimension
    ));
    Ok(())
}

pub fn train_global(ctx: &Context) -> CliResult<()> {
    let world = ctx.world()?;
    let dataset = ctx.load_dataset()?;
    let mut rng = rng_from(stage_seed(ctx.seed, "global_train"));
    let model = train_rbf_svm(&dataset, &ctx.config.global_svm, &mut rng)?;

    let mut holdout_rng = rng_from(stage_seed(ctx.seed, "holdout"));
    let holdout = sample_labeled(&world, ctx.config.holdout_size, &mut holdout_rng)?;
    let points: Vec<Vec<f64>> = holdout.points().map(<[f64]>::to_vec).collect();
    let labels: Vec<bool> = holdout.labels().collect();
    let report = accuracy(&model, &points, &labels)?;

    ctx.write_artifact(GLOBAL_MODEL_FILE, &model.to_text())?;
    ctx.write_artifact(
        GLOBAL_EVAL_FILE,
        &format!(
            "holdout_accuracy {}\nholdout_size {}\nn_support {}\n",
            report.accuracy,
            holdout.len(),
            model.n_support()
        ),
    )?;
    ctx.say(format!(
        "trained reference classifier: {} support points, held-out agreement {:.4}",
        model.n_support(),
        report.accuracy
    ));
    Ok(())
}

pub fn gen_trajectory(ctx: &Context) -> CliResult<()> {
    let world = ctx.world()?;
    let trajectory = sample_trajectory(
        &world,
        ctx.config.trajectory_length,
        &ctx.config.mh,
        stage_seed(ctx.seed, "trajectory"),
    )?;
    ctx.write_artifact(TRAJECTORY_FILE, &trajectory.to_csv())?;
    ctx.say(format!(
        "wrote {} ({} observations, acceptance rate {:.3})",
        TRAJECTORY_FILE,
        trajectory.len(),
        trajectory.accept_rate
    ));
    Ok(())
}

pub fn simulate(ctx: &Context) -> CliResult<()> {
    let dataset = ctx.load_dataset()?;
    let model = ctx.load_model()?;
    let trajectory = ctx.load_trajectory()?;

    let records = run_duplex(
        &model,
        &dataset,
        &trajectory,
        &ctx.experiment_config(),
        &ctx.constraints(),
        ctx.config.loss(),
    )?;
    ctx.write_artifact(RECORDS_FILE, &records_to_csv(&records))?;

    let stats = summarize(&records)?;
    ctx.write_artifact(SUMMARY_FILE, &summary_to_csv(&stats))?;

    ctx.say(format!(
        "wrote {} ({} windows) and {}",
        RECORDS_FILE,
        records.len(),
        SUMMARY_FILE
    ));
    for g in &stats.per_gamma {
        ctx.say(format!(
            "  gamma {:>4}: radius {:.4} [{:.4}, {:.4}]  accuracy {:.4} [{:.4}, {:.4}]  fallbacks {}  infeasible {}",
            g.gamma,
            g.radius_mean,
            g.radius_q25,
            g.radius_q75,
            g.accuracy_mean,
            g.accuracy_q25,
            g.accuracy_q75,
            g.fallbacks,
            g.infeasible,
        ));
    }
    Ok(())
}

pub fn aging(ctx: &Context) -> CliResult<()> {
    let dataset = ctx.load_dataset()?;
    let model = ctx.load_model()?;
    let trajectory = ctx.load_trajectory()?;

    let records = run_aging(
        &model,
        &dataset,
        &trajectory,
        &ctx.experiment_config(),
        &ctx.constraints(),
        ctx.config.loss(),
    )?;
    ctx.write_artifact(AGING_FILE, &aging_to_csv(&records))?;
    ctx.say(format!("wrote {} ({} rows)", AGING_FILE, records.len()));
    Ok(())
}

pub fn control(ctx: &Context) -> CliResult<()> {
    let text = ctx.read_artifact(RECORDS_FILE, "records", "simulate")?;
    let records = records_from_csv(&text)?;
    let spec = ControlSpec {
        target_accuracy: ctx.config.target_accuracy,
        gamma_grid: ctx.config.gamma_grid.clone(),
        control_distribution: ControlDistribution::EmpiricalWindows,
    };
    let pairs: Vec<(usize, f64)> = records.iter().map(|r| (r.gamma, r.accuracy)).collect();
    let quality = control_quality(&pairs, &spec)?;
    for (gamma, q) in &quality {
        ctx.say(format!("  gamma {gamma:>4}: mean disagreement {q:.4}"));
    }
    let choice = choose_update_period(&quality, &spec)?;
    if choice.target_met {
        println!(
            "gamma0 = {} (largest period meeting target accuracy {})",
            choice.gamma, ctx.config.target_accuracy
        );
    } else {
        println!(
            "gamma0 = {} (target accuracy {} unmet at every period; reporting the smallest)",
            choice.gamma, ctx.config.target_accuracy
        );
    }
    Ok(())
}

pub fn report(ctx: &Context) -> CliResult<()> {
    let summary_text = ctx.read_artifact(SUMMARY_FILE, "summary", "simulate")?;
    let rows = summary_rows_from_csv(&summary_text)?;
    let aging_text = ctx.read_artifact(AGING_FILE, "aging", "aging")?;
    let aging_rows = aging_from_csv(&aging_text)?;

    ctx.write_artifact(RADIUS_PLOT_FILE, &plot::radius_plot(&rows))?;
    ctx.write_artifact(ACCURACY_PLOT_FILE, &plot::accuracy_plot(&rows))?;
    ctx.write_artifact(AGING_PLOT_FILE, &plot::aging_plot(&aging_rows))?;
    ctx.say(format!(
        "wrote {RADIUS_PLOT_FILE}, {ACCURACY_PLOT_FILE}, {AGING_PLOT_FILE}"
    ));
    Ok(())
}

/// Resolves the effective output directory: an explicit flag wins over the
/// config file's `[output] dir` (which is relative to the config file).
pub fn resolve_out_dir(flag: Option<PathBuf>, config: &RunConfig) -> PathBuf {
    flag.unwrap_or_else(|| config.out_dir.clone())
}

pub fn resolve_context(
    config_path: &Path,
    out_dir_flag: Option<PathBuf>,
    seed_flag: Option<u64>,
    quiet: bool,
) -> CliResult<Context> {
    let config = crate::config::parse_config(config_path)?;
    let out_dir = resolve_out_dir(out_dir_flag, &config);
    let seed = seed_flag.unwrap_or(config.master_seed);
    Ok(Context {
        config,
        out_dir,
        seed,
        quiet,
    })
}

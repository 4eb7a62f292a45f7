//! Run configuration: a line-based `key = value` format with `[section]`
//! headers and `#` comments. Every key has a default, so an empty file is a
//! valid configuration; unknown sections or keys are errors so typos cannot
//! silently fall back to defaults.

use std::fmt;
use std::path::{Path, PathBuf};

use semcomp_core::classifiers::{LinearSvmParams, RbfSvmParams};
use semcomp_core::semcomp::LossKind;
use semcomp_core::trajectory::MhConfig;
use semcomp_core::worldgen::MixtureConfig;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    MissingFile {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("line {line}: expected `key = value` or `[section]`, got {text:?}")]
    Parse { line: usize, text: String },
    #[error("line {line}: unknown {what} {name:?}")]
    UnknownKey {
        line: usize,
        what: &'static str,
        name: String,
    },
    #[error("line {line}: invalid value for {key}: {reason}")]
    InvalidValue {
        line: usize,
        key: String,
        reason: String,
    },
}

/// Everything a run needs, resolved against defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub master_seed: u64,

    pub world: MixtureConfig,
    pub dataset_size: usize,

    pub global_svm: RbfSvmParams,
    pub holdout_size: usize,

    pub trajectory_length: usize,
    pub mh: MhConfig,

    pub gamma_grid: Vec<usize>,
    pub coverage: f64,
    pub windows_per_gamma: usize,
    pub min_local_points: usize,
    pub aging_delays: Vec<usize>,
    pub local_svm: LinearSvmParams,
    pub logistic_loss: bool,
    pub logistic_delta: f64,

    pub energy_budget: f64,
    pub bandwidth_budget: f64,
    pub energy_tolerance: f64,
    pub bandwidth_tolerance: f64,
    pub payload_size: f64,

    pub target_accuracy: f64,

    /// Output directory from the `[output]` section, resolved relative to
    /// the config file's own directory.
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            master_seed: 42,
            world: MixtureConfig::default(),
            dataset_size: 20_000,
            global_svm: RbfSvmParams::default(),
            holdout_size: 5_000,
            trajectory_length: 50_000,
            mh: MhConfig::default(),
            gamma_grid: vec![5, 10, 20, 40, 80, 160, 320],
            coverage: 0.95,
            windows_per_gamma: 200,
            min_local_points: 10,
            aging_delays: vec![0, 1, 2, 4, 8],
            local_svm: LinearSvmParams::default(),
            logistic_loss: false,
            logistic_delta: LossKind::DEFAULT_LOGISTIC_DELTA,
            energy_budget: 1000.0,
            bandwidth_budget: 1.0,
            energy_tolerance: 0.0,
            bandwidth_tolerance: 0.0,
            payload_size: 1.0,
            target_accuracy: 0.95,
            out_dir: PathBuf::from("out"),
        }
    }
}

struct KeyContext {
    line: usize,
    key: String,
}

impl KeyContext {
    fn invalid(&self, reason: impl fmt::Display) -> ConfigError {
        ConfigError::InvalidValue {
            line: self.line,
            key: self.key.clone(),
            reason: reason.to_string(),
        }
    }
}

fn parse_num<T: std::str::FromStr>(ctx: &KeyContext, raw: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    raw.parse::<T>().map_err(|e| ctx.invalid(e))
}

fn parse_positive_f64(ctx: &KeyContext, raw: &str) -> Result<f64, ConfigError> {
    let v: f64 = parse_num(ctx, raw)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(ctx.invalid("must be > 0"))
    }
}

fn parse_nonneg_f64(ctx: &KeyContext, raw: &str) -> Result<f64, ConfigError> {
    let v: f64 = parse_num(ctx, raw)?;
    if v >= 0.0 {
        Ok(v)
    } else {
        Err(ctx.invalid("must be >= 0"))
    }
}

fn parse_positive_usize(ctx: &KeyContext, raw: &str) -> Result<usize, ConfigError> {
    let v: usize = parse_num(ctx, raw)?;
    if v >= 1 {
        Ok(v)
    } else {
        Err(ctx.invalid("must be >= 1"))
    }
}

fn parse_usize_list(ctx: &KeyContext, raw: &str) -> Result<Vec<usize>, ConfigError> {
    raw.split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|e| ctx.invalid(format!("{e} in list entry {part:?}")))
        })
        .collect()
}

/// Loads and fully validates a configuration file. Paths inside the file
/// resolve relative to the file's directory.
pub fn parse_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::MissingFile {
        path: path.to_path_buf(),
        source,
    })?;
    let config = parse_config_text(&text)?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    Ok(RunConfig {
        out_dir: base.join(&config.out_dir),
        ..config
    })
}

pub fn parse_config_text(text: &str) -> Result<RunConfig, ConfigError> {
    let mut config = RunConfig::default();
    let mut section: Option<String> = None;

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| ConfigError::Parse {
                    line: line_no,
                    text: raw_line.to_string(),
                })?
                .trim();
            match name {
                "world" | "global_classifier" | "trajectory" | "experiment" | "constraints"
                | "control" | "output" => section = Some(name.to_string()),
                _ => {
                    return Err(ConfigError::UnknownKey {
                        line: line_no,
                        what: "section",
                        name: name.to_string(),
                    })
                }
            }
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Parse {
            line: line_no,
            text: raw_line.to_string(),
        })?;
        let key = key.trim();
        let value = value.trim();
        let ctx = KeyContext {
            line: line_no,
            key: match &section {
                Some(s) => format!("[{s}] {key}"),
                None => key.to_string(),
            },
        };
        apply_key(&mut config, section.as_deref(), key, value, &ctx)?;
    }

    validate(&config)?;
    Ok(config)
}

fn apply_key(
    config: &mut RunConfig,
    section: Option<&str>,
    key: &str,
    value: &str,
    ctx: &KeyContext,
) -> Result<(), ConfigError> {
    let unknown = || {
        Err(ConfigError::UnknownKey {
            line: ctx.line,
            what: "key",
            name: ctx.key.clone(),
        })
    };
    match section {
        None => match key {
            "master_seed" => config.master_seed = parse_num(ctx, value)?,
            _ => return unknown(),
        },
        Some("world") => match key {
            "dimension" => config.world.dimension = parse_positive_usize(ctx, value)?,
            "lines_per_class" => config.world.lines_per_class = parse_positive_usize(ctx, value)?,
            "components_per_line" => {
                config.world.components_per_line = parse_positive_usize(ctx, value)?
            }
            "line_offset" => config.world.line_offset = parse_nonneg_f64(ctx, value)?,
            "component_spacing" => {
                config.world.component_spacing = parse_positive_f64(ctx, value)?
            }
            "component_stddev" => config.world.component_stddev = parse_positive_f64(ctx, value)?,
            "dataset_size" => config.dataset_size = parse_positive_usize(ctx, value)?,
            _ => return unknown(),
        },
        Some("global_classifier") => match key {
            "c" => config.global_svm.c = parse_positive_f64(ctx, value)?,
            "gamma" => config.global_svm.gamma = parse_positive_f64(ctx, value)?,
            "tol" => config.global_svm.tol = parse_positive_f64(ctx, value)?,
            "max_iter" => config.global_svm.max_iter = parse_positive_usize(ctx, value)?,
            "cache_mb" => config.global_svm.cache_mb = parse_num(ctx, value)?,
            "holdout_size" => config.holdout_size = parse_positive_usize(ctx, value)?,
            _ => return unknown(),
        },
        Some("trajectory") => match key {
            "length" => config.trajectory_length = parse_positive_usize(ctx, value)?,
            "proposal_stddev" => config.mh.proposal_stddev = parse_positive_f64(ctx, value)?,
            "burn_in" => config.mh.burn_in = parse_num(ctx, value)?,
            _ => return unknown(),
        },
        Some("experiment") => match key {
            "gamma_grid" => config.gamma_grid = parse_usize_list(ctx, value)?,
            "coverage" => {
                let v = parse_positive_f64(ctx, value)?;
                if v > 1.0 {
                    return Err(ctx.invalid("must lie in (0, 1]"));
                }
                config.coverage = v;
            }
            "windows_per_gamma" => config.windows_per_gamma = parse_positive_usize(ctx, value)?,
            "min_local_points" => config.min_local_points = parse_num(ctx, value)?,
            "aging_delays" => config.aging_delays = parse_usize_list(ctx, value)?,
            "local_c" => config.local_svm.c = parse_positive_f64(ctx, value)?,
            "local_tol" => config.local_svm.tol = parse_positive_f64(ctx, value)?,
            "local_weight_pos" => config.local_svm.weight_pos = parse_positive_f64(ctx, value)?,
            "local_weight_neg" => config.local_svm.weight_neg = parse_positive_f64(ctx, value)?,
            "local_max_sweeps" => config.local_svm.max_sweeps = parse_positive_usize(ctx, value)?,
            "loss" => {
                config.logistic_loss = match value {
                    "squared" => false,
                    "logistic" => true,
                    _ => return Err(ctx.invalid("expected `squared` or `logistic`")),
                }
            }
            "logistic_delta" => {
                let delta = parse_positive_f64(ctx, value)?;
                if delta >= 0.5 {
                    return Err(ctx.invalid("must lie in (0, 0.5)"));
                }
                config.logistic_delta = delta;
            }
            _ => return unknown(),
        },
        Some("constraints") => match key {
            "energy_budget" => config.energy_budget = parse_positive_f64(ctx, value)?,
            "bandwidth_budget" => config.bandwidth_budget = parse_nonneg_f64(ctx, value)?,
            "energy_tolerance" => config.energy_tolerance = parse_nonneg_f64(ctx, value)?,
            "bandwidth_tolerance" => config.bandwidth_tolerance = parse_nonneg_f64(ctx, value)?,
            "payload_size" => config.payload_size = parse_positive_f64(ctx, value)?,
            _ => return unknown(),
        },
        Some("control") => match key {
            "target_accuracy" => {
                let v = parse_positive_f64(ctx, value)?;
                if v > 1.0 {
                    return Err(ctx.invalid("must lie in (0, 1]"));
                }
                config.target_accuracy = v;
            }
            "distribution" => {
                if value != "empirical" {
                    return Err(ctx.invalid("only `empirical` is supported"));
                }
            }
            _ => return unknown(),
        },
        Some("output") => match key {
            "dir" => config.out_dir = PathBuf::from(value),
            _ => return unknown(),
        },
        Some(_) => unreachable!("section names are validated on entry"),
    }
    Ok(())
}

impl RunConfig {
    pub fn loss(&self) -> LossKind {
        if self.logistic_loss {
            LossKind::Logistic {
                delta: self.logistic_delta,
            }
        } else {
            LossKind::Squared
        }
    }
}

fn validate(config: &RunConfig) -> Result<(), ConfigError> {
    let fail = |key: &str, reason: &str| {
        Err(ConfigError::InvalidValue {
            line: 0,
            key: key.to_string(),
            reason: reason.to_string(),
        })
    };
    if config.gamma_grid.is_empty() || config.gamma_grid.iter().any(|&g| g < 2) {
        return fail("[experiment] gamma_grid", "every gamma must be >= 2");
    }
    if config.gamma_grid.windows(2).any(|w| w[0] >= w[1]) {
        return fail("[experiment] gamma_grid", "must be strictly increasing");
    }
    if config.aging_delays.is_empty() || config.aging_delays[0] != 0 {
        return fail("[experiment] aging_delays", "must start with delay 0");
    }
    if config.aging_delays.windows(2).any(|w| w[0] >= w[1]) {
        return fail("[experiment] aging_delays", "must be strictly increasing");
    }
    Ok(())
}

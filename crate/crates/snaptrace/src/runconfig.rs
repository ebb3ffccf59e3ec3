//! Run configuration: which model, which search strategy, which optimizer,
//! and where artifacts go. Built either from command-line flags or from a
//! strict TOML document (unknown keys rejected):
//!
//! ```toml
//! benchmark = "eight-member"      # or: model = "path/to/model.toml"
//! strategy = "hypersphere"        # single | informed | hypersphere
//! algorithm = "de-rand-1-bin"
//! seed = 7
//! out_dir = "results"
//! svg = true                      # optional
//! runs = 100                      # single/informed batch size
//! schedule = "fixed"              # hypersphere radius schedule
//! r0 = 5.0                        # optional trace overrides
//! d_max = 225.0
//!
//! [optimizer]                     # optional optimizer overrides
//! population_size = 50
//! max_generations = 50000
//! target_objective = 1e-5
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::bench::BenchmarkId;
use crate::error::FileError;
use crate::optim::AlgorithmKind;
use crate::sphere::ScheduleMode;

/// Environment variable consulted for the default output directory.
pub const OUT_DIR_ENV: &str = "SNAPTRACE_OUT";

/// Fallback output directory when neither flag nor environment names one.
pub const DEFAULT_OUT_DIR: &str = "snaptrace-out";

/// Where the structural model comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelSource {
    Benchmark(BenchmarkId),
    File(PathBuf),
}

/// How candidate solutions are searched for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Independent optimizer runs over the full domain.
    Single,
    /// Independent runs over an informed decomposition of the domain.
    Informed,
    /// Adaptive hypersphere path tracing.
    Hypersphere,
}

impl Strategy {
    pub fn id(self) -> &'static str {
        match self {
            Strategy::Single => "single",
            Strategy::Informed => "informed",
            Strategy::Hypersphere => "hypersphere",
        }
    }
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.id())
    }
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "single" => Ok(Strategy::Single),
            "informed" => Ok(Strategy::Informed),
            "hypersphere" => Ok(Strategy::Hypersphere),
            other => Err(format!(
                "unknown strategy '{other}', expected single, informed, or hypersphere"
            )),
        }
    }
}

/// Optional optimizer overrides laid over the library defaults.
#[derive(Debug, Clone, Copy, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizerOverrides {
    pub population_size: Option<usize>,
    pub max_generations: Option<usize>,
    pub target_objective: Option<f64>,
}

/// A fully validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: ModelSource,
    pub strategy: Strategy,
    pub algorithm: AlgorithmKind,
    pub seed: u64,
    /// Batch size for the single/informed strategies.
    pub runs: usize,
    pub out_dir: PathBuf,
    pub svg: bool,
    pub schedule: ScheduleMode,
    /// Initial sphere radius override (mm); `None` = benchmark default.
    pub r0: Option<f64>,
    /// Trace extent override (mm); `None` = benchmark default.
    pub d_max: Option<f64>,
    pub optimizer: OptimizerOverrides,
}

impl RunConfig {
    /// A single-strategy configuration with library defaults everywhere.
    pub fn new(model: ModelSource, strategy: Strategy, algorithm: AlgorithmKind) -> Self {
        RunConfig {
            model,
            strategy,
            algorithm,
            seed: 0,
            runs: 1,
            out_dir: default_out_dir(),
            svg: false,
            schedule: ScheduleMode::Fixed,
            r0: None,
            d_max: None,
            optimizer: OptimizerOverrides::default(),
        }
    }

    /// Rejects values no strategy can run with.
    pub fn validate(&self) -> Result<(), FileError> {
        if self.runs == 0 {
            return Err(FileError::Field {
                field: "runs".into(),
                message: "at least one run is required".into(),
            });
        }
        for (name, value) in [("r0", self.r0), ("d_max", self.d_max)] {
            if let Some(v) = value {
                if !v.is_finite() || (name == "r0" && v <= 0.0) || v < 0.0 {
                    return Err(FileError::Field {
                        field: name.into(),
                        message: format!("must be positive and finite, got {v}"),
                    });
                }
            }
        }
        if let Some(p) = self.optimizer.population_size {
            if p == 0 {
                return Err(FileError::Field {
                    field: "optimizer.population_size".into(),
                    message: "must be at least 1".into(),
                });
            }
        }
        if let Some(g) = self.optimizer.max_generations {
            if g == 0 {
                return Err(FileError::Field {
                    field: "optimizer.max_generations".into(),
                    message: "must be at least 1".into(),
                });
            }
        }
        if let Some(t) = self.optimizer.target_objective {
            if !(t.is_finite() && t > 0.0) {
                return Err(FileError::Field {
                    field: "optimizer.target_objective".into(),
                    message: format!("must be positive and finite, got {t}"),
                });
            }
        }
        Ok(())
    }
}

/// The output directory to use when no flag was given: `$SNAPTRACE_OUT`,
/// else [`DEFAULT_OUT_DIR`].
pub fn default_out_dir() -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir),
        _ => PathBuf::from(DEFAULT_OUT_DIR),
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfigFile {
    benchmark: Option<String>,
    model: Option<PathBuf>,
    strategy: String,
    algorithm: String,
    #[serde(default)]
    seed: u64,
    #[serde(default = "one")]
    runs: usize,
    out_dir: Option<PathBuf>,
    #[serde(default)]
    svg: bool,
    schedule: Option<String>,
    r0: Option<f64>,
    d_max: Option<f64>,
    #[serde(default)]
    optimizer: OptimizerOverrides,
}

fn one() -> usize {
    1
}

/// Parses a run-configuration document; `origin` names it in diagnostics.
pub fn parse_run_config(text: &str, origin: &str) -> Result<RunConfig, FileError> {
    let file: RunConfigFile = toml::from_str(text).map_err(|e| FileError::Parse {
        path: origin.to_string(),
        message: e.to_string(),
    })?;
    let field = |field: &str, message: String| FileError::Field { field: field.into(), message };
    let model = match (file.benchmark, file.model) {
        (Some(id), None) => ModelSource::Benchmark(
            id.parse().map_err(|e: String| field("benchmark", e))?,
        ),
        (None, Some(path)) => ModelSource::File(path),
        (Some(_), Some(_)) => {
            return Err(field("model", "give either benchmark or model, not both".into()))
        }
        (None, None) => return Err(field("model", "either benchmark or model is required".into())),
    };
    let strategy: Strategy =
        file.strategy.parse().map_err(|e: String| field("strategy", e))?;
    let algorithm: AlgorithmKind =
        file.algorithm.parse().map_err(|e: String| field("algorithm", e))?;
    let schedule = match file.schedule {
        Some(s) => s.parse().map_err(|e: String| field("schedule", e))?,
        None => ScheduleMode::Fixed,
    };
    let config = RunConfig {
        model,
        strategy,
        algorithm,
        seed: file.seed,
        runs: file.runs,
        out_dir: file.out_dir.unwrap_or_else(default_out_dir),
        svg: file.svg,
        schedule,
        r0: file.r0,
        d_max: file.d_max,
        optimizer: file.optimizer,
    };
    config.validate()?;
    Ok(config)
}

/// Reads and validates a run-configuration file from disk.
pub fn load_run_config(path: &Path) -> Result<RunConfig, FileError> {
    let text = std::fs::read_to_string(path).map_err(|source| FileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_run_config(&text, &path.display().to_string())
}

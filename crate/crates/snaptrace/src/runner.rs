//! Batch execution: resolve a [`RunConfig`] into a model and a search
//! setup, run the requested strategy, and write the artifact set — a
//! results CSV (with cluster labels), a convergence-profile CSV for batch
//! strategies, and optionally an SVG overlay of the deformed shape.
//!
//! Everything is deterministic: one `(config, seed)` pair produces
//! byte-identical artifacts on every run. Floats are written in shortest
//! round-trip form, so parsing a results file recovers the exact values.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::analysis::{self, PathPoint};
use crate::bench::{self, TraceDefaults};
use crate::domain::{DecompositionPlan, SearchDomain};
use crate::error::{FileError, RunnerError};
use crate::model::{Candidate, ControlPointSpec, TrussModel};
use crate::modelfile;
use crate::optim::{derive_seed, optimize, OptimizerConfig, RunRecord};
use crate::runconfig::{ModelSource, RunConfig, Strategy};
use crate::sphere::{
    trace_path, ScheduleMode, SphereSchedule, StopReason, TraceParams, TraceResult,
    DEFAULT_ADDITIVE_INCREMENT, DEFAULT_MIN_RADIUS,
};
use crate::svg;
use rayon::prelude::*;

/// Results CSV header. The cluster column is appended by the runner after
/// density-clustering the reported candidates in the `(d, λ)` plane.
pub const RESULTS_HEADER: &str =
    "run_id,strategy,sphere_index,is_center,d_mm,lambda,objective,generations,seed,cluster";

/// Convergence-profile CSV header (batch strategies only).
pub const PROFILE_HEADER: &str = "generation,mean,std,n";

/// File names written inside the output directory.
pub const RESULTS_FILE: &str = "results.csv";
pub const PROFILE_FILE: &str = "profile.csv";
pub const SVG_FILE: &str = "shape.svg";

/// Number of equal control-point intervals the informed strategy uses when
/// the run configuration does not carry an explicit plan.
pub const INFORMED_CELLS: usize = 10;

/// One reported candidate, as serialized into the results CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub run_id: usize,
    pub strategy: Strategy,
    /// Center index the candidate belongs to; `-1` outside the hypersphere
    /// strategy.
    pub sphere_index: i64,
    pub is_center: bool,
    pub d_mm: f64,
    pub lambda: f64,
    pub objective: f64,
    pub generations: usize,
    pub seed: u64,
    /// DBSCAN label in the `(d, λ)` plane; `-1` is noise.
    pub cluster: i64,
}

/// What [`run`] wrote, plus summary counts for reporting.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifacts {
    pub results_csv: PathBuf,
    /// Written for the single/informed strategies only.
    pub profile_csv: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    /// Rows in the results CSV (header excluded).
    pub rows: usize,
    /// Runs that reached the target objective; for the hypersphere
    /// strategy, the number of accepted centers.
    pub converged: usize,
    /// Hypersphere stop reason, when that strategy ran.
    pub stop: Option<StopReason>,
}

/// A model together with the search setup the strategies run in.
struct Resolved {
    model: TrussModel,
    base: SearchDomain,
    trace: TraceDefaults,
}

fn resolve_model(config: &RunConfig) -> Result<Resolved, RunnerError> {
    match &config.model {
        ModelSource::Benchmark(id) => Ok(Resolved {
            model: bench::build_benchmark(*id),
            base: bench::default_domain(*id),
            trace: bench::default_trace(*id),
        }),
        ModelSource::File(path) => {
            let model = modelfile::load_model(path)?;
            let (base, trace) = derived_setup(&model);
            Ok(Resolved { model, base, trace })
        }
    }
}

/// Search setup for a user-supplied model, scaled from its bounding box:
/// every free DoF may move by the undeformed bounding-box diagonal in
/// either direction, λ spans [−10, 10], and the trace starts with a radius
/// of 1% of the diagonal (seed box twice that).
fn derived_setup(model: &TrussModel) -> (SearchDomain, TraceDefaults) {
    let nodes = model.nodes();
    let mut min = [f64::INFINITY; 3];
    let mut max = [f64::NEG_INFINITY; 3];
    for node in nodes {
        for axis in 0..3 {
            min[axis] = min[axis].min(node.coords[axis]);
            max[axis] = max[axis].max(node.coords[axis]);
        }
    }
    let diagonal = (0..3)
        .map(|a| (max[a] - min[a]).powi(2))
        .sum::<f64>()
        .sqrt();
    let base = SearchDomain::homogeneous(model.n_free(), [-diagonal, diagonal], [-10.0, 10.0])
        .expect("bounding-box setup is finite and ordered");
    let r0 = diagonal / 100.0;
    let trace = TraceDefaults {
        r0,
        d_max: diagonal,
        lambda_scale: 0.04,
        seed_half_displacement: 2.0 * r0,
        seed_half_lambda: 0.2,
    };
    (base, trace)
}

fn optimizer_config(config: &RunConfig) -> OptimizerConfig {
    let mut optimizer = OptimizerConfig::new(config.algorithm, config.seed);
    if let Some(p) = config.optimizer.population_size {
        optimizer.population_size = p;
    }
    if let Some(g) = config.optimizer.max_generations {
        optimizer.max_generations = g;
    }
    if let Some(t) = config.optimizer.target_objective {
        optimizer.target_objective = t;
    }
    optimizer
}

/// The control point's reachable `d` interval under the base domain.
fn control_range(model: &TrussModel, base: &SearchDomain) -> Result<[f64; 2], RunnerError> {
    match *model.control() {
        ControlPointSpec::NodeAxis { node, axis, sign } => {
            let slot = model
                .dof_index(node, axis)
                .expect("validated at model construction");
            let (lo, hi) = (base.lower()[slot], base.upper()[slot]);
            Ok(if sign >= 0.0 { [lo, hi] } else { [-hi, -lo] })
        }
        ControlPointSpec::EuclideanNorm => {
            Err(crate::error::DomainError::NormControlNotCellable.into())
        }
    }
}

fn run_single(
    model: &TrussModel,
    base: &SearchDomain,
    optimizer: &OptimizerConfig,
    runs: usize,
) -> Result<Vec<RunRecord>, RunnerError> {
    let records: Result<Vec<RunRecord>, _> = (0..runs)
        .into_par_iter()
        .map(|i| {
            let mut config = optimizer.clone();
            config.seed = derive_seed(optimizer.seed, i as u64);
            optimize(model, base, &config, None)
        })
        .collect();
    Ok(records?)
}

fn run_informed(
    model: &TrussModel,
    base: &SearchDomain,
    optimizer: &OptimizerConfig,
    runs: usize,
) -> Result<Vec<RunRecord>, RunnerError> {
    let [d_lo, d_hi] = control_range(model, base)?;
    let width = (d_hi - d_lo) / INFORMED_CELLS as f64;
    let control_intervals = (0..INFORMED_CELLS)
        .map(|i| {
            let lo = d_lo + width * i as f64;
            let hi = if i + 1 == INFORMED_CELLS { d_hi } else { d_lo + width * (i + 1) as f64 };
            [lo, hi]
        })
        .collect();
    let plan = DecompositionPlan {
        control_intervals,
        variable_stages: Vec::new(),
        trials_per_cell: runs,
    };
    Ok(crate::domain::informed_decomposition(model, base, &plan, optimizer)?)
}

fn trace_params(config: &RunConfig, trace: &TraceDefaults, optimizer: OptimizerConfig) -> Result<TraceParams, RunnerError> {
    let r0 = config.r0.unwrap_or(trace.r0);
    let d_max = config.d_max.unwrap_or(trace.d_max);
    let schedule = match config.schedule {
        ScheduleMode::Fixed => SphereSchedule::fixed(r0),
        ScheduleMode::Halving => SphereSchedule::halving(r0, DEFAULT_MIN_RADIUS),
        ScheduleMode::Additive => SphereSchedule::additive(r0, DEFAULT_ADDITIVE_INCREMENT),
    }?;
    let mut params = TraceParams::new(schedule, optimizer, d_max);
    params.lambda_scale = trace.lambda_scale;
    params.seed_half_displacement = trace.seed_half_displacement;
    params.seed_half_lambda = trace.seed_half_lambda;
    Ok(params)
}

fn batch_rows(
    model: &TrussModel,
    strategy: Strategy,
    records: &[RunRecord],
) -> Result<Vec<ResultRow>, RunnerError> {
    records
        .iter()
        .enumerate()
        .map(|(i, record)| {
            let d_mm = model.control_point(&record.best)?;
            Ok(ResultRow {
                run_id: i,
                strategy,
                sphere_index: -1,
                is_center: false,
                d_mm,
                lambda: record.best.lambda,
                objective: record.best.objective.expect("optimize caches the objective"),
                generations: record.generations_used,
                seed: record.config.seed,
                cluster: -1,
            })
        })
        .collect()
}

fn trace_rows(trace: &TraceResult) -> Vec<ResultRow> {
    trace
        .all_optimal
        .iter()
        .enumerate()
        .map(|(i, sample)| ResultRow {
            run_id: i,
            strategy: Strategy::Hypersphere,
            sphere_index: sample.sphere_index as i64,
            is_center: sample.is_center,
            d_mm: sample.d,
            lambda: sample.candidate.lambda,
            objective: sample.candidate.objective.expect("samples carry objectives"),
            generations: sample.generations,
            seed: sample.seed,
            cluster: -1,
        })
        .collect()
}

fn label_clusters(rows: &mut [ResultRow]) {
    let points: Vec<PathPoint> = rows
        .iter()
        .map(|row| PathPoint {
            d: row.d_mm,
            lambda: row.lambda,
            objective: row.objective,
            run_id: row.run_id,
        })
        .collect();
    let labels = analysis::dbscan(
        &points,
        analysis::DEFAULT_DBSCAN_EPS,
        analysis::DEFAULT_DBSCAN_MIN_PTS,
    );
    for (row, label) in rows.iter_mut().zip(labels) {
        row.cluster = label;
    }
}

/// Serializes rows under [`RESULTS_HEADER`]. Floats use shortest
/// round-trip formatting, so the text parses back to identical values.
pub fn results_csv_text(rows: &[ResultRow]) -> String {
    let mut text = String::from(RESULTS_HEADER);
    text.push('\n');
    for row in rows {
        writeln!(
            text,
            "{},{},{},{},{},{},{},{},{},{}",
            row.run_id,
            row.strategy,
            row.sphere_index,
            row.is_center,
            row.d_mm,
            row.lambda,
            row.objective,
            row.generations,
            row.seed,
            row.cluster
        )
        .expect("writing to a String cannot fail");
    }
    text
}

/// Parses text produced by [`results_csv_text`].
///
/// # Errors
///
/// Rejects a missing or mismatched header and any row whose field count or
/// field syntax differs from the schema; diagnostics carry the 1-based
/// line number.
pub fn parse_results_csv(text: &str) -> Result<Vec<ResultRow>, FileError> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    if header != RESULTS_HEADER {
        return Err(FileError::Parse {
            path: "results csv".into(),
            message: format!("unexpected header {header:?}"),
        });
    }
    let mut rows = Vec::new();
    for (index, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let bad = |what: &str| FileError::Parse {
            path: "results csv".into(),
            message: format!("line {}: {what}", index + 2),
        };
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 10 {
            return Err(bad(&format!("expected 10 fields, got {}", fields.len())));
        }
        fn field<T: std::str::FromStr>(
            raw: &str,
            name: &str,
            bad: &impl Fn(&str) -> FileError,
        ) -> Result<T, FileError> {
            raw.parse()
                .map_err(|_| bad(&format!("bad {name} value {raw:?}")))
        }
        rows.push(ResultRow {
            run_id: field(fields[0], "run_id", &bad)?,
            strategy: fields[1]
                .parse()
                .map_err(|e: String| bad(&e))?,
            sphere_index: field(fields[2], "sphere_index", &bad)?,
            is_center: field(fields[3], "is_center", &bad)?,
            d_mm: field(fields[4], "d_mm", &bad)?,
            lambda: field(fields[5], "lambda", &bad)?,
            objective: field(fields[6], "objective", &bad)?,
            generations: field(fields[7], "generations", &bad)?,
            seed: field(fields[8], "seed", &bad)?,
            cluster: field(fields[9], "cluster", &bad)?,
        });
    }
    Ok(rows)
}

fn profile_csv_text(records: &[RunRecord]) -> String {
    let mut text = String::from(PROFILE_HEADER);
    text.push('\n');
    for point in analysis::convergence_profile(records) {
        writeln!(
            text,
            "{},{},{},{}",
            point.generation, point.mean, point.std, point.n
        )
        .expect("writing to a String cannot fail");
    }
    text
}

fn write_text(path: &Path, text: &str) -> Result<(), RunnerError> {
    std::fs::write(path, text).map_err(|source| RunnerError::Write {
        path: path.display().to_string(),
        source,
    })
}

/// Executes `config` and writes its artifacts into `config.out_dir`.
///
/// # Errors
///
/// Configuration validation, model loading, domain setup, optimizer
/// failures, a failed seed sphere, and I/O all abort the run; nothing is
/// partially written except the output directory itself.
pub fn run(config: &RunConfig) -> Result<Artifacts, RunnerError> {
    config.validate()?;
    let resolved = resolve_model(config)?;
    let optimizer = optimizer_config(config);
    optimizer.validate().map_err(crate::error::OptimError::from)?;

    let mut stop = None;
    let mut records: Vec<RunRecord> = Vec::new();
    let shape: Candidate;
    let mut rows = match config.strategy {
        Strategy::Single | Strategy::Informed => {
            records = if config.strategy == Strategy::Single {
                run_single(&resolved.model, &resolved.base, &optimizer, config.runs)?
            } else {
                run_informed(&resolved.model, &resolved.base, &optimizer, config.runs)?
            };
            shape = records
                .iter()
                .min_by(|a, b| {
                    let fa = a.best.objective.unwrap_or(f64::INFINITY);
                    let fb = b.best.objective.unwrap_or(f64::INFINITY);
                    fa.partial_cmp(&fb).expect("objectives are not NaN")
                })
                .expect("validate() guarantees at least one run")
                .best
                .clone();
            batch_rows(&resolved.model, config.strategy, &records)?
        }
        Strategy::Hypersphere => {
            let params = trace_params(config, &resolved.trace, optimizer.clone())?;
            let trace = trace_path(&resolved.model, &resolved.base, &params)?;
            stop = Some(trace.stop);
            shape = trace
                .centers
                .last()
                .expect("a trace result carries at least the seed center")
                .clone();
            trace_rows(&trace)
        }
    };
    label_clusters(&mut rows);

    let converged = match config.strategy {
        Strategy::Hypersphere => rows.iter().filter(|r| r.is_center).count(),
        _ => records.iter().filter(|r| r.converged).count(),
    };

    std::fs::create_dir_all(&config.out_dir).map_err(|source| RunnerError::Write {
        path: config.out_dir.display().to_string(),
        source,
    })?;
    let results_csv = config.out_dir.join(RESULTS_FILE);
    write_text(&results_csv, &results_csv_text(&rows))?;

    let profile_csv = match config.strategy {
        Strategy::Hypersphere => None,
        _ => {
            let path = config.out_dir.join(PROFILE_FILE);
            write_text(&path, &profile_csv_text(&records))?;
            Some(path)
        }
    };

    let svg = if config.svg {
        let path = config.out_dir.join(SVG_FILE);
        svg::emit_svg(&resolved.model, &shape, &path)?;
        Some(path)
    } else {
        None
    };

    Ok(Artifacts {
        results_csv,
        profile_csv,
        svg,
        rows: rows.len(),
        converged,
        stop,
    })
}

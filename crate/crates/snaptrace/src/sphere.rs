//! Adaptive hypersphere search-space decomposition.
//!
//! The tracer walks the equilibrium path of a truss by chaining small
//! optimizer domains. Each accepted center `c_k` (an equilibrium state,
//! objective ≤ `tol_opt`) spawns a hypersphere `H_k`: a box of half-width
//! `r` per displacement variable and `r · lambda_scale` in λ, intersected
//! with the base domain. A batch of independent optimizer runs inside `H_k`
//! produces trial equilibria; the selection rules below pick the next
//! center from them.
//!
//! Selection happens in the `(d, λ)` plane, where `d` is the control-point
//! displacement:
//!
//! * the first search picks the optimal trial **farthest** from the start
//!   center (there is no direction yet);
//! * every later search keeps only trials strictly forward of the previous
//!   step — `b·a < 0` with `a = c_{k−2} − c_{k−1}` and `b = c − c_{k−1}` —
//!   and picks the one with the largest `‖b‖`, so the path never
//!   immediately back-tracks.
//!
//! A search that fails (no optimal trial, or none forward) is retried once
//! with doubled trials; if it still fails, the radius adapts per the
//! [`SphereSchedule`] and the sphere is attempted again. A fixed schedule
//! has no adaptation to offer and the trace stops at once — the stall at a
//! sharp snap-back is exactly the phenomenon the adaptive schedules exist
//! to overcome. Each attempt is recorded as an [`EpisodeRecord`], so the
//! per-sphere optimizer effort (the generations spent) is preserved even
//! across retries and radius changes.

use crate::domain::SearchDomain;
use crate::error::{OptimError, SphereError};
use crate::model::{Candidate, TrussModel};
use crate::optim::{derive_seed, optimize, OptimizerConfig};
use rayon::prelude::*;

/// Each sphere runs a small batch of independent trial solutions.
pub const DEFAULT_TRIALS_PER_SPHERE: usize = 5;
pub const DEFAULT_MAX_SPHERES: usize = 1000;
/// λ half-width per mm of radius; the seed-box ratio 0.2 / 5 mm.
pub const DEFAULT_LAMBDA_SCALE: f64 = 0.04;
/// Seed box: ±10 mm for displacements, ±0.2 for λ.
pub const DEFAULT_SEED_HALF_DISPLACEMENT: f64 = 10.0;
pub const DEFAULT_SEED_HALF_LAMBDA: f64 = 0.2;
pub const DEFAULT_MIN_RADIUS: f64 = 0.5;
pub const DEFAULT_ADDITIVE_INCREMENT: f64 = 5.0;
/// An additive schedule grows without bound; give up after this many
/// consecutive failed episodes on one sphere.
const MAX_ADDITIVE_FAILURES: usize = 6;

/// How the sphere radius reacts when a sphere fails to produce a center.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
// serialized by its display name ("fixed" / "halving" / "additive")
pub enum ScheduleMode {
    /// Never adapt; the trace stops at the first failed sphere.
    Fixed,
    /// Halve the radius and retry, down to `min_radius`.
    Halving,
    /// Grow the radius by `additive_increment` and retry.
    Additive,
}

impl std::fmt::Display for ScheduleMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ScheduleMode::Fixed => "fixed",
            ScheduleMode::Halving => "halving",
            ScheduleMode::Additive => "additive",
        })
    }
}

impl std::str::FromStr for ScheduleMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fixed" => Ok(ScheduleMode::Fixed),
            "halving" => Ok(ScheduleMode::Halving),
            "additive" => Ok(ScheduleMode::Additive),
            other => Err(format!(
                "unknown schedule '{other}', expected fixed, halving, or additive"
            )),
        }
    }
}

impl serde::Serialize for ScheduleMode {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for ScheduleMode {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Radius schedule: nominal radius plus the adaptation rule.
///
/// After every *successful* sphere the radius returns to `r0`; adaptation
/// only persists across consecutive failures of one sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereSchedule {
    pub mode: ScheduleMode,
    pub r0: f64,
    /// Growth step for [`ScheduleMode::Additive`].
    pub additive_increment: f64,
    /// Floor below which a halving schedule gives up.
    pub min_radius: f64,
}

impl SphereSchedule {
    pub fn fixed(r0: f64) -> Result<Self, SphereError> {
        SphereSchedule {
            mode: ScheduleMode::Fixed,
            r0,
            additive_increment: DEFAULT_ADDITIVE_INCREMENT,
            min_radius: DEFAULT_MIN_RADIUS,
        }
        .validated()
    }

    pub fn halving(r0: f64, min_radius: f64) -> Result<Self, SphereError> {
        SphereSchedule {
            mode: ScheduleMode::Halving,
            r0,
            additive_increment: DEFAULT_ADDITIVE_INCREMENT,
            min_radius,
        }
        .validated()
    }

    pub fn additive(r0: f64, increment: f64) -> Result<Self, SphereError> {
        SphereSchedule {
            mode: ScheduleMode::Additive,
            r0,
            additive_increment: increment,
            min_radius: DEFAULT_MIN_RADIUS,
        }
        .validated()
    }

    pub fn validated(self) -> Result<Self, SphereError> {
        for (name, value) in [
            ("r0", self.r0),
            ("additive_increment", self.additive_increment),
            ("min_radius", self.min_radius),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(SphereError::BadParameter { name, value });
            }
        }
        Ok(self)
    }
}

/// One radius-adaptation step.
///
/// Returns `None` — the radius-exhausted signal — when a halving schedule
/// falls below its `min_radius`; the caller terminates the trace with
/// [`StopReason::BucklingPointStall`]. Fixed schedules return the radius
/// unchanged; deciding that an unchanged radius cannot help is the trace
/// loop's job, not this function's.
pub fn adapt_radius(r_prev: f64, schedule: &SphereSchedule) -> Option<f64> {
    let adapted = match schedule.mode {
        ScheduleMode::Fixed => r_prev,
        ScheduleMode::Halving => r_prev * 0.5,
        ScheduleMode::Additive => r_prev + schedule.additive_increment,
    };
    if adapted < schedule.min_radius {
        None
    } else {
        Some(adapted)
    }
}

/// A center candidate plus the box it spawns.
#[derive(Debug, Clone, PartialEq)]
pub struct Hypersphere {
    /// An equilibrium state: objective ≤ the `tol_opt` it was built with.
    pub center: Candidate,
    /// Control-point displacement of the center (cached; the selection
    /// metric lives in the `(d, λ)` plane).
    pub d: f64,
    pub radius: f64,
    /// Index of the center along the traced path.
    pub index: usize,
}

impl Hypersphere {
    /// # Errors
    ///
    /// Rejects non-positive or non-finite radii, and centers whose cached
    /// objective is absent or above `tol_opt` — a sphere centered on a
    /// non-equilibrium point would chain the path off the solution set.
    pub fn new(
        center: Candidate,
        d: f64,
        radius: f64,
        index: usize,
        tol_opt: f64,
    ) -> Result<Self, SphereError> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(SphereError::NonPositiveRadius { value: radius });
        }
        let objective = center.objective.unwrap_or(f64::INFINITY);
        if !(objective <= tol_opt) {
            return Err(SphereError::BadStartCandidate { objective, tol: tol_opt });
        }
        Ok(Hypersphere { center, d, radius, index })
    }
}

/// The optimizer domain a sphere defines: every displacement variable
/// bounded to `center ± r`, λ bounded to `center_λ ± r·lambda_scale`, all
/// intersected with the base domain.
///
/// # Errors
///
/// Empty intersection (center outside the base domain) or a non-positive
/// `lambda_scale`.
pub fn sphere_domain(
    sphere: &Hypersphere,
    base: &SearchDomain,
    lambda_scale: f64,
) -> Result<SearchDomain, SphereError> {
    if !(lambda_scale > 0.0 && lambda_scale.is_finite()) {
        return Err(SphereError::BadParameter { name: "lambda_scale", value: lambda_scale });
    }
    let point = sphere.center.to_point();
    let mut half = vec![sphere.radius; point.len()];
    *half.last_mut().expect("point has a λ entry") = sphere.radius * lambda_scale;
    boxed_around(&point, &half, base).ok_or(SphereError::OutsideBaseDomain {
        d: sphere.d,
        lambda: sphere.center.lambda,
    })
}

/// `[pointᵢ − halfᵢ, pointᵢ + halfᵢ]` per axis, intersected with `base`.
fn boxed_around(point: &[f64], half: &[f64], base: &SearchDomain) -> Option<SearchDomain> {
    let lower = point.iter().zip(half).map(|(p, h)| p - h).collect();
    let upper = point.iter().zip(half).map(|(p, h)| p + h).collect();
    let domain = SearchDomain::new(lower, upper)
        .expect("a finite point with positive half-widths yields ordered bounds");
    domain.intersect(base)
}

/// One optimizer run's outcome inside a sphere, reduced to what selection
/// and reporting need.
#[derive(Debug, Clone, PartialEq)]
pub struct Trial {
    /// Best candidate of the run, objective cached.
    pub candidate: Candidate,
    /// Control-point displacement of `candidate`.
    pub d: f64,
    /// Generations the run consumed.
    pub generations: usize,
    /// The run's derived seed.
    pub seed: u64,
}

impl Trial {
    pub fn objective(&self) -> f64 {
        self.candidate.objective.unwrap_or(f64::INFINITY)
    }

    fn dl(&self) -> [f64; 2] {
        [self.d, self.candidate.lambda]
    }
}

fn distance2(a: [f64; 2], b: [f64; 2]) -> f64 {
    let dd = a[0] - b[0];
    let dl = a[1] - b[1];
    dd * dd + dl * dl
}

/// Picks the first search's center: among optimal trials (objective ≤
/// `tol_opt`), the one farthest from `prev_center` in the `(d, λ)` plane.
/// Distance ties prefer larger `d`, then lower objective.
///
/// Returns the winning trial's index.
///
/// # Errors
///
/// [`SphereError::NoOptimalTrial`] when no trial reaches `tol_opt`.
pub fn select_center_initial(
    trials: &[Trial],
    prev_center: [f64; 2],
    tol_opt: f64,
) -> Result<usize, SphereError> {
    let mut best: Option<(usize, f64)> = None;
    for (i, trial) in trials.iter().enumerate() {
        if !(trial.objective() <= tol_opt) {
            continue;
        }
        let d2 = distance2(trial.dl(), prev_center);
        let wins = match best {
            None => true,
            Some((j, best_d2)) => {
                let held = &trials[j];
                d2 > best_d2
                    || (d2 == best_d2
                        && (trial.d > held.d
                            || (trial.d == held.d && trial.objective() < held.objective())))
            }
        };
        if wins {
            best = Some((i, d2));
        }
    }
    best.map(|(i, _)| i).ok_or(SphereError::NoOptimalTrial)
}

/// Picks a later search's center: among optimal trials strictly forward of
/// the previous step (`b·a < 0` in the `(d, λ)` plane, with
/// `a = c_prev2 − c_prev` and `b = trial − c_prev`), the one with the
/// largest `‖b‖`. Norm ties keep the earliest trial.
///
/// Returns the winning trial's index.
///
/// # Errors
///
/// [`SphereError::NoOptimalTrial`] when no trial reaches `tol_opt`;
/// [`SphereError::NoForwardTrial`] when optimal trials exist but all point
/// backward (a trial exactly at `c_prev` has `b·a = 0` and counts as
/// backward — the inequality is strict).
pub fn select_center_directional(
    trials: &[Trial],
    c_prev: [f64; 2],
    c_prev2: [f64; 2],
    tol_opt: f64,
) -> Result<usize, SphereError> {
    let a = [c_prev2[0] - c_prev[0], c_prev2[1] - c_prev[1]];
    let mut any_optimal = false;
    let mut best: Option<(usize, f64)> = None;
    for (i, trial) in trials.iter().enumerate() {
        if !(trial.objective() <= tol_opt) {
            continue;
        }
        any_optimal = true;
        let b = [trial.d - c_prev[0], trial.candidate.lambda - c_prev[1]];
        if b[0] * a[0] + b[1] * a[1] >= 0.0 {
            continue;
        }
        let norm2 = b[0] * b[0] + b[1] * b[1];
        if best.is_none_or(|(_, best_norm2)| norm2 > best_norm2) {
            best = Some((i, norm2));
        }
    }
    match best {
        Some((i, _)) => Ok(i),
        None if any_optimal => Err(SphereError::NoForwardTrial),
        None => Err(SphereError::NoOptimalTrial),
    }
}

/// Everything [`trace_path`] needs beyond the model and base domain.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceParams {
    pub schedule: SphereSchedule,
    /// Per-trial optimizer setup; its `target_objective` is the trace's
    /// `tol_opt` and its `seed` is the master seed all trial seeds derive
    /// from.
    pub optimizer: OptimizerConfig,
    pub trials_per_sphere: usize,
    /// Control-point displacement at which the trace stops.
    pub d_max: f64,
    /// Cap on the number of centers (the seed center counts).
    pub max_spheres: usize,
    /// λ half-width of a sphere's box per mm of radius.
    pub lambda_scale: f64,
    /// Seed box half-width for every displacement variable.
    pub seed_half_displacement: f64,
    /// Seed box half-width for λ.
    pub seed_half_lambda: f64,
}

impl TraceParams {
    pub fn new(schedule: SphereSchedule, optimizer: OptimizerConfig, d_max: f64) -> Self {
        TraceParams {
            schedule,
            optimizer,
            trials_per_sphere: DEFAULT_TRIALS_PER_SPHERE,
            d_max,
            max_spheres: DEFAULT_MAX_SPHERES,
            lambda_scale: DEFAULT_LAMBDA_SCALE,
            seed_half_displacement: DEFAULT_SEED_HALF_DISPLACEMENT,
            seed_half_lambda: DEFAULT_SEED_HALF_LAMBDA,
        }
    }

    /// # Errors
    ///
    /// Rejects zero trial or sphere budgets, a negative or non-finite
    /// `d_max`, non-positive widths or scales, and any optimizer
    /// configuration error.
    pub fn validate(&self) -> Result<(), SphereError> {
        self.schedule.validated()?;
        self.optimizer.validate()?;
        if self.trials_per_sphere == 0 {
            return Err(SphereError::BadParameter { name: "trials_per_sphere", value: 0.0 });
        }
        if self.max_spheres == 0 {
            return Err(SphereError::BadParameter { name: "max_spheres", value: 0.0 });
        }
        if !(self.d_max >= 0.0 && self.d_max.is_finite()) {
            return Err(SphereError::BadParameter { name: "d_max", value: self.d_max });
        }
        for (name, value) in [
            ("lambda_scale", self.lambda_scale),
            ("seed_half_displacement", self.seed_half_displacement),
            ("seed_half_lambda", self.seed_half_lambda),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(SphereError::BadParameter { name, value });
            }
        }
        Ok(())
    }
}

/// Why a trace ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// The latest center's control point reached `d_max`.
    ReachedDMax,
    /// The center budget is exhausted.
    MaxSpheres,
    /// The schedule ran out of radii: a fixed schedule failed a sphere, or
    /// a halving schedule fell below `min_radius` — the classic signature
    /// of a sharp snap-back the radius cannot negotiate.
    BucklingPointStall,
    /// An additive schedule kept failing even with a grown radius.
    Stalled,
}

impl std::fmt::Display for StopReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            StopReason::ReachedDMax => "reached d_max",
            StopReason::MaxSpheres => "max spheres",
            StopReason::BucklingPointStall => "buckling-point stall",
            StopReason::Stalled => "stalled",
        })
    }
}

/// How one episode (one sphere attempt at one radius) ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpisodeOutcome {
    /// A center was selected.
    Advanced,
    /// No trial reached `tol_opt`, even after the doubled retry.
    NoOptimalTrial,
    /// Optimal trials existed but all pointed backward.
    NoForwardTrial,
}

/// Effort bookkeeping for one sphere attempt. Retries with doubled trials
/// stay within the same episode; a radius adaptation opens a new one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpisodeRecord {
    /// Index the sought center would carry (seed search: 1).
    pub sphere_index: usize,
    /// Radius used (for the seed search: the seed half-width).
    pub radius: f64,
    /// Optimizer runs spent, both attempts combined.
    pub trials: usize,
    /// Generations consumed by those runs.
    pub generations: usize,
    pub outcome: EpisodeOutcome,
}

/// One optimal candidate kept for reporting: every equilibrium any trial
/// found, with the selected centers flagged.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceSample {
    pub candidate: Candidate,
    pub d: f64,
    /// The center index this sample's search was producing; on a center
    /// sample, the index of the center itself.
    pub sphere_index: usize,
    pub generations: usize,
    pub seed: u64,
    pub is_center: bool,
}

/// A traced equilibrium path.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceResult {
    /// Accepted centers in discovery order; `centers[0]` is the undeformed
    /// start state. Every center's objective is ≤ `tol_opt`.
    pub centers: Vec<Candidate>,
    /// Every optimal candidate found, centers included (`is_center`).
    pub all_optimal: Vec<TraceSample>,
    /// One record per sphere attempt; the effort ledger.
    pub episodes: Vec<EpisodeRecord>,
    pub stop: StopReason,
}

impl TraceResult {
    /// `(d, λ)` of each center, in path order.
    pub fn center_path(&self) -> Vec<[f64; 2]> {
        self.all_optimal
            .iter()
            .filter(|s| s.is_center)
            .map(|s| [s.d, s.candidate.lambda])
            .collect()
    }

    /// Total optimizer generations across all episodes.
    pub fn total_generations(&self) -> usize {
        self.episodes.iter().map(|e| e.generations).sum()
    }
}

/// Runs `count` independent optimizer trials in `domain`, seeds derived
/// from the master seed by a stream counter that spans the whole trace.
fn run_batch(
    model: &TrussModel,
    domain: &SearchDomain,
    params: &TraceParams,
    count: usize,
    stream: &mut u64,
) -> Result<Vec<Trial>, SphereError> {
    let seeds: Vec<u64> = (0..count)
        .map(|_| {
            let seed = derive_seed(params.optimizer.seed, *stream);
            *stream += 1;
            seed
        })
        .collect();
    let runs = seeds
        .par_iter()
        .map(|&seed| {
            let config = OptimizerConfig { seed, ..params.optimizer.clone() };
            optimize(model, domain, &config, None)
        })
        .collect::<Result<Vec<_>, OptimError>>()?;
    runs.into_iter()
        .zip(seeds)
        .map(|(run, seed)| {
            let d = model.control_point(&run.best)?;
            Ok(Trial { candidate: run.best, d, generations: run.generations_used, seed })
        })
        .collect()
}

/// Traces the equilibrium path from the undeformed state.
///
/// The start state must itself be an equilibrium (objective ≤ `tol_opt`);
/// sphere 1 searches the seed box around it, later spheres follow the
/// schedule. The trace runs until the latest center's control point
/// reaches `params.d_max`, the center count reaches `params.max_spheres`,
/// or the schedule runs out of options (recorded as the stop reason; see
/// [`StopReason`]).
///
/// Deterministic for fixed parameters: trial seeds derive from the master
/// seed, and parallel trial batches are order-stable.
///
/// # Errors
///
/// Invalid parameters, a start state that is not an equilibrium
/// ([`SphereError::BadStartCandidate`]), a base domain that does not fit
/// the model, and a failed seed sphere
/// ([`SphereError::SeedSphereFailure`]) — without a first center there is
/// no path to adapt.
pub fn trace_path(
    model: &TrussModel,
    base: &SearchDomain,
    params: &TraceParams,
) -> Result<TraceResult, SphereError> {
    params.validate()?;
    base.check_model(model).map_err(OptimError::from)?;
    let tol = params.optimizer.target_objective;

    let mut origin = Candidate::undeformed(model.n_free());
    let origin_objective = model.objective(&origin)?;
    if !(origin_objective <= tol) {
        return Err(SphereError::BadStartCandidate { objective: origin_objective, tol });
    }
    origin.objective = Some(origin_objective);
    let origin_d = model.control_point(&origin)?;

    let mut centers = vec![origin.clone()];
    let mut center_dl = vec![[origin_d, origin.lambda]];
    let mut all_optimal = vec![TraceSample {
        candidate: origin,
        d: origin_d,
        sphere_index: 0,
        generations: 0,
        seed: params.optimizer.seed,
        is_center: true,
    }];
    let mut episodes: Vec<EpisodeRecord> = Vec::new();

    let finish = |centers: Vec<Candidate>,
                  all_optimal: Vec<TraceSample>,
                  episodes: Vec<EpisodeRecord>,
                  stop: StopReason| {
        Ok(TraceResult { centers, all_optimal, episodes, stop })
    };

    if origin_d >= params.d_max {
        return finish(centers, all_optimal, episodes, StopReason::ReachedDMax);
    }
    if centers.len() >= params.max_spheres {
        return finish(centers, all_optimal, episodes, StopReason::MaxSpheres);
    }

    let mut radius = params.schedule.r0;
    let mut stream: u64 = 0;
    let mut failures_on_sphere = 0usize;

    loop {
        let sphere_index = centers.len();
        let parent = centers.last().expect("at least the origin center").clone();
        let parent_dl = *center_dl.last().expect("parallel to centers");
        let seed_search = sphere_index == 1;

        let (domain, episode_radius) = if seed_search {
            let mut half = vec![params.seed_half_displacement; model.n_free() + 1];
            *half.last_mut().expect("λ entry") = params.seed_half_lambda;
            let domain =
                boxed_around(&parent.to_point(), &half, base).ok_or_else(|| {
                    SphereError::OutsideBaseDomain { d: parent_dl[0], lambda: parent_dl[1] }
                })?;
            (domain, params.seed_half_displacement)
        } else {
            let sphere =
                Hypersphere::new(parent.clone(), parent_dl[0], radius, sphere_index - 1, tol)?;
            (sphere_domain(&sphere, base, params.lambda_scale)?, radius)
        };

        let select = |trials: &[Trial]| -> Result<usize, SphereError> {
            if seed_search {
                select_center_initial(trials, parent_dl, tol)
            } else {
                select_center_directional(
                    trials,
                    parent_dl,
                    center_dl[sphere_index - 2],
                    tol,
                )
            }
        };

        // Attempt 1; on selection failure, one retry with doubled trials.
        let mut trials = run_batch(model, &domain, params, params.trials_per_sphere, &mut stream)?;
        let mut chosen = select(&trials);
        if matches!(
            chosen,
            Err(SphereError::NoOptimalTrial) | Err(SphereError::NoForwardTrial)
        ) {
            let retry =
                run_batch(model, &domain, params, 2 * params.trials_per_sphere, &mut stream)?;
            trials.extend(retry);
            chosen = select(&trials);
        }

        let episode = EpisodeRecord {
            sphere_index,
            radius: episode_radius,
            trials: trials.len(),
            generations: trials.iter().map(|t| t.generations).sum(),
            outcome: EpisodeOutcome::Advanced, // patched below on failure
        };

        match chosen {
            Ok(winner) => {
                episodes.push(episode);
                failures_on_sphere = 0;
                radius = params.schedule.r0;
                let mut winner_dl = [0.0; 2];
                for (i, trial) in trials.into_iter().enumerate() {
                    if i == winner {
                        winner_dl = trial.dl();
                        centers.push(trial.candidate.clone());
                        center_dl.push(winner_dl);
                        all_optimal.push(TraceSample {
                            candidate: trial.candidate,
                            d: winner_dl[0],
                            sphere_index,
                            generations: trial.generations,
                            seed: trial.seed,
                            is_center: true,
                        });
                    } else if trial.objective() <= tol {
                        all_optimal.push(TraceSample {
                            d: trial.d,
                            sphere_index,
                            generations: trial.generations,
                            seed: trial.seed,
                            is_center: false,
                            candidate: trial.candidate,
                        });
                    }
                }
                if winner_dl[0] >= params.d_max {
                    return finish(centers, all_optimal, episodes, StopReason::ReachedDMax);
                }
                if centers.len() >= params.max_spheres {
                    return finish(centers, all_optimal, episodes, StopReason::MaxSpheres);
                }
            }
            Err(failure @ (SphereError::NoOptimalTrial | SphereError::NoForwardTrial)) => {
                let outcome = match failure {
                    SphereError::NoOptimalTrial => EpisodeOutcome::NoOptimalTrial,
                    _ => EpisodeOutcome::NoForwardTrial,
                };
                episodes.push(EpisodeRecord { outcome, ..episode });
                let best_objective = trials
                    .iter()
                    .map(Trial::objective)
                    .fold(f64::INFINITY, f64::min);
                // keep the optimal-but-rejected equilibria for reporting
                for trial in trials {
                    if trial.objective() <= tol {
                        all_optimal.push(TraceSample {
                            d: trial.d,
                            sphere_index,
                            generations: trial.generations,
                            seed: trial.seed,
                            is_center: false,
                            candidate: trial.candidate,
                        });
                    }
                }
                if seed_search {
                    let attempts = episodes.last().expect("just pushed").trials;
                    return Err(SphereError::SeedSphereFailure { attempts, best_objective });
                }
                match params.schedule.mode {
                    ScheduleMode::Fixed => {
                        return finish(
                            centers,
                            all_optimal,
                            episodes,
                            StopReason::BucklingPointStall,
                        );
                    }
                    ScheduleMode::Halving => match adapt_radius(radius, &params.schedule) {
                        Some(next) => radius = next,
                        None => {
                            return finish(
                                centers,
                                all_optimal,
                                episodes,
                                StopReason::BucklingPointStall,
                            );
                        }
                    },
                    ScheduleMode::Additive => {
                        failures_on_sphere += 1;
                        if failures_on_sphere >= MAX_ADDITIVE_FAILURES {
                            return finish(centers, all_optimal, episodes, StopReason::Stalled);
                        }
                        radius = adapt_radius(radius, &params.schedule)
                            .expect("additive adaptation only grows the radius");
                    }
                }
            }
            Err(other) => return Err(other),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::{analytic_lambda, build_benchmark, default_domain, BenchmarkId};
    use crate::optim::AlgorithmKind;

    fn trial(d: f64, lambda: f64, objective: f64) -> Trial {
        let mut candidate = Candidate::new(vec![], lambda);
        candidate.objective = Some(objective);
        Trial { candidate, d, generations: 1, seed: 0 }
    }

    // ---------------------------------------------------------- schedules

    #[test]
    fn adapt_radius_follows_the_schedule() {
        let fixed = SphereSchedule::fixed(5.0).unwrap();
        let halving = SphereSchedule::halving(5.0, 0.5).unwrap();
        let additive = SphereSchedule::additive(5.0, 5.0).unwrap();
        assert_eq!(adapt_radius(5.0, &fixed), Some(5.0));
        assert_eq!(adapt_radius(5.0, &halving), Some(2.5));
        assert_eq!(adapt_radius(5.0, &additive), Some(10.0));
    }

    #[test]
    fn halving_below_the_floor_signals_exhaustion() {
        let halving = SphereSchedule::halving(5.0, 0.5).unwrap();
        assert_eq!(adapt_radius(1.0, &halving), Some(0.5));
        assert_eq!(adapt_radius(0.9, &halving), None);
    }

    #[test]
    fn schedules_reject_non_positive_parameters() {
        assert!(matches!(
            SphereSchedule::fixed(0.0),
            Err(SphereError::BadParameter { name: "r0", .. })
        ));
        assert!(matches!(
            SphereSchedule::halving(5.0, -1.0),
            Err(SphereError::BadParameter { name: "min_radius", .. })
        ));
        assert!(matches!(
            SphereSchedule::additive(5.0, 0.0),
            Err(SphereError::BadParameter { name: "additive_increment", .. })
        ));
    }

    // ---------------------------------------------------------- selection

    #[test]
    fn initial_selection_takes_the_farthest_optimal_trial() {
        let trials = vec![trial(1.0, 0.0, 0.0), trial(3.2, 0.0, 0.0)];
        assert_eq!(select_center_initial(&trials, [0.0, 0.0], 1e-5).unwrap(), 1);

        // a single optimal trial wins regardless of distance
        let single = vec![trial(0.5, 0.1, 0.0)];
        assert_eq!(select_center_initial(&single, [0.0, 0.0], 1e-5).unwrap(), 0);
    }

    #[test]
    fn initial_selection_breaks_distance_ties_by_larger_d_then_objective() {
        // equidistant from the origin: (4, 3) and (6, ...) — build an exact
        // tie with (4, 3) vs (6, √(25−36))… use (4,3) and (6,0) dist 5 vs 6;
        // instead pin both at distance 5: (4, 3) and (6, …) doesn't work, so
        // mirror: (4, 3) vs (6, -? ) — use (3, 4) and (4, 3): both distance 5.
        let tied = vec![trial(3.0, 4.0, 0.0), trial(4.0, 3.0, 0.0)];
        assert_eq!(select_center_initial(&tied, [0.0, 0.0], 1e-5).unwrap(), 1);

        // same distance, same d → lower objective wins
        let same_point = vec![trial(4.0, 3.0, 9e-6), trial(4.0, 3.0, 1e-6)];
        assert_eq!(select_center_initial(&same_point, [0.0, 0.0], 1e-5).unwrap(), 1);
    }

    #[test]
    fn initial_selection_ignores_non_optimal_trials() {
        let trials = vec![trial(9.0, 0.0, 0.5), trial(1.0, 0.0, 1e-6)];
        assert_eq!(select_center_initial(&trials, [0.0, 0.0], 1e-5).unwrap(), 1);
        let none = vec![trial(9.0, 0.0, 0.5)];
        assert!(matches!(
            select_center_initial(&none, [0.0, 0.0], 1e-5),
            Err(SphereError::NoOptimalTrial)
        ));
    }

    #[test]
    fn directional_selection_keeps_forward_trials_only() {
        // a = c_prev2 − c_prev = (−5, 0); (9,1): b=(4,1), b·a=−20 < 0 keep;
        // (2,3): b=(−3,3), b·a=15 > 0 drop
        let trials = vec![trial(9.0, 1.0, 0.0), trial(2.0, 3.0, 0.0)];
        let i = select_center_directional(&trials, [5.0, 0.0], [0.0, 0.0], 1e-5).unwrap();
        assert_eq!(i, 0);
    }

    #[test]
    fn directional_selection_maximizes_the_step_norm() {
        // ‖(4,1)‖ = √17 < ‖(3,−3)‖ = √18 → (8, −3) wins
        let trials = vec![trial(9.0, 1.0, 0.0), trial(8.0, -3.0, 0.0)];
        let i = select_center_directional(&trials, [5.0, 0.0], [0.0, 0.0], 1e-5).unwrap();
        assert_eq!(i, 1);
    }

    #[test]
    fn trial_at_the_previous_center_is_not_forward() {
        // b = 0 → b·a = 0, strict inequality fails
        let trials = vec![trial(5.0, 0.0, 0.0)];
        assert!(matches!(
            select_center_directional(&trials, [5.0, 0.0], [0.0, 0.0], 1e-5),
            Err(SphereError::NoForwardTrial)
        ));
    }

    #[test]
    fn directional_selection_distinguishes_the_two_failure_modes() {
        let backward = vec![trial(2.0, 3.0, 0.0)];
        assert!(matches!(
            select_center_directional(&backward, [5.0, 0.0], [0.0, 0.0], 1e-5),
            Err(SphereError::NoForwardTrial)
        ));
        let non_optimal = vec![trial(9.0, 1.0, 0.5)];
        assert!(matches!(
            select_center_directional(&non_optimal, [5.0, 0.0], [0.0, 0.0], 1e-5),
            Err(SphereError::NoOptimalTrial)
        ));
    }

    // ---------------------------------------------------------- sphere box

    fn equilibrium(model: &TrussModel, u: Vec<f64>, lambda: f64) -> Candidate {
        let mut c = Candidate::new(u, lambda);
        c.objective = Some(model.objective(&c).unwrap());
        c
    }

    #[test]
    fn sphere_domain_is_the_centered_box_intersected_with_base() {
        let model = build_benchmark(BenchmarkId::TwoBarOracle);
        let base = SearchDomain::new(vec![-500.0, -3.2], vec![0.0, 3.2]).unwrap();
        let center = equilibrium(&model, vec![0.0], 0.0);
        let sphere = Hypersphere::new(center, 0.0, 5.0, 0, 1e-5).unwrap();
        let domain = sphere_domain(&sphere, &base, DEFAULT_LAMBDA_SCALE).unwrap();
        // displacement: [−5, 5] truncated by base's upper bound 0
        assert_eq!(domain.lower(), &[-5.0, -0.2]);
        assert_eq!(domain.upper(), &[0.0, 0.2]);
    }

    #[test]
    fn sphere_domain_outside_base_is_an_error() {
        let model = build_benchmark(BenchmarkId::TwoBarOracle);
        let base = SearchDomain::new(vec![-500.0, -1.0], vec![0.0, 1.0]).unwrap();
        let mut center = equilibrium(&model, vec![-100.0], 0.0);
        center.lambda = 5.0; // hand-built off-path center
        center.objective = Some(0.0); // pretend optimal to pass construction
        let sphere = Hypersphere::new(center, 100.0, 1.0, 0, 1e-5).unwrap();
        assert!(matches!(
            sphere_domain(&sphere, &base, DEFAULT_LAMBDA_SCALE),
            Err(SphereError::OutsideBaseDomain { d, lambda }) if d == 100.0 && lambda == 5.0
        ));
    }

    #[test]
    fn degenerate_sphere_box_still_optimizes_to_the_center() {
        // base pinned to a known equilibrium point: the optimizer can only
        // return the center, and it is optimal there
        let model = build_benchmark(BenchmarkId::TwoBarOracle);
        let d = 100.0;
        let lambda = analytic_lambda(BenchmarkId::TwoBarOracle, d).unwrap();
        let base = SearchDomain::new(vec![-d, lambda], vec![-d, lambda]).unwrap();
        let center = equilibrium(&model, vec![-d], lambda);
        assert!(center.objective.unwrap() <= 1e-8);
        let sphere = Hypersphere::new(center, d, 5.0, 0, 1e-5).unwrap();
        let domain = sphere_domain(&sphere, &base, DEFAULT_LAMBDA_SCALE).unwrap();
        let config = OptimizerConfig::new(AlgorithmKind::DeRand1Bin, 7);
        let run = optimize(&model, &domain, &config, None).unwrap();
        assert_eq!(run.best.u, vec![-d]);
        assert_eq!(run.best.lambda, lambda);
        assert!(run.converged);
    }

    #[test]
    fn hypersphere_rejects_bad_radius_and_non_equilibrium_centers() {
        let center = {
            let mut c = Candidate::new(vec![0.0], 0.0);
            c.objective = Some(0.0);
            c
        };
        assert!(matches!(
            Hypersphere::new(center.clone(), 0.0, 0.0, 0, 1e-5),
            Err(SphereError::NonPositiveRadius { value }) if value == 0.0
        ));
        let mut off = center.clone();
        off.objective = Some(0.3);
        assert!(matches!(
            Hypersphere::new(off, 0.0, 5.0, 0, 1e-5),
            Err(SphereError::BadStartCandidate { objective, tol })
                if objective == 0.3 && tol == 1e-5
        ));
        let mut unevaluated = center;
        unevaluated.objective = None;
        assert!(Hypersphere::new(unevaluated, 0.0, 5.0, 0, 1e-5).is_err());
    }

    // ---------------------------------------------------------- trace_path

    fn two_bar_params(seed: u64) -> TraceParams {
        let mut optimizer = OptimizerConfig::new(AlgorithmKind::DeRand1Bin, seed);
        optimizer.population_size = 20;
        optimizer.max_generations = 4000;
        let schedule = SphereSchedule::fixed(25.0).unwrap();
        let mut params = TraceParams::new(schedule, optimizer, 450.0);
        params.trials_per_sphere = 3;
        params.lambda_scale = 0.1;
        params.seed_half_lambda = 1.0;
        params
    }

    #[test]
    fn zero_d_max_returns_only_the_seed_center() {
        let model = build_benchmark(BenchmarkId::TwoBarOracle);
        let base = default_domain(BenchmarkId::TwoBarOracle);
        let mut params = two_bar_params(1);
        params.d_max = 0.0;
        let result = trace_path(&model, &base, &params).unwrap();
        assert_eq!(result.centers.len(), 1);
        assert!(result.episodes.is_empty());
        assert_eq!(result.stop, StopReason::ReachedDMax);
        assert_eq!(result.all_optimal.len(), 1);
        assert!(result.all_optimal[0].is_center);
    }

    #[test]
    fn max_spheres_one_stops_before_any_search() {
        let model = build_benchmark(BenchmarkId::TwoBarOracle);
        let base = default_domain(BenchmarkId::TwoBarOracle);
        let mut params = two_bar_params(1);
        params.max_spheres = 1;
        let result = trace_path(&model, &base, &params).unwrap();
        assert_eq!(result.centers.len(), 1);
        assert!(result.episodes.is_empty());
        assert_eq!(result.stop, StopReason::MaxSpheres);
    }

    #[test]
    fn trace_follows_the_two_bar_snap_through_curve() {
        let model = build_benchmark(BenchmarkId::TwoBarOracle);
        let base = default_domain(BenchmarkId::TwoBarOracle);
        let params = two_bar_params(42);
        let result = trace_path(&model, &base, &params).unwrap();
        assert_eq!(result.stop, StopReason::ReachedDMax);

        let path = result.center_path();
        assert_eq!(path.len(), result.centers.len());
        assert!(path.last().unwrap()[0] >= 450.0);

        // every center is an equilibrium on the analytic curve
        for point in &path {
            let expected = analytic_lambda(BenchmarkId::TwoBarOracle, point[0]).unwrap();
            assert!(
                (point[1] - expected).abs() < 0.05,
                "center at d = {} has λ = {}, curve says {}",
                point[0],
                point[1],
                expected
            );
        }
        for center in &result.centers {
            assert!(center.objective.unwrap() <= 1e-5);
        }

        // each step stays within the sphere box in the (d, λ) plane
        let step_cap = 25.0 * (1.0 + params.lambda_scale * params.lambda_scale).sqrt() + 1e-9;
        for pair in path.windows(2).skip(1) {
            let step = distance2(pair[1], pair[0]).sqrt();
            assert!(step <= step_cap, "step {step} exceeds {step_cap}");
        }

        // the direction condition holds at every recorded triple
        for triple in path.windows(3) {
            let a = [triple[0][0] - triple[1][0], triple[0][1] - triple[1][1]];
            let b = [triple[2][0] - triple[1][0], triple[2][1] - triple[1][1]];
            assert!(b[0] * a[0] + b[1] * a[1] < 0.0, "path back-tracked");
        }

        // effort ledger: one successful episode per non-seed center
        assert_eq!(result.episodes.len(), result.centers.len() - 1);
        for episode in &result.episodes {
            assert_eq!(episode.outcome, EpisodeOutcome::Advanced);
            assert!(episode.generations > 0);
            assert!(episode.trials >= params.trials_per_sphere);
        }
        assert!(result.total_generations() > 0);
    }

    #[test]
    fn trace_is_deterministic_for_a_fixed_seed() {
        let model = build_benchmark(BenchmarkId::TwoBarOracle);
        let base = default_domain(BenchmarkId::TwoBarOracle);
        let mut params = two_bar_params(7);
        params.d_max = 120.0;
        let first = trace_path(&model, &base, &params).unwrap();
        let second = trace_path(&model, &base, &params).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn non_equilibrium_start_is_rejected() {
        // a permanent load unbalances the undeformed state
        let spec = build_benchmark(BenchmarkId::TwoBarOracle);
        let model = TrussModel::new(
            spec.nodes().to_vec(),
            spec.members().to_vec(),
            vec![crate::model::PointLoad { node: 2, force: [0.0, 0.0, -50.0] }],
            vec![crate::model::PointLoad { node: 2, force: [0.0, 0.0, -100.0] }],
            spec.control().clone(),
        )
        .unwrap();
        let base = default_domain(BenchmarkId::TwoBarOracle);
        let err = trace_path(&model, &base, &two_bar_params(1)).unwrap_err();
        assert!(matches!(
            err,
            SphereError::BadStartCandidate { objective, .. } if (objective - 0.5).abs() < 1e-12
        ));
    }

    #[test]
    fn seed_sphere_without_reachable_equilibrium_fails_with_diagnostics() {
        // pin λ to 1 via the base domain: the two-bar curve reaches λ = 1
        // only at d ≈ 19.7 mm, outside the ±10 mm seed box
        let model = build_benchmark(BenchmarkId::TwoBarOracle);
        let base = SearchDomain::new(vec![-500.0, 1.0], vec![0.0, 3.2]).unwrap();
        let mut params = two_bar_params(3);
        params.seed_half_lambda = 1.0; // seed λ box [−1, 1] ∩ [1, 3.2] = {1}
        let err = trace_path(&model, &base, &params).unwrap_err();
        match err {
            SphereError::SeedSphereFailure { attempts, best_objective } => {
                assert_eq!(attempts, 3 * params.trials_per_sphere);
                assert!(best_objective > 1e-5);
            }
            other => panic!("expected seed-sphere failure, got {other:?}"),
        }
    }

    #[test]
    fn eight_member_trace_passes_near_the_mirror_equilibrium() {
        let model = build_benchmark(BenchmarkId::EightMember);
        let base = default_domain(BenchmarkId::EightMember);
        let mut optimizer = OptimizerConfig::new(AlgorithmKind::DeRand1Bin, 11);
        optimizer.population_size = 30;
        optimizer.max_generations = 2500;
        let schedule = SphereSchedule::fixed(50.0).unwrap();
        let mut params = TraceParams::new(schedule, optimizer, 2200.0);
        params.trials_per_sphere = 3;
        let result = trace_path(&model, &base, &params).unwrap();
        assert_eq!(result.stop, StopReason::ReachedDMax);

        let path = result.center_path();
        // centers stay on the symmetric analytic branch
        for point in &path {
            let expected = analytic_lambda(BenchmarkId::EightMember, point[0]).unwrap();
            assert!(
                (point[1] - expected).abs() < 0.05,
                "center at d = {} has λ = {}, curve says {}",
                point[0],
                point[1],
                expected
            );
        }
        // the trace passes within 30 (d, λ)-distance of the mirror state
        // (2000, 0): with 50 mm spacing some center lands within half a step
        let nearest = path
            .iter()
            .map(|p| distance2(*p, [2.0 * 1000.0, 0.0]).sqrt())
            .fold(f64::INFINITY, f64::min);
        assert!(nearest <= 30.0, "nearest center to the mirror: {nearest}");
    }

    #[test]
    fn invalid_params_are_rejected_before_any_work() {
        let model = build_benchmark(BenchmarkId::TwoBarOracle);
        let base = default_domain(BenchmarkId::TwoBarOracle);
        let mut params = two_bar_params(1);
        params.trials_per_sphere = 0;
        assert!(matches!(
            trace_path(&model, &base, &params),
            Err(SphereError::BadParameter { name: "trials_per_sphere", .. })
        ));
        let mut params = two_bar_params(1);
        params.d_max = f64::NAN;
        assert!(matches!(
            trace_path(&model, &base, &params),
            Err(SphereError::BadParameter { name: "d_max", .. })
        ));
        let mut params = two_bar_params(1);
        params.optimizer.max_generations = 0;
        assert!(trace_path(&model, &base, &params).is_err());
    }
}

//! Gradient-free minimizers with seed-deterministic runs.
//!
//! All algorithms share one contract: minimize a scalar objective over a
//! [`SearchDomain`] box, stop when the objective reaches
//! `target_objective` or the generation budget runs out, and consume
//! randomness only from a counter-based RNG seeded by the run's `seed` —
//! identical inputs therefore reproduce bit-identical runs, which the
//! artifact pipeline depends on.
//!
//! Objective evaluations that fail (for a truss: a candidate that collapses
//! a member) surface as `+∞` fitness: the candidate simply loses every
//! selection, the run never aborts.

pub mod de;
pub mod pso;
pub mod sa;

use std::time::{Duration, Instant};

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domain::{ArcStep, SearchDomain};
use crate::error::{DomainError, OptimError};
use crate::model::{Candidate, TrussModel};

pub use de::{de_crossover_binomial, de_mutate, DeVariant};
pub use pso::{constriction_coefficient, pso_step, PsoCoefficients};
pub use sa::sa_acceptance_probability;

/// The five optimizer variants, named by their conventional identifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgorithmKind {
    DeRand1Bin,
    DeBest2Bin,
    PsoStd,
    PsoConst,
    Sa,
}

impl Serialize for AlgorithmKind {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.id())
    }
}

impl<'de> Deserialize<'de> for AlgorithmKind {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl AlgorithmKind {
    pub const ALL: [AlgorithmKind; 5] = [
        AlgorithmKind::DeRand1Bin,
        AlgorithmKind::DeBest2Bin,
        AlgorithmKind::PsoStd,
        AlgorithmKind::PsoConst,
        AlgorithmKind::Sa,
    ];

    pub fn id(self) -> &'static str {
        match self {
            AlgorithmKind::DeRand1Bin => "de-rand-1-bin",
            AlgorithmKind::DeBest2Bin => "de-best-2-bin",
            AlgorithmKind::PsoStd => "pso-std",
            AlgorithmKind::PsoConst => "pso-const",
            AlgorithmKind::Sa => "sa",
        }
    }

    pub fn from_id(id: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.id() == id)
    }
}

impl std::fmt::Display for AlgorithmKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.id())
    }
}

impl std::str::FromStr for AlgorithmKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AlgorithmKind::from_id(s).ok_or_else(|| {
            let ids: Vec<_> = AlgorithmKind::ALL.iter().map(|k| k.id()).collect();
            format!("unknown algorithm '{s}', expected one of: {}", ids.join(", "))
        })
    }
}

/// Differential-evolution parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeParams {
    /// The scale factor F is redrawn uniformly from this range once per
    /// generation (dither).
    pub scale_factor: (f64, f64),
    /// Binomial crossover rate CR.
    pub crossover_rate: f64,
}

impl Default for DeParams {
    fn default() -> Self {
        DeParams {
            scale_factor: (0.2, 0.9),
            crossover_rate: 0.9,
        }
    }
}

/// Particle-swarm parameters.
///
/// The standard variant uses `inertia`/`inertia_damping`/`cognitive`/`social`;
/// the constriction variant derives everything from `phi` (χ multiplies the
/// whole velocity update, with cognitive = social = φ/2).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PsoParams {
    pub inertia: f64,
    pub inertia_damping: f64,
    pub cognitive: f64,
    pub social: f64,
    pub phi: f64,
}

impl Default for PsoParams {
    fn default() -> Self {
        PsoParams {
            inertia: 1.0,
            inertia_damping: 0.99,
            cognitive: 1.5,
            social: 2.0,
            phi: 4.1,
        }
    }
}

/// Simulated-annealing parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SaParams {
    pub initial_temperature: f64,
    /// Multiplicative cooling applied after every iteration.
    pub cooling: f64,
    /// Proposal spread as a fraction of each axis span, scaled by T/T₀.
    pub step_scale: f64,
}

impl Default for SaParams {
    fn default() -> Self {
        SaParams {
            initial_temperature: 0.1,
            cooling: 0.99,
            step_scale: 0.1,
        }
    }
}

/// Full optimizer configuration; the `seed` pins the whole run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    pub algorithm: AlgorithmKind,
    pub population_size: usize,
    pub max_generations: usize,
    /// Objective value at or below which a run counts as converged.
    pub target_objective: f64,
    pub seed: u64,
    pub de: DeParams,
    pub pso: PsoParams,
    pub sa: SaParams,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            algorithm: AlgorithmKind::DeRand1Bin,
            population_size: 50,
            max_generations: 50_000,
            target_objective: 1e-5,
            seed: 0,
            de: DeParams::default(),
            pso: PsoParams::default(),
            sa: SaParams::default(),
        }
    }
}

impl OptimizerConfig {
    pub fn new(algorithm: AlgorithmKind, seed: u64) -> Self {
        OptimizerConfig {
            algorithm,
            seed,
            ..Default::default()
        }
    }

    /// # Errors
    ///
    /// Rejects population sizes too small for the selected mutation scheme,
    /// empty generation budgets, non-positive targets, and parameter values
    /// outside their meaningful ranges.
    pub fn validate(&self) -> Result<(), OptimError> {
        if self.max_generations == 0 {
            return Err(OptimError::NoGenerations);
        }
        if !(self.target_objective > 0.0 && self.target_objective.is_finite()) {
            return Err(OptimError::BadTargetObjective {
                value: self.target_objective,
            });
        }
        match self.algorithm {
            AlgorithmKind::DeRand1Bin | AlgorithmKind::DeBest2Bin => {
                // rand/1 draws 3 partners, best/2 draws 4; both exclude the target.
                let min = if self.algorithm == AlgorithmKind::DeRand1Bin { 4 } else { 5 };
                if self.population_size < min {
                    return Err(OptimError::PopulationTooSmall {
                        algorithm: self.algorithm.id(),
                        got: self.population_size,
                        min,
                    });
                }
                let (lo, hi) = self.de.scale_factor;
                if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
                    return Err(OptimError::BadScaleFactor { lo, hi });
                }
                if !(0.0..=1.0).contains(&self.de.crossover_rate) {
                    return Err(OptimError::BadCrossoverRate {
                        value: self.de.crossover_rate,
                    });
                }
            }
            AlgorithmKind::PsoStd => {
                if self.population_size < 2 {
                    return Err(OptimError::PopulationTooSmall {
                        algorithm: self.algorithm.id(),
                        got: self.population_size,
                        min: 2,
                    });
                }
                for (name, value) in [
                    ("pso.inertia", self.pso.inertia),
                    ("pso.inertia_damping", self.pso.inertia_damping),
                    ("pso.cognitive", self.pso.cognitive),
                    ("pso.social", self.pso.social),
                ] {
                    if !(value > 0.0 && value.is_finite()) {
                        return Err(OptimError::NonPositiveParameter { name, value });
                    }
                }
            }
            AlgorithmKind::PsoConst => {
                if self.population_size < 2 {
                    return Err(OptimError::PopulationTooSmall {
                        algorithm: self.algorithm.id(),
                        got: self.population_size,
                        min: 2,
                    });
                }
                // χ needs φ > 4 to be real.
                if !(self.pso.phi > 4.0 && self.pso.phi.is_finite()) {
                    return Err(OptimError::NonPositiveParameter {
                        name: "pso.phi - 4",
                        value: self.pso.phi - 4.0,
                    });
                }
            }
            AlgorithmKind::Sa => {
                for (name, value) in [
                    ("sa.initial_temperature", self.sa.initial_temperature),
                    ("sa.cooling", self.sa.cooling),
                    ("sa.step_scale", self.sa.step_scale),
                ] {
                    if !(value > 0.0 && value.is_finite()) {
                        return Err(OptimError::NonPositiveParameter { name, value });
                    }
                }
            }
        }
        Ok(())
    }
}

/// A scalar function over flat points, evaluable from multiple threads.
///
/// Return `f64::INFINITY` for points that cannot be evaluated; they lose
/// every selection but never abort a run.
pub trait Objective: Sync {
    fn dimension(&self) -> usize;
    fn evaluate(&self, point: &[f64]) -> f64;
}

struct EquilibriumObjective<'a> {
    model: &'a TrussModel,
}

impl Objective for EquilibriumObjective<'_> {
    fn dimension(&self) -> usize {
        self.model.n_free() + 1
    }

    fn evaluate(&self, point: &[f64]) -> f64 {
        self.model.objective_of_point(point).unwrap_or(f64::INFINITY)
    }
}

/// Raw outcome of a generic run, before any model-aware bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct RawRun {
    pub best_point: Vec<f64>,
    pub best_value: f64,
    pub generations_used: usize,
    /// Best objective so far, one entry per generation (the initial sweep
    /// counts as the first generation). Non-increasing by construction.
    pub history: Vec<f64>,
    /// Mean pairwise distance of the population per generation; empty for
    /// single-solution algorithms.
    pub diversity: Vec<f64>,
    pub converged: bool,
}

/// Outcome of one optimizer run on a truss model.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub config: OptimizerConfig,
    pub best: Candidate,
    pub generations_used: usize,
    pub history: Vec<f64>,
    pub diversity: Vec<f64>,
    pub converged: bool,
    /// Populated when the run was given an arc-length step filter.
    pub arc_feasible: Option<bool>,
    pub wall_time: Duration,
}

impl PartialEq for RunRecord {
    /// Equality means "same deterministic outcome" — wall time is excluded.
    fn eq(&self, other: &Self) -> bool {
        self.config == other.config
            && self.best == other.best
            && self.generations_used == other.generations_used
            && self.history == other.history
            && self.diversity == other.diversity
            && self.converged == other.converged
            && self.arc_feasible == other.arc_feasible
    }
}

impl RunRecord {
    #[cfg(test)]
    pub(crate) fn synthetic(config: OptimizerConfig, best: Candidate) -> Self {
        RunRecord {
            config,
            best,
            generations_used: 0,
            history: Vec::new(),
            diversity: Vec::new(),
            converged: false,
            arc_feasible: None,
            wall_time: Duration::ZERO,
        }
    }
}

/// Derives an independent stream seed from a base seed (splitmix-style
/// avalanche), so batched runs stay deterministic without sharing RNG state.
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    let mut z = base ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub(crate) fn sanitize(value: f64) -> f64 {
    if value.is_nan() {
        f64::INFINITY
    } else {
        value
    }
}

pub(crate) fn mean_pairwise_distance(points: &[Vec<f64>]) -> f64 {
    let n = points.len();
    if n < 2 {
        return 0.0;
    }
    let mut sum = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let d2: f64 = points[i]
                .iter()
                .zip(&points[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            sum += d2.sqrt();
        }
    }
    sum / (n * (n - 1) / 2) as f64
}

/// Minimizes an arbitrary objective over a box. This is the algorithm core;
/// truss-aware callers go through [`optimize`].
pub fn optimize_objective<O: Objective + ?Sized>(
    objective: &O,
    domain: &SearchDomain,
    config: &OptimizerConfig,
) -> Result<RawRun, OptimError> {
    config.validate()?;
    if domain.dimension() != objective.dimension() {
        return Err(OptimError::Domain(DomainError::DimensionMismatch {
            expected: objective.dimension(),
            got: domain.dimension(),
        }));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    match config.algorithm {
        AlgorithmKind::DeRand1Bin => de::run(objective, domain, config, DeVariant::Rand1, &mut rng),
        AlgorithmKind::DeBest2Bin => de::run(objective, domain, config, DeVariant::Best2, &mut rng),
        AlgorithmKind::PsoStd => pso::run(objective, domain, config, false, &mut rng),
        AlgorithmKind::PsoConst => pso::run(objective, domain, config, true, &mut rng),
        AlgorithmKind::Sa => sa::run(objective, domain, config, &mut rng),
    }
}

/// Runs one seeded minimization of a truss's unbalance objective.
///
/// `filter` attaches an arc-length step: the returned record then carries
/// whether the best candidate satisfied it (post-hoc; the search itself is
/// unconstrained inside the domain box).
///
/// # Errors
///
/// Configuration and dimension problems only; evaluation failures degrade to
/// `+∞` fitness instead of erroring.
pub fn optimize(
    model: &TrussModel,
    domain: &SearchDomain,
    config: &OptimizerConfig,
    filter: Option<&ArcStep>,
) -> Result<RunRecord, OptimError> {
    domain.check_model(model)?;
    let start = Instant::now();
    let raw = optimize_objective(&EquilibriumObjective { model }, domain, config)?;
    let mut best = Candidate::from_point(&raw.best_point);
    best.objective = Some(raw.best_value);
    let arc_feasible = match filter {
        Some(step) => {
            let d = model.control_point(&best)?;
            Some(step.feasible([d, best.lambda]))
        }
        None => None,
    };
    Ok(RunRecord {
        config: config.clone(),
        best,
        generations_used: raw.generations_used,
        history: raw.history,
        diversity: raw.diversity,
        converged: raw.converged,
        arc_feasible,
        wall_time: start.elapsed(),
    })
}

//! Particle-swarm optimization: inertia-weight and constriction variants.
//!
//! Particles start uniformly in the box with zero velocity. Every axis draws
//! its own cognitive and social random factors. Positions are clamped to the
//! box and the velocity on a clamped axis is zeroed, so the swarm never
//! oscillates against a wall. The standard variant multiplies its inertia
//! weight by a damping factor each generation; the constriction variant
//! instead shrinks the whole update by χ(φ) and never damps.

use rand::Rng;

use crate::domain::SearchDomain;
use crate::error::OptimError;
use crate::optim::{mean_pairwise_distance, sanitize, Objective, OptimizerConfig, RawRun};

/// Clerc–Kennedy constriction coefficient χ = 2 / (φ − 2 + √(φ² − 4φ)).
///
/// Requires φ > 4; configuration validation enforces that before a run.
pub fn constriction_coefficient(phi: f64) -> f64 {
    2.0 / (phi - 2.0 + (phi * phi - 4.0 * phi).sqrt())
}

/// Velocity-update coefficients for one generation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsoCoefficients {
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    /// Multiplies the whole velocity update; 1 for the standard variant.
    pub constriction: f64,
}

impl PsoCoefficients {
    pub fn standard(inertia: f64, cognitive: f64, social: f64) -> Self {
        PsoCoefficients {
            inertia,
            cognitive,
            social,
            constriction: 1.0,
        }
    }

    /// Constriction setup: χ multiplies the update, the attraction weights
    /// split φ evenly, and inertia is 1 inside the bracket.
    pub fn constricted(phi: f64) -> Self {
        PsoCoefficients {
            inertia: 1.0,
            cognitive: phi / 2.0,
            social: phi / 2.0,
            constriction: constriction_coefficient(phi),
        }
    }
}

/// Advances one particle in place: velocity update, position update, clamp.
///
/// Each axis consumes exactly two uniform draws (cognitive, social), in axis
/// order, regardless of clamping — RNG consumption stays reproducible.
pub fn pso_step<R: Rng>(
    position: &mut [f64],
    velocity: &mut [f64],
    personal_best: &[f64],
    global_best: &[f64],
    coefficients: &PsoCoefficients,
    domain: &SearchDomain,
    rng: &mut R,
) {
    for j in 0..position.len() {
        let r_cognitive: f64 = rng.random();
        let r_social: f64 = rng.random();
        let v = coefficients.constriction
            * (coefficients.inertia * velocity[j]
                + coefficients.cognitive * r_cognitive * (personal_best[j] - position[j])
                + coefficients.social * r_social * (global_best[j] - position[j]));
        let (clamped, was_clamped) = domain.clamp_axis(j, position[j] + v);
        position[j] = clamped;
        velocity[j] = if was_clamped { 0.0 } else { v };
    }
}

pub(super) fn run<O: Objective + ?Sized, R: Rng>(
    objective: &O,
    domain: &SearchDomain,
    config: &OptimizerConfig,
    constricted: bool,
    rng: &mut R,
) -> Result<RawRun, OptimError> {
    let pop_n = config.population_size;
    let dim = domain.dimension();

    let mut coefficients = if constricted {
        PsoCoefficients::constricted(config.pso.phi)
    } else {
        PsoCoefficients::standard(config.pso.inertia, config.pso.cognitive, config.pso.social)
    };

    let mut positions: Vec<Vec<f64>> = (0..pop_n).map(|_| domain.sample_uniform(rng)).collect();
    let mut velocities: Vec<Vec<f64>> = vec![vec![0.0; dim]; pop_n];
    let mut personal_best = positions.clone();
    let mut personal_values: Vec<f64> = positions
        .iter()
        .map(|p| sanitize(objective.evaluate(p)))
        .collect();

    let initial_best = argmin(&personal_values);
    let mut global_best = personal_best[initial_best].clone();
    let mut global_value = personal_values[initial_best];

    let mut history = vec![global_value];
    let mut diversity = vec![mean_pairwise_distance(&positions)];

    while history.len() < config.max_generations && global_value > config.target_objective {
        for i in 0..pop_n {
            let (position, velocity) = (&mut positions[i], &mut velocities[i]);
            pso_step(
                position,
                velocity,
                &personal_best[i],
                &global_best,
                &coefficients,
                domain,
                rng,
            );
            let value = sanitize(objective.evaluate(position));
            if value <= personal_values[i] {
                personal_values[i] = value;
                personal_best[i].copy_from_slice(position);
                if value < global_value {
                    global_value = value;
                    global_best.copy_from_slice(position);
                }
            }
        }
        if !constricted {
            coefficients.inertia *= config.pso.inertia_damping;
        }
        history.push(global_value);
        diversity.push(mean_pairwise_distance(&positions));
    }

    Ok(RawRun {
        best_point: global_best,
        best_value: global_value,
        generations_used: history.len(),
        converged: global_value <= config.target_objective,
        history,
        diversity,
    })
}

fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v < values[best] {
            best = i;
        }
    }
    best
}

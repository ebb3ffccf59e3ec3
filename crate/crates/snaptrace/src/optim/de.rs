//! Differential evolution: the rand/1/bin and best/2/bin variants.
//!
//! Both use binomial crossover with a forced index, synchronous selection
//! (every trial competes against its own parent, replacements land together
//! at the end of the generation), and a scale factor redrawn once per
//! generation from the configured dither range.

use rand::Rng;

use crate::domain::SearchDomain;
use crate::error::OptimError;
use crate::optim::{mean_pairwise_distance, sanitize, Objective, OptimizerConfig, RawRun};

/// Mutation scheme selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeVariant {
    /// donor = x_{r1} + F (x_{r2} − x_{r3})
    Rand1,
    /// donor = x_best + F (x_{r1} − x_{r2}) + F (x_{r3} − x_{r4})
    Best2,
}

impl DeVariant {
    pub fn partner_count(self) -> usize {
        match self {
            DeVariant::Rand1 => 3,
            DeVariant::Best2 => 4,
        }
    }
}

/// Builds a donor vector from distinct population members.
///
/// `partners` must hold [`DeVariant::partner_count`] distinct indices, none
/// equal to the target index; `best_index` is only read by `Best2`.
pub fn de_mutate(
    population: &[Vec<f64>],
    best_index: usize,
    partners: &[usize],
    scale_factor: f64,
    variant: DeVariant,
) -> Vec<f64> {
    debug_assert_eq!(partners.len(), variant.partner_count());
    match variant {
        DeVariant::Rand1 => {
            let (r1, r2, r3) = (partners[0], partners[1], partners[2]);
            population[r1]
                .iter()
                .zip(&population[r2])
                .zip(&population[r3])
                .map(|((a, b), c)| a + scale_factor * (b - c))
                .collect()
        }
        DeVariant::Best2 => {
            let (r1, r2, r3, r4) = (partners[0], partners[1], partners[2], partners[3]);
            (0..population[best_index].len())
                .map(|j| {
                    population[best_index][j]
                        + scale_factor * (population[r1][j] - population[r2][j])
                        + scale_factor * (population[r3][j] - population[r4][j])
                })
                .collect()
        }
    }
}

/// Binomial crossover: each axis takes the donor's value with probability
/// `crossover_rate`; one uniformly chosen axis always does, so the trial
/// never equals its parent.
pub fn de_crossover_binomial<R: Rng>(
    target: &[f64],
    donor: &[f64],
    crossover_rate: f64,
    rng: &mut R,
) -> Vec<f64> {
    let dim = target.len();
    let forced = rng.random_range(0..dim);
    (0..dim)
        .map(|j| {
            if j == forced || rng.random::<f64>() < crossover_rate {
                donor[j]
            } else {
                target[j]
            }
        })
        .collect()
}

/// Draws `k` distinct indices from `0..population`, all different from
/// `exclude`. Rejection sampling; the population is validated to be large
/// enough before any run starts.
fn draw_distinct<R: Rng>(rng: &mut R, population: usize, exclude: usize, k: usize) -> Vec<usize> {
    let mut chosen = Vec::with_capacity(k);
    while chosen.len() < k {
        let idx = rng.random_range(0..population);
        if idx != exclude && !chosen.contains(&idx) {
            chosen.push(idx);
        }
    }
    chosen
}

pub(super) fn run<O: Objective + ?Sized, R: Rng>(
    objective: &O,
    domain: &SearchDomain,
    config: &OptimizerConfig,
    variant: DeVariant,
    rng: &mut R,
) -> Result<RawRun, OptimError> {
    let pop_n = config.population_size;
    let (f_lo, f_hi) = config.de.scale_factor;
    let cr = config.de.crossover_rate;

    let mut population: Vec<Vec<f64>> =
        (0..pop_n).map(|_| domain.sample_uniform(rng)).collect();
    let mut values: Vec<f64> = population
        .iter()
        .map(|p| sanitize(objective.evaluate(p)))
        .collect();

    let mut best_index = argmin(&values);
    let mut history = vec![values[best_index]];
    let mut diversity = vec![mean_pairwise_distance(&population)];

    while history.len() < config.max_generations && values[best_index] > config.target_objective {
        let scale_factor = f_lo + (f_hi - f_lo) * rng.random::<f64>();

        let trials: Vec<Vec<f64>> = (0..pop_n)
            .map(|i| {
                let partners = draw_distinct(rng, pop_n, i, variant.partner_count());
                let donor = de_mutate(&population, best_index, &partners, scale_factor, variant);
                domain.clamp(&de_crossover_binomial(&population[i], &donor, cr, rng))
            })
            .collect();
        let trial_values: Vec<f64> = trials
            .iter()
            .map(|t| sanitize(objective.evaluate(t)))
            .collect();

        for (i, (trial, trial_value)) in trials.into_iter().zip(trial_values).enumerate() {
            // Ties replace the parent: drift across plateaus beats stagnation.
            if trial_value <= values[i] {
                population[i] = trial;
                values[i] = trial_value;
            }
        }

        best_index = argmin(&values);
        history.push(values[best_index]);
        diversity.push(mean_pairwise_distance(&population));
    }

    Ok(RawRun {
        best_point: population[best_index].clone(),
        best_value: values[best_index],
        generations_used: history.len(),
        converged: values[best_index] <= config.target_objective,
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

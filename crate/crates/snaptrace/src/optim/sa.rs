//! Simulated annealing with Gaussian proposals and geometric cooling.
//!
//! One walker, one proposal per iteration. The proposal spread on each axis
//! is `step_scale · span · (T/T₀)`, so moves shrink together with the
//! temperature; proposals are clamped to the box. Improvements are always
//! taken, uphill moves with the Metropolis probability `exp(−Δf/T)`.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::domain::SearchDomain;
use crate::error::OptimError;
use crate::optim::{sanitize, Objective, OptimizerConfig, RawRun};

/// Metropolis acceptance probability for moving from `current` to `proposal`
/// at temperature `temperature`. Downhill (or equal) moves return 1.
pub fn sa_acceptance_probability(current: f64, proposal: f64, temperature: f64) -> f64 {
    if proposal <= current {
        1.0
    } else {
        (-(proposal - current) / temperature).exp()
    }
}

pub(super) fn run<O: Objective + ?Sized, R: Rng>(
    objective: &O,
    domain: &SearchDomain,
    config: &OptimizerConfig,
    rng: &mut R,
) -> Result<RawRun, OptimError> {
    let dim = domain.dimension();
    let t0 = config.sa.initial_temperature;
    let spans: Vec<f64> = domain
        .lower()
        .iter()
        .zip(domain.upper())
        .map(|(lo, hi)| hi - lo)
        .collect();

    let mut current = domain.sample_uniform(rng);
    let mut current_value = sanitize(objective.evaluate(&current));
    let mut best = current.clone();
    let mut best_value = current_value;

    let mut history = vec![best_value];
    let mut temperature = t0;

    while history.len() < config.max_generations && best_value > config.target_objective {
        let mut proposal = current.clone();
        for j in 0..dim {
            let noise: f64 = rng.sample(StandardNormal);
            let sigma = config.sa.step_scale * spans[j] * (temperature / t0);
            let (clamped, _) = domain.clamp_axis(j, proposal[j] + sigma * noise);
            proposal[j] = clamped;
        }
        let proposal_value = sanitize(objective.evaluate(&proposal));

        let accept = if proposal_value <= current_value {
            true
        } else {
            rng.random::<f64>()
                < sa_acceptance_probability(current_value, proposal_value, temperature)
        };
        if accept {
            current = proposal;
            current_value = proposal_value;
            if current_value < best_value {
                best_value = current_value;
                best.copy_from_slice(&current);
            }
        }

        temperature *= config.sa.cooling;
        history.push(best_value);
    }

    Ok(RawRun {
        best_point: best,
        best_value,
        generations_used: history.len(),
        converged: best_value <= config.target_objective,
        history,
        // Single-solution walker: population diversity has no meaning here.
        diversity: Vec::new(),
    })
}

//! Search domains, arc-length step constraints, and informed domain
//! decomposition.
//!
//! Optimizers work on flat points `[u..., λ]`; a [`SearchDomain`] is the box
//! those points live in. The arc-length helpers express the two conditions a
//! path-following step must satisfy in the `(d, λ)` control plane — stay on
//! the step circle, don't walk back — which this library applies as a
//! *post-hoc* feasibility band on optimizer output instead of a hard
//! constraint during search.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{DomainError, OptimError};
use crate::model::{ControlPointSpec, TrussModel};
use crate::optim::{derive_seed, optimize, OptimizerConfig, RunRecord};

/// Fraction of the step radius used as the arc-equality tolerance band.
pub const TOL_ARC_FACTOR: f64 = 0.05;

/// An axis-aligned box over optimizer points `[u..., λ]` (λ is the last axis).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchDomain {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl SearchDomain {
    /// Builds a box from per-axis bounds.
    ///
    /// # Errors
    ///
    /// Bounds must have equal length, be finite, and satisfy `lower ≤ upper`
    /// on every axis. Degenerate axes (`lower == upper`) are allowed.
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, DomainError> {
        if lower.len() != upper.len() {
            return Err(DomainError::BoundLengthMismatch {
                lower: lower.len(),
                upper: upper.len(),
            });
        }
        for (axis, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !lo.is_finite() || !hi.is_finite() {
                return Err(DomainError::NonFiniteBound { axis });
            }
            if lo > hi {
                return Err(DomainError::InvertedBounds {
                    axis,
                    lower: *lo,
                    upper: *hi,
                });
            }
        }
        Ok(SearchDomain { lower, upper })
    }

    /// Same displacement bounds on every free DoF, plus a λ range.
    pub fn homogeneous(
        n_free: usize,
        displacement: [f64; 2],
        lambda: [f64; 2],
    ) -> Result<Self, DomainError> {
        let mut lower = vec![displacement[0]; n_free];
        let mut upper = vec![displacement[1]; n_free];
        lower.push(lambda[0]);
        upper.push(lambda[1]);
        SearchDomain::new(lower, upper)
    }

    pub fn dimension(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Checks that the domain fits a model's variable layout (free DoFs + λ).
    pub fn check_model(&self, model: &TrussModel) -> Result<(), DomainError> {
        if self.dimension() != model.n_free() + 1 {
            return Err(DomainError::DimensionMismatch {
                expected: model.n_free() + 1,
                got: self.dimension(),
            });
        }
        Ok(())
    }

    /// Clamps one coordinate; reports whether it moved.
    pub fn clamp_axis(&self, axis: usize, value: f64) -> (f64, bool) {
        if value < self.lower[axis] {
            (self.lower[axis], true)
        } else if value > self.upper[axis] {
            (self.upper[axis], true)
        } else {
            (value, false)
        }
    }

    /// Projects a point onto the box.
    pub fn clamp(&self, point: &[f64]) -> Vec<f64> {
        point
            .iter()
            .enumerate()
            .map(|(axis, &v)| self.clamp_axis(axis, v).0)
            .collect()
    }

    pub fn contains(&self, point: &[f64]) -> bool {
        point.len() == self.dimension()
            && point
                .iter()
                .enumerate()
                .all(|(axis, &v)| v >= self.lower[axis] && v <= self.upper[axis])
    }

    /// Uniform sample inside the box.
    pub fn sample_uniform<R: rand::Rng>(&self, rng: &mut R) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(&lo, &hi)| {
                if lo == hi {
                    lo
                } else {
                    lo + (hi - lo) * rng.random::<f64>()
                }
            })
            .collect()
    }

    /// Axis-wise intersection with another box of the same dimension.
    ///
    /// Returns `None` when the boxes are disjoint on some axis.
    pub fn intersect(&self, other: &SearchDomain) -> Option<SearchDomain> {
        if self.dimension() != other.dimension() {
            return None;
        }
        let mut lower = Vec::with_capacity(self.dimension());
        let mut upper = Vec::with_capacity(self.dimension());
        for axis in 0..self.dimension() {
            let lo = self.lower[axis].max(other.lower[axis]);
            let hi = self.upper[axis].min(other.upper[axis]);
            if lo > hi {
                return None;
            }
            lower.push(lo);
            upper.push(hi);
        }
        Some(SearchDomain { lower, upper })
    }

    /// Replaces the bounds of one axis.
    pub fn with_axis(&self, axis: usize, lo: f64, hi: f64) -> Result<SearchDomain, DomainError> {
        let mut lower = self.lower.clone();
        let mut upper = self.upper.clone();
        lower[axis] = lo;
        upper[axis] = hi;
        SearchDomain::new(lower, upper)
    }
}

// --- arc-length step conditions ------------------------------------------------

/// Signed deviation of a trial from the step circle of radius `delta` around
/// the current point, measured in the `(d, λ)` plane:
///
/// ```text
/// residual = sqrt((d_T − d_i)² + (λ_T − λ_i)²) − Δ
/// ```
pub fn arc_equality_residual(trial: [f64; 2], current: [f64; 2], delta: f64) -> f64 {
    let dd = trial[0] - current[0];
    let dl = trial[1] - current[1];
    (dd * dd + dl * dl).sqrt() - delta
}

/// Forward-walk condition: the trial must not fold back toward the previous
/// point. True when
///
/// ```text
/// (d_T − d_i)(d_{i−1} − d_i) + (λ_T − λ_i)(λ_{i−1} − λ_i) ≤ 0
/// ```
pub fn arc_direction_ok(trial: [f64; 2], current: [f64; 2], previous: [f64; 2]) -> bool {
    let back = [previous[0] - current[0], previous[1] - current[1]];
    let step = [trial[0] - current[0], trial[1] - current[1]];
    step[0] * back[0] + step[1] * back[1] <= 0.0
}

/// One arc-length step in the `(d, λ)` plane, applied as a feasibility
/// filter: the trial must land within `tol_factor·delta` of the step circle
/// and, from the second step on, must not point back at the previous point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcStep {
    pub current: [f64; 2],
    /// `None` on the first step: the direction condition is vacuous there.
    pub previous: Option<[f64; 2]>,
    pub delta: f64,
    pub tol_factor: f64,
}

impl ArcStep {
    pub fn new(current: [f64; 2], previous: Option<[f64; 2]>, delta: f64) -> Self {
        ArcStep {
            current,
            previous,
            delta,
            tol_factor: TOL_ARC_FACTOR,
        }
    }

    pub fn feasible(&self, trial: [f64; 2]) -> bool {
        let on_circle =
            arc_equality_residual(trial, self.current, self.delta).abs() <= self.tol_factor * self.delta;
        let forward = match self.previous {
            Some(previous) => arc_direction_ok(trial, self.current, previous),
            None => true,
        };
        on_circle && forward
    }
}

// --- informed decomposition ------------------------------------------------------

/// A domain-decomposition plan: slice the control point range into intervals,
/// optionally sweep staged bounds for all displacement variables, and run a
/// fixed number of independent optimizations per cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionPlan {
    /// Control-point intervals `[lo, hi]` in mm (may be empty).
    #[serde(default)]
    pub control_intervals: Vec<[f64; 2]>,
    /// Per-stage displacement bounds, each `[lo, hi]` applied to every free
    /// DoF; λ keeps its base bounds (may be empty).
    #[serde(default)]
    pub variable_stages: Vec<[f64; 2]>,
    pub trials_per_cell: usize,
}

impl DecompositionPlan {
    /// Number of cells: control intervals × variable stages (missing lists
    /// count as one trivial entry each).
    pub fn n_cells(&self) -> usize {
        self.control_intervals.len().max(1) * self.variable_stages.len().max(1)
    }

    fn validate(&self) -> Result<(), DomainError> {
        if self.control_intervals.is_empty() && self.variable_stages.is_empty() {
            return Err(DomainError::EmptyPlan);
        }
        if self.trials_per_cell == 0 {
            return Err(DomainError::EmptyPlan);
        }
        for &[lo, hi] in &self.control_intervals {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(DomainError::BadControlInterval { lo, hi });
            }
        }
        for (stage, &[lo, hi]) in self.variable_stages.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(DomainError::BadVariableStage { stage });
            }
        }
        Ok(())
    }
}

/// Builds the search box of one cell of the plan.
///
/// The control interval is mapped through the control sign onto the bounds of
/// the controlled displacement variable, then intersected with the base box.
fn cell_domain(
    model: &TrussModel,
    base: &SearchDomain,
    interval: Option<[f64; 2]>,
    stage: Option<[f64; 2]>,
) -> Result<SearchDomain, DomainError> {
    let mut cell = base.clone();
    if let Some([lo, hi]) = stage {
        let lambda_axis = cell.dimension() - 1;
        let stage_box = SearchDomain::homogeneous(
            model.n_free(),
            [lo, hi],
            [cell.lower()[lambda_axis], cell.upper()[lambda_axis]],
        )?;
        cell = cell
            .intersect(&stage_box)
            .ok_or(DomainError::BadVariableStage { stage: 0 })?;
    }
    if let Some([lo, hi]) = interval {
        let (axis, sign) = match *model.control() {
            ControlPointSpec::NodeAxis { node, axis, sign } => (
                model
                    .dof_index(node, axis)
                    .expect("validated at model construction"),
                sign,
            ),
            ControlPointSpec::EuclideanNorm => return Err(DomainError::NormControlNotCellable),
        };
        // d = sign·u, so the u-bounds are the interval mapped through sign.
        let (u_lo, u_hi) = if sign >= 0.0 { (lo, hi) } else { (-hi, -lo) };
        let restricted = cell.with_axis(axis, u_lo, u_hi)?;
        cell = cell
            .intersect(&restricted)
            .ok_or(DomainError::ControlIntervalOutsideDomain { lo, hi })?;
    }
    Ok(cell)
}

/// Runs `trials_per_cell` independent optimizations in every cell of the
/// plan and returns all records, cell-major, failed runs included.
///
/// Seeds are derived per run from `config.seed`, so the full batch is
/// deterministic and cells may execute in parallel.
///
/// # Errors
///
/// Rejects empty plans, malformed intervals, control-interval cells on a
/// euclidean-norm control point, and cells that miss the base domain.
pub fn informed_decomposition(
    model: &TrussModel,
    base: &SearchDomain,
    plan: &DecompositionPlan,
    config: &OptimizerConfig,
) -> Result<Vec<RunRecord>, OptimError> {
    plan.validate()?;
    base.check_model(model)?;

    let intervals: Vec<Option<[f64; 2]>> = if plan.control_intervals.is_empty() {
        vec![None]
    } else {
        plan.control_intervals.iter().copied().map(Some).collect()
    };
    let stages: Vec<Option<[f64; 2]>> = if plan.variable_stages.is_empty() {
        vec![None]
    } else {
        plan.variable_stages.iter().copied().map(Some).collect()
    };

    // Build and validate all cell domains up front so errors surface before
    // any optimizer time is spent.
    let mut cells = Vec::with_capacity(intervals.len() * stages.len());
    for &interval in &intervals {
        for &stage in &stages {
            cells.push(cell_domain(model, base, interval, stage)?);
        }
    }

    let trials = plan.trials_per_cell;
    let runs: Vec<(usize, u64)> = (0..cells.len() * trials)
        .map(|i| (i / trials, derive_seed(config.seed, i as u64)))
        .collect();
    runs.par_iter()
        .map(|&(cell, seed)| {
            let mut run_config = config.clone();
            run_config.seed = seed;
            optimize(model, &cells[cell], &run_config, None)
        })
        .collect()
}

/// Per-variable `[min, max]` over the optimal records (objective ≤ `tol`),
/// ordered `[u..., λ]`. Empty when no record qualifies.
pub fn variable_range_report(records: &[RunRecord], tol: f64) -> Vec<[f64; 2]> {
    let mut ranges: Vec<[f64; 2]> = Vec::new();
    for record in records {
        let Some(objective) = record.best.objective else {
            continue;
        };
        if !(objective <= tol) {
            continue;
        }
        let point = record.best.to_point();
        if ranges.is_empty() {
            ranges = point.iter().map(|&v| [v, v]).collect();
        } else {
            for (range, &v) in ranges.iter_mut().zip(&point) {
                range[0] = range[0].min(v);
                range[1] = range[1].max(v);
            }
        }
    }
    ranges
}

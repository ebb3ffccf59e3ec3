//! Error types shared across the library.

use thiserror::Error;

use crate::model::Axis;

/// Length (mm) below which a member is considered degenerate.
///
/// Applies both to undeformed geometry (validation) and to deformed geometry
/// (evaluation): a candidate that collapses a member to zero length has no
/// defined direction vector, so evaluation reports an error instead of
/// propagating infinities.
pub const EPS_LENGTH: f64 = 1e-9;

/// Validation and evaluation failures for truss models and candidates.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("duplicate node id {id}")]
    DuplicateNodeId { id: usize },
    #[error("node {id} has non-finite coordinates")]
    NonFiniteCoords { id: usize },
    #[error("member {index} references unknown node id {node}")]
    UnknownNode { index: usize, node: usize },
    #[error("member {index} connects node {node} to itself")]
    SelfLoop { index: usize, node: usize },
    #[error("member {index} has non-positive axial stiffness ({value} N)")]
    NonPositiveStiffness { index: usize, value: f64 },
    #[error("member {index} has undeformed length {length} mm, below the {EPS_LENGTH} mm threshold")]
    ZeroLengthMember { index: usize, length: f64 },
    #[error("load entry references unknown node id {node}")]
    LoadOnUnknownNode { node: usize },
    #[error("non-finite load component on node {node}")]
    NonFiniteLoad { node: usize },
    #[error("variable load vanishes on every free axis, the objective denominator would be zero")]
    ZeroVariableLoad,
    #[error("model has no free degrees of freedom")]
    NoFreeDofs,
    #[error("control point references unknown node id {node}")]
    ControlOnUnknownNode { node: usize },
    #[error("control point references fixed axis {axis} of node {node}")]
    ControlOnFixedAxis { node: usize, axis: Axis },
    #[error("control point sign must be +1 or -1, got {value}")]
    InvalidControlSign { value: f64 },
    #[error("candidate carries {got} displacement entries, model has {expected} free DoFs")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite displacement or load multiplier in candidate")]
    NonFiniteCandidate,
    #[error("member {index} deformed to length {length} mm, below the {EPS_LENGTH} mm threshold")]
    DegenerateMember { index: usize, length: f64 },
}

/// Invalid search-domain or decomposition-plan input.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("domain bounds have mismatched lengths ({lower} lower vs {upper} upper)")]
    BoundLengthMismatch { lower: usize, upper: usize },
    #[error("domain axis {axis} has lower bound {lower} above upper bound {upper}")]
    InvertedBounds { axis: usize, lower: f64, upper: f64 },
    #[error("non-finite domain bound on axis {axis}")]
    NonFiniteBound { axis: usize },
    #[error("domain has {got} axes, model needs {expected} (free DoFs plus load multiplier)")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("decomposition plan has no cells")]
    EmptyPlan,
    #[error("control interval [{lo}, {hi}] is empty or non-finite")]
    BadControlInterval { lo: f64, hi: f64 },
    #[error("variable stage {stage} does not match domain dimension")]
    BadVariableStage { stage: usize },
    #[error("control-point cells need node-axis control, model uses euclidean-norm")]
    NormControlNotCellable,
    #[error("control interval [{lo}, {hi}] does not intersect the base domain")]
    ControlIntervalOutsideDomain { lo: f64, hi: f64 },
}

/// Optimizer configuration and run failures.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum OptimError {
    #[error("population size {got} too small: {algorithm} needs at least {min}")]
    PopulationTooSmall {
        algorithm: &'static str,
        got: usize,
        min: usize,
    },
    #[error("max_generations must be at least 1")]
    NoGenerations,
    #[error("target objective must be positive and finite, got {value}")]
    BadTargetObjective { value: f64 },
    #[error("scale factor bounds [{lo}, {hi}] invalid: need 0 < lo <= hi")]
    BadScaleFactor { lo: f64, hi: f64 },
    #[error("crossover rate {value} outside [0, 1]")]
    BadCrossoverRate { value: f64 },
    #[error("{name} must be positive, got {value}")]
    NonPositiveParameter { name: &'static str, value: f64 },
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Hypersphere trace failures.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SphereError {
    #[error("sphere box around ({d}, {lambda}) does not intersect the base domain")]
    OutsideBaseDomain { d: f64, lambda: f64 },
    #[error("sphere radius must be positive, got {value}")]
    NonPositiveRadius { value: f64 },
    #[error("no optimal trial solution to select a center from")]
    NoOptimalTrial,
    #[error("no optimal trial satisfies the direction condition")]
    NoForwardTrial,
    #[error(
        "seed sphere found no optimal trial in {attempts} runs (best objective {best_objective})"
    )]
    SeedSphereFailure { attempts: usize, best_objective: f64 },
    #[error("start candidate is not an equilibrium state: objective {objective} > {tol}")]
    BadStartCandidate { objective: f64, tol: f64 },
    #[error("trace parameter {name} must be positive, got {value}")]
    BadParameter { name: &'static str, value: f64 },
    #[error(transparent)]
    Optim(#[from] OptimError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Model / run-configuration file failures.
#[derive(Debug, Error)]
pub enum FileError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    /// Syntax or schema violation; the message carries the parser's
    /// line/column diagnostics.
    #[error("cannot parse {path}: {message}")]
    Parse { path: String, message: String },
    #[error("invalid [control] section: {0}")]
    Control(String),
    #[error("invalid field {field}: {message}")]
    Field { field: String, message: String },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Anything that can go wrong while executing a run plan end to end.
#[derive(Debug, Error)]
pub enum RunnerError {
    #[error(transparent)]
    File(#[from] FileError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Optim(#[from] OptimError),
    #[error(transparent)]
    Sphere(#[from] SphereError),
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

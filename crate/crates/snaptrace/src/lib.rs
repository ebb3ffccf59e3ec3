//! Equilibrium-path tracing for geometrically nonlinear space trusses,
//! driven by gradient-free optimizers.
//!
//! Instead of assembling tangent stiffness matrices and iterating with
//! Newton-type correctors, this library turns static equilibrium into a
//! minimization problem: the normalized global unbalance of a pin-jointed
//! truss is zero exactly at an equilibrium state `(u, λ)`. Population-based
//! optimizers (differential evolution, particle swarms, simulated annealing)
//! then collect equilibrium states directly — including limit points and
//! post-buckling branches that defeat load-controlled solvers.
//!
//! The crate is organized along the processing pipeline:
//!
//! * [`model`] — large-displacement truss mechanics and the unbalance
//!   objective.
//! * [`domain`] — box search domains, arc-length step constraints, and
//!   informed domain decomposition.
//! * [`optim`] — DE, PSO and SA minimizers with seed-deterministic runs.
//! * [`sphere`] — adaptive hypersphere path tracing: a moving trust region
//!   in the (displacement, load-multiplier) plane that walks the whole
//!   equilibrium path through snap-through.
//! * [`analysis`] — DBSCAN clustering of solution clouds, convergence
//!   profiles, success rates.
//! * [`bench`] — the built-in benchmark structures with closed-form
//!   reference curves where they exist.
//! * [`modelfile`] / [`runconfig`] — TOML ingestion for user structures and
//!   run plans.
//! * [`runner`] — batch execution producing deterministic CSV and SVG
//!   artifacts.

pub mod analysis;
pub mod bench;
pub mod domain;
pub mod error;
pub mod model;
pub mod modelfile;
pub mod optim;
pub mod runconfig;
pub mod runner;
pub mod sphere;
pub mod svg;

pub use error::{DomainError, ModelError, OptimError, SphereError, EPS_LENGTH};
pub use model::{
    Axis, Candidate, ControlPointSpec, MemberSpec, NodeSpec, PointLoad, TrussModel,
};

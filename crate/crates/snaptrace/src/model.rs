//! Large-displacement truss mechanics.
//!
//! A [`TrussModel`] is a pin-jointed spatial truss: straight members that
//! carry axial force only, loaded at the joints. Displacements are finite —
//! member directions and strains are always evaluated on the *deformed*
//! geometry, so snap-through and post-buckling states are representable
//! without any linearization.
//!
//! The central quantity is the normalized unbalance [`TrussModel::objective`]:
//!
//! ```text
//! F(u, λ) = sqrt(Σ_k |R_k|²) / sqrt(Σ_k |f_k|²)
//! R_k     = f0_k + λ f_k + Σ_p q_{k,p}
//! ```
//!
//! summed over free node axes, where `f0` is the permanent load, `f` the
//! variable (λ-scaled) load and `q_{k,p}` the axial force member `p` applies
//! on node `k`. `F` is zero exactly at global equilibrium, which turns
//! path-following into a sequence of minimizations solvable by gradient-free
//! optimizers.
//!
//! Units are fixed throughout: millimetres, newtons, megapascals. Axial
//! stiffness is `k_p = E·A` in newtons (force per unit engineering strain).

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, EPS_LENGTH};

// --- small 3-vector helpers --------------------------------------------------

pub(crate) fn v_sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn v_add(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub(crate) fn v_scale(s: f64, a: [f64; 3]) -> [f64; 3] {
    [s * a[0], s * a[1], s * a[2]]
}

pub(crate) fn v_dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn v_norm(a: [f64; 3]) -> f64 {
    v_dot(a, a).sqrt()
}

// --- axes and specs ----------------------------------------------------------

/// Coordinate axis of a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }
}

impl std::fmt::Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        })
    }
}

/// A joint: initial coordinates plus per-axis support conditions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeSpec {
    pub id: usize,
    /// Initial coordinates `[x, y, z]` in mm.
    pub coords: [f64; 3],
    /// `true` marks a restrained axis (displacement pinned to zero).
    pub fixed: [bool; 3],
}

/// A straight axial member between two joints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemberSpec {
    pub node_a: usize,
    pub node_b: usize,
    /// Axial stiffness `E·A` in N (force per unit engineering strain).
    pub axial_stiffness: f64,
}

/// A nodal force vector, used for both permanent and variable loads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointLoad {
    pub node: usize,
    /// Force `[Fx, Fy, Fz]` in N.
    pub force: [f64; 3],
}

/// How the scalar displacement control point `d` is read off a candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum ControlPointSpec {
    /// `d = sign · u[node, axis]`. `sign = -1` makes a settlement along `-z`
    /// read as positive progress.
    NodeAxis { node: usize, axis: Axis, sign: f64 },
    /// `d = ‖u‖₂` over all free displacements.
    EuclideanNorm,
}

/// A trial state: free displacements plus load multiplier.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    /// Free displacements, ordered by node then axis (fixed axes skipped).
    pub u: Vec<f64>,
    pub lambda: f64,
    /// Cached objective value, if this candidate has been evaluated.
    pub objective: Option<f64>,
}

impl Candidate {
    pub fn new(u: Vec<f64>, lambda: f64) -> Self {
        Candidate {
            u,
            lambda,
            objective: None,
        }
    }

    /// Zero displacements at λ = 0: the undeformed reference state.
    pub fn undeformed(n_free: usize) -> Self {
        Candidate::new(vec![0.0; n_free], 0.0)
    }

    /// Flattens into an optimizer point `[u..., λ]`.
    pub fn to_point(&self) -> Vec<f64> {
        let mut p = self.u.clone();
        p.push(self.lambda);
        p
    }

    /// Rebuilds a candidate from an optimizer point `[u..., λ]`.
    pub fn from_point(point: &[f64]) -> Self {
        let (lambda, u) = point.split_last().expect("point needs at least λ");
        Candidate::new(u.to_vec(), *lambda)
    }
}

/// Deformed geometry of one member under a candidate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MemberGeometry {
    /// Undeformed length `L` (mm).
    pub length0: f64,
    /// Deformed length `l` (mm).
    pub length: f64,
    /// Unit vector from node `a` toward node `b` in the deformed state.
    pub direction: [f64; 3],
}

impl MemberGeometry {
    /// Engineering strain `δ = l/L − 1`.
    pub fn strain(&self) -> f64 {
        engineering_strain(self.length0, self.length)
    }
}

/// Engineering strain of a member with undeformed length `length0` stretched
/// to `length`: `δ = l/L − 1`. Positive in tension.
pub fn engineering_strain(length0: f64, length: f64) -> f64 {
    length / length0 - 1.0
}

/// Axial force vector a member applies on the node the `direction` vector
/// points away from: `q = k_p · δ · i`.
///
/// With `i` the deformed unit vector from node `k` toward the far node, a
/// member in tension (`δ > 0`) pulls `k` toward the far node.
pub fn internal_force(axial_stiffness: f64, strain: f64, direction: [f64; 3]) -> [f64; 3] {
    v_scale(axial_stiffness * strain, direction)
}

// --- the model ----------------------------------------------------------------

/// A validated spatial truss with its load pattern and control-point choice.
///
/// Construction via [`TrussModel::new`] enforces every structural invariant;
/// all evaluation methods can then assume a well-formed model and only report
/// candidate-dependent errors (dimension mismatch, degenerate members).
#[derive(Debug, Clone, PartialEq)]
pub struct TrussModel {
    nodes: Vec<NodeSpec>,
    members: Vec<MemberSpec>,
    /// Dense permanent load per node (N), aligned with `nodes`.
    permanent: Vec<[f64; 3]>,
    /// Dense variable load per node (N), aligned with `nodes`; scaled by λ.
    variable: Vec<[f64; 3]>,
    control: ControlPointSpec,
    /// `(node index, axis)` of every free DoF, node-major, axes in x,y,z order.
    free_dofs: Vec<(usize, usize)>,
    /// Member endpoints as node indices (not ids).
    member_nodes: Vec<(usize, usize)>,
    /// Undeformed member lengths (mm).
    lengths0: Vec<f64>,
    /// √(Σ |f_k|²) over free axes: the objective denominator.
    variable_norm_free: f64,
}

impl TrussModel {
    /// Validates and builds a model.
    ///
    /// # Errors
    ///
    /// Rejects duplicate or unknown node ids, self-loop members, non-positive
    /// stiffness, members shorter than [`EPS_LENGTH`], non-finite input,
    /// models without free DoFs, variable loads that vanish on every free
    /// axis, and control points that reference a fixed or unknown DoF.
    pub fn new(
        nodes: Vec<NodeSpec>,
        members: Vec<MemberSpec>,
        permanent_loads: Vec<PointLoad>,
        variable_loads: Vec<PointLoad>,
        control: ControlPointSpec,
    ) -> Result<Self, ModelError> {
        let mut id_to_index = std::collections::HashMap::new();
        for (i, n) in nodes.iter().enumerate() {
            if !n.coords.iter().all(|c| c.is_finite()) {
                return Err(ModelError::NonFiniteCoords { id: n.id });
            }
            if id_to_index.insert(n.id, i).is_some() {
                return Err(ModelError::DuplicateNodeId { id: n.id });
            }
        }

        let mut member_nodes = Vec::with_capacity(members.len());
        let mut lengths0 = Vec::with_capacity(members.len());
        for (index, m) in members.iter().enumerate() {
            let a = *id_to_index
                .get(&m.node_a)
                .ok_or(ModelError::UnknownNode { index, node: m.node_a })?;
            let b = *id_to_index
                .get(&m.node_b)
                .ok_or(ModelError::UnknownNode { index, node: m.node_b })?;
            if a == b {
                return Err(ModelError::SelfLoop { index, node: m.node_a });
            }
            if !(m.axial_stiffness > 0.0 && m.axial_stiffness.is_finite()) {
                return Err(ModelError::NonPositiveStiffness {
                    index,
                    value: m.axial_stiffness,
                });
            }
            let length0 = v_norm(v_sub(nodes[b].coords, nodes[a].coords));
            if length0 < EPS_LENGTH {
                return Err(ModelError::ZeroLengthMember { index, length: length0 });
            }
            member_nodes.push((a, b));
            lengths0.push(length0);
        }

        let densify = |loads: &[PointLoad]| -> Result<Vec<[f64; 3]>, ModelError> {
            let mut dense = vec![[0.0; 3]; nodes.len()];
            for l in loads {
                let i = *id_to_index
                    .get(&l.node)
                    .ok_or(ModelError::LoadOnUnknownNode { node: l.node })?;
                if !l.force.iter().all(|c| c.is_finite()) {
                    return Err(ModelError::NonFiniteLoad { node: l.node });
                }
                dense[i] = v_add(dense[i], l.force);
            }
            Ok(dense)
        };
        let permanent = densify(&permanent_loads)?;
        let variable = densify(&variable_loads)?;

        let mut free_dofs = Vec::new();
        for (i, n) in nodes.iter().enumerate() {
            for axis in 0..3 {
                if !n.fixed[axis] {
                    free_dofs.push((i, axis));
                }
            }
        }
        if free_dofs.is_empty() {
            return Err(ModelError::NoFreeDofs);
        }

        let variable_norm_free = free_dofs
            .iter()
            .map(|&(i, axis)| variable[i][axis] * variable[i][axis])
            .sum::<f64>()
            .sqrt();
        if variable_norm_free == 0.0 {
            return Err(ModelError::ZeroVariableLoad);
        }

        if let ControlPointSpec::NodeAxis { node, axis, sign } = control {
            let i = *id_to_index
                .get(&node)
                .ok_or(ModelError::ControlOnUnknownNode { node })?;
            if nodes[i].fixed[axis.index()] {
                return Err(ModelError::ControlOnFixedAxis { node, axis });
            }
            if sign != 1.0 && sign != -1.0 {
                return Err(ModelError::InvalidControlSign { value: sign });
            }
        }

        Ok(TrussModel {
            nodes,
            members,
            permanent,
            variable,
            control,
            free_dofs,
            member_nodes,
            lengths0,
            variable_norm_free,
        })
    }

    // --- accessors -----------------------------------------------------------

    pub fn nodes(&self) -> &[NodeSpec] {
        &self.nodes
    }

    pub fn members(&self) -> &[MemberSpec] {
        &self.members
    }

    pub fn control(&self) -> &ControlPointSpec {
        &self.control
    }

    pub fn permanent_loads(&self) -> &[[f64; 3]] {
        &self.permanent
    }

    pub fn variable_loads(&self) -> &[[f64; 3]] {
        &self.variable
    }

    /// Number of free degrees of freedom (optimization variables minus λ).
    pub fn n_free(&self) -> usize {
        self.free_dofs.len()
    }

    /// `(node index, axis index)` of each free DoF, in `u` order.
    pub fn free_dofs(&self) -> &[(usize, usize)] {
        &self.free_dofs
    }

    /// Resolved `(node index, node index)` endpoints, aligned with `members()`.
    pub fn member_node_indices(&self) -> &[(usize, usize)] {
        &self.member_nodes
    }

    /// Flat `u` index of a free `(node id, axis)` pair, if that axis is free.
    pub fn dof_index(&self, node_id: usize, axis: Axis) -> Option<usize> {
        let node_index = self.nodes.iter().position(|n| n.id == node_id)?;
        self.free_dofs
            .iter()
            .position(|&(i, a)| i == node_index && a == axis.index())
    }

    fn check_candidate(&self, candidate: &Candidate) -> Result<(), ModelError> {
        if candidate.u.len() != self.free_dofs.len() {
            return Err(ModelError::DimensionMismatch {
                expected: self.free_dofs.len(),
                got: candidate.u.len(),
            });
        }
        if !candidate.lambda.is_finite() || candidate.u.iter().any(|v| !v.is_finite()) {
            return Err(ModelError::NonFiniteCandidate);
        }
        Ok(())
    }

    /// Displacement vector of one node under a candidate (fixed axes stay 0).
    fn node_displacement(&self, candidate: &Candidate, node_index: usize) -> [f64; 3] {
        let mut u = [0.0; 3];
        // Free DoFs are node-major, so a linear scan per node would be O(n);
        // instead exploit that each node owns at most 3 consecutive entries.
        for (flat, &(i, axis)) in self.free_dofs.iter().enumerate() {
            if i == node_index {
                u[axis] = candidate.u[flat];
            }
        }
        u
    }

    /// Deformed coordinates of every node, aligned with `nodes()`.
    pub fn deformed_coordinates(&self, candidate: &Candidate) -> Result<Vec<[f64; 3]>, ModelError> {
        self.check_candidate(candidate)?;
        let mut coords: Vec<[f64; 3]> = self.nodes.iter().map(|n| n.coords).collect();
        for (flat, &(i, axis)) in self.free_dofs.iter().enumerate() {
            coords[i][axis] += candidate.u[flat];
        }
        Ok(coords)
    }

    /// Deformed geometry of member `member_index` under a candidate.
    ///
    /// # Errors
    ///
    /// [`ModelError::DegenerateMember`] when the deformed length falls below
    /// [`EPS_LENGTH`] — the direction vector is undefined there.
    pub fn member_geometry(
        &self,
        member_index: usize,
        candidate: &Candidate,
    ) -> Result<MemberGeometry, ModelError> {
        self.check_candidate(candidate)?;
        let (a, b) = self.member_nodes[member_index];
        let xa = v_add(self.nodes[a].coords, self.node_displacement(candidate, a));
        let xb = v_add(self.nodes[b].coords, self.node_displacement(candidate, b));
        self.member_geometry_from_coords(member_index, xa, xb)
    }

    fn member_geometry_from_coords(
        &self,
        member_index: usize,
        xa: [f64; 3],
        xb: [f64; 3],
    ) -> Result<MemberGeometry, ModelError> {
        let chord = v_sub(xb, xa);
        let length = v_norm(chord);
        if length < EPS_LENGTH {
            return Err(ModelError::DegenerateMember {
                index: member_index,
                length,
            });
        }
        Ok(MemberGeometry {
            length0: self.lengths0[member_index],
            length,
            direction: v_scale(1.0 / length, chord),
        })
    }

    /// Unbalanced force on one node (by id): `R_k = f0_k + λ f_k + Σ_p q_{k,p}`.
    ///
    /// All three components are returned; on fixed axes the value is the
    /// support reaction (it never enters the objective).
    pub fn node_unbalance(
        &self,
        candidate: &Candidate,
        node_id: usize,
    ) -> Result<[f64; 3], ModelError> {
        let node_index = self
            .nodes
            .iter()
            .position(|n| n.id == node_id)
            .ok_or(ModelError::LoadOnUnknownNode { node: node_id })?;
        let residuals = self.all_node_unbalances(candidate)?;
        Ok(residuals[node_index])
    }

    /// Unbalance vectors for all nodes, aligned with `nodes()`.
    pub fn all_node_unbalances(&self, candidate: &Candidate) -> Result<Vec<[f64; 3]>, ModelError> {
        self.check_candidate(candidate)?;
        let coords = self.deformed_coordinates(candidate)?;
        let mut residuals: Vec<[f64; 3]> = (0..self.nodes.len())
            .map(|i| v_add(self.permanent[i], v_scale(candidate.lambda, self.variable[i])))
            .collect();
        for (m, &(a, b)) in self.member_nodes.iter().enumerate() {
            let geom = self.member_geometry_from_coords(m, coords[a], coords[b])?;
            let q_on_a = internal_force(self.members[m].axial_stiffness, geom.strain(), geom.direction);
            residuals[a] = v_add(residuals[a], q_on_a);
            residuals[b] = v_sub(residuals[b], q_on_a);
        }
        Ok(residuals)
    }

    /// Assembled unbalance over the free DoFs only, in `u` order.
    pub fn unbalance_free(&self, candidate: &Candidate) -> Result<Vec<f64>, ModelError> {
        let residuals = self.all_node_unbalances(candidate)?;
        Ok(self
            .free_dofs
            .iter()
            .map(|&(i, axis)| residuals[i][axis])
            .collect())
    }

    /// Normalized global unbalance `F(u, λ)`; zero exactly at equilibrium.
    ///
    /// Both numerator and denominator run over free axes only — residuals on
    /// supports are reactions, not equilibrium violations.
    pub fn objective(&self, candidate: &Candidate) -> Result<f64, ModelError> {
        let r = self.unbalance_free(candidate)?;
        let num = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        Ok(num / self.variable_norm_free)
    }

    /// Evaluates an optimizer point `[u..., λ]`.
    pub fn objective_of_point(&self, point: &[f64]) -> Result<f64, ModelError> {
        if point.len() != self.n_free() + 1 {
            return Err(ModelError::DimensionMismatch {
                expected: self.n_free() + 1,
                got: point.len(),
            });
        }
        self.objective(&Candidate::from_point(point))
    }

    /// Scalar control point `d` of a candidate (mm).
    pub fn control_point(&self, candidate: &Candidate) -> Result<f64, ModelError> {
        self.check_candidate(candidate)?;
        match self.control {
            ControlPointSpec::NodeAxis { node, axis, sign } => {
                let flat = self
                    .dof_index(node, axis)
                    .expect("validated at construction");
                Ok(sign * candidate.u[flat])
            }
            ControlPointSpec::EuclideanNorm => {
                Ok(candidate.u.iter().map(|v| v * v).sum::<f64>().sqrt())
            }
        }
    }

    /// Total potential energy of a candidate state:
    ///
    /// ```text
    /// Π(u, λ) = Σ_p ½ k_p δ_p² L_p − Σ_k (f0_k + λ f_k) · u_k
    /// ```
    ///
    /// Its negative gradient with respect to the free displacements is the
    /// assembled unbalance, which is what makes minimizing `F` equivalent to
    /// finding stationary points of `Π` at fixed λ.
    pub fn potential_energy(&self, candidate: &Candidate) -> Result<f64, ModelError> {
        self.check_candidate(candidate)?;
        let coords = self.deformed_coordinates(candidate)?;
        let mut strain_energy = 0.0;
        for (m, &(a, b)) in self.member_nodes.iter().enumerate() {
            let geom = self.member_geometry_from_coords(m, coords[a], coords[b])?;
            let delta = geom.strain();
            strain_energy += 0.5 * self.members[m].axial_stiffness * delta * delta * geom.length0;
        }
        let mut work = 0.0;
        for (flat, &(i, axis)) in self.free_dofs.iter().enumerate() {
            let f = self.permanent[i][axis] + candidate.lambda * self.variable[i][axis];
            work += f * candidate.u[flat];
        }
        Ok(strain_energy - work)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    /// Two-bar von Mises arch in 3D: feet pinned at (±a, 0, 0), apex at
    /// (0, 0, h) free along z only, unit downward variable load P.
    fn two_bar(a: f64, h: f64, stiffness: f64, p: f64) -> TrussModel {
        TrussModel::new(
            vec![
                NodeSpec { id: 0, coords: [-a, 0.0, 0.0], fixed: [true; 3] },
                NodeSpec { id: 1, coords: [a, 0.0, 0.0], fixed: [true; 3] },
                NodeSpec { id: 2, coords: [0.0, 0.0, h], fixed: [true, true, false] },
            ],
            vec![
                MemberSpec { node_a: 0, node_b: 2, axial_stiffness: stiffness },
                MemberSpec { node_a: 1, node_b: 2, axial_stiffness: stiffness },
            ],
            vec![],
            vec![PointLoad { node: 2, force: [0.0, 0.0, -p] }],
            ControlPointSpec::NodeAxis { node: 2, axis: Axis::Z, sign: -1.0 },
        )
        .unwrap()
    }

    /// Octagonal cap: 8 fixed feet on a horizontal circle, loaded apex above
    /// the centre. Mirrors the shape used by the benchmark registry but with
    /// round numbers, so tests here stay self-contained.
    fn octagonal_cap(radius: f64, rise: f64, stiffness: f64, p: f64) -> TrussModel {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let ring = [
            (1.0, 0.0), (s, s), (0.0, 1.0), (-s, s),
            (-1.0, 0.0), (-s, -s), (0.0, -1.0), (s, -s),
        ];
        let mut nodes = vec![NodeSpec { id: 0, coords: [0.0, 0.0, rise], fixed: [false; 3] }];
        let mut members = Vec::new();
        for (k, (c, sn)) in ring.iter().enumerate() {
            nodes.push(NodeSpec {
                id: k + 1,
                coords: [radius * c, radius * sn, 0.0],
                fixed: [true; 3],
            });
            members.push(MemberSpec { node_a: 0, node_b: k + 1, axial_stiffness: stiffness });
        }
        TrussModel::new(
            nodes,
            members,
            vec![],
            vec![PointLoad { node: 0, force: [0.0, 0.0, -p] }],
            ControlPointSpec::NodeAxis { node: 0, axis: Axis::Z, sign: -1.0 },
        )
        .unwrap()
    }

    #[test]
    fn strain_is_zero_at_rest_and_signed_by_stretch() {
        assert_eq!(engineering_strain(100.0, 100.0), 0.0);
        assert_eq!(engineering_strain(100.0, 101.0), 101.0 / 100.0 - 1.0);
        assert!(engineering_strain(100.0, 99.0) < 0.0);
        assert!(engineering_strain(100.0, 101.0) > 0.0);
    }

    #[test]
    fn strain_antisymmetry_is_exact_for_dyadic_lengths() {
        // With L a power of two the divisions are exact, so the identity
        // δ(L, L+e) + δ(L, L−e) = 0 holds to the last bit.
        let l0 = 1024.0;
        for e in [1.0, 2.0, 64.0, 512.0] {
            assert_eq!(
                engineering_strain(l0, l0 + e) + engineering_strain(l0, l0 - e),
                0.0
            );
        }
        // For general lengths it holds to rounding.
        let l0 = 137.3;
        let e = 12.7;
        assert_abs_diff_eq!(
            engineering_strain(l0, l0 + e) + engineering_strain(l0, l0 - e),
            0.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn internal_force_scales_strain_along_direction() {
        let q = internal_force(1000.0, 0.01, [1.0, 0.0, 0.0]);
        assert_eq!(q, [10.0, 0.0, 0.0]);
        let q = internal_force(500.0, -0.02, [0.0, 0.6, 0.8]);
        assert_abs_diff_eq!(q[1], -6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(q[2], -8.0, epsilon = 1e-12);
    }

    #[test]
    fn undeformed_member_keeps_its_length_and_direction() {
        let model = two_bar(1000.0, 250.0, 5.0e4, 100.0);
        let rest = Candidate::undeformed(model.n_free());
        let geom = model.member_geometry(0, &rest).unwrap();
        let expected = (1000.0f64 * 1000.0 + 250.0 * 250.0).sqrt();
        assert_eq!(geom.length0, expected);
        assert_eq!(geom.length, geom.length0);
        assert_abs_diff_eq!(v_norm(geom.direction), 1.0, epsilon = 1e-15);
        assert_eq!(geom.strain(), 0.0);
    }

    #[test]
    fn mirror_state_has_identical_member_lengths() {
        // Dropping the apex by twice the rise mirrors the cap through the
        // base plane; every member recovers its undeformed length exactly.
        let model = octagonal_cap(12700.0, 1000.0, 451_500.0, 4450.0);
        let mirror = Candidate::new(vec![0.0, 0.0, -2000.0], 0.0);
        for m in 0..model.members().len() {
            let geom = model.member_geometry(m, &mirror).unwrap();
            assert_eq!(geom.length, geom.length0, "member {m}");
        }
        assert_eq!(model.objective(&mirror).unwrap(), 0.0);
    }

    #[test]
    fn unbalance_at_rest_is_pure_load() {
        let model = octagonal_cap(12700.0, 1000.0, 451_500.0, 4450.0);
        let rest = Candidate::undeformed(model.n_free());
        assert_eq!(model.node_unbalance(&rest, 0).unwrap(), [0.0, 0.0, 0.0]);

        let loaded = Candidate::new(vec![0.0; 3], 1.0);
        let r = model.node_unbalance(&loaded, 0).unwrap();
        assert_eq!(r, [0.0, 0.0, -4450.0]);
        // Unit multiplier at rest: numerator equals denominator exactly.
        assert_eq!(model.objective(&loaded).unwrap(), 1.0);
    }

    #[test]
    fn objective_is_proportional_to_lambda_at_rest() {
        let model = two_bar(1000.0, 250.0, 5.0e4, 100.0);
        for lambda in [-2.0, -0.3, 0.17, 5.0] {
            let c = Candidate::new(vec![0.0], lambda);
            assert_relative_eq!(
                model.objective(&c).unwrap(),
                lambda.abs(),
                max_relative = 1e-15
            );
        }
    }

    #[test]
    fn support_reactions_are_reported_but_never_scored() {
        // Compress the arch: feet see reactions, but the objective only
        // reads the apex's free axis.
        let model = two_bar(1000.0, 250.0, 5.0e4, 100.0);
        let c = Candidate::new(vec![-100.0], 0.0);
        let foot = model.node_unbalance(&c, 0).unwrap();
        assert!(v_norm(foot) > 0.0, "feet must carry reactions");
        let apex = model.node_unbalance(&c, 2).unwrap();
        let free_residual = model.unbalance_free(&c).unwrap();
        assert_eq!(free_residual, vec![apex[2]]);
    }

    #[test]
    fn two_bar_equilibrium_matches_closed_form() {
        // λ(d) = −(2k/P) · δ(d) · (h−d)/l(d) keeps the apex balanced; the
        // objective must vanish along that whole curve, through snap-through.
        let (a, h, k, p) = (1000.0, 250.0, 5.0e4, 100.0);
        let model = two_bar(a, h, k, p);
        let length0 = (a * a + h * h).sqrt();
        for i in 0..=40 {
            let d = 2.0 * h * (i as f64) / 40.0;
            let l = (a * a + (h - d) * (h - d)).sqrt();
            let lambda = -(2.0 * k / p) * (l / length0 - 1.0) * (h - d) / l;
            let c = Candidate::new(vec![-d], lambda);
            assert!(
                model.objective(&c).unwrap() < 1e-12,
                "objective off the curve at d = {d}"
            );
        }
    }

    #[test]
    fn control_point_reads_signed_axis_and_norm() {
        let model = two_bar(1000.0, 250.0, 5.0e4, 100.0);
        let c = Candidate::new(vec![-75.0], 0.3);
        assert_eq!(model.control_point(&c).unwrap(), 75.0);

        let norm_model = TrussModel::new(
            vec![
                NodeSpec { id: 0, coords: [0.0, 0.0, 0.0], fixed: [true; 3] },
                NodeSpec { id: 1, coords: [100.0, 0.0, 0.0], fixed: [false, false, true] },
            ],
            vec![MemberSpec { node_a: 0, node_b: 1, axial_stiffness: 10.0 }],
            vec![],
            vec![PointLoad { node: 1, force: [1.0, 0.0, 0.0] }],
            ControlPointSpec::EuclideanNorm,
        )
        .unwrap();
        let c = Candidate::new(vec![3.0, 4.0], 0.0);
        assert_eq!(norm_model.control_point(&c).unwrap(), 5.0);
    }

    #[test]
    fn potential_energy_is_zero_at_rest_for_any_lambda() {
        let model = octagonal_cap(12700.0, 1000.0, 451_500.0, 4450.0);
        for lambda in [0.0, -0.2, 1.0] {
            let c = Candidate::new(vec![0.0; 3], lambda);
            assert_eq!(model.potential_energy(&c).unwrap(), 0.0);
        }
    }

    /// Central-difference gradient of Π must reproduce the assembled
    /// unbalance: R = −∂Π/∂u. This is the independent oracle for the whole
    /// force assembly.
    fn assert_gradient_consistency(model: &TrussModel, candidate: &Candidate) {
        let r = model.unbalance_free(candidate).unwrap();
        let mut grad = vec![0.0; model.n_free()];
        for i in 0..model.n_free() {
            let h = 1e-4 * candidate.u[i].abs().max(1.0);
            let mut plus = candidate.clone();
            plus.u[i] += h;
            let mut minus = candidate.clone();
            minus.u[i] -= h;
            grad[i] = (model.potential_energy(&plus).unwrap()
                - model.potential_energy(&minus).unwrap())
                / (2.0 * h);
        }
        let err: f64 = r
            .iter()
            .zip(&grad)
            .map(|(ri, gi)| (ri + gi) * (ri + gi))
            .sum::<f64>()
            .sqrt();
        let scale = r.iter().map(|v| v * v).sum::<f64>().sqrt().max(1.0);
        assert!(
            err / scale < 1e-6,
            "gradient mismatch: |R + ∂Π/∂u| = {err}, |R| = {scale}"
        );
    }

    #[test]
    fn unbalance_is_negative_gradient_of_potential() {
        let model = octagonal_cap(12700.0, 1000.0, 451_500.0, 4450.0);
        let mut state = 0x9e3779b9u64;
        let mut next = move || {
            // Small deterministic LCG keeps this oracle dependency-free.
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        for _ in 0..25 {
            let u: Vec<f64> = (0..model.n_free()).map(|_| 40.0 * next()).collect();
            let c = Candidate::new(u, 0.8 * next());
            assert_gradient_consistency(&model, &c);
        }
    }

    #[test]
    fn degenerate_member_is_an_error_not_infinity() {
        // Slide the free end of a single bar onto its support.
        let model = TrussModel::new(
            vec![
                NodeSpec { id: 0, coords: [0.0, 0.0, 0.0], fixed: [true; 3] },
                NodeSpec { id: 1, coords: [100.0, 0.0, 0.0], fixed: [false, true, true] },
            ],
            vec![MemberSpec { node_a: 0, node_b: 1, axial_stiffness: 10.0 }],
            vec![],
            vec![PointLoad { node: 1, force: [1.0, 0.0, 0.0] }],
            ControlPointSpec::EuclideanNorm,
        )
        .unwrap();
        let collapsed = Candidate::new(vec![-100.0], 0.0);
        match model.objective(&collapsed) {
            Err(ModelError::DegenerateMember { index: 0, .. }) => {}
            other => panic!("expected DegenerateMember, got {other:?}"),
        }
    }

    #[test]
    fn deformed_coordinates_leave_fixed_axes_alone() {
        let model = two_bar(1000.0, 250.0, 5.0e4, 100.0);
        let c = Candidate::new(vec![-500.0], 0.0);
        let coords = model.deformed_coordinates(&c).unwrap();
        assert_eq!(coords[0], [-1000.0, 0.0, 0.0]);
        assert_eq!(coords[1], [1000.0, 0.0, 0.0]);
        assert_eq!(coords[2], [0.0, 0.0, -250.0]);
    }

    #[test]
    fn objective_is_invariant_under_rigid_translation_of_the_frame() {
        let model = octagonal_cap(12700.0, 1000.0, 451_500.0, 4450.0);
        let shifted = {
            let mut nodes: Vec<NodeSpec> = model.nodes().to_vec();
            for n in &mut nodes {
                n.coords = v_add(n.coords, [312.5, -87.25, 44.0]);
            }
            TrussModel::new(
                nodes,
                model.members().to_vec(),
                vec![],
                vec![PointLoad { node: 0, force: [0.0, 0.0, -4450.0] }],
                model.control().clone(),
            )
            .unwrap()
        };
        let c = Candidate::new(vec![12.0, -35.0, -480.0], 0.04);
        assert_relative_eq!(
            model.objective(&c).unwrap(),
            shifted.objective(&c).unwrap(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn validation_rejects_malformed_models() {
        let node = |id, coords, fixed| NodeSpec { id, coords, fixed };
        let bar = |a, b| MemberSpec { node_a: a, node_b: b, axial_stiffness: 1.0 };
        let load = PointLoad { node: 1, force: [1.0, 0.0, 0.0] };
        let free = [false, true, true];
        let control = ControlPointSpec::EuclideanNorm;

        // Member pointing at a missing node.
        let err = TrussModel::new(
            vec![node(0, [0.0; 3], [true; 3]), node(1, [1.0, 0.0, 0.0], free)],
            vec![bar(0, 7)],
            vec![],
            vec![load.clone()],
            control.clone(),
        )
        .unwrap_err();
        assert_eq!(err, ModelError::UnknownNode { index: 0, node: 7 });

        // Self-loop.
        let err = TrussModel::new(
            vec![node(0, [0.0; 3], [true; 3]), node(1, [1.0, 0.0, 0.0], free)],
            vec![bar(1, 1)],
            vec![],
            vec![load.clone()],
            control.clone(),
        )
        .unwrap_err();
        assert_eq!(err, ModelError::SelfLoop { index: 0, node: 1 });

        // Coincident end nodes.
        let err = TrussModel::new(
            vec![node(0, [0.0; 3], [true; 3]), node(1, [0.0; 3], free)],
            vec![bar(0, 1)],
            vec![],
            vec![load.clone()],
            control.clone(),
        )
        .unwrap_err();
        assert!(matches!(err, ModelError::ZeroLengthMember { index: 0, .. }));

        // Variable load living only on fixed axes.
        let err = TrussModel::new(
            vec![node(0, [0.0; 3], [true; 3]), node(1, [1.0, 0.0, 0.0], free)],
            vec![bar(0, 1)],
            vec![],
            vec![PointLoad { node: 1, force: [0.0, 1.0, 0.0] }],
            control.clone(),
        )
        .unwrap_err();
        assert_eq!(err, ModelError::ZeroVariableLoad);

        // Control point on a fixed axis.
        let err = TrussModel::new(
            vec![node(0, [0.0; 3], [true; 3]), node(1, [1.0, 0.0, 0.0], free)],
            vec![bar(0, 1)],
            vec![],
            vec![load.clone()],
            ControlPointSpec::NodeAxis { node: 1, axis: Axis::Y, sign: 1.0 },
        )
        .unwrap_err();
        assert_eq!(err, ModelError::ControlOnFixedAxis { node: 1, axis: Axis::Y });

        // Candidate of the wrong dimension.
        let model = TrussModel::new(
            vec![node(0, [0.0; 3], [true; 3]), node(1, [1.0, 0.0, 0.0], free)],
            vec![bar(0, 1)],
            vec![],
            vec![load],
            control,
        )
        .unwrap();
        let err = model.objective(&Candidate::new(vec![0.0, 0.0], 0.0)).unwrap_err();
        assert_eq!(err, ModelError::DimensionMismatch { expected: 1, got: 2 });
    }
}

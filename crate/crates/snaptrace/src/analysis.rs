//! Post-processing of solution clouds: density-based clustering of accepted
//! equilibrium points in the load-displacement plane, and aggregate
//! convergence statistics over batches of optimizer runs.
//!
//! Clustering distance is Euclidean in `(d, λ·s_λ)` with
//! [`CLUSTER_LAMBDA_SCALE`] making one unit of load multiplier commensurate
//! with 100 mm of control-point displacement. All functions here are pure.

use crate::optim::RunRecord;

/// λ scale for clustering distance: one unit of λ counts as this many mm.
pub const CLUSTER_LAMBDA_SCALE: f64 = 100.0;

/// Default neighborhood radius (mm-equivalent) for CLI clustering.
pub const DEFAULT_DBSCAN_EPS: f64 = 10.0;

/// Default core-point neighbor count (self-inclusive) for CLI clustering.
pub const DEFAULT_DBSCAN_MIN_PTS: usize = 3;

/// An accepted solution projected into the load-displacement plane.
#[derive(Debug, Clone, PartialEq)]
pub struct PathPoint {
    /// Control-point displacement, mm.
    pub d: f64,
    /// Load multiplier.
    pub lambda: f64,
    /// Normalized unbalanced-force objective at the solution.
    pub objective: f64,
    /// Identifier of the run that produced the point.
    pub run_id: usize,
}

/// Density-based cluster labels for a set of [`PathPoint`]s.
///
/// Distance is Euclidean in `(d, λ·CLUSTER_LAMBDA_SCALE)`. Labels are
/// contiguous from 0; `-1` marks noise. See [`dbscan_coords`] for the
/// labeling rules.
pub fn dbscan(points: &[PathPoint], eps: f64, min_pts: usize) -> Vec<i64> {
    let coords: Vec<[f64; 2]> = points
        .iter()
        .map(|p| [p.d, p.lambda * CLUSTER_LAMBDA_SCALE])
        .collect();
    dbscan_coords(&coords, eps, min_pts)
}

/// DBSCAN over raw plane coordinates.
///
/// A point is *core* when at least `min_pts` points (itself included) lie
/// within `eps` (inclusive). Clusters are the density-connected components
/// of the core points; border points (non-core within `eps` of a core) join
/// the lowest-labeled reachable cluster; remaining points are noise (`-1`).
///
/// Labels are assigned canonically — clusters are numbered by the
/// lexicographically smallest coordinate pair among their core points — so
/// the labeling is invariant to input order up to the identity permutation.
pub fn dbscan_coords(coords: &[[f64; 2]], eps: f64, min_pts: usize) -> Vec<i64> {
    assert!(eps > 0.0 && eps.is_finite(), "dbscan eps must be positive");
    assert!(min_pts >= 1, "dbscan min_pts must be at least 1");
    assert!(
        coords.iter().all(|c| c[0].is_finite() && c[1].is_finite()),
        "dbscan coordinates must be finite"
    );
    let n = coords.len();
    if n == 0 {
        return Vec::new();
    }
    let eps2 = eps * eps;
    let within = |i: usize, j: usize| {
        let dx = coords[i][0] - coords[j][0];
        let dy = coords[i][1] - coords[j][1];
        dx * dx + dy * dy <= eps2
    };

    let core: Vec<bool> = (0..n)
        .map(|i| (0..n).filter(|&j| within(i, j)).count() >= min_pts)
        .collect();

    // Density-connected components of the core points (union-find).
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        if !core[i] {
            continue;
        }
        for j in i + 1..n {
            if core[j] && within(i, j) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }

    // Canonical cluster order: by the lexicographically smallest core
    // coordinate pair in each component.
    let mut root_key: Vec<(usize, [f64; 2])> = Vec::new();
    for i in 0..n {
        if !core[i] {
            continue;
        }
        let root = find(&mut parent, i);
        match root_key.iter_mut().find(|(r, _)| *r == root) {
            Some((_, key)) => {
                if (coords[i][0], coords[i][1]) < (key[0], key[1]) {
                    *key = coords[i];
                }
            }
            None => root_key.push((root, coords[i])),
        }
    }
    root_key.sort_by(|a, b| (a.1[0], a.1[1]).partial_cmp(&(b.1[0], b.1[1])).unwrap());
    let label_of_root = |root: usize| -> i64 {
        root_key.iter().position(|(r, _)| *r == root).unwrap() as i64
    };

    let mut labels = vec![-1i64; n];
    for i in 0..n {
        if core[i] {
            let root = find(&mut parent, i);
            labels[i] = label_of_root(root);
        }
    }
    // Border points: lowest reachable cluster label.
    for i in 0..n {
        if core[i] {
            continue;
        }
        let mut best: Option<i64> = None;
        for j in 0..n {
            if core[j] && within(i, j) {
                let l = labels[j];
                best = Some(best.map_or(l, |b: i64| b.min(l)));
            }
        }
        if let Some(l) = best {
            labels[i] = l;
        }
    }
    labels
}

/// Per-generation statistics of the best-objective history across runs.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfilePoint {
    pub generation: usize,
    /// Mean best objective across runs at this generation.
    pub mean: f64,
    /// Population standard deviation across runs at this generation.
    pub std: f64,
    /// Number of runs whose history natively covers this generation.
    pub n: usize,
}

/// Aligns ragged best-objective histories by generation index and returns
/// mean, population standard deviation, and native-coverage count per
/// generation. Histories shorter than the longest are extended with their
/// final value, so every run contributes to every generation.
pub fn convergence_profile(records: &[RunRecord]) -> Vec<ProfilePoint> {
    let refs: Vec<&RunRecord> = records.iter().collect();
    profile_of(&refs)
}

/// [`convergence_profile`] restricted to runs whose final best objective is
/// below `max_final`, filtering out runs that never converged.
/// Returns an empty profile when no run passes the filter.
pub fn convergence_profile_filtered(records: &[RunRecord], max_final: f64) -> Vec<ProfilePoint> {
    let refs: Vec<&RunRecord> = records
        .iter()
        .filter(|r| final_objective(r) < max_final)
        .collect();
    if refs.is_empty() {
        return Vec::new();
    }
    profile_of(&refs)
}

fn profile_of(records: &[&RunRecord]) -> Vec<ProfilePoint> {
    assert!(!records.is_empty(), "convergence_profile needs at least one record");
    assert!(
        records.iter().all(|r| !r.history.is_empty()),
        "every record must carry a non-empty history"
    );
    let len = records.iter().map(|r| r.history.len()).max().unwrap();
    (0..len)
        .map(|g| {
            let values: Vec<f64> = records
                .iter()
                .map(|r| r.history.get(g).copied().unwrap_or(*r.history.last().unwrap()))
                .collect();
            let n_native = records.iter().filter(|r| r.history.len() > g).count();
            let mean = values.iter().sum::<f64>() / values.len() as f64;
            let var =
                values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / values.len() as f64;
            ProfilePoint { generation: g, mean, std: var.sqrt(), n: n_native }
        })
        .collect()
}

/// Success statistics for a batch of runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuccessRate {
    pub converged: usize,
    pub total: usize,
    pub fraction: f64,
}

/// Fraction of runs whose final best objective is strictly below `tol`.
pub fn success_rate(records: &[RunRecord], tol: f64) -> SuccessRate {
    let total = records.len();
    let converged = records.iter().filter(|r| final_objective(r) < tol).count();
    let fraction = if total == 0 { 0.0 } else { converged as f64 / total as f64 };
    SuccessRate { converged, total, fraction }
}

fn final_objective(record: &RunRecord) -> f64 {
    record
        .best
        .objective
        .unwrap_or_else(|| record.history.last().copied().unwrap_or(f64::INFINITY))
}

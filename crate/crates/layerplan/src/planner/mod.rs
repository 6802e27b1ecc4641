//! Batched shortest paths through the layered graph.
//!
//! Planning proceeds in three stages that all operate on the whole batch
//! at once: score every edge ([`build_cost_matrices`]), run a fixed
//! number of value-iteration sweeps ([`value_iteration`]), then walk the
//! greedy path per batch entry ([`trace_path`]). Sweeps update layers
//! back to front in place, so the cost-to-go tables converge within the
//! scheduled `M + 1` sweeps and one extra sweep reproduces them exactly.
//!
//! Infinite costs use IEEE semantics throughout: `inf + x = inf`,
//! minima prefer finite entries, and an all-infinite row selects index 0.
//! An infeasible entry (no finite start value) still traces a path so
//! callers can inspect it, flagged `feasible = false`.

mod json;
mod oracle;

pub use oracle::{dijkstra_oracle, OraclePath};

use crate::akima::SplinePath;
use crate::graph::{sample_waypoints, GoalSet, PlannerParams, WaypointTensor};
use crate::space::World;
use crate::{Error, Result};
use ndarray::parallel::prelude::*;
use ndarray::{Array1, Array2, Array3, Array4, Axis};

/// Edge costs of the batched layered graph.
///
/// `hidden[[b, m, i, j]]` scores the edge from waypoint `i` of layer `m`
/// to waypoint `j` of layer `m + 1`; the slab is empty when `M = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrices {
    /// `(B, N)`: start to layer 0.
    pub start: Array2<f64>,
    /// `(B, M-1, N, N)`: consecutive layers.
    pub hidden: Array4<f64>,
    /// `(B, N, G)`: last layer to goals.
    pub goal: Array3<f64>,
}

impl CostMatrices {
    pub fn batch(&self) -> usize {
        self.start.nrows()
    }

    pub fn layers(&self) -> usize {
        self.hidden.shape()[1] + 1
    }

    pub fn waypoints(&self) -> usize {
        self.start.ncols()
    }

    pub fn goals(&self) -> usize {
        self.goal.shape()[2]
    }
}

/// Cost-to-go tables produced by value iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueMatrices {
    /// `(B)`: optimal start value per batch entry.
    pub start: Array1<f64>,
    /// `(B, M, N)`: cost-to-go from each waypoint.
    pub hidden: Array3<f64>,
    /// `(B, G)`: terminal cost per goal.
    pub goal: Array2<f64>,
}

/// Traced plans for a whole batch.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanResult {
    /// One `(M + 2, d)` polyline per batch entry: start, M waypoints, goal.
    pub paths: Vec<Array2<f64>>,
    /// Optimal start values; `+inf` marks an infeasible entry.
    pub optimal_values: Array1<f64>,
    /// `optimal_values[b] < inf`, per entry.
    pub feasible: Vec<bool>,
    /// Chosen goal index per entry.
    pub goal_index: Vec<usize>,
    /// Chosen waypoint index per layer and entry.
    pub layer_indices: Vec<Vec<usize>>,
    /// Cubic edge coefficients per entry when planned with splines.
    pub splines: Option<Vec<SplinePath>>,
}

/// True when a start value marks a feasible plan.
#[inline]
pub fn is_feasible(optimal_value: f64) -> bool {
    optimal_value < f64::INFINITY
}

/// Score every edge of the batched graph by straight-segment probing.
pub fn build_cost_matrices(
    world: &World,
    start: &[f64],
    waypoints: &WaypointTensor,
    goals: &GoalSet,
    probes: usize,
) -> Result<CostMatrices> {
    let d = world.dim();
    if start.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: start.len() });
    }
    if waypoints.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: waypoints.dim() });
    }
    if goals.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: goals.dim() });
    }
    if probes < 2 {
        return Err(Error::InvalidParameter(format!("probe count must be >= 2, got {probes}")));
    }

    let (bsz, m_layers, n) = (waypoints.batch(), waypoints.layers(), waypoints.waypoints());
    let g = goals.len();

    let mut c_start = Array2::zeros((bsz, n));
    c_start.axis_iter_mut(Axis(0)).into_par_iter().enumerate().for_each(|(b, mut row)| {
        for j in 0..n {
            row[j] = segment_cost(world, start, waypoints.point(b, 0, j), probes);
        }
    });

    let mut c_hidden = Array4::zeros((bsz, m_layers - 1, n, n));
    c_hidden.axis_iter_mut(Axis(0)).into_par_iter().enumerate().for_each(|(b, mut slab)| {
        for m in 0..m_layers - 1 {
            for i in 0..n {
                let from = waypoints.point(b, m, i);
                for j in 0..n {
                    slab[[m, i, j]] = segment_cost(world, from, waypoints.point(b, m + 1, j), probes);
                }
            }
        }
    });

    let mut c_goal = Array3::zeros((bsz, n, g));
    c_goal.axis_iter_mut(Axis(0)).into_par_iter().enumerate().for_each(|(b, mut slab)| {
        for i in 0..n {
            let from = waypoints.point(b, m_layers - 1, i);
            for k in 0..g {
                slab[[i, k]] = segment_cost(world, from, goals.point(k), probes);
            }
        }
    });

    Ok(CostMatrices { start: c_start, hidden: c_hidden, goal: c_goal })
}

#[inline]
fn segment_cost(world: &World, a: &[f64], b: &[f64], probes: usize) -> f64 {
    if world.segment_is_free(a, b, probes) {
        crate::space::euclidean(a, b)
    } else {
        f64::INFINITY
    }
}

/// Run `M + 1` in-place back-to-front sweeps and return the converged
/// cost-to-go tables.
pub fn value_iteration(costs: &CostMatrices, goals: &GoalSet) -> ValueMatrices {
    let (bsz, m_layers, n) = (costs.batch(), costs.layers(), costs.waypoints());
    let g = costs.goals();
    let v_goal =
        Array2::from_shape_fn((bsz, g), |(_, k)| goals.terminal_costs()[k]);

    let mut v_hidden = Array3::from_elem((bsz, m_layers, n), f64::INFINITY);
    let start_values: Vec<f64> = v_hidden
        .axis_iter_mut(Axis(0))
        .into_par_iter()
        .enumerate()
        .map(|(b, mut vh)| {
            let vg = v_goal.row(b);
            let mut scratch = vec![0.0f64; n];
            let mut vs = f64::INFINITY;
            for _ in 0..m_layers + 1 {
                vs = sweep_entry(costs, b, vg.as_slice().unwrap(), &mut vh, &mut scratch);
            }
            vs
        })
        .collect();

    ValueMatrices { start: Array1::from_vec(start_values), hidden: v_hidden, goal: v_goal }
}

/// Apply one additional back-to-front sweep to existing tables.
///
/// After [`value_iteration`] this is a fixpoint operation: it recomputes
/// every entry to the identical bit pattern.
pub fn bellman_sweep(costs: &CostMatrices, values: &mut ValueMatrices) {
    let n = costs.waypoints();
    let mut scratch = vec![0.0f64; n];
    for b in 0..costs.batch() {
        let vg: Vec<f64> = values.goal.row(b).to_vec();
        let mut vh = values.hidden.index_axis_mut(Axis(0), b);
        values.start[b] = sweep_entry(costs, b, &vg, &mut vh, &mut scratch);
    }
}

/// One back-to-front sweep for a single batch entry; returns the start value.
fn sweep_entry(
    costs: &CostMatrices,
    b: usize,
    v_goal: &[f64],
    v_hidden: &mut ndarray::ArrayViewMut2<'_, f64>,
    scratch: &mut [f64],
) -> f64 {
    let (m_layers, n) = v_hidden.dim();
    let g = costs.goals();

    let goal_flat = costs.goal.as_slice().expect("standard layout");
    let last = m_layers - 1;
    for i in 0..n {
        let row = &goal_flat[(b * n + i) * g..(b * n + i + 1) * g];
        let mut best = f64::INFINITY;
        for (k, c) in row.iter().enumerate() {
            let cand = c + v_goal[k];
            if cand < best {
                best = cand;
            }
        }
        v_hidden[[last, i]] = best;
    }

    if m_layers > 1 {
        let hidden_flat = costs.hidden.as_slice().expect("standard layout");
        for m in (0..m_layers - 1).rev() {
            for (j, s) in scratch.iter_mut().enumerate() {
                *s = v_hidden[[m + 1, j]];
            }
            for i in 0..n {
                let base = ((b * (m_layers - 1) + m) * n + i) * n;
                let row = &hidden_flat[base..base + n];
                let mut best = f64::INFINITY;
                for (j, c) in row.iter().enumerate() {
                    let cand = c + scratch[j];
                    if cand < best {
                        best = cand;
                    }
                }
                v_hidden[[m, i]] = best;
            }
        }
    }

    let mut vs = f64::INFINITY;
    for i in 0..n {
        let cand = costs.start[[b, i]] + v_hidden[[0, i]];
        if cand < vs {
            vs = cand;
        }
    }
    vs
}

/// Index of the smallest value; ties resolve to the lowest index, and an
/// all-infinite sequence yields index 0.
#[inline]
fn argmin(values: impl Iterator<Item = f64>) -> (usize, f64) {
    let mut best = f64::INFINITY;
    let mut best_idx = 0usize;
    for (idx, v) in values.enumerate() {
        if v < best {
            best = v;
            best_idx = idx;
        }
    }
    (best_idx, best)
}

/// Greedily extract one path per batch entry from converged tables.
///
/// Every path has exactly `M + 2` nodes. Entries with an infinite start
/// value are traced anyway and flagged infeasible.
pub fn trace_path(
    costs: &CostMatrices,
    values: &ValueMatrices,
    start: &[f64],
    waypoints: &WaypointTensor,
    goals: &GoalSet,
) -> PlanResult {
    let (bsz, m_layers, n) = (costs.batch(), costs.layers(), costs.waypoints());
    let g = costs.goals();
    let d = waypoints.dim();

    let mut paths = Vec::with_capacity(bsz);
    let mut goal_index = Vec::with_capacity(bsz);
    let mut layer_indices = Vec::with_capacity(bsz);
    let mut feasible = Vec::with_capacity(bsz);

    for b in 0..bsz {
        let (i0, _) = argmin((0..n).map(|i| costs.start[[b, i]] + values.hidden[[b, 0, i]]));
        let mut chosen = vec![i0];
        for m in 1..m_layers {
            let prev = chosen[m - 1];
            let (im, _) = argmin(
                (0..n).map(|j| costs.hidden[[b, m - 1, prev, j]] + values.hidden[[b, m, j]]),
            );
            chosen.push(im);
        }
        let last = chosen[m_layers - 1];
        let (gi, _) = argmin((0..g).map(|k| costs.goal[[b, last, k]] + values.goal[[b, k]]));

        let mut path = Array2::zeros((m_layers + 2, d));
        path.row_mut(0).assign(&ndarray::ArrayView1::from(start));
        for (m, &i) in chosen.iter().enumerate() {
            path.row_mut(m + 1).assign(&ndarray::ArrayView1::from(waypoints.point(b, m, i)));
        }
        path.row_mut(m_layers + 1).assign(&ndarray::ArrayView1::from(goals.point(gi)));

        let entry_feasible = is_feasible(values.start[b]);
        if entry_feasible {
            // The traced edge costs must telescope to the start value,
            // bit for bit, when accumulated in sweep order.
            let mut acc = values.goal[[b, gi]];
            acc = costs.goal[[b, last, gi]] + acc;
            for m in (1..m_layers).rev() {
                acc = costs.hidden[[b, m - 1, chosen[m - 1], chosen[m]]] + acc;
            }
            acc = costs.start[[b, i0]] + acc;
            debug_assert!(
                acc == values.start[b],
                "traced cost {acc} disagrees with start value {} in entry {b}",
                values.start[b]
            );
        }

        paths.push(path);
        goal_index.push(gi);
        layer_indices.push(chosen);
        feasible.push(entry_feasible);
    }

    PlanResult {
        paths,
        optimal_values: values.start.clone(),
        feasible,
        goal_index,
        layer_indices,
        splines: None,
    }
}

/// Sample, score, solve and trace a whole batch with straight edges.
pub fn plan(
    world: &World,
    start: &[f64],
    goals: &GoalSet,
    params: &PlannerParams,
) -> Result<PlanResult> {
    params.validate()?;
    if world.collision_cost(start)? > 0.0 {
        return Err(Error::StartInCollision);
    }
    let mut any_goal_free = false;
    for k in 0..goals.len() {
        if world.collision_cost(goals.point(k))? == 0.0 {
            any_goal_free = true;
            break;
        }
    }
    if !any_goal_free {
        return Err(Error::GoalsInCollision);
    }

    let waypoints = sample_waypoints(params, world.limits())?;
    let costs = build_cost_matrices(world, start, &waypoints, goals, params.probes)?;
    let values = value_iteration(&costs, goals);
    Ok(trace_path(&costs, &values, start, &waypoints, goals))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{ConfigLimits, Geometry, OccupancyGrid, PrimitiveSet, Sphere};
    use ndarray::array;

    fn free_world() -> World {
        World::empty(ConfigLimits::new(vec![0.0, 0.0], vec![10.0, 10.0]).unwrap())
    }

    fn sphere_world() -> World {
        let limits = ConfigLimits::new(vec![0.0, 0.0], vec![10.0, 10.0]).unwrap();
        let prims =
            PrimitiveSet::new(vec![Sphere::new(vec![5.0, 5.0], 1.5).unwrap()], vec![]).unwrap();
        World::new(limits, Geometry::Primitives(prims), 0.0).unwrap()
    }

    /// Hand-built tensor: one batch entry, given layers of points.
    fn tensor_from(layers: &[&[[f64; 2]]]) -> WaypointTensor {
        let m = layers.len();
        let n = layers[0].len();
        let mut values = ndarray::Array4::zeros((1, m, n, 2));
        for (mi, layer) in layers.iter().enumerate() {
            for (ni, p) in layer.iter().enumerate() {
                values[[0, mi, ni, 0]] = p[0];
                values[[0, mi, ni, 1]] = p[1];
            }
        }
        WaypointTensor::new(values)
    }

    #[test]
    fn single_waypoint_chain_costs() {
        // start (0,0) -> waypoint (3,4) -> goal (3,10): lengths 5 and 6.
        let world = free_world();
        let tensor = tensor_from(&[&[[3.0, 4.0]]]);
        let goals = GoalSet::from_points(array![[3.0, 10.0]]).unwrap();
        let costs = build_cost_matrices(&world, &[0.0, 0.0], &tensor, &goals, 10).unwrap();
        assert_eq!(costs.start, array![[5.0]]);
        assert_eq!(costs.hidden.shape(), &[1, 0, 1, 1]);
        assert_eq!(costs.goal[[0, 0, 0]], 6.0);

        let values = value_iteration(&costs, &goals);
        assert_eq!(values.start[0], 11.0);
        let result = trace_path(&costs, &values, &[0.0, 0.0], &tensor, &goals);
        assert!(result.feasible[0]);
        assert_eq!(result.paths[0].nrows(), 3);
        assert_eq!(result.paths[0].row(1), array![3.0, 4.0].view());
    }

    #[test]
    fn blocked_waypoint_gets_infinite_edges() {
        // Waypoint inside the sphere: all incident edges infinite.
        let world = sphere_world();
        let tensor = tensor_from(&[&[[5.0, 5.0], [1.0, 1.0]], &[[1.0, 8.0], [9.0, 9.0]]]);
        let goals = GoalSet::from_points(array![[0.5, 9.5]]).unwrap();
        let costs = build_cost_matrices(&world, &[0.5, 0.5], &tensor, &goals, 10).unwrap();
        assert!(costs.start[[0, 0]].is_infinite());
        assert!(costs.start[[0, 1]].is_finite());
        assert!(costs.hidden[[0, 0, 0, 0]].is_infinite());
        assert!(costs.hidden[[0, 0, 0, 1]].is_infinite());
    }

    #[test]
    fn value_iteration_three_layer_chain() {
        // Three layers of one waypoint each on a straight line; segment
        // lengths 1+2+3+4 = 10.
        let world = free_world();
        let tensor = tensor_from(&[&[[1.0, 0.0]], &[[3.0, 0.0]], &[[6.0, 0.0]]]);
        let goals = GoalSet::from_points(array![[10.0, 0.0]]).unwrap();
        let costs = build_cost_matrices(&world, &[0.0, 0.0], &tensor, &goals, 5).unwrap();
        let values = value_iteration(&costs, &goals);
        assert_eq!(values.start[0], 10.0);
        assert_eq!(values.hidden[[0, 2, 0]], 4.0);
        assert_eq!(values.hidden[[0, 1, 0]], 7.0);
        assert_eq!(values.hidden[[0, 0, 0]], 9.0);
    }

    #[test]
    fn terminal_costs_shift_goal_choice() {
        // Two goals: nearer one carries a large terminal cost, so the
        // planner pays for the farther one.
        let world = free_world();
        let tensor = tensor_from(&[&[[5.0, 5.0]]]);
        let goals = GoalSet::new(array![[5.0, 6.0], [5.0, 9.0]], array![10.0, 0.0]).unwrap();
        let costs = build_cost_matrices(&world, &[5.0, 0.0], &tensor, &goals, 10).unwrap();
        let values = value_iteration(&costs, &goals);
        let result = trace_path(&costs, &values, &[5.0, 0.0], &tensor, &goals);
        assert_eq!(result.goal_index[0], 1);
        assert_eq!(values.start[0], 5.0 + 4.0);
    }

    #[test]
    fn fixpoint_extra_sweep_is_identity() {
        let world = sphere_world();
        let goals = GoalSet::from_points(array![[9.0, 9.0], [0.5, 9.0]]).unwrap();
        let params = PlannerParams::new(3, 6, 8, 4, 99);
        let tensor = sample_waypoints(&params, world.limits()).unwrap();
        let costs = build_cost_matrices(&world, &[0.5, 0.5], &tensor, &goals, 8).unwrap();
        let values = value_iteration(&costs, &goals);
        let mut again = values.clone();
        bellman_sweep(&costs, &mut again);
        assert_eq!(values, again);
    }

    #[test]
    fn argmin_prefers_lowest_index_on_ties() {
        assert_eq!(argmin([2.0, 1.0, 1.0, 3.0].into_iter()), (1, 1.0));
        assert_eq!(argmin([f64::INFINITY, f64::INFINITY].into_iter()), (0, f64::INFINITY));
    }

    #[test]
    fn tie_between_symmetric_waypoints_picks_lowest_index() {
        // Two mirror-image waypoints produce exactly equal path costs.
        let world = free_world();
        let tensor = tensor_from(&[&[[5.0, 6.0], [5.0, 4.0]]]);
        let goals = GoalSet::from_points(array![[10.0, 5.0]]).unwrap();
        let costs = build_cost_matrices(&world, &[0.0, 5.0], &tensor, &goals, 5).unwrap();
        let values = value_iteration(&costs, &goals);
        let result = trace_path(&costs, &values, &[0.0, 5.0], &tensor, &goals);
        assert_eq!(result.layer_indices[0], vec![0]);
    }

    #[test]
    fn infeasible_entry_still_traces() {
        // Start is boxed in by the margin: no waypoint connects to it.
        let limits = ConfigLimits::new(vec![0.0, 0.0], vec![4.0, 4.0]).unwrap();
        let mut cells = ndarray::Array2::from_elem((4, 4), false);
        cells[[1, 1]] = false;
        // Wall of occupied cells separating left and right halves.
        for r in 0..4 {
            cells[[r, 2]] = true;
        }
        let grid = OccupancyGrid::new(cells, [0.0, 0.0], 1.0).unwrap();
        let world = World::new(limits, Geometry::Grid(grid), 0.0).unwrap();
        let goals = GoalSet::from_points(array![[3.5, 3.5]]).unwrap();
        let params = PlannerParams::new(2, 4, 16, 3, 5);
        let result = plan(&world, &[0.5, 0.5], &goals, &params).unwrap();
        for b in 0..3 {
            assert!(!result.feasible[b]);
            assert!(result.optimal_values[b].is_infinite());
            assert_eq!(result.paths[b].nrows(), 4);
        }
    }

    #[test]
    fn plan_rejects_colliding_endpoints() {
        let world = sphere_world();
        let goals = GoalSet::from_points(array![[9.0, 9.0]]).unwrap();
        let params = PlannerParams::new(2, 4, 8, 1, 0);
        assert!(matches!(
            plan(&world, &[5.0, 5.0], &goals, &params),
            Err(Error::StartInCollision)
        ));
        let bad_goals = GoalSet::from_points(array![[5.0, 5.0]]).unwrap();
        assert!(matches!(
            plan(&world, &[1.0, 1.0], &bad_goals, &params),
            Err(Error::GoalsInCollision)
        ));
        // One colliding goal among free ones is fine.
        let mixed = GoalSet::from_points(array![[5.0, 5.0], [9.0, 9.0]]).unwrap();
        let result = plan(&world, &[1.0, 1.0], &mixed, &params).unwrap();
        assert_eq!(result.goal_index[0], 1);
    }

    #[test]
    fn plan_on_free_world_is_feasible_everywhere() {
        let world = free_world();
        let goals = GoalSet::from_points(array![[9.5, 9.5]]).unwrap();
        let params = PlannerParams::new(3, 5, 6, 8, 123);
        let result = plan(&world, &[0.5, 0.5], &goals, &params).unwrap();
        assert!(result.feasible.iter().all(|&f| f));
        for b in 0..8 {
            assert_eq!(result.paths[b].nrows(), 5);
            assert_eq!(result.paths[b].row(0), array![0.5, 0.5].view());
            assert_eq!(result.paths[b].row(4), array![9.5, 9.5].view());
        }
    }

    #[test]
    fn edge_removal_never_improves_value() {
        let world = sphere_world();
        let goals = GoalSet::from_points(array![[9.0, 9.0]]).unwrap();
        let params = PlannerParams::new(3, 5, 8, 2, 17);
        let tensor = sample_waypoints(&params, world.limits()).unwrap();
        let mut costs = build_cost_matrices(&world, &[0.5, 0.5], &tensor, &goals, 8).unwrap();
        let before = value_iteration(&costs, &goals);
        // Knock out a handful of edges.
        costs.hidden[[0, 0, 2, 3]] = f64::INFINITY;
        costs.hidden[[1, 1, 0, 0]] = f64::INFINITY;
        costs.start[[0, 4]] = f64::INFINITY;
        let after = value_iteration(&costs, &goals);
        for b in 0..2 {
            assert!(after.start[b] >= before.start[b]);
        }
    }
}

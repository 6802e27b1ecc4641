//! Reference shortest paths on the explicit layered graph.
//!
//! [`dijkstra_oracle`] enumerates the graph node by node and runs a
//! textbook binary-heap Dijkstra per batch entry. It shares no code with
//! the sweep-based solver. The search runs backward from the goals, so
//! each relaxation forms `edge + cost_to_go` exactly like a sweep does;
//! a node's settled distance is therefore the minimum of the same set of
//! floating-point sums and matches the solver bit for bit.

use super::CostMatrices;
use crate::graph::GoalSet;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Reference solution for one batch entry.
#[derive(Debug, Clone, PartialEq)]
pub struct OraclePath {
    /// Optimal start-to-goal cost; `+inf` when no path exists.
    pub cost: f64,
    /// Chosen waypoint index per layer.
    pub layer_choices: Vec<usize>,
    /// Chosen goal index.
    pub goal: usize,
    /// False when any greedy step had to break a tie.
    pub unique: bool,
}

/// Min-heap entry ordered by cost, then node id for determinism.
struct HeapEntry {
    cost: f64,
    node: usize,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cost == other.cost && self.node == other.node
    }
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reversed: BinaryHeap is a max-heap, we want the smallest cost.
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Exact shortest path per batch entry by explicit-graph Dijkstra.
///
/// Returns the optimal cost and a greedy node sequence with the same
/// tie-breaking as the solver (lowest layer-local index).
pub fn dijkstra_oracle(costs: &CostMatrices, goals: &GoalSet) -> Vec<OraclePath> {
    (0..costs.batch()).map(|b| solve_entry(costs, goals, b)).collect()
}

fn solve_entry(costs: &CostMatrices, goals: &GoalSet, b: usize) -> OraclePath {
    let m_layers = costs.layers();
    let n = costs.waypoints();
    let g = costs.goals();

    // Node ids: waypoint (m, i) -> m * n + i, goal k -> m_layers * n + k,
    // start -> m_layers * n + g. Distances are costs-to-go.
    let num_nodes = m_layers * n + g + 1;
    let start_id = m_layers * n + g;
    let mut dist = vec![f64::INFINITY; num_nodes];
    let mut heap = BinaryHeap::new();

    for k in 0..g {
        let id = m_layers * n + k;
        dist[id] = goals.terminal_costs()[k];
        heap.push(HeapEntry { cost: dist[id], node: id });
    }

    while let Some(HeapEntry { cost, node }) = heap.pop() {
        if cost > dist[node] {
            continue; // stale entry
        }
        if node == start_id {
            break;
        }
        if node >= m_layers * n {
            // Goal node: predecessors are last-layer waypoints.
            let k = node - m_layers * n;
            for i in 0..n {
                let w = costs.goal[[b, i, k]];
                if w.is_finite() {
                    relax(&mut dist, &mut heap, (m_layers - 1) * n + i, w + cost);
                }
            }
        } else {
            let m = node / n;
            let j = node % n;
            if m == 0 {
                let w = costs.start[[b, j]];
                if w.is_finite() {
                    relax(&mut dist, &mut heap, start_id, w + cost);
                }
            } else {
                for i in 0..n {
                    let w = costs.hidden[[b, m - 1, i, j]];
                    if w.is_finite() {
                        relax(&mut dist, &mut heap, (m - 1) * n + i, w + cost);
                    }
                }
            }
        }
    }

    // Greedy extraction against the settled distances.
    let mut unique = true;
    let (i0, _) = argmin_with_ties(
        (0..n).map(|i| costs.start[[b, i]] + dist[i]),
        &mut unique,
    );
    let mut layer_choices = vec![i0];
    for m in 1..m_layers {
        let prev = layer_choices[m - 1];
        let (im, _) = argmin_with_ties(
            (0..n).map(|j| costs.hidden[[b, m - 1, prev, j]] + dist[m * n + j]),
            &mut unique,
        );
        layer_choices.push(im);
    }
    let last = layer_choices[m_layers - 1];
    let (goal, _) = argmin_with_ties(
        (0..g).map(|k| costs.goal[[b, last, k]] + goals.terminal_costs()[k]),
        &mut unique,
    );

    OraclePath { cost: dist[start_id], layer_choices, goal, unique }
}

fn relax(dist: &mut [f64], heap: &mut BinaryHeap<HeapEntry>, node: usize, cand: f64) {
    if cand < dist[node] {
        dist[node] = cand;
        heap.push(HeapEntry { cost: cand, node });
    }
}

fn argmin_with_ties(values: impl Iterator<Item = f64>, unique: &mut bool) -> (usize, f64) {
    let mut best = f64::INFINITY;
    let mut best_idx = 0usize;
    let mut tied = false;
    let mut count = 0usize;
    for (idx, v) in values.enumerate() {
        count += 1;
        if v < best {
            best = v;
            best_idx = idx;
            tied = false;
        } else if v == best && idx > 0 {
            tied = true;
        }
    }
    // A single candidate cannot be ambiguous even if infinite.
    if tied && count > 1 {
        *unique = false;
    }
    (best_idx, best)
}

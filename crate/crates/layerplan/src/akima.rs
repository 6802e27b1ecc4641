//! Smooth planning: cubic spline edges with layer-shared knot slopes.
//!
//! Every edge of the layered graph is replaced by a cubic segment
//! `f(t) = a + b (t - t0) + c (t - t0)^2 + d (t - t0)^3` over the edge's
//! knot interval. The slope assigned to a knot is a modified-Akima blend
//! of the chord slopes around it, averaged over all edges of the layer,
//! so the slope depends only on the layer, not on which waypoints a path
//! visits. Consecutive traced edges therefore share their junction slope
//! and the whole traced path is C^1 by construction.
//!
//! Edge costs integrate `(collision + 1) * |f'(t)|` with a midpoint rule,
//! which reduces to the arc length on collision-free edges.

use crate::graph::{sample_waypoints, GoalSet, PlannerParams, WaypointTensor};
use crate::planner::{trace_path, value_iteration, CostMatrices, PlanResult};
use crate::space::World;
use crate::{Error, Result};
use ndarray::parallel::prelude::*;
use ndarray::{Array2, Array3, Array4, Array5, Axis};

/// Weight sum below which the Akima blend falls back to the arithmetic
/// mean of the two adjacent chord slopes.
pub const FLAT_WEIGHT_EPS: f64 = 1e-12;

/// Spline parameter knots `t_0 < t_1 < ... < t_{M+1}` spanning [0, 1].
///
/// Knot `k` carries path node `k` (start, the M layers, goal); edge `k`
/// spans `[t_k, t_{k+1}]`.
#[derive(Debug, Clone, PartialEq)]
pub struct KnotSchedule {
    knots: Vec<f64>,
}

impl KnotSchedule {
    /// Uniform schedule `t_k = k / (M + 1)` for `M` layers.
    pub fn uniform(layers: usize) -> Self {
        let segments = layers + 1;
        let knots = (0..=segments).map(|k| k as f64 / segments as f64).collect();
        Self { knots }
    }

    pub fn new(knots: Vec<f64>) -> Result<Self> {
        if knots.len() < 3 {
            return Err(Error::InvalidParameter("need at least 3 knots".into()));
        }
        if knots[0] != 0.0 || *knots.last().unwrap() != 1.0 {
            return Err(Error::InvalidParameter("knots must span [0, 1]".into()));
        }
        if knots.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidParameter("knots must strictly increase".into()));
        }
        Ok(Self { knots })
    }

    pub fn values(&self) -> &[f64] {
        &self.knots
    }

    /// Number of edges (`M + 1`).
    pub fn segments(&self) -> usize {
        self.knots.len() - 1
    }

    /// Knot interval of edge `k`.
    pub fn interval(&self, k: usize) -> (f64, f64) {
        (self.knots[k], self.knots[k + 1])
    }
}

/// Chord slopes of every edge, `(target - source) / (t_{k+1} - t_k)`.
///
/// Slabs mirror the cost matrices: `start[[b, j, c]]` for the collapsed
/// start edges, `mid[[b, m, i, j, c]]` between layers, `goal[[b, i, g, c]]`
/// into the goals.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeSlopes {
    pub start: Array3<f64>,
    pub mid: Array5<f64>,
    pub goal: Array4<f64>,
}

/// Chord slopes for every edge of the batched graph.
pub fn chord_slopes(
    start: &[f64],
    waypoints: &WaypointTensor,
    goals: &GoalSet,
    knots: &KnotSchedule,
) -> Result<EdgeSlopes> {
    let d = waypoints.dim();
    if start.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: start.len() });
    }
    if goals.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: goals.dim() });
    }
    let (bsz, m_layers, n) = (waypoints.batch(), waypoints.layers(), waypoints.waypoints());
    if knots.segments() != m_layers + 1 {
        return Err(Error::InvalidParameter(format!(
            "knot schedule has {} segments, expected {}",
            knots.segments(),
            m_layers + 1
        )));
    }
    let g = goals.len();

    let (t0, t1) = knots.interval(0);
    let dt0 = t1 - t0;
    let mut s_start = Array3::zeros((bsz, n, d));
    for b in 0..bsz {
        for j in 0..n {
            let p = waypoints.point(b, 0, j);
            for c in 0..d {
                s_start[[b, j, c]] = (p[c] - start[c]) / dt0;
            }
        }
    }

    let mut s_mid = Array5::zeros((bsz, m_layers.saturating_sub(1), n, n, d));
    for m in 0..m_layers.saturating_sub(1) {
        let (t0, t1) = knots.interval(m + 1);
        let dt = t1 - t0;
        for b in 0..bsz {
            for i in 0..n {
                let from = waypoints.point(b, m, i);
                for j in 0..n {
                    let to = waypoints.point(b, m + 1, j);
                    for c in 0..d {
                        s_mid[[b, m, i, j, c]] = (to[c] - from[c]) / dt;
                    }
                }
            }
        }
    }

    let (t0, t1) = knots.interval(m_layers);
    let dtg = t1 - t0;
    let mut s_goal = Array4::zeros((bsz, n, g, d));
    for b in 0..bsz {
        for i in 0..n {
            let from = waypoints.point(b, m_layers - 1, i);
            for k in 0..g {
                let to = goals.point(k);
                for c in 0..d {
                    s_goal[[b, i, k, c]] = (to[c] - from[c]) / dtg;
                }
            }
        }
    }

    Ok(EdgeSlopes { start: s_start, mid: s_mid, goal: s_goal })
}

/// Mean chord slope of each edge slab, `(B, M+1, d)`.
fn layer_mean_slopes(slopes: &EdgeSlopes) -> Array3<f64> {
    let (bsz, n, d) = slopes.start.dim();
    let m_mid = slopes.mid.shape()[1];
    let g = slopes.goal.shape()[2];
    let edges = m_mid + 2;

    let mut mean = Array3::zeros((bsz, edges, d));
    for b in 0..bsz {
        for c in 0..d {
            let mut acc = 0.0;
            for j in 0..n {
                acc += slopes.start[[b, j, c]];
            }
            mean[[b, 0, c]] = acc / n as f64;
            for m in 0..m_mid {
                let mut acc = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        acc += slopes.mid[[b, m, i, j, c]];
                    }
                }
                mean[[b, m + 1, c]] = acc / (n * n) as f64;
            }
            let mut acc = 0.0;
            for i in 0..n {
                for k in 0..g {
                    acc += slopes.goal[[b, i, k, c]];
                }
            }
            mean[[b, edges - 1, c]] = acc / (n * g) as f64;
        }
    }
    mean
}

/// Layer-shared knot slopes, `(B, M+2, d)`.
///
/// Interior knots blend the adjacent chord slopes per edge pair with
/// modified-Akima weights (far-side terms use the layer-mean slope) and
/// average the blends over the layer. The four boundary knots use the
/// layer-mean end rules: `s_0 = mean_0`, `s_1 = (mean_0 + mean_1) / 2`
/// and their mirror images at the goal end. Weight sums below
/// [`FLAT_WEIGHT_EPS`] fall back to the mean of the two adjacent slopes.
pub fn layer_slopes(slopes: &EdgeSlopes) -> Array3<f64> {
    let (bsz, n, d) = slopes.start.dim();
    let m_mid = slopes.mid.shape()[1];
    let edges = m_mid + 2; // M + 1
    let m_layers = edges - 1;
    let mean = layer_mean_slopes(slopes);

    let mut out = Array3::zeros((bsz, m_layers + 2, d));
    for b in 0..bsz {
        for c in 0..d {
            out[[b, 0, c]] = mean[[b, 0, c]];
            out[[b, 1, c]] = 0.5 * (mean[[b, 0, c]] + mean[[b, 1, c]]);
            out[[b, m_layers, c]] = 0.5 * (mean[[b, edges - 2, c]] + mean[[b, edges - 1, c]]);
            out[[b, m_layers + 1, c]] = mean[[b, edges - 1, c]];
        }

        // Interior knots k = 2 ..= M-1 sit between two full layer slabs.
        for k in 2..m_layers {
            let incoming = k - 1; // edge k-1, mid slab index k-2
            let outgoing = k; // edge k, mid slab index k-1
            for c in 0..d {
                let far_next = mean[[b, outgoing + 1, c]];
                let far_prev = mean[[b, incoming - 1, c]];
                let mut acc = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        let m_in = slopes.mid[[b, incoming - 1, i, j, c]];
                        let m_out = slopes.mid[[b, outgoing - 1, i, j, c]];
                        let w_out = (far_next - m_out).abs() + 0.5 * (far_next + m_out).abs();
                        let w_in = (m_in - far_prev).abs() + 0.5 * (m_in + far_prev).abs();
                        let denom = w_out + w_in;
                        acc += if denom < FLAT_WEIGHT_EPS {
                            0.5 * (m_in + m_out)
                        } else {
                            (w_out * m_in + w_in * m_out) / denom
                        };
                    }
                }
                out[[b, k, c]] = acc / (n * n) as f64;
            }
        }
    }
    out
}

/// One cubic edge segment with coefficients per dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Cubic {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub d: Vec<f64>,
    pub t0: f64,
    pub t1: f64,
}

impl Cubic {
    /// Hermite-style construction: interpolates `source` at `t0`,
    /// `target` at `t1`, with end slopes `s0` and `s1`.
    pub fn from_endpoints(
        source: &[f64],
        target: &[f64],
        s0: &[f64],
        s1: &[f64],
        t0: f64,
        t1: f64,
    ) -> Self {
        let dt = t1 - t0;
        let dim = source.len();
        let mut c = vec![0.0; dim];
        let mut d = vec![0.0; dim];
        for k in 0..dim {
            let chord = (target[k] - source[k]) / dt;
            c[k] = (3.0 * chord - 2.0 * s0[k] - s1[k]) / dt;
            d[k] = (s0[k] + s1[k] - 2.0 * chord) / (dt * dt);
        }
        Self { a: source.to_vec(), b: s0.to_vec(), c, d, t0, t1 }
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    /// Evaluate the segment (order 0) or its derivative (order 1) at `t`.
    pub fn evaluate(&self, t: f64, derivative_order: usize) -> Result<Vec<f64>> {
        if !(self.t0 <= t && t <= self.t1) {
            return Err(Error::OutsideKnotInterval { t, t0: self.t0, t1: self.t1 });
        }
        if derivative_order > 1 {
            return Err(Error::InvalidParameter(format!(
                "derivative order must be 0 or 1, got {derivative_order}"
            )));
        }
        let u = t - self.t0;
        let out = (0..self.dim())
            .map(|k| {
                if derivative_order == 0 {
                    self.a[k] + u * (self.b[k] + u * (self.c[k] + u * self.d[k]))
                } else {
                    self.b[k] + u * (2.0 * self.c[k] + 3.0 * self.d[k] * u)
                }
            })
            .collect();
        Ok(out)
    }
}

/// Cubic coefficients for every edge of the batched graph.
#[derive(Debug, Clone)]
pub struct SplineCoefficients {
    pub start: Array2<Cubic>,
    pub mid: Array4<Cubic>,
    pub goal: Array3<Cubic>,
    pub knots: KnotSchedule,
}

/// Materialize the cubic for every edge from points and knot slopes.
pub fn spline_coefficients(
    start: &[f64],
    waypoints: &WaypointTensor,
    goals: &GoalSet,
    knot_slopes: &Array3<f64>,
    knots: &KnotSchedule,
) -> SplineCoefficients {
    let (bsz, m_layers, n) = (waypoints.batch(), waypoints.layers(), waypoints.waypoints());
    let g = goals.len();
    let slope = |b: usize, k: usize| -> Vec<f64> {
        knot_slopes.index_axis(Axis(0), b).index_axis(Axis(0), k).to_vec()
    };

    let (t0, t1) = knots.interval(0);
    let start_edges = Array2::from_shape_fn((bsz, n), |(b, j)| {
        Cubic::from_endpoints(start, waypoints.point(b, 0, j), &slope(b, 0), &slope(b, 1), t0, t1)
    });
    let mid_edges = Array4::from_shape_fn(
        (bsz, m_layers - 1, n, n),
        |(b, m, i, j)| {
            let (t0, t1) = knots.interval(m + 1);
            Cubic::from_endpoints(
                waypoints.point(b, m, i),
                waypoints.point(b, m + 1, j),
                &slope(b, m + 1),
                &slope(b, m + 2),
                t0,
                t1,
            )
        },
    );
    let (tg0, tg1) = knots.interval(m_layers);
    let goal_edges = Array3::from_shape_fn((bsz, n, g), |(b, i, k)| {
        Cubic::from_endpoints(
            waypoints.point(b, m_layers - 1, i),
            goals.point(k),
            &slope(b, m_layers),
            &slope(b, m_layers + 1),
            tg0,
            tg1,
        )
    });

    SplineCoefficients { start: start_edges, mid: mid_edges, goal: goal_edges, knots: knots.clone() }
}

/// Midpoint-rule cost of one cubic edge: integrates
/// `(collision + 1) * |f'(t)|` over `h` equidistant parameters offset to
/// interval midpoints. Infinite as soon as one probe collides, otherwise
/// the quadrature arc length.
pub fn akima_edge_cost(world: &World, edge: &Cubic, probes: usize) -> Result<f64> {
    if edge.dim() != world.dim() {
        return Err(Error::DimensionMismatch { expected: world.dim(), got: edge.dim() });
    }
    if probes < 2 {
        return Err(Error::InvalidParameter(format!("probe count must be >= 2, got {probes}")));
    }
    Ok(cubic_segment_cost(
        world,
        &edge.a,
        &edge.b,
        &edge.c,
        &edge.d,
        edge.t0,
        edge.t1,
        probes,
    ))
}

#[allow(clippy::too_many_arguments)]
fn cubic_segment_cost(
    world: &World,
    a: &[f64],
    b: &[f64],
    c: &[f64],
    d: &[f64],
    t0: f64,
    t1: f64,
    probes: usize,
) -> f64 {
    let dim = a.len();
    let dt = (t1 - t0) / probes as f64;
    let mut pos = vec![0.0f64; dim];
    let mut length = 0.0f64;
    for q in 0..probes {
        let u = (q as f64 + 0.5) * dt;
        let mut speed_sq = 0.0;
        for k in 0..dim {
            pos[k] = a[k] + u * (b[k] + u * (c[k] + u * d[k]));
            let v = b[k] + u * (2.0 * c[k] + 3.0 * d[k] * u);
            speed_sq += v * v;
        }
        if !world.is_free(&pos) {
            return f64::INFINITY;
        }
        length += speed_sq.sqrt() * dt;
    }
    length
}

/// Traced spline attached to one batch entry of a [`PlanResult`].
#[derive(Debug, Clone, PartialEq)]
pub struct SplinePath {
    pub knots: Vec<f64>,
    pub edges: Vec<Cubic>,
}

impl SplinePath {
    /// Sample the whole path at `per_edge` parameters per edge (plus the
    /// final endpoint), producing a dense polyline.
    pub fn sample(&self, per_edge: usize) -> Array2<f64> {
        let dim = self.edges[0].dim();
        let mut points = Vec::with_capacity(self.edges.len() * per_edge + 1);
        for edge in &self.edges {
            for q in 0..per_edge {
                let t = edge.t0 + (edge.t1 - edge.t0) * q as f64 / per_edge as f64;
                points.push(edge.evaluate(t, 0).expect("t within interval"));
            }
        }
        let last = self.edges.last().unwrap();
        points.push(last.evaluate(last.t1, 0).expect("endpoint"));
        let mut out = Array2::zeros((points.len(), dim));
        for (r, p) in points.iter().enumerate() {
            out.row_mut(r).assign(&ndarray::ArrayView1::from(p.as_slice()));
        }
        out
    }
}

/// Plan with cubic spline edges: identical pipeline to straight planning
/// but every edge is scored by [`akima_edge_cost`], and the traced edges'
/// coefficients are attached to the result.
pub fn plan_akima(
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
    let knots = KnotSchedule::uniform(params.layers);
    let slopes = chord_slopes(start, &waypoints, goals, &knots)?;
    let knot_slopes = layer_slopes(&slopes);
    let costs = build_akima_cost_matrices(world, start, &waypoints, goals, &knot_slopes, &knots, params.probes);
    let values = value_iteration(&costs, goals);
    let mut result = trace_path(&costs, &values, start, &waypoints, goals);

    // Attach the traced cubic per edge.
    let m_layers = params.layers;
    let splines = (0..params.batch)
        .map(|b| {
            let choices = &result.layer_indices[b];
            let slope = |k: usize| -> Vec<f64> {
                knot_slopes.index_axis(Axis(0), b).index_axis(Axis(0), k).to_vec()
            };
            let mut edges = Vec::with_capacity(m_layers + 1);
            let (t0, t1) = knots.interval(0);
            edges.push(Cubic::from_endpoints(
                start,
                waypoints.point(b, 0, choices[0]),
                &slope(0),
                &slope(1),
                t0,
                t1,
            ));
            for m in 1..m_layers {
                let (t0, t1) = knots.interval(m);
                edges.push(Cubic::from_endpoints(
                    waypoints.point(b, m - 1, choices[m - 1]),
                    waypoints.point(b, m, choices[m]),
                    &slope(m),
                    &slope(m + 1),
                    t0,
                    t1,
                ));
            }
            let (t0, t1) = knots.interval(m_layers);
            edges.push(Cubic::from_endpoints(
                waypoints.point(b, m_layers - 1, choices[m_layers - 1]),
                goals.point(result.goal_index[b]),
                &slope(m_layers),
                &slope(m_layers + 1),
                t0,
                t1,
            ));
            SplinePath { knots: knots.values().to_vec(), edges }
        })
        .collect();
    result.splines = Some(splines);
    Ok(result)
}

/// Score every edge with the spline quadrature cost.
fn build_akima_cost_matrices(
    world: &World,
    start: &[f64],
    waypoints: &WaypointTensor,
    goals: &GoalSet,
    knot_slopes: &Array3<f64>,
    knots: &KnotSchedule,
    probes: usize,
) -> CostMatrices {
    let (bsz, m_layers, n) = (waypoints.batch(), waypoints.layers(), waypoints.waypoints());
    let g = goals.len();
    let d = waypoints.dim();

    // Per-edge coefficients are cheap closed forms; compute them on the
    // fly instead of materializing the full coefficient tensors.
    let edge_cost = |b: usize, k: usize, source: &[f64], target: &[f64], scratch: &mut EdgeScratch| {
        let (t0, t1) = knots.interval(k);
        let dt = t1 - t0;
        for c in 0..d {
            let s0 = knot_slopes[[b, k, c]];
            let s1 = knot_slopes[[b, k + 1, c]];
            let chord = (target[c] - source[c]) / dt;
            scratch.b[c] = s0;
            scratch.c[c] = (3.0 * chord - 2.0 * s0 - s1) / dt;
            scratch.d[c] = (s0 + s1 - 2.0 * chord) / (dt * dt);
        }
        cubic_segment_cost(world, source, &scratch.b, &scratch.c, &scratch.d, t0, t1, probes)
    };

    let mut c_start = Array2::zeros((bsz, n));
    c_start.axis_iter_mut(Axis(0)).into_par_iter().enumerate().for_each(|(b, mut row)| {
        let mut scratch = EdgeScratch::new(d);
        for j in 0..n {
            row[j] = edge_cost(b, 0, start, waypoints.point(b, 0, j), &mut scratch);
        }
    });

    let mut c_hidden = Array4::zeros((bsz, m_layers - 1, n, n));
    c_hidden.axis_iter_mut(Axis(0)).into_par_iter().enumerate().for_each(|(b, mut slab)| {
        let mut scratch = EdgeScratch::new(d);
        for m in 0..m_layers - 1 {
            for i in 0..n {
                let from = waypoints.point(b, m, i);
                for j in 0..n {
                    slab[[m, i, j]] =
                        edge_cost(b, m + 1, from, waypoints.point(b, m + 1, j), &mut scratch);
                }
            }
        }
    });

    let mut c_goal = Array3::zeros((bsz, n, g));
    c_goal.axis_iter_mut(Axis(0)).into_par_iter().enumerate().for_each(|(b, mut slab)| {
        let mut scratch = EdgeScratch::new(d);
        for i in 0..n {
            let from = waypoints.point(b, m_layers - 1, i);
            for k in 0..g {
                slab[[i, k]] = edge_cost(b, m_layers, from, goals.point(k), &mut scratch);
            }
        }
    });

    CostMatrices { start: c_start, hidden: c_hidden, goal: c_goal }
}

struct EdgeScratch {
    b: Vec<f64>,
    c: Vec<f64>,
    d: Vec<f64>,
}

impl EdgeScratch {
    fn new(dim: usize) -> Self {
        Self { b: vec![0.0; dim], c: vec![0.0; dim], d: vec![0.0; dim] }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{ConfigLimits, Geometry, PrimitiveSet, World};
    use approx::assert_relative_eq;
    use ndarray::array;

    /// Independent scalar modified-Akima reference for a plain polyline.
    ///
    /// Interior knots use the weighted blend
    /// `s_k = (w_out * m_{k-1} + w_in * m_k) / (w_out + w_in)` with
    /// `w_out = |m_{k+1} - m_k| + |m_{k+1} + m_k| / 2` and
    /// `w_in = |m_{k-1} - m_{k-2}| + |m_{k-1} + m_{k-2}| / 2`; the two
    /// knots at each end use `s_0 = m_0` and `s_1 = (m_0 + m_1) / 2`.
    fn scalar_reference_slopes(values: &[f64], knots: &[f64]) -> Vec<f64> {
        let p = values.len();
        let chords: Vec<f64> = (0..p - 1)
            .map(|k| (values[k + 1] - values[k]) / (knots[k + 1] - knots[k]))
            .collect();
        let mut s = vec![0.0; p];
        s[0] = chords[0];
        s[1] = 0.5 * (chords[0] + chords[1]);
        s[p - 2] = 0.5 * (chords[p - 3] + chords[p - 2]);
        s[p - 1] = chords[p - 2];
        for k in 2..p - 2 {
            let w_out = (chords[k + 1] - chords[k]).abs() + 0.5 * (chords[k + 1] + chords[k]).abs();
            let w_in =
                (chords[k - 1] - chords[k - 2]).abs() + 0.5 * (chords[k - 1] + chords[k - 2]).abs();
            s[k] = if w_out + w_in < FLAT_WEIGHT_EPS {
                0.5 * (chords[k - 1] + chords[k])
            } else {
                (w_out * chords[k - 1] + w_in * chords[k]) / (w_out + w_in)
            };
        }
        s
    }

    /// Single-candidate tensor along given 1-per-layer scalar values,
    /// embedded on the x axis of a 2-D space.
    fn chain_instance(values: &[f64]) -> (Vec<f64>, WaypointTensor, GoalSet, KnotSchedule) {
        let m = values.len() - 2;
        let start = vec![values[0], 0.0];
        let mut tensor = ndarray::Array4::zeros((1, m, 1, 2));
        for (k, v) in values[1..=m].iter().enumerate() {
            tensor[[0, k, 0, 0]] = *v;
        }
        let goals = GoalSet::from_points(array![[values[m + 1], 0.0]]).unwrap();
        (start, WaypointTensor::new(tensor), goals, KnotSchedule::uniform(m))
    }

    #[test]
    fn knot_schedule_uniform() {
        let k = KnotSchedule::uniform(3);
        assert_eq!(k.values(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(k.segments(), 4);
        assert!(KnotSchedule::new(vec![0.0, 0.5, 0.5, 1.0]).is_err());
        assert!(KnotSchedule::new(vec![0.1, 0.5, 1.0]).is_err());
    }

    #[test]
    fn chord_slopes_simple_chain() {
        // Values 0, 1, 3 on the x axis with M=1: knots 0, 0.5, 1.
        let (start, tensor, goals, knots) = chain_instance(&[0.0, 1.0, 3.0]);
        let slopes = chord_slopes(&start, &tensor, &goals, &knots).unwrap();
        assert_eq!(slopes.start[[0, 0, 0]], 2.0);
        assert_eq!(slopes.goal[[0, 0, 0, 0]], 4.0);
        assert_eq!(slopes.start[[0, 0, 1]], 0.0);
    }

    #[test]
    fn layer_slopes_match_scalar_reference() {
        let cases: &[&[f64]] = &[
            &[0.0, 0.25, 0.75, 1.75, 3.75],
            &[0.0, 1.0, -1.0, 2.0, 0.5, 3.0, 2.5],
            &[1.0, 1.5, 2.0, 2.5, 3.0, 3.5],
            &[0.0, 2.0, 2.0, 2.0, -4.0, 8.0, 1.0, 0.0],
        ];
        for values in cases {
            let m = values.len() - 2;
            let (start, tensor, goals, knots) = chain_instance(values);
            let slopes = chord_slopes(&start, &tensor, &goals, &knots).unwrap();
            let got = layer_slopes(&slopes);
            let want = scalar_reference_slopes(values, knots.values());
            for k in 0..m + 2 {
                assert_relative_eq!(got[[0, k, 0]], want[k], max_relative = 1e-12, epsilon = 1e-12);
                assert_eq!(got[[0, k, 1]], 0.0);
            }
        }
    }

    #[test]
    fn layer_slopes_hand_computed_interior_knot() {
        // Chords 1, 2, 4, 8 around interior knot 2:
        // w_out = |8-4| + |8+4|/2 = 10, w_in = |2-1| + |2+1|/2 = 2.5,
        // s_2 = (10*2 + 2.5*4) / 12.5 = 2.4.
        let (start, tensor, goals, knots) = chain_instance(&[0.0, 0.25, 0.75, 1.75, 3.75]);
        let slopes = chord_slopes(&start, &tensor, &goals, &knots).unwrap();
        let got = layer_slopes(&slopes);
        assert_relative_eq!(got[[0, 2, 0]], 2.4, max_relative = 1e-12);
        // End rules.
        assert_eq!(got[[0, 0, 0]], 1.0);
        assert_eq!(got[[0, 1, 0]], 1.5);
        assert_eq!(got[[0, 4, 0]], 8.0);
    }

    #[test]
    fn collinear_points_give_common_slope_and_linear_edges() {
        // Equally spaced on a line: slope 4 everywhere, c = d = 0.
        let (start, tensor, goals, knots) = chain_instance(&[0.0, 1.0, 2.0, 3.0, 4.0]);
        let slopes = chord_slopes(&start, &tensor, &goals, &knots).unwrap();
        let s = layer_slopes(&slopes);
        for k in 0..5 {
            assert_eq!(s[[0, k, 0]], 4.0);
        }
        let coeffs = spline_coefficients(&start, &tensor, &goals, &s, &knots);
        for m in 0..2 {
            let cubic = &coeffs.mid[[0, m, 0, 0]];
            assert_eq!(cubic.c[0], 0.0);
            assert_eq!(cubic.d[0], 0.0);
        }
    }

    #[test]
    fn constant_points_fall_back_to_zero_slopes() {
        // All nodes coincide: every chord is 0, all weights vanish.
        let (start, tensor, goals, knots) = chain_instance(&[2.0, 2.0, 2.0, 2.0, 2.0, 2.0]);
        let slopes = chord_slopes(&start, &tensor, &goals, &knots).unwrap();
        let s = layer_slopes(&slopes);
        for k in 0..6 {
            assert_eq!(s[[0, k, 0]], 0.0);
        }
    }

    #[test]
    fn cubic_interpolates_endpoints_and_slopes() {
        let cubic = Cubic::from_endpoints(
            &[1.0, -2.0],
            &[4.0, 3.0],
            &[0.5, 2.0],
            &[-1.0, 0.25],
            0.25,
            0.75,
        );
        let p0 = cubic.evaluate(0.25, 0).unwrap();
        let p1 = cubic.evaluate(0.75, 0).unwrap();
        let v0 = cubic.evaluate(0.25, 1).unwrap();
        let v1 = cubic.evaluate(0.75, 1).unwrap();
        for c in 0..2 {
            assert_relative_eq!(p0[c], [1.0, -2.0][c], max_relative = 1e-12);
            assert_relative_eq!(p1[c], [4.0, 3.0][c], max_relative = 1e-9);
            assert_relative_eq!(v0[c], [0.5, 2.0][c], max_relative = 1e-12);
            assert_relative_eq!(v1[c], [-1.0, 0.25][c], max_relative = 1e-9);
        }
    }

    #[test]
    fn evaluate_rejects_out_of_interval_and_high_order() {
        let cubic =
            Cubic::from_endpoints(&[0.0], &[1.0], &[1.0], &[1.0], 0.0, 0.5);
        assert!(cubic.evaluate(0.6, 0).is_err());
        assert!(cubic.evaluate(-0.1, 0).is_err());
        assert!(cubic.evaluate(0.3, 2).is_err());
        let mid = cubic.evaluate(0.25, 0).unwrap();
        // Direct expansion: a + b u + c u^2 + d u^3 at u = 0.25.
        let direct = cubic.a[0]
            + cubic.b[0] * 0.25
            + cubic.c[0] * 0.25 * 0.25
            + cubic.d[0] * 0.25 * 0.25 * 0.25;
        assert_eq!(mid[0], direct);
    }

    fn free_world() -> World {
        World::empty(ConfigLimits::new(vec![-10.0, -10.0], vec![10.0, 10.0]).unwrap())
    }

    #[test]
    fn straight_edge_cost_is_exact_length() {
        let world = free_world();
        // Unit-length straight segment as a degenerate cubic.
        let cubic = Cubic::from_endpoints(&[0.0, 0.0], &[0.6, 0.8], &[0.6, 0.8], &[0.6, 0.8], 0.0, 1.0);
        let cost = akima_edge_cost(&world, &cubic, 100).unwrap();
        assert_relative_eq!(cost, 1.0, max_relative = 1e-6);
    }

    #[test]
    fn curved_edge_detects_obstacle_missed_by_chord() {
        // A bulging cubic from (0,0) to (4,0): end slopes point up, so the
        // curve arcs through y = 1 at its apex, crossing a box that the
        // straight chord (y = 0 throughout) never touches.
        let limits = ConfigLimits::new(vec![-10.0, -10.0], vec![10.0, 10.0]).unwrap();
        let bx = crate::space::AxisBox::new(vec![2.0, 0.9], vec![0.4, 0.15]).unwrap();
        let prims = PrimitiveSet::new(vec![], vec![bx]).unwrap();
        let world = World::new(limits, Geometry::Primitives(prims), 0.0).unwrap();

        let source = [0.0, 0.0];
        let target = [4.0, 0.0];
        let s0 = [4.0, 4.0];
        let s1 = [4.0, -4.0];
        let cubic = Cubic::from_endpoints(&source, &target, &s0, &s1, 0.0, 1.0);
        // y(u) = 4u - 4u^2 peaks at 1.0 over the box (x from 1.6 to 2.4).
        let peak = cubic.evaluate(0.5, 0).unwrap();
        assert_relative_eq!(peak[1], 1.0, max_relative = 1e-9);

        assert!(akima_edge_cost(&world, &cubic, 64).unwrap().is_infinite());
        // The straight chord between the same endpoints stays free.
        assert_eq!(world.edge_cost(&source, &target, 64).unwrap(), 4.0);
    }

    #[test]
    fn quadrature_converges_second_order() {
        let world = free_world();
        let cubic = Cubic::from_endpoints(&[0.0, 0.0], &[4.0, 0.0], &[4.0, 6.0], &[4.0, -2.0], 0.0, 1.0);
        let reference = akima_edge_cost(&world, &cubic, 1 << 16).unwrap();
        let mut prev_err = None;
        for h in [32usize, 64, 128, 256] {
            let err = (akima_edge_cost(&world, &cubic, h).unwrap() - reference).abs();
            if let Some(p) = prev_err {
                assert!(err * 3.5 <= p, "error ratio below 3.5: {p} -> {err}");
            }
            prev_err = Some(err);
        }
    }

    #[test]
    fn plan_akima_attaches_continuous_splines() {
        let world = free_world();
        let goals = GoalSet::from_points(array![[8.0, 8.0]]).unwrap();
        let params = PlannerParams::new(4, 5, 8, 6, 42);
        let result = plan_akima(&world, &[-8.0, -8.0], &goals, &params).unwrap();
        assert!(result.feasible.iter().all(|&f| f));
        let splines = result.splines.as_ref().unwrap();
        assert_eq!(splines.len(), 6);
        for (b, sp) in splines.iter().enumerate() {
            assert_eq!(sp.edges.len(), 5);
            // Endpoint interpolation.
            let first = sp.edges[0].evaluate(0.0, 0).unwrap();
            assert_relative_eq!(first[0], -8.0, max_relative = 1e-12);
            let last = sp.edges.last().unwrap();
            let end = last.evaluate(1.0, 0).unwrap();
            assert_relative_eq!(end[0], 8.0, max_relative = 1e-9);
            // C^0 and C^1 junctions between consecutive edges.
            for e in 0..4 {
                let t = sp.edges[e].t1;
                let p_out = sp.edges[e].evaluate(t, 0).unwrap();
                let p_in = sp.edges[e + 1].evaluate(t, 0).unwrap();
                let v_out = sp.edges[e].evaluate(t, 1).unwrap();
                let v_in = sp.edges[e + 1].evaluate(t, 1).unwrap();
                for c in 0..2 {
                    assert_relative_eq!(p_out[c], p_in[c], max_relative = 1e-9, epsilon = 1e-9);
                    assert_relative_eq!(v_out[c], v_in[c], max_relative = 1e-9, epsilon = 1e-9);
                }
            }
            // Path polyline matches the spline knots.
            for (m, row) in result.paths[b].rows().into_iter().enumerate() {
                if m < 5 {
                    let p = sp.edges[m].evaluate(sp.knots[m], 0).unwrap();
                    assert_relative_eq!(row[0], p[0], max_relative = 1e-12);
                    assert_relative_eq!(row[1], p[1], max_relative = 1e-12);
                }
            }
        }
    }

    #[test]
    fn plan_akima_matches_straight_pipeline_structure() {
        // Same sampling seed: waypoint tensors agree, so path node counts
        // and goal bookkeeping line up even though costs differ.
        let world = free_world();
        let goals = GoalSet::from_points(array![[8.0, 8.0], [-8.0, 8.0]]).unwrap();
        let params = PlannerParams::new(3, 4, 8, 5, 7);
        let straight = crate::planner::plan(&world, &[0.0, -8.0], &goals, &params).unwrap();
        let spliney = plan_akima(&world, &[0.0, -8.0], &goals, &params).unwrap();
        assert_eq!(straight.paths.len(), spliney.paths.len());
        for b in 0..5 {
            assert_eq!(straight.paths[b].nrows(), 5);
            assert_eq!(spliney.paths[b].nrows(), 5);
        }
    }
}

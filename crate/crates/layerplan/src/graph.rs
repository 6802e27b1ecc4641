//! Layered random graphs: batched waypoint tensors and goal sets.
//!
//! A plan instance is a complete multipartite graph per batch entry: the
//! start connects to every waypoint of layer 0, consecutive layers are
//! connected all-to-all, and the last layer connects to every goal. With
//! `M` layers of `N` waypoints and `G` goals that is
//! `N + (M-1)*N^2 + N*G` edges.
//!
//! Sampling is counter-based: every waypoint gets its own generator keyed
//! by `(seed + batch_index, layer, waypoint)`, so any slice of the tensor
//! can be reproduced independently of evaluation order, and batch entry
//! `b` of a size-`B` plan is bitwise identical to batch entry 0 of a
//! size-1 plan seeded with `seed + b`.

use crate::space::ConfigLimits;
use crate::{Error, Result};
use ndarray::{Array1, Array2, Array4, ArrayView3};
use rand::distr::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Planner sizing parameters.
///
/// `layers` (M) and `waypoints` (N) shape the graph, `probes` (H) is the
/// number of collision probes per edge, `batch` (B) the number of
/// independent problem instances solved at once.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlannerParams {
    pub layers: usize,
    pub waypoints: usize,
    pub probes: usize,
    pub batch: usize,
    pub seed: u64,
}

impl PlannerParams {
    pub fn new(layers: usize, waypoints: usize, probes: usize, batch: usize, seed: u64) -> Self {
        Self { layers, waypoints, probes, batch, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.layers < 1 {
            return Err(Error::InvalidParameter("layers must be >= 1".into()));
        }
        if self.waypoints < 1 {
            return Err(Error::InvalidParameter("waypoints per layer must be >= 1".into()));
        }
        if self.probes < 2 {
            return Err(Error::InvalidParameter("probes per edge must be >= 2".into()));
        }
        if self.batch < 1 {
            return Err(Error::InvalidParameter("batch size must be >= 1".into()));
        }
        Ok(())
    }
}

/// Batched waypoint tensor of shape `(B, M, N, d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaypointTensor {
    values: Array4<f64>,
}

impl WaypointTensor {
    pub fn new(values: Array4<f64>) -> Self {
        Self { values }
    }

    pub fn batch(&self) -> usize {
        self.values.shape()[0]
    }

    pub fn layers(&self) -> usize {
        self.values.shape()[1]
    }

    pub fn waypoints(&self) -> usize {
        self.values.shape()[2]
    }

    pub fn dim(&self) -> usize {
        self.values.shape()[3]
    }

    pub fn values(&self) -> &Array4<f64> {
        &self.values
    }

    /// Waypoints of one batch entry, shape `(M, N, d)`.
    pub fn entry(&self, b: usize) -> ArrayView3<'_, f64> {
        self.values.index_axis(ndarray::Axis(0), b)
    }

    /// One waypoint as a slice.
    #[inline]
    pub(crate) fn point(&self, b: usize, m: usize, n: usize) -> &[f64] {
        let d = self.dim();
        let flat = self.values.as_slice().expect("standard layout");
        let idx = ((b * self.layers() + m) * self.waypoints() + n) * d;
        &flat[idx..idx + d]
    }
}

/// Goal configurations with optional terminal costs (default zero).
#[derive(Debug, Clone, PartialEq)]
pub struct GoalSet {
    points: Array2<f64>,
    terminal_costs: Array1<f64>,
}

impl GoalSet {
    pub fn new(points: Array2<f64>, terminal_costs: Array1<f64>) -> Result<Self> {
        if points.nrows() == 0 {
            return Err(Error::InvalidParameter("goal set must not be empty".into()));
        }
        if terminal_costs.len() != points.nrows() {
            return Err(Error::DimensionMismatch {
                expected: points.nrows(),
                got: terminal_costs.len(),
            });
        }
        if !terminal_costs.iter().all(|c| c.is_finite() && *c >= 0.0) {
            return Err(Error::InvalidParameter(
                "terminal costs must be finite and >= 0".into(),
            ));
        }
        Ok(Self { points, terminal_costs })
    }

    /// Goals with all-zero terminal costs.
    pub fn from_points(points: Array2<f64>) -> Result<Self> {
        let costs = Array1::zeros(points.nrows());
        Self::new(points, costs)
    }

    pub fn len(&self) -> usize {
        self.points.nrows()
    }

    pub fn is_empty(&self) -> bool {
        false // validated non-empty at construction
    }

    pub fn dim(&self) -> usize {
        self.points.ncols()
    }

    pub fn points(&self) -> &Array2<f64> {
        &self.points
    }

    pub fn terminal_costs(&self) -> &Array1<f64> {
        &self.terminal_costs
    }

    #[inline]
    pub(crate) fn point(&self, g: usize) -> &[f64] {
        let d = self.dim();
        let flat = self.points.as_slice().expect("standard layout");
        &flat[g * d..(g + 1) * d]
    }
}

/// Effective seed of batch entry `b` under root `seed`.
pub fn batch_seed(seed: u64, b: usize) -> u64 {
    seed.wrapping_add(b as u64)
}

/// Generator for one waypoint, keyed by its coordinates in the tensor.
fn waypoint_rng(seed: u64, b: usize, layer: usize, waypoint: usize) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[0..8].copy_from_slice(&batch_seed(seed, b).to_le_bytes());
    key[8..16].copy_from_slice(&(layer as u64).to_le_bytes());
    key[16..24].copy_from_slice(&(waypoint as u64).to_le_bytes());
    key[24..32].copy_from_slice(b"waypoint");
    ChaCha8Rng::from_seed(key)
}

/// Draw the waypoint tensor: every coordinate uniform within the limits.
pub fn sample_waypoints(params: &PlannerParams, limits: &ConfigLimits) -> Result<WaypointTensor> {
    params.validate()?;
    let d = limits.dim();
    let dists = limits
        .lower()
        .iter()
        .zip(limits.upper())
        .map(|(lo, hi)| {
            Uniform::new_inclusive(*lo, *hi)
                .map_err(|e| Error::InvalidParameter(format!("uniform bounds: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;

    let (bs, m, n) = (params.batch, params.layers, params.waypoints);
    let mut values = Array4::zeros((bs, m, n, d));
    for b in 0..bs {
        for layer in 0..m {
            for wp in 0..n {
                let mut rng = waypoint_rng(params.seed, b, layer, wp);
                for (dim, dist) in dists.iter().enumerate() {
                    values[[b, layer, wp, dim]] = dist.sample(&mut rng);
                }
            }
        }
    }
    Ok(WaypointTensor::new(values))
}

/// Number of edges of one batch entry's layered graph.
pub fn graph_edge_count(layers: usize, waypoints: usize, goals: usize) -> u64 {
    let (m, n, g) = (layers as u64, waypoints as u64, goals as u64);
    n + (m - 1) * n * n + n * g
}

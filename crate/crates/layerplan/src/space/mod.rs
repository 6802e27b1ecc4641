//! Configuration space: box limits, collision worlds, and edge probing.
//!
//! A [`World`] pairs axis-aligned configuration limits with obstacle
//! geometry, either a 2-D occupancy grid or a set of d-dimensional
//! primitives. Collision queries are two-valued: a configuration costs
//! `0.0` when it lies strictly inside free space (by more than
//! `margin_delta`) and `+inf` otherwise. Edges are scored by probing
//! equidistant points along the segment, endpoints included, so a finite
//! edge cost is exactly the Euclidean segment length.

mod grid;
mod primitives;
mod worldfile;

pub use grid::OccupancyGrid;
pub use primitives::{AxisBox, PrimitiveSet, Sphere};

use crate::{Error, Result};
use ndarray::Array2;
use std::path::Path;

/// Axis-aligned configuration-space bounds with `lower[i] < upper[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigLimits {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl ConfigLimits {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() {
            return Err(Error::InvalidParameter("limits must have dimension >= 1".into()));
        }
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch { expected: lower.len(), got: upper.len() });
        }
        for (lo, hi) in lower.iter().zip(&upper) {
            if !lo.is_finite() || !hi.is_finite() || lo >= hi {
                return Err(Error::InvalidParameter(format!(
                    "limit bounds must be finite with lower < upper, got [{lo}, {hi}]"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// True when `q` lies inside the closed box.
    #[inline]
    pub fn contains(&self, q: &[f64]) -> bool {
        q.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(x, (lo, hi))| *x >= *lo && *x <= *hi)
    }

    /// Length of the box diagonal.
    pub fn diagonal(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| (hi - lo) * (hi - lo))
            .sum::<f64>()
            .sqrt()
    }
}

/// Obstacle geometry attached to a [`World`].
#[derive(Debug, Clone)]
pub enum Geometry {
    /// 2-D occupancy grid; out-of-grid queries count as occupied.
    Grid(OccupancyGrid),
    /// Spheres and axis-aligned boxes in arbitrary dimension.
    Primitives(PrimitiveSet),
}

/// Collision world: limits, geometry and a safety margin.
///
/// Free space never extends beyond the limits; obstacles may. Obstacle
/// boundaries count as occupied, so with `margin_delta = 0` a point is
/// free exactly when it lies strictly outside every obstacle and inside
/// the limits.
#[derive(Debug, Clone)]
pub struct World {
    limits: ConfigLimits,
    geometry: Geometry,
    margin_delta: f64,
}

impl World {
    pub fn new(limits: ConfigLimits, geometry: Geometry, margin_delta: f64) -> Result<Self> {
        if !margin_delta.is_finite() || margin_delta < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "margin_delta must be finite and >= 0, got {margin_delta}"
            )));
        }
        match &geometry {
            Geometry::Grid(_) => {
                if limits.dim() != 2 {
                    return Err(Error::DimensionMismatch { expected: 2, got: limits.dim() });
                }
            }
            Geometry::Primitives(prims) => {
                prims.check_dim(limits.dim())?;
            }
        }
        Ok(Self { limits, geometry, margin_delta })
    }

    /// Grid world whose limits default to the grid extent.
    pub fn from_grid(grid: OccupancyGrid, margin_delta: f64) -> Result<Self> {
        let (lo, hi) = grid.extent();
        let limits = ConfigLimits::new(lo.to_vec(), hi.to_vec())?;
        Self::new(limits, Geometry::Grid(grid), margin_delta)
    }

    /// Obstacle-free box world.
    pub fn empty(limits: ConfigLimits) -> Self {
        Self { limits, geometry: Geometry::Primitives(PrimitiveSet::empty()), margin_delta: 0.0 }
    }

    pub fn dim(&self) -> usize {
        self.limits.dim()
    }

    pub fn limits(&self) -> &ConfigLimits {
        &self.limits
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn margin_delta(&self) -> f64 {
        self.margin_delta
    }

    /// Load a world description from JSON, optionally overriding its margin.
    ///
    /// See [`worldfile`] for the two accepted schemas (occupancy image with
    /// sidecar metadata, or primitive lists with explicit limits).
    pub fn from_json_file(path: impl AsRef<Path>, margin_override: Option<f64>) -> Result<Self> {
        worldfile::load(path.as_ref(), margin_override)
    }

    /// True when `q` is free; no dimension check.
    #[inline]
    pub(crate) fn is_free(&self, q: &[f64]) -> bool {
        if !self.limits.contains(q) {
            return false;
        }
        match &self.geometry {
            Geometry::Grid(g) => g.is_free_world(q[0], q[1], self.margin_delta),
            Geometry::Primitives(p) => p.signed_distance(q) > self.margin_delta,
        }
    }

    /// Two-valued collision cost: `0.0` in the margin interior of free
    /// space, `+inf` otherwise.
    pub fn collision_cost(&self, q: &[f64]) -> Result<f64> {
        if q.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: q.len() });
        }
        Ok(if self.is_free(q) { 0.0 } else { f64::INFINITY })
    }

    /// True when all `h` probe points of segment `a`-`b` are free.
    #[inline]
    pub(crate) fn segment_is_free(&self, a: &[f64], b: &[f64], h: usize) -> bool {
        let denom = (h - 1) as f64;
        match &self.geometry {
            Geometry::Grid(g) => {
                // Hot path: d = 2, no allocation.
                let margin = self.margin_delta;
                for k in 0..h {
                    let (w0, w1) = probe_weights(k, denom);
                    let x = a[0] * w0 + b[0] * w1;
                    let y = a[1] * w0 + b[1] * w1;
                    if !(self.limits.contains(&[x, y]) && g.is_free_world(x, y, margin)) {
                        return false;
                    }
                }
                true
            }
            Geometry::Primitives(_) => {
                let mut buf = vec![0.0f64; a.len()];
                for k in 0..h {
                    let (w0, w1) = probe_weights(k, denom);
                    for (q, (ai, bi)) in buf.iter_mut().zip(a.iter().zip(b)) {
                        *q = ai * w0 + bi * w1;
                    }
                    if !self.is_free(&buf) {
                        return false;
                    }
                }
                true
            }
        }
    }

    /// Transition cost of the straight segment `a`-`b`: the mean of `h`
    /// probe collision costs plus the Euclidean length. Finite (and then
    /// equal to the length) exactly when every probe is free.
    pub fn edge_cost(&self, a: &[f64], b: &[f64], h: usize) -> Result<f64> {
        self.check_edge_args(a, b, h)?;
        if self.segment_is_free(a, b, h) {
            Ok(euclidean(a, b))
        } else {
            Ok(f64::INFINITY)
        }
    }

    fn check_edge_args(&self, a: &[f64], b: &[f64], h: usize) -> Result<()> {
        if a.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: a.len() });
        }
        if b.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: b.len() });
        }
        check_probe_count(h)
    }
}

fn check_probe_count(h: usize) -> Result<()> {
    if h < 2 {
        return Err(Error::InvalidParameter(format!("probe count must be >= 2, got {h}")));
    }
    Ok(())
}

/// Interpolation weights for probe `k` of `h` so the probe set of the
/// reversed segment is bitwise identical: both directions form each point
/// as `a*w0 + b*w1` with the same two products.
#[inline]
pub(crate) fn probe_weights(k: usize, denom: f64) -> (f64, f64) {
    let w1 = k as f64 / denom;
    let w0 = (denom - k as f64) / denom;
    (w0, w1)
}

/// The `h` equidistant probe points of segment `a`-`b` at parameters
/// `k/(h-1)`, endpoints included, as an `(h, d)` array.
pub fn edge_probe_points(a: &[f64], b: &[f64], h: usize) -> Result<Array2<f64>> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), got: b.len() });
    }
    check_probe_count(h)?;
    let denom = (h - 1) as f64;
    let mut out = Array2::zeros((h, a.len()));
    for k in 0..h {
        let (w0, w1) = probe_weights(k, denom);
        for (i, (ai, bi)) in a.iter().zip(b).enumerate() {
            out[[k, i]] = ai * w0 + bi * w1;
        }
    }
    Ok(out)
}

/// Euclidean distance between two points of equal dimension.
#[inline]
pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

//! Sphere and axis-aligned-box obstacles in arbitrary dimension.

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Sphere {
    center: Vec<f64>,
    radius: f64,
}

impl Sphere {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !radius.is_finite() || radius <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "sphere radius must be finite and > 0, got {radius}"
            )));
        }
        if center.is_empty() || !center.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter("sphere center must be finite".into()));
        }
        Ok(Self { center, radius })
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Signed distance to the sphere surface; negative inside.
    #[inline]
    pub fn signed_distance(&self, q: &[f64]) -> f64 {
        super::euclidean(q, &self.center) - self.radius
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxisBox {
    center: Vec<f64>,
    half_extents: Vec<f64>,
}

impl AxisBox {
    pub fn new(center: Vec<f64>, half_extents: Vec<f64>) -> Result<Self> {
        if center.len() != half_extents.len() {
            return Err(Error::DimensionMismatch {
                expected: center.len(),
                got: half_extents.len(),
            });
        }
        if center.is_empty() || !center.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter("box center must be finite".into()));
        }
        if !half_extents.iter().all(|v| v.is_finite() && *v > 0.0) {
            return Err(Error::InvalidParameter(
                "box half extents must be finite and > 0".into(),
            ));
        }
        Ok(Self { center, half_extents })
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn half_extents(&self) -> &[f64] {
        &self.half_extents
    }

    /// Signed distance to the box surface; negative inside.
    #[inline]
    pub fn signed_distance(&self, q: &[f64]) -> f64 {
        let mut outside_sq = 0.0;
        let mut inside = f64::NEG_INFINITY;
        for ((x, c), h) in q.iter().zip(&self.center).zip(&self.half_extents) {
            let e = (x - c).abs() - h;
            if e > 0.0 {
                outside_sq += e * e;
            } else {
                inside = inside.max(e);
            }
        }
        if outside_sq > 0.0 {
            outside_sq.sqrt()
        } else {
            inside
        }
    }
}

/// A collection of primitive obstacles sharing one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimitiveSet {
    spheres: Vec<Sphere>,
    boxes: Vec<AxisBox>,
}

impl PrimitiveSet {
    pub fn new(spheres: Vec<Sphere>, boxes: Vec<AxisBox>) -> Result<Self> {
        let set = Self { spheres, boxes };
        if let Some(d) = set.inferred_dim() {
            set.check_dim(d)?;
        }
        Ok(set)
    }

    pub fn empty() -> Self {
        Self { spheres: Vec::new(), boxes: Vec::new() }
    }

    pub fn spheres(&self) -> &[Sphere] {
        &self.spheres
    }

    pub fn boxes(&self) -> &[AxisBox] {
        &self.boxes
    }

    pub fn is_empty(&self) -> bool {
        self.spheres.is_empty() && self.boxes.is_empty()
    }

    fn inferred_dim(&self) -> Option<usize> {
        self.spheres
            .first()
            .map(|s| s.center.len())
            .or_else(|| self.boxes.first().map(|b| b.center.len()))
    }

    /// Verify every primitive matches dimension `d`.
    pub(crate) fn check_dim(&self, d: usize) -> Result<()> {
        for s in &self.spheres {
            if s.center.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: s.center.len() });
            }
        }
        for b in &self.boxes {
            if b.center.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: b.center.len() });
            }
        }
        Ok(())
    }

    /// Signed distance to the nearest obstacle surface; `+inf` when the
    /// set is empty.
    #[inline]
    pub fn signed_distance(&self, q: &[f64]) -> f64 {
        let mut best = f64::INFINITY;
        for s in &self.spheres {
            best = best.min(s.signed_distance(q));
        }
        for b in &self.boxes {
            best = best.min(b.signed_distance(q));
        }
        best
    }
}

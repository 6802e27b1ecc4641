//! JSON world descriptions.
//!
//! Two schemas are accepted. An occupancy world references a PGM image
//! with sidecar placement metadata (the image path is resolved relative
//! to the JSON file):
//!
//! ```json
//! {
//!   "occupancy": { "image": "map.pgm", "resolution": 0.1, "origin": [0.0, 0.0] },
//!   "margin_delta": 0.0
//! }
//! ```
//!
//! A primitive world lists obstacles with explicit limits:
//!
//! ```json
//! {
//!   "limits": { "lower": [0.0, 0.0], "upper": [10.0, 10.0] },
//!   "spheres": [ { "center": [5.0, 5.0], "radius": 1.0 } ],
//!   "boxes": [ { "center": [2.0, 8.0], "half_extents": [1.0, 0.5] } ],
//!   "margin_delta": 0.0
//! }
//! ```

use super::{AxisBox, ConfigLimits, Geometry, OccupancyGrid, PrimitiveSet, Sphere, World};
use crate::{Error, Result};
use serde::Deserialize;
use std::path::Path;

#[derive(Deserialize)]
#[serde(untagged)]
enum WorldFile {
    Grid {
        occupancy: GridSpec,
        #[serde(default)]
        limits: Option<LimitsSpec>,
        #[serde(default)]
        margin_delta: f64,
    },
    Primitives {
        limits: LimitsSpec,
        #[serde(default)]
        spheres: Vec<SphereSpec>,
        #[serde(default)]
        boxes: Vec<BoxSpec>,
        #[serde(default)]
        margin_delta: f64,
    },
}

#[derive(Deserialize)]
struct GridSpec {
    image: String,
    resolution: f64,
    origin: [f64; 2],
}

#[derive(Deserialize)]
struct LimitsSpec {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

#[derive(Deserialize)]
struct SphereSpec {
    center: Vec<f64>,
    radius: f64,
}

#[derive(Deserialize)]
struct BoxSpec {
    center: Vec<f64>,
    half_extents: Vec<f64>,
}

pub(super) fn load(path: &Path, margin_override: Option<f64>) -> Result<World> {
    let text = std::fs::read_to_string(path)?;
    let file: WorldFile = serde_json::from_str(&text)
        .map_err(|e| Error::WorldFormat(format!("{}: {e}", path.display())))?;
    match file {
        WorldFile::Grid { occupancy, limits, margin_delta } => {
            let image_path = path.parent().unwrap_or_else(|| Path::new(".")).join(&occupancy.image);
            let grid =
                OccupancyGrid::from_pgm_file(&image_path, occupancy.origin, occupancy.resolution)?;
            let margin = margin_override.unwrap_or(margin_delta);
            match limits {
                None => World::from_grid(grid, margin),
                Some(l) => {
                    let limits = ConfigLimits::new(l.lower, l.upper)?;
                    World::new(limits, Geometry::Grid(grid), margin)
                }
            }
        }
        WorldFile::Primitives { limits, spheres, boxes, margin_delta } => {
            let limits = ConfigLimits::new(limits.lower, limits.upper)?;
            let spheres = spheres
                .into_iter()
                .map(|s| Sphere::new(s.center, s.radius))
                .collect::<Result<Vec<_>>>()?;
            let boxes = boxes
                .into_iter()
                .map(|b| AxisBox::new(b.center, b.half_extents))
                .collect::<Result<Vec<_>>>()?;
            let prims = PrimitiveSet::new(spheres, boxes)?;
            let margin = margin_override.unwrap_or(margin_delta);
            World::new(limits, Geometry::Primitives(prims), margin)
        }
    }
}

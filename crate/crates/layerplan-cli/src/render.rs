//! SVG overlays: the world geometry plus a planned batch.
//!
//! The drawing lives in a pixel space obtained by scaling the world's
//! configuration limits to a fixed target width; the same projection is
//! exposed through [`PixelMap`] so callers can relate world coordinates to
//! pixels (the spline overlay test projects traced waypoints this way).

use layerplan::planner::PlanResult;
use layerplan::space::{Geometry, World};
use layerplan::{Error, Result};
use std::fmt::Write as _;

/// Rendering knobs; defaults draw an 800-pixel-wide overlay with 20 samples
/// per spline edge.
#[derive(Debug, Clone, Copy)]
pub struct RenderOptions {
    pub samples_per_edge: usize,
    pub target_width_px: f64,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self { samples_per_edge: 20, target_width_px: 800.0 }
    }
}

/// World-to-pixel projection: uniform scale, y axis flipped so the world's
/// upper edge is pixel row zero.
#[derive(Debug, Clone, Copy)]
pub struct PixelMap {
    scale: f64,
    lower_x: f64,
    upper_y: f64,
    pub width_px: f64,
    pub height_px: f64,
}

impl PixelMap {
    pub fn for_world(world: &World, target_width_px: f64) -> Result<Self> {
        if world.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: world.dim() });
        }
        let limits = world.limits();
        let span_x = limits.upper()[0] - limits.lower()[0];
        let span_y = limits.upper()[1] - limits.lower()[1];
        let scale = target_width_px / span_x.max(span_y);
        Ok(Self {
            scale,
            lower_x: limits.lower()[0],
            upper_y: limits.upper()[1],
            width_px: span_x * scale,
            height_px: span_y * scale,
        })
    }

    pub fn project(&self, x: f64, y: f64) -> (f64, f64) {
        ((x - self.lower_x) * self.scale, (self.upper_y - y) * self.scale)
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }
}

/// Draw the world and, when given, the feasible paths of a planned batch.
///
/// Occupancy grids become run-length-merged rectangles, primitive worlds
/// circles and boxes. The start is marked red, the chosen goals green, and
/// each feasible batch entry contributes one polyline: its traced waypoints
/// joined straight, or the densely sampled spline when one is attached.
/// Only 2-D worlds can be drawn.
pub fn render_svg(
    world: &World,
    result: Option<&PlanResult>,
    opts: &RenderOptions,
) -> Result<String> {
    let map = PixelMap::for_world(world, opts.target_width_px)?;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.2}" height="{h:.2}" viewBox="0 0 {w:.2} {h:.2}">"#,
        w = map.width_px,
        h = map.height_px,
    );
    let _ = writeln!(
        svg,
        r##"  <rect x="0" y="0" width="{w:.2}" height="{h:.2}" fill="#ffffff" stroke="#888888"/>"##,
        w = map.width_px,
        h = map.height_px,
    );

    draw_geometry(&mut svg, world, &map);
    if let Some(result) = result {
        draw_result(&mut svg, result, &map, opts.samples_per_edge);
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn draw_geometry(svg: &mut String, world: &World, map: &PixelMap) {
    match world.geometry() {
        Geometry::Grid(grid) => {
            let cells = grid.cells();
            let res = grid.resolution();
            let [ox, oy] = grid.origin();
            for r in 0..grid.rows() {
                let y_top = oy + (r + 1) as f64 * res;
                let mut c = 0usize;
                while c < grid.cols() {
                    if !cells[[r, c]] {
                        c += 1;
                        continue;
                    }
                    let run_start = c;
                    while c < grid.cols() && cells[[r, c]] {
                        c += 1;
                    }
                    let (px, py) = map.project(ox + run_start as f64 * res, y_top);
                    let _ = writeln!(
                        svg,
                        r##"  <rect x="{px:.3}" y="{py:.3}" width="{w:.3}" height="{h:.3}" fill="#3d3d3d"/>"##,
                        w = (c - run_start) as f64 * res * map.scale(),
                        h = res * map.scale(),
                    );
                }
            }
        }
        Geometry::Primitives(prims) => {
            for sphere in prims.spheres() {
                let (cx, cy) = map.project(sphere.center()[0], sphere.center()[1]);
                let _ = writeln!(
                    svg,
                    r##"  <circle cx="{cx:.3}" cy="{cy:.3}" r="{r:.3}" fill="#3d3d3d"/>"##,
                    r = sphere.radius() * map.scale(),
                );
            }
            for bx in prims.boxes() {
                let (px, py) =
                    map.project(bx.center()[0] - bx.half_extents()[0], bx.center()[1] + bx.half_extents()[1]);
                let _ = writeln!(
                    svg,
                    r##"  <rect x="{px:.3}" y="{py:.3}" width="{w:.3}" height="{h:.3}" fill="#3d3d3d"/>"##,
                    w = 2.0 * bx.half_extents()[0] * map.scale(),
                    h = 2.0 * bx.half_extents()[1] * map.scale(),
                );
            }
        }
    }
}

fn draw_result(svg: &mut String, result: &PlanResult, map: &PixelMap, samples_per_edge: usize) {
    if result.paths.is_empty() {
        return;
    }

    for (b, path) in result.paths.iter().enumerate() {
        if !result.feasible[b] {
            continue;
        }
        let dense;
        let points = match &result.splines {
            Some(splines) => {
                dense = splines[b].sample(samples_per_edge);
                &dense
            }
            None => path,
        };
        let mut attr = String::with_capacity(points.nrows() * 16);
        for row in points.rows() {
            let (px, py) = map.project(row[0], row[1]);
            let _ = write!(attr, "{px:.3},{py:.3} ");
        }
        let _ = writeln!(
            svg,
            r##"  <polyline points="{}" fill="none" stroke="#2a6fb0" stroke-width="1.5" stroke-opacity="0.8"/>"##,
            attr.trim_end(),
        );
    }

    // Start on top of the paths, then the set of distinct traced goals.
    let start = result.paths[0].row(0);
    let (sx, sy) = map.project(start[0], start[1]);
    let _ = writeln!(svg, r##"  <circle cx="{sx:.3}" cy="{sy:.3}" r="5" fill="#d62728"/>"##);
    let mut seen = Vec::new();
    for path in &result.paths {
        let goal = path.row(path.nrows() - 1);
        let key: Vec<u64> = goal.iter().map(|v| v.to_bits()).collect();
        if seen.contains(&key) {
            continue;
        }
        seen.push(key);
        let (gx, gy) = map.project(goal[0], goal[1]);
        let _ = writeln!(svg, r##"  <circle cx="{gx:.3}" cy="{gy:.3}" r="5" fill="#2ca02c"/>"##);
    }
}

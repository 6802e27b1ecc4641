//! 2-D occupancy grids with a precomputed clearance field.

use crate::{Error, Result};
use ndarray::Array2;
use std::path::Path;

/// Binary occupancy grid over a 2-D workspace.
///
/// Cells are stored row-major with row 0 at the *bottom* of the world
/// (smallest y), so world point `(x, y)` falls into
/// `col = floor((x - origin.x) / resolution)`,
/// `row = floor((y - origin.y) / resolution)`. Queries outside the grid
/// count as occupied.
///
/// Construction precomputes an exact Euclidean distance transform of the
/// occupied cells (center-to-center, in world units), so margin queries
/// are O(1): a point is free under margin `delta` when its cell is free
/// and the cell's clearance exceeds `delta`.
#[derive(Debug, Clone)]
pub struct OccupancyGrid {
    cells: Array2<bool>,
    origin: [f64; 2],
    resolution: f64,
    clearance: Array2<f64>,
}

impl OccupancyGrid {
    pub fn new(cells: Array2<bool>, origin: [f64; 2], resolution: f64) -> Result<Self> {
        if cells.nrows() == 0 || cells.ncols() == 0 {
            return Err(Error::InvalidParameter("occupancy grid must be non-empty".into()));
        }
        if !resolution.is_finite() || resolution <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "grid resolution must be finite and > 0, got {resolution}"
            )));
        }
        if !origin.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter("grid origin must be finite".into()));
        }
        let clearance = distance_transform(&cells).mapv(|d2| d2.sqrt() * resolution);
        Ok(Self { cells, origin, resolution, clearance })
    }

    /// Load a grayscale PGM image (`P2` ASCII or `P5` binary); pixel
    /// values below 128 are occupied. Image rows are flipped so row 0 of
    /// the grid is the bottom image row.
    pub fn from_pgm_file(
        path: impl AsRef<Path>,
        origin: [f64; 2],
        resolution: f64,
    ) -> Result<Self> {
        let bytes = std::fs::read(path)?;
        let cells = parse_pgm(&bytes)?;
        Self::new(cells, origin, resolution)
    }

    pub fn rows(&self) -> usize {
        self.cells.nrows()
    }

    pub fn cols(&self) -> usize {
        self.cells.ncols()
    }

    pub fn origin(&self) -> [f64; 2] {
        self.origin
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn cells(&self) -> &Array2<bool> {
        &self.cells
    }

    /// World-coordinate bounds covered by the grid: `(lower, upper)`.
    pub fn extent(&self) -> ([f64; 2], [f64; 2]) {
        let upper = [
            self.origin[0] + self.cols() as f64 * self.resolution,
            self.origin[1] + self.rows() as f64 * self.resolution,
        ];
        (self.origin, upper)
    }

    /// Grid cell containing world point `(x, y)`, if inside the grid.
    #[inline]
    pub fn cell_index(&self, x: f64, y: f64) -> Option<(usize, usize)> {
        let c = (x - self.origin[0]) / self.resolution;
        let r = (y - self.origin[1]) / self.resolution;
        if c < 0.0 || r < 0.0 {
            return None;
        }
        let (c, r) = (c.floor() as usize, r.floor() as usize);
        if r >= self.rows() || c >= self.cols() {
            return None;
        }
        Some((r, c))
    }

    /// Distance (world units) from the center of cell `(row, col)` to the
    /// nearest occupied cell center; 0 on occupied cells, `+inf` when the
    /// grid has no occupied cell.
    pub fn clearance_at(&self, row: usize, col: usize) -> f64 {
        self.clearance[[row, col]]
    }

    #[inline]
    pub(crate) fn is_free_world(&self, x: f64, y: f64, margin: f64) -> bool {
        match self.cell_index(x, y) {
            None => false,
            Some((r, c)) => {
                if self.cells[[r, c]] {
                    return false;
                }
                margin <= 0.0 || self.clearance[[r, c]] > margin
            }
        }
    }
}

/// Exact squared Euclidean distance (in cell units) from every cell to
/// the nearest occupied cell, via two 1-D lower-envelope passes.
fn distance_transform(cells: &Array2<bool>) -> Array2<f64> {
    let (rows, cols) = cells.dim();
    let mut d = Array2::from_elem((rows, cols), f64::INFINITY);

    // Pass 1: per column, squared distance along the row axis.
    for c in 0..cols {
        let mut nearest: Option<usize> = None;
        for r in 0..rows {
            if cells[[r, c]] {
                nearest = Some(r);
            }
            if let Some(n) = nearest {
                d[[r, c]] = ((r - n) * (r - n)) as f64;
            }
        }
        nearest = None;
        for r in (0..rows).rev() {
            if cells[[r, c]] {
                nearest = Some(r);
            }
            if let Some(n) = nearest {
                d[[r, c]] = d[[r, c]].min(((n - r) * (n - r)) as f64);
            }
        }
    }

    // Pass 2: per row, lower envelope of parabolas seeded by pass 1.
    let mut f = vec![0.0f64; cols];
    let mut v = vec![0usize; cols];
    let mut z = vec![0.0f64; cols + 1];
    for r in 0..rows {
        for c in 0..cols {
            f[c] = d[[r, c]];
        }
        let mut k = 0usize;
        let mut any = false;
        for q in 0..cols {
            if f[q].is_infinite() {
                continue;
            }
            let qf = q as f64;
            if !any {
                any = true;
                v[0] = q;
                z[0] = f64::NEG_INFINITY;
                z[1] = f64::INFINITY;
                k = 0;
                continue;
            }
            loop {
                let vf = v[k] as f64;
                let s = ((f[q] + qf * qf) - (f[v[k]] + vf * vf)) / (2.0 * qf - 2.0 * vf);
                if s <= z[k] {
                    if k == 0 {
                        v[0] = q;
                        z[0] = f64::NEG_INFINITY;
                        z[1] = f64::INFINITY;
                        break;
                    }
                    k -= 1;
                    continue;
                }
                k += 1;
                v[k] = q;
                z[k] = s;
                z[k + 1] = f64::INFINITY;
                break;
            }
        }
        if !any {
            continue; // whole row stays infinite
        }
        let mut k = 0usize;
        for c in 0..cols {
            let cf = c as f64;
            while z[k + 1] < cf {
                k += 1;
            }
            let vf = v[k] as f64;
            d[[r, c]] = (cf - vf) * (cf - vf) + f[v[k]];
        }
    }
    d
}

/// Parse a PGM image into occupancy (value < 128), flipping rows so the
/// first output row corresponds to the bottom image row.
fn parse_pgm(bytes: &[u8]) -> Result<Array2<bool>> {
    let mut tok = PgmTokens { bytes, pos: 0 };
    let magic = tok.token()?;
    let binary = match magic.as_slice() {
        b"P2" => false,
        b"P5" => true,
        other => {
            return Err(Error::PgmFormat(format!(
                "unsupported magic {:?}, expected P2 or P5",
                String::from_utf8_lossy(other)
            )))
        }
    };
    let width = tok.number()? as usize;
    let height = tok.number()? as usize;
    let maxval = tok.number()?;
    if width == 0 || height == 0 {
        return Err(Error::PgmFormat("image dimensions must be positive".into()));
    }
    if !(1..=65535).contains(&maxval) {
        return Err(Error::PgmFormat(format!("maxval {maxval} out of range")));
    }

    let mut top_down = Vec::with_capacity(width * height);
    if binary {
        if maxval > 255 {
            return Err(Error::PgmFormat("binary PGM with maxval > 255 is unsupported".into()));
        }
        // A single whitespace byte separates the header from raster data.
        tok.pos += 1;
        let raster = &bytes[tok.pos.min(bytes.len())..];
        if raster.len() < width * height {
            return Err(Error::PgmFormat(format!(
                "raster too short: expected {} bytes, found {}",
                width * height,
                raster.len()
            )));
        }
        top_down.extend(raster[..width * height].iter().map(|&b| (b as u32) < 128));
    } else {
        for _ in 0..width * height {
            let value = tok.number()?;
            if value > maxval {
                return Err(Error::PgmFormat(format!("pixel {value} exceeds maxval {maxval}")));
            }
            top_down.push(value < 128);
        }
    }

    let image = Array2::from_shape_vec((height, width), top_down)
        .expect("shape matches by construction");
    let mut flipped = Array2::from_elem((height, width), false);
    for r in 0..height {
        for c in 0..width {
            flipped[[r, c]] = image[[height - 1 - r, c]];
        }
    }
    Ok(flipped)
}

struct PgmTokens<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl PgmTokens<'_> {
    /// Next whitespace-delimited token, skipping `#` comments.
    fn token(&mut self) -> Result<Vec<u8>> {
        loop {
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            if self.pos < self.bytes.len() && self.bytes[self.pos] == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
                continue;
            }
            break;
        }
        if self.pos >= self.bytes.len() {
            return Err(Error::PgmFormat("unexpected end of header".into()));
        }
        let start = self.pos;
        while self.pos < self.bytes.len()
            && !self.bytes[self.pos].is_ascii_whitespace()
            && self.bytes[self.pos] != b'#'
        {
            self.pos += 1;
        }
        Ok(self.bytes[start..self.pos].to_vec())
    }

    fn number(&mut self) -> Result<u32> {
        let tok = self.token()?;
        std::str::from_utf8(&tok)
            .ok()
            .and_then(|s| s.parse::<u32>().ok())
            .ok_or_else(|| {
                Error::PgmFormat(format!("expected integer, got {:?}", String::from_utf8_lossy(&tok)))
            })
    }
}

//! Probabilistic 2D occupancy grid seeded from a BIM raster.
//!
//! Cells are addressed `(x, y)` with `x` the column and `y` the row; row 0 is
//! the southern edge of the map. Flat storage is row-major,
//! `index = y * width + x`.

mod edt;
mod layers;
pub mod mapio;
mod occupancy;
mod prior;
pub mod traversal;

pub use edt::{distance_transform, squared_distance_transform};
pub use layers::{discrepancy, entropy_bits, LayerStack};
pub use occupancy::{log_odds, probability, FusionParams, OccupancyGrid, TouchCounter};
pub use prior::BimPrior;
pub(crate) use prior::validate_p_occ;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point2;

/// Integer cell coordinate; may lie outside the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub x: i64,
    pub y: i64,
}

impl Cell {
    pub const fn new(x: i64, y: i64) -> Self {
        Self { x, y }
    }
}

/// Half-open cell rectangle `[x0, x1) x [y0, y1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CellRect {
    pub x0: i64,
    pub y0: i64,
    pub x1: i64,
    pub y1: i64,
}

impl CellRect {
    pub const fn new(x0: i64, y0: i64, x1: i64, y1: i64) -> Self {
        Self { x0, y0, x1, y1 }
    }

    pub fn width(&self) -> i64 {
        (self.x1 - self.x0).max(0)
    }

    pub fn height(&self) -> i64 {
        (self.y1 - self.y0).max(0)
    }

    pub fn area(&self) -> usize {
        (self.width() * self.height()) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.area() == 0
    }

    pub fn contains(&self, c: Cell) -> bool {
        c.x >= self.x0 && c.x < self.x1 && c.y >= self.y0 && c.y < self.y1
    }

    pub fn intersect(&self, other: &CellRect) -> CellRect {
        CellRect::new(
            self.x0.max(other.x0),
            self.y0.max(other.y0),
            self.x1.min(other.x1),
            self.y1.min(other.y1),
        )
    }

    pub fn expand(&self, by: i64) -> CellRect {
        CellRect::new(self.x0 - by, self.y0 - by, self.x1 + by, self.y1 + by)
    }

    /// Smallest rectangle containing all `cells`, or `None` if empty.
    pub fn bounding(cells: impl IntoIterator<Item = Cell>) -> Option<CellRect> {
        let mut it = cells.into_iter();
        let first = it.next()?;
        let mut r = CellRect::new(first.x, first.y, first.x + 1, first.y + 1);
        for c in it {
            r.x0 = r.x0.min(c.x);
            r.y0 = r.y0.min(c.y);
            r.x1 = r.x1.max(c.x + 1);
            r.y1 = r.y1.max(c.y + 1);
        }
        Some(r)
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (self.y0..self.y1).flat_map(move |y| (self.x0..self.x1).map(move |x| Cell::new(x, y)))
    }
}

/// Grid geometry: size, resolution and the world position of the (0,0) corner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridMeta {
    pub width: usize,
    pub height: usize,
    /// Metres per cell.
    pub resolution: f64,
    /// World coordinates of the lower-left corner of cell (0,0).
    pub origin: Point2,
}

impl GridMeta {
    pub fn new(width: usize, height: usize, resolution: f64, origin: Point2) -> Result<Self> {
        let meta = Self {
            width,
            height,
            resolution,
            origin,
        };
        meta.validate()?;
        Ok(meta)
    }

    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::Config(format!(
                "grid must be non-empty, got {}x{}",
                self.width, self.height
            )));
        }
        if !(self.resolution.is_finite() && self.resolution > 0.0) {
            return Err(Error::Config(format!(
                "grid resolution must be positive, got {}",
                self.resolution
            )));
        }
        if !(self.origin.x.is_finite() && self.origin.y.is_finite()) {
            return Err(Error::Config("grid origin must be finite".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn bounds(&self) -> CellRect {
        CellRect::new(0, 0, self.width as i64, self.height as i64)
    }

    /// Extent of the map in world coordinates: (min corner, max corner).
    pub fn world_extent(&self) -> (Point2, Point2) {
        let max = Point2::new(
            self.origin.x + self.width as f64 * self.resolution,
            self.origin.y + self.height as f64 * self.resolution,
        );
        (self.origin, max)
    }

    pub fn in_bounds(&self, c: Cell) -> bool {
        c.x >= 0 && c.y >= 0 && (c.x as usize) < self.width && (c.y as usize) < self.height
    }

    pub fn contains_point(&self, p: Point2) -> bool {
        let (lo, hi) = self.world_extent();
        p.x >= lo.x && p.y >= lo.y && p.x < hi.x && p.y < hi.y
    }

    /// Cell containing a world point (not bounds-checked).
    pub fn cell_of(&self, p: Point2) -> Cell {
        Cell::new(
            ((p.x - self.origin.x) / self.resolution).floor() as i64,
            ((p.y - self.origin.y) / self.resolution).floor() as i64,
        )
    }

    /// World coordinates of a cell centre.
    pub fn world_of(&self, c: Cell) -> Point2 {
        Point2::new(
            self.origin.x + (c.x as f64 + 0.5) * self.resolution,
            self.origin.y + (c.y as f64 + 0.5) * self.resolution,
        )
    }

    /// Flat index of an in-bounds cell.
    pub fn index(&self, c: Cell) -> Option<usize> {
        self.in_bounds(c)
            .then(|| c.y as usize * self.width + c.x as usize)
    }

    pub fn cell_at(&self, index: usize) -> Cell {
        Cell::new((index % self.width) as i64, (index / self.width) as i64)
    }

    /// Cell rectangle covering the axis-aligned world box, clipped to the grid.
    /// A cell is included when its centre lies inside the box.
    pub fn rect_from_world(&self, min: Point2, max: Point2) -> CellRect {
        let r = self.resolution;
        let x0 = ((min.x - self.origin.x) / r - 0.5).ceil() as i64;
        let y0 = ((min.y - self.origin.y) / r - 0.5).ceil() as i64;
        let x1 = ((max.x - self.origin.x) / r - 0.5).floor() as i64 + 1;
        let y1 = ((max.y - self.origin.y) / r - 0.5).floor() as i64 + 1;
        CellRect::new(x0, y0, x1, y1).intersect(&self.bounds())
    }

    pub fn check_same(&self, other: &GridMeta) -> Result<()> {
        if self != other {
            return Err(Error::MetaMismatch(format!(
                "{}x{}@{} origin ({}, {}) vs {}x{}@{} origin ({}, {})",
                self.width,
                self.height,
                self.resolution,
                self.origin.x,
                self.origin.y,
                other.width,
                other.height,
                other.resolution,
                other.origin.x,
                other.origin.y
            )));
        }
        Ok(())
    }
}

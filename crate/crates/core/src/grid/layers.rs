use super::{distance_transform, BimPrior, Cell, CellRect, GridMeta, OccupancyGrid};
use crate::error::{Error, Result};
use crate::geometry::Point2;

/// Shannon entropy of a Bernoulli variable, in bits.
pub fn entropy_bits(p: f64) -> f64 {
    let term = |q: f64| if q <= 0.0 { 0.0 } else { -q * q.log2() };
    (term(p) + term(1.0 - p)).clamp(0.0, 1.0)
}

/// Disagreement between an occupancy probability and the binary design value.
pub fn discrepancy(p: f64, design: f64) -> f64 {
    (p - design).abs()
}

/// Entropy, discrepancy and obstacle-distance rasters over a cell region.
///
/// The mission loop only needs layers near the robot, so a stack may cover a
/// sub-rectangle of the grid. Distances are exact for cells whose nearest
/// occupied cell lies inside the region; obstacles outside it are not seen.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerStack {
    meta: GridMeta,
    region: CellRect,
    tau_occ: f64,
    occupancy: Vec<f64>,
    entropy: Vec<f64>,
    discrepancy: Vec<f64>,
    distance: Vec<f64>,
}

impl LayerStack {
    /// Layers over the whole grid.
    pub fn compute(grid: &OccupancyGrid, prior: &BimPrior, tau_occ: f64) -> Result<Self> {
        Self::compute_region(grid, prior, tau_occ, grid.meta().bounds())
    }

    /// Layers over `region`, clipped to the grid.
    pub fn compute_region(
        grid: &OccupancyGrid,
        prior: &BimPrior,
        tau_occ: f64,
        region: CellRect,
    ) -> Result<Self> {
        let meta = *grid.meta();
        meta.check_same(prior.meta())?;
        if !(0.0..1.0).contains(&tau_occ) {
            return Err(Error::Config(format!("tau_occ must be in [0, 1), got {tau_occ}")));
        }
        let region = region.intersect(&meta.bounds());
        let n = region.area();
        let mut occupancy = Vec::with_capacity(n);
        let mut entropy = Vec::with_capacity(n);
        let mut disc = Vec::with_capacity(n);
        for c in region.cells() {
            let i = meta.index(c).unwrap();
            let p = grid.probability_at(i);
            occupancy.push(p);
            entropy.push(entropy_bits(p));
            disc.push(discrepancy(p, prior.design_value(i)));
        }
        let distance = distance_transform(
            region.width() as usize,
            region.height() as usize,
            meta.resolution,
            |k| occupancy[k] > tau_occ,
        );
        Ok(Self {
            meta,
            region,
            tau_occ,
            occupancy,
            entropy,
            discrepancy: disc,
            distance,
        })
    }

    pub fn meta(&self) -> &GridMeta {
        &self.meta
    }

    pub fn region(&self) -> CellRect {
        self.region
    }

    pub fn tau_occ(&self) -> f64 {
        self.tau_occ
    }

    fn local(&self, c: Cell) -> Option<usize> {
        self.region.contains(c).then(|| {
            (c.y - self.region.y0) as usize * self.region.width() as usize
                + (c.x - self.region.x0) as usize
        })
    }

    pub fn occupancy(&self, c: Cell) -> Option<f64> {
        self.local(c).map(|k| self.occupancy[k])
    }

    pub fn entropy(&self, c: Cell) -> Option<f64> {
        self.local(c).map(|k| self.entropy[k])
    }

    pub fn discrepancy(&self, c: Cell) -> Option<f64> {
        self.local(c).map(|k| self.discrepancy[k])
    }

    /// Distance in metres to the nearest occupied cell, `+inf` if none.
    pub fn distance(&self, c: Cell) -> Option<f64> {
        self.local(c).map(|k| self.distance[k])
    }

    /// Per-cell risk `alpha * H + beta * D`.
    pub fn risk(&self, c: Cell, alpha: f64, beta: f64) -> Option<f64> {
        self.local(c)
            .map(|k| alpha * self.entropy[k] + beta * self.discrepancy[k])
    }

    pub fn entropy_values(&self) -> &[f64] {
        &self.entropy
    }

    pub fn discrepancy_values(&self) -> &[f64] {
        &self.discrepancy
    }

    pub fn distance_values(&self) -> &[f64] {
        &self.distance
    }

    /// Obstacle distance at a world point, bilinearly interpolated between
    /// cell centres. Falls back to the containing cell when a neighbour has
    /// no finite distance.
    pub fn distance_at(&self, p: Point2) -> Result<f64> {
        let cell = self.meta.cell_of(p);
        if !self.meta.contains_point(p) || !self.region.contains(cell) {
            return Err(Error::OutOfBounds { x: p.x, y: p.y });
        }
        let res = self.meta.resolution;
        let gx = (p.x - self.meta.origin.x) / res - 0.5;
        let gy = (p.y - self.meta.origin.y) / res - 0.5;
        let r = self.region;
        let x0 = (gx.floor() as i64).clamp(r.x0, r.x1 - 1);
        let y0 = (gy.floor() as i64).clamp(r.y0, r.y1 - 1);
        let x1 = (x0 + 1).min(r.x1 - 1);
        let y1 = (y0 + 1).min(r.y1 - 1);
        let fx = (gx - x0 as f64).clamp(0.0, 1.0);
        let fy = (gy - y0 as f64).clamp(0.0, 1.0);
        let d = |x: i64, y: i64| self.distance(Cell::new(x, y)).unwrap();
        let (d00, d10, d01, d11) = (d(x0, y0), d(x1, y0), d(x0, y1), d(x1, y1));
        if ![d00, d10, d01, d11].iter().all(|v| v.is_finite()) {
            return Ok(d(cell.x, cell.y));
        }
        let bottom = d00 + (d10 - d00) * fx;
        let top = d01 + (d11 - d01) * fx;
        Ok(bottom + (top - bottom) * fy)
    }

    /// Clearance margin `DT - r_ugv` at a world point.
    pub fn clearance_at(&self, p: Point2, r_ugv: f64) -> Result<f64> {
        Ok(self.distance_at(p)? - r_ugv)
    }
}

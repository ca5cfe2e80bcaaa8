use crate::geometry::Point2;
use crate::grid::{distance_transform, Cell, GridMeta, OccupancyGrid};

/// Binary traversability snapshot used by the planner.
///
/// A cell is blocked when it lies within `inflation` of a cell with
/// `O > tau_occ`, or when its own occupancy is undecided
/// (`free_thresh <= O <= tau_occ`).
#[derive(Debug, Clone, PartialEq)]
pub struct PlanningMap {
    meta: GridMeta,
    blocked: Vec<bool>,
    obstacle_distance: Vec<f64>,
    inflation: f64,
}

impl PlanningMap {
    pub fn from_grid(grid: &OccupancyGrid, tau_occ: f64, free_thresh: f64, inflation: f64) -> Self {
        let meta = *grid.meta();
        let probs = grid.probabilities();
        let obstacle_distance =
            distance_transform(meta.width, meta.height, meta.resolution, |i| probs[i] > tau_occ);
        let blocked = probs
            .iter()
            .zip(&obstacle_distance)
            .map(|(&p, &d)| d < inflation || p >= free_thresh)
            .collect();
        Self {
            meta,
            blocked,
            obstacle_distance,
            inflation,
        }
    }

    pub fn meta(&self) -> &GridMeta {
        &self.meta
    }

    pub fn inflation(&self) -> f64 {
        self.inflation
    }

    pub fn blocked(&self) -> &[bool] {
        &self.blocked
    }

    pub fn is_cell_free(&self, c: Cell) -> bool {
        self.meta.index(c).is_some_and(|i| !self.blocked[i])
    }

    /// Distance from a cell to the nearest occupied cell, metres.
    pub fn obstacle_distance(&self, c: Cell) -> Option<f64> {
        self.meta.index(c).map(|i| self.obstacle_distance[i])
    }

    pub fn is_free(&self, p: Point2) -> bool {
        self.meta.contains_point(p) && self.is_cell_free(self.meta.cell_of(p))
    }

    /// Checks the segment at half-cell spacing, endpoints included.
    pub fn segment_free(&self, a: Point2, b: Point2) -> bool {
        let len = a.distance(b);
        let step = self.meta.resolution / 2.0;
        let n = (len / step).ceil() as usize;
        (0..=n).all(|k| {
            let t = if n == 0 { 0.0 } else { k as f64 / n as f64 };
            self.is_free(a.lerp(b, t))
        })
    }

    pub fn polyline_free(&self, points: &[Point2]) -> bool {
        points.windows(2).all(|w| self.segment_free(w[0], w[1]))
            && points.iter().all(|p| self.is_free(*p))
    }

    /// Nearest free cell centre to `p` by Euclidean distance, if any.
    pub fn nearest_free(&self, p: Point2) -> Option<Point2> {
        let mut best: Option<(f64, Cell)> = None;
        for (i, &b) in self.blocked.iter().enumerate() {
            if b {
                continue;
            }
            let c = self.meta.cell_at(i);
            let d = self.meta.world_of(c).distance(p);
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, c));
            }
        }
        best.map(|(_, c)| self.meta.world_of(c))
    }
}

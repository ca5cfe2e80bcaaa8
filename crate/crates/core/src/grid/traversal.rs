//! Exact grid traversal along a ray (Amanatides & Woo).
//!
//! The raycaster and the fusion update both walk beams through this iterator,
//! so the entry distance of the cell a simulated beam stopped in is bit-equal
//! to the range it reported.

use super::{Cell, GridMeta};
use crate::geometry::Point2;

/// One cell crossed by a ray, with the ray parameter (metres) at entry and exit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RaySegment {
    pub cell: Cell,
    pub t_enter: f64,
    pub t_exit: f64,
}

/// Iterator over the cells a ray visits, in order, up to `max_dist`.
#[derive(Debug, Clone)]
pub struct GridRay {
    cell: Cell,
    step_x: i64,
    step_y: i64,
    t_max_x: f64,
    t_max_y: f64,
    t_delta_x: f64,
    t_delta_y: f64,
    t: f64,
    max_dist: f64,
    done: bool,
}

impl GridRay {
    /// `dir` must be a unit vector.
    pub fn new(meta: &GridMeta, start: Point2, dir: Point2, max_dist: f64) -> Self {
        let res = meta.resolution;
        let gx = (start.x - meta.origin.x) / res;
        let gy = (start.y - meta.origin.y) / res;
        let cell = Cell::new(gx.floor() as i64, gy.floor() as i64);

        let axis = |g: f64, c: i64, d: f64| -> (i64, f64, f64) {
            if d > 0.0 {
                (1, ((c as f64 + 1.0) - g) * res / d, res / d)
            } else if d < 0.0 {
                (-1, (g - c as f64) * res / -d, res / -d)
            } else {
                (0, f64::INFINITY, f64::INFINITY)
            }
        };
        let (step_x, t_max_x, t_delta_x) = axis(gx, cell.x, dir.x);
        let (step_y, t_max_y, t_delta_y) = axis(gy, cell.y, dir.y);

        Self {
            cell,
            step_x,
            step_y,
            t_max_x,
            t_max_y,
            t_delta_x,
            t_delta_y,
            t: 0.0,
            max_dist,
            done: max_dist < 0.0,
        }
    }
}

impl Iterator for GridRay {
    type Item = RaySegment;

    fn next(&mut self) -> Option<RaySegment> {
        if self.done {
            return None;
        }
        let next_boundary = self.t_max_x.min(self.t_max_y);
        let t_exit = next_boundary.min(self.max_dist);
        let seg = RaySegment {
            cell: self.cell,
            t_enter: self.t,
            t_exit,
        };
        if next_boundary >= self.max_dist {
            self.done = true;
        } else if self.t_max_x < self.t_max_y {
            self.cell.x += self.step_x;
            self.t = self.t_max_x;
            self.t_max_x += self.t_delta_x;
        } else {
            self.cell.y += self.step_y;
            self.t = self.t_max_y;
            self.t_max_y += self.t_delta_y;
        }
        Some(seg)
    }
}

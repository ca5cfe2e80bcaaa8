//! Synthetic ground-truth site, planar LiDAR and idealized vehicle motion.

mod kinematics;
mod lidar;

pub use kinematics::{step_ugv, PathFollower};
pub use lidar::{raycast, raycast_scan, Scan, SensorSpec};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Cell, CellRect, GridMeta};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EditKind {
    Add,
    Remove,
}

/// A change to the site: a rectangle becomes occupied or free at `time`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorldEdit {
    pub kind: EditKind,
    pub rect: CellRect,
    pub time: f64,
}

/// Occupancy of the real site at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct TruthRaster {
    meta: GridMeta,
    occupied: Vec<bool>,
}

impl TruthRaster {
    pub fn meta(&self) -> &GridMeta {
        &self.meta
    }

    pub fn cells(&self) -> &[bool] {
        &self.occupied
    }

    /// Out-of-bounds cells read as free.
    pub fn is_occupied(&self, c: Cell) -> bool {
        self.meta.index(c).is_some_and(|i| self.occupied[i])
    }
}

/// Base raster plus an ordered log of timed edits.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruthWorld {
    meta: GridMeta,
    base: Vec<bool>,
    edits: Vec<WorldEdit>,
}

impl GroundTruthWorld {
    pub fn new(meta: GridMeta, base: Vec<bool>, edits: Vec<WorldEdit>) -> Result<Self> {
        meta.validate()?;
        if base.len() != meta.len() {
            return Err(Error::Config(format!(
                "truth raster has {} cells, grid needs {}",
                base.len(),
                meta.len()
            )));
        }
        let bounds = meta.bounds();
        for (k, e) in edits.iter().enumerate() {
            if e.rect.is_empty() || e.rect.intersect(&bounds) != e.rect {
                return Err(Error::Config(format!(
                    "edit {k} rectangle {:?} is empty or not inside the {}x{} grid",
                    e.rect, meta.width, meta.height
                )));
            }
            if !e.time.is_finite() {
                return Err(Error::Config(format!("edit {k} has a non-finite activation time")));
            }
        }
        Ok(Self { meta, base, edits })
    }

    pub fn meta(&self) -> &GridMeta {
        &self.meta
    }

    pub fn base(&self) -> &[bool] {
        &self.base
    }

    pub fn edits(&self) -> &[WorldEdit] {
        &self.edits
    }

    /// Which edits are in force at `time`.
    pub fn active_edits(&self, time: f64) -> Vec<bool> {
        self.edits.iter().map(|e| e.time <= time).collect()
    }

    /// Truth at `time`: every edit with activation time <= `time`, applied in log order.
    pub fn apply_edits(&self, time: f64) -> TruthRaster {
        let mut occupied = self.base.clone();
        for e in self.edits.iter().filter(|e| e.time <= time) {
            let value = e.kind == EditKind::Add;
            for c in e.rect.cells() {
                occupied[self.meta.index(c).unwrap()] = value;
            }
        }
        TruthRaster {
            meta: self.meta,
            occupied,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point2;

    fn world(edits: Vec<WorldEdit>) -> Result<GroundTruthWorld> {
        let meta = GridMeta::new(20, 20, 0.1, Point2::default()).unwrap();
        let base: Vec<bool> = (0..400).map(|i| i / 20 == 10).collect();
        GroundTruthWorld::new(meta, base, edits)
    }

    #[test]
    fn no_edits_leave_base() {
        let w = world(vec![]).unwrap();
        assert_eq!(w.apply_edits(100.0).cells(), w.base());
    }

    #[test]
    fn add_then_remove_restores_base() {
        let rect = CellRect::new(2, 2, 6, 4);
        let w = world(vec![
            WorldEdit { kind: EditKind::Add, rect, time: 1.0 },
            WorldEdit { kind: EditKind::Remove, rect, time: 5.0 },
        ])
        .unwrap();
        assert_eq!(w.apply_edits(0.0).cells(), w.base());
        assert!(w.apply_edits(2.0).is_occupied(Cell::new(3, 3)));
        assert_eq!(w.apply_edits(5.0).cells(), w.base());
        assert_eq!(w.apply_edits(2.0), w.apply_edits(2.0));
    }

    #[test]
    fn edits_differ_from_base_only_in_their_rectangles() {
        let adds = [CellRect::new(1, 1, 4, 2), CellRect::new(15, 3, 16, 9)];
        let removed = CellRect::new(5, 10, 9, 11);
        let mut edits: Vec<WorldEdit> = adds
            .iter()
            .map(|&rect| WorldEdit { kind: EditKind::Add, rect, time: 0.0 })
            .collect();
        edits.push(WorldEdit { kind: EditKind::Remove, rect: removed, time: 0.0 });
        let w = world(edits).unwrap();
        let truth = w.apply_edits(0.0);
        for i in 0..400 {
            let c = w.meta().cell_at(i);
            let inside = adds.iter().any(|r| r.contains(c)) || removed.contains(c);
            assert_eq!(truth.cells()[i] != w.base()[i], inside, "cell {c:?}");
        }
    }

    #[test]
    fn out_of_bounds_edit_is_rejected() {
        let rect = CellRect::new(15, 15, 25, 18);
        assert!(world(vec![WorldEdit { kind: EditKind::Add, rect, time: 0.0 }]).is_err());
    }
}

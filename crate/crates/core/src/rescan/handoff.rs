use serde::{Deserialize, Serialize};

use super::sweep::SweepPlan;
use crate::error::{Error, Result};
use crate::geometry::{cumulative_arc_lengths, point_at_arc, Pose2D};
use crate::grid::{BimPrior, CellRect, FusionParams, OccupancyGrid, TouchCounter};
use crate::world::{raycast, SensorSpec, TruthRaster};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HandoffMode {
    /// The rescan map replaces the live map.
    FullReplace,
    /// Only the ROI rectangle is copied from the rescan map.
    RoiPaste,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RescanResult {
    pub grid: OccupancyGrid,
    pub touches: TouchCounter,
    pub scans: usize,
    /// Scan poses skipped because they sat inside an occupied truth cell.
    pub skipped: usize,
}

/// Flies the sweep against the truth raster, scanning every `stride` metres
/// of path (lane transitions included), and fuses the scans into a fresh
/// grid seeded from the BIM prior. Poses are exact.
pub fn execute_rescan(
    truth: &TruthRaster,
    sweep: &SweepPlan,
    prior: &BimPrior,
    fusion: FusionParams,
    sensor: &SensorSpec,
    stride: f64,
    start_time: f64,
) -> Result<RescanResult> {
    if !(stride > 0.0) {
        return Err(Error::Config(format!("scan stride must be positive, got {stride}")));
    }
    truth.meta().check_same(prior.meta())?;
    let mut grid = OccupancyGrid::init_from_prior(prior, fusion)?;
    let mut touches = TouchCounter::new(*prior.meta());
    let pts = &sweep.waypoints;
    let arcs = cumulative_arc_lengths(pts);
    let total = arcs.last().copied().unwrap_or(0.0);
    let n = (total / stride).floor() as usize;
    let mut stations: Vec<f64> = (0..=n).map(|k| k as f64 * stride).collect();
    if stations.last().is_some_and(|&s| s < total) {
        stations.push(total);
    }
    let speed = if sweep.duration > 0.0 { total / sweep.duration } else { 1.0 };
    let (mut scans, mut skipped) = (0, 0);
    for s in stations {
        let p = point_at_arc(pts, &arcs, s);
        let ahead = point_at_arc(pts, &arcs, (s + stride).min(total));
        let yaw = if ahead == p { 0.0 } else { (ahead.y - p.y).atan2(ahead.x - p.x) };
        let pose = Pose2D::new(p.x, p.y, yaw);
        let meta = truth.meta();
        if !meta.contains_point(p) || truth.is_occupied(meta.cell_of(p)) {
            skipped += 1;
            continue;
        }
        let time = start_time + if speed > 0.0 { s / speed } else { 0.0 };
        let scan = raycast(truth, pose, sensor, time)?;
        grid.fuse_scan_tracked(prior, &scan, &mut touches)?;
        scans += 1;
    }
    Ok(RescanResult {
        grid,
        touches,
        scans,
        skipped,
    })
}

/// Merges a rescan map into the live map.
pub fn map_handoff(
    current: &OccupancyGrid,
    rescan: &OccupancyGrid,
    mode: HandoffMode,
    roi: CellRect,
) -> Result<OccupancyGrid> {
    current.meta().check_same(rescan.meta())?;
    match mode {
        HandoffMode::FullReplace => Ok(rescan.clone()),
        HandoffMode::RoiPaste => {
            let mut out = current.clone();
            let meta = *current.meta();
            for c in roi.intersect(&meta.bounds()).cells() {
                let i = meta.index(c).unwrap();
                out.set_log_odds(i, rescan.log_odds_at(i));
            }
            Ok(out)
        }
    }
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{polyline_length, Point2};
use crate::grid::GridMeta;
use crate::risk::RegionOfInterest;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepParams {
    /// Maximum distance between adjacent lanes, metres.
    pub lane_spacing: f64,
    /// How far the coverage rectangle extends beyond the ROI on each side, metres.
    pub coverage_margin: f64,
    /// Flight altitude, metres (bookkeeping only in the planar model).
    pub altitude: f64,
    /// Cruise speed, m/s.
    pub speed: f64,
}

impl Default for SweepParams {
    fn default() -> Self {
        Self {
            lane_spacing: 4.0,
            coverage_margin: 6.0,
            altitude: 2.5,
            speed: 2.0,
        }
    }
}

/// Boustrophedon flight plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPlan {
    pub waypoints: Vec<Point2>,
    pub altitude: f64,
    /// Requested maximum lane spacing, metres.
    pub lane_spacing: f64,
    pub lanes: usize,
    /// Coverage rectangle as (min corner, max corner) of the cell centres it spans.
    pub coverage: (Point2, Point2),
    pub length: f64,
    /// Flight time at cruise speed, seconds.
    pub duration: f64,
}

/// Lanes run along the long axis of the coverage rectangle (the ROI grown by
/// the coverage margin and clipped to the map). A rectangle no wider than one
/// cell gets a single centre lane; otherwise `max(2, ceil(W / spacing) + 1)`
/// lanes are spread evenly from edge to edge, flown in serpentine order.
pub fn plan_sweep(roi: &RegionOfInterest, meta: &GridMeta, params: &SweepParams) -> Result<SweepPlan> {
    if roi.rect.is_empty() {
        return Err(Error::Config("cannot sweep an empty ROI".into()));
    }
    if !(params.lane_spacing > 0.0 && params.speed > 0.0 && params.coverage_margin >= 0.0) {
        return Err(Error::Config("lane spacing and speed must be positive, margin >= 0".into()));
    }
    let cells = (params.coverage_margin / meta.resolution - 1e-9).ceil().max(0.0) as i64;
    let rect = roi.rect.expand(cells).intersect(&meta.bounds());
    let lo = meta.world_of(crate::grid::Cell::new(rect.x0, rect.y0));
    let hi = meta.world_of(crate::grid::Cell::new(rect.x1 - 1, rect.y1 - 1));
    let (span_x, span_y) = (hi.x - lo.x, hi.y - lo.y);
    let along_x = span_x >= span_y;
    let (short_lo, short_hi, long_lo, long_hi) = if along_x {
        (lo.y, hi.y, lo.x, hi.x)
    } else {
        (lo.x, hi.x, lo.y, hi.y)
    };
    let width = short_hi - short_lo;
    let lanes = if width <= meta.resolution {
        1
    } else {
        ((width / params.lane_spacing - 1e-9).ceil() as usize + 1).max(2)
    };
    let offsets: Vec<f64> = if lanes == 1 {
        vec![(short_lo + short_hi) / 2.0]
    } else {
        (0..lanes)
            .map(|k| short_lo + width * k as f64 / (lanes - 1) as f64)
            .collect()
    };
    let mut waypoints = Vec::with_capacity(2 * lanes);
    for (k, &o) in offsets.iter().enumerate() {
        let (a, b) = if k % 2 == 0 { (long_lo, long_hi) } else { (long_hi, long_lo) };
        for t in [a, b] {
            waypoints.push(if along_x { Point2::new(t, o) } else { Point2::new(o, t) });
        }
    }
    let length = polyline_length(&waypoints);
    Ok(SweepPlan {
        waypoints,
        altitude: params.altitude,
        lane_spacing: params.lane_spacing,
        lanes,
        coverage: (lo, hi),
        length,
        duration: length / params.speed,
    })
}

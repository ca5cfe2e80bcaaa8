use serde::{Deserialize, Serialize};

use super::assess::RiskReport;
use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::grid::{CellRect, GridMeta};

/// Risk over the bounding box of a window; cells outside the window hold 0.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskRaster {
    pub rect: CellRect,
    pub values: Vec<f64>,
}

impl RiskRaster {
    pub fn from_report(report: &RiskReport) -> Option<Self> {
        let rect = CellRect::bounding(report.cells.iter().copied())?;
        let w = rect.width() as usize;
        let mut values = vec![0.0; rect.area()];
        for (c, r) in report.cells.iter().zip(&report.risks) {
            values[(c.y - rect.y0) as usize * w + (c.x - rect.x0) as usize] = *r;
        }
        Some(Self { rect, values })
    }

    fn at(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.rect.width() as usize + x]
    }
}

/// Highest-mean-risk rectangle of the window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionOfInterest {
    pub rect: CellRect,
    pub mean_risk: f64,
    /// World position of the rectangle centre.
    pub anchor: Point2,
    /// Number of cells in the rectangle.
    pub size: usize,
}

/// Risk values are in [0, 1]; summing them as fixed-point integers makes the
/// window sums exact, so equal-risk placements tie exactly.
const FIXED_SCALE: f64 = (1u64 << 40) as f64;

/// Slides a `width x height` rectangle over the raster and returns the
/// placement with the largest mean risk (divisor = rectangle area). Ties go
/// to the smallest row-major lower-left cell. Dimensions larger than the
/// raster are clamped to it, so a small window yields its bounding box.
pub fn extract_roi(
    raster: &RiskRaster,
    meta: &GridMeta,
    width: usize,
    height: usize,
) -> Result<RegionOfInterest> {
    if width == 0 || height == 0 {
        return Err(Error::Config("ROI shape must be non-empty".into()));
    }
    if raster.rect.is_empty() {
        return Err(Error::Config("cannot extract an ROI from an empty window".into()));
    }
    let bw = raster.rect.width() as usize;
    let bh = raster.rect.height() as usize;
    let w = width.min(bw);
    let h = height.min(bh);

    // Summed-area table with a zero border: sat[(y+1)*(bw+1) + x+1] = sum over [0..=x]x[0..=y].
    let stride = bw + 1;
    let mut sat = vec![0i64; stride * (bh + 1)];
    for y in 0..bh {
        let mut row = 0i64;
        for x in 0..bw {
            row += (raster.at(x, y) * FIXED_SCALE).round() as i64;
            sat[(y + 1) * stride + x + 1] = sat[y * stride + x + 1] + row;
        }
    }
    let window_sum = |x: usize, y: usize| {
        sat[(y + h) * stride + x + w] - sat[y * stride + x + w] - sat[(y + h) * stride + x]
            + sat[y * stride + x]
    };

    let mut best = (i64::MIN, 0usize, 0usize);
    for y in 0..=bh - h {
        for x in 0..=bw - w {
            let s = window_sum(x, y);
            if s > best.0 {
                best = (s, x, y);
            }
        }
    }
    let (_, bx, by) = best;
    let rect = CellRect::new(
        raster.rect.x0 + bx as i64,
        raster.rect.y0 + by as i64,
        raster.rect.x0 + (bx + w) as i64,
        raster.rect.y0 + (by + h) as i64,
    );
    let mut sum = 0.0;
    for y in by..by + h {
        for x in bx..bx + w {
            sum += raster.at(x, y);
        }
    }
    let size = w * h;
    let res = meta.resolution;
    let anchor = Point2::new(
        meta.origin.x + (rect.x0 + rect.x1) as f64 * 0.5 * res,
        meta.origin.y + (rect.y0 + rect.y1) as f64 * 0.5 * res,
    );
    Ok(RegionOfInterest {
        rect,
        mean_risk: sum / size as f64,
        anchor,
        size,
    })
}

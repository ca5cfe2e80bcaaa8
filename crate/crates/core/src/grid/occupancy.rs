use serde::{Deserialize, Serialize};

use super::traversal::GridRay;
use super::{BimPrior, Cell, GridMeta};
use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::world::Scan;

/// `ln(p / (1 - p))`.
pub fn log_odds(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

/// Logistic inverse of [`log_odds`].
pub fn probability(l: f64) -> f64 {
    1.0 / (1.0 + (-l).exp())
}

/// Inverse sensor model and clip bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FusionParams {
    /// Probability assigned to the cell a beam ended in.
    pub p_occ: f64,
    /// Probability assigned to cells a beam passed through.
    pub p_free: f64,
    pub l_min: f64,
    pub l_max: f64,
}

impl Default for FusionParams {
    fn default() -> Self {
        Self {
            p_occ: 0.9,
            p_free: 0.35,
            l_min: -5.0,
            l_max: 5.0,
        }
    }
}

impl FusionParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.p_occ > 0.5 && self.p_occ < 1.0) {
            return Err(Error::Config(format!("P_occ must be in (0.5, 1), got {}", self.p_occ)));
        }
        if !(self.p_free > 0.0 && self.p_free < 0.5) {
            return Err(Error::Config(format!("P_free must be in (0, 0.5), got {}", self.p_free)));
        }
        if !(self.l_min.is_finite() && self.l_max.is_finite() && self.l_min < self.l_max) {
            return Err(Error::Config(format!(
                "clip bounds must satisfy l_min < l_max, got [{}, {}]",
                self.l_min, self.l_max
            )));
        }
        Ok(())
    }

    pub fn hit_increment(&self) -> f64 {
        log_odds(self.p_occ)
    }

    pub fn miss_increment(&self) -> f64 {
        log_odds(self.p_free)
    }
}

/// Per-cell count of beam traversals, for coverage checks.
#[derive(Debug, Clone, PartialEq)]
pub struct TouchCounter {
    meta: GridMeta,
    counts: Vec<u32>,
}

impl TouchCounter {
    pub fn new(meta: GridMeta) -> Self {
        Self {
            counts: vec![0; meta.len()],
            meta,
        }
    }

    pub fn count(&self, c: Cell) -> u32 {
        self.meta.index(c).map_or(0, |i| self.counts[i])
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }
}

/// Log-odds occupancy field.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyGrid {
    meta: GridMeta,
    logodds: Vec<f64>,
    params: FusionParams,
}

/// Scratch buffers for summing a scan's evidence before clipping.
#[derive(Default)]
struct ScanAccumulator {
    delta: Vec<f64>,
    seen: Vec<bool>,
    touched: Vec<usize>,
}

impl ScanAccumulator {
    fn add(&mut self, i: usize, v: f64) {
        if !self.seen[i] {
            self.seen[i] = true;
            self.touched.push(i);
        }
        self.delta[i] += v;
    }
}

impl OccupancyGrid {
    /// Every cell starts at its soft-prior log-odds.
    pub fn init_from_prior(prior: &BimPrior, params: FusionParams) -> Result<Self> {
        params.validate()?;
        super::prior::validate_p_occ(prior.p_occ())?;
        let meta = *prior.meta();
        let logodds = (0..meta.len()).map(|i| prior.prior_log_odds(i)).collect();
        Ok(Self {
            meta,
            logodds,
            params,
        })
    }

    pub fn meta(&self) -> &GridMeta {
        &self.meta
    }

    pub fn params(&self) -> &FusionParams {
        &self.params
    }

    pub fn log_odds_values(&self) -> &[f64] {
        &self.logodds
    }

    pub fn log_odds_at(&self, index: usize) -> f64 {
        self.logodds[index]
    }

    pub fn probability_at(&self, index: usize) -> f64 {
        probability(self.logodds[index])
    }

    pub fn cell_probability(&self, c: Cell) -> Option<f64> {
        self.meta.index(c).map(|i| self.probability_at(i))
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.logodds.iter().map(|&l| probability(l)).collect()
    }

    /// Overwrites one cell's log-odds (clipped). Used by map handoff.
    pub(crate) fn set_log_odds(&mut self, index: usize, l: f64) {
        self.logodds[index] = l.clamp(self.params.l_min, self.params.l_max);
    }

    /// Adds `delta` to one cell and clips, unless the cell is frozen.
    /// Returns whether the cell was modifiable.
    pub fn add_evidence(&mut self, prior: &BimPrior, c: Cell, delta: f64) -> Result<bool> {
        self.meta.check_same(prior.meta())?;
        let i = self.meta.index(c).ok_or(Error::OutOfBounds {
            x: c.x as f64,
            y: c.y as f64,
        })?;
        if prior.is_frozen(i) {
            return Ok(false);
        }
        self.set_log_odds(i, self.logodds[i] + delta);
        Ok(true)
    }

    /// Fuses one scan. Returns the number of distinct unfrozen cells updated.
    pub fn fuse_scan(&mut self, prior: &BimPrior, scan: &Scan) -> Result<usize> {
        self.fuse(prior, scan, None)
    }

    /// As [`Self::fuse_scan`], also counting every beam traversal per cell.
    pub fn fuse_scan_tracked(
        &mut self,
        prior: &BimPrior,
        scan: &Scan,
        touches: &mut TouchCounter,
    ) -> Result<usize> {
        self.meta.check_same(&touches.meta)?;
        self.fuse(prior, scan, Some(touches))
    }

    fn fuse(
        &mut self,
        prior: &BimPrior,
        scan: &Scan,
        mut touches: Option<&mut TouchCounter>,
    ) -> Result<usize> {
        self.meta.check_same(prior.meta())?;
        let origin = scan.pose.position();
        if !self.meta.contains_point(origin) {
            return Err(Error::OutOfBounds {
                x: origin.x,
                y: origin.y,
            });
        }
        let hit = self.params.hit_increment();
        let miss = self.params.miss_increment();
        let mut acc = ScanAccumulator {
            delta: vec![0.0; self.meta.len()],
            seen: vec![false; self.meta.len()],
            touched: Vec::new(),
        };

        for (k, &range) in scan.ranges.iter().enumerate() {
            let angle = scan.beam_angle(k);
            let dir = Point2::new(angle.cos(), angle.sin());
            let is_hit = range.is_finite() && range <= scan.range_max;
            let reach = if is_hit { range } else { scan.range_max };
            // Walk one cell past `reach` so the cell the beam ended in is visited.
            let ray = GridRay::new(&self.meta, origin, dir, reach + self.meta.resolution);
            for seg in ray {
                let Some(i) = self.meta.index(seg.cell) else {
                    break;
                };
                if is_hit {
                    if seg.t_exit <= reach {
                        acc.add(i, miss);
                    } else {
                        acc.add(i, hit);
                        if let Some(t) = touches.as_deref_mut() {
                            t.counts[i] += 1;
                        }
                        break;
                    }
                } else if seg.t_enter < reach {
                    acc.add(i, miss);
                } else {
                    break;
                }
                if let Some(t) = touches.as_deref_mut() {
                    t.counts[i] += 1;
                }
            }
        }

        let mut updated = 0;
        for &i in &acc.touched {
            if prior.is_frozen(i) {
                continue;
            }
            self.set_log_odds(i, self.logodds[i] + acc.delta[i]);
            updated += 1;
        }
        Ok(updated)
    }
}

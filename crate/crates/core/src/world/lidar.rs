use std::f64::consts::TAU;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{GroundTruthWorld, TruthRaster};
use crate::error::{Error, Result};
use crate::geometry::{Point2, Pose2D};
use crate::grid::traversal::GridRay;

/// Planar LiDAR description.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SensorSpec {
    pub beams: usize,
    /// Field of view in radians, centred on the heading.
    pub fov: f64,
    pub range_max: f64,
    /// Standard deviation of additive Gaussian range noise (0 disables it).
    pub noise_sigma: f64,
    pub noise_seed: u64,
}

impl Default for SensorSpec {
    fn default() -> Self {
        Self {
            beams: 360,
            fov: TAU,
            range_max: 12.0,
            noise_sigma: 0.0,
            noise_seed: 0,
        }
    }
}

impl SensorSpec {
    pub fn validate(&self) -> Result<()> {
        if self.beams == 0 {
            return Err(Error::Config("sensor needs at least one beam".into()));
        }
        if !(self.fov > 0.0 && self.fov <= TAU) {
            return Err(Error::Config(format!("sensor fov must be in (0, 2pi], got {}", self.fov)));
        }
        if !(self.range_max.is_finite() && self.range_max > 0.0) {
            return Err(Error::Config(format!("sensor range must be positive, got {}", self.range_max)));
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return Err(Error::Config("sensor noise sigma must be >= 0".into()));
        }
        Ok(())
    }

    /// (angle_min, angle_max, increment) relative to the heading. A full
    /// circle does not repeat the first beam at the last angle.
    pub fn angles(&self) -> (f64, f64, f64) {
        let min = -self.fov / 2.0;
        if self.beams == 1 {
            return (0.0, 0.0, self.fov);
        }
        let inc = if self.fov >= TAU - 1e-12 {
            self.fov / self.beams as f64
        } else {
            self.fov / (self.beams - 1) as f64
        };
        (min, min + inc * (self.beams - 1) as f64, inc)
    }
}

/// One sweep of range readings. Beams that saw nothing read `f64::INFINITY`.
#[derive(Debug, Clone, PartialEq)]
pub struct Scan {
    pub pose: Pose2D,
    pub angle_min: f64,
    pub angle_max: f64,
    pub angle_increment: f64,
    pub range_max: f64,
    pub ranges: Vec<f64>,
    pub timestamp: f64,
}

impl Scan {
    /// World-frame bearing of beam `k`.
    pub fn beam_angle(&self, k: usize) -> f64 {
        self.pose.yaw + self.angle_min + k as f64 * self.angle_increment
    }

    /// Number of beams implied by the angular limits.
    pub fn expected_len(&self) -> usize {
        ((self.angle_max - self.angle_min) / self.angle_increment + 1e-9).floor() as usize + 1
    }
}

/// Scan of the world as it stands at `time`.
pub fn raycast_scan(
    world: &GroundTruthWorld,
    pose: Pose2D,
    spec: &SensorSpec,
    time: f64,
) -> Result<Scan> {
    raycast(&world.apply_edits(time), pose, spec, time)
}

/// Scan of a fixed truth raster. Each beam reports the distance at which it
/// enters the first occupied cell; beams that leave the grid or exceed the
/// range read `f64::INFINITY`.
pub fn raycast(truth: &TruthRaster, pose: Pose2D, spec: &SensorSpec, time: f64) -> Result<Scan> {
    spec.validate()?;
    let meta = truth.meta();
    let origin = pose.position();
    if !meta.contains_point(origin) {
        return Err(Error::OutOfBounds { x: pose.x, y: pose.y });
    }
    if truth.is_occupied(meta.cell_of(origin)) {
        return Err(Error::SensorEmbedded { x: pose.x, y: pose.y });
    }
    let (angle_min, angle_max, inc) = spec.angles();
    let mut scan = Scan {
        pose,
        angle_min,
        angle_max,
        angle_increment: inc,
        range_max: spec.range_max,
        ranges: Vec::with_capacity(spec.beams),
        timestamp: time,
    };
    for k in 0..spec.beams {
        let a = scan.beam_angle(k);
        let dir = Point2::new(a.cos(), a.sin());
        let mut range = f64::INFINITY;
        for seg in GridRay::new(meta, origin, dir, spec.range_max) {
            if !meta.in_bounds(seg.cell) {
                break;
            }
            if truth.is_occupied(seg.cell) {
                range = seg.t_enter;
                break;
            }
        }
        scan.ranges.push(range);
    }
    if spec.noise_sigma > 0.0 {
        let seed = spec.noise_seed
            ^ time.to_bits().rotate_left(17)
            ^ pose.x.to_bits().rotate_left(31)
            ^ pose.y.to_bits();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, spec.noise_sigma).expect("sigma validated");
        for r in scan.ranges.iter_mut().filter(|r| r.is_finite()) {
            *r = (*r + normal.sample(&mut rng)).clamp(0.0, spec.range_max);
        }
    }
    Ok(scan)
}

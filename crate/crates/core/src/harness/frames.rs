//! ENU (x east, y north, z up) to NED (x north, y east, z down).

use serde::{Deserialize, Serialize};

use crate::geometry::Point2;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }
}

pub fn enu_to_ned(p: Vec3) -> Vec3 {
    Vec3::new(p.y, p.x, -p.z)
}

pub fn ned_to_enu(p: Vec3) -> Vec3 {
    Vec3::new(p.y, p.x, -p.z)
}

/// Planar ENU waypoints at a fixed altitude, as NED points.
pub fn waypoints_to_ned(points: &[Point2], altitude: f64) -> Vec<Vec3> {
    points
        .iter()
        .map(|p| enu_to_ned(Vec3::new(p.x, p.y, altitude)))
        .collect()
}

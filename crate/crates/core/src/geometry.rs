//! Planar geometry shared by the mapping, planning and simulation layers.
//!
//! All coordinates are metres in the ENU ground plane; `z` is suppressed.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn lerp(self, other: Point2, t: f64) -> Point2 {
        self + (other - self) * t
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, rhs: f64) -> Point2 {
        Point2::new(self.x * rhs, self.y * rhs)
    }
}

impl From<[f64; 2]> for Point2 {
    fn from(v: [f64; 2]) -> Self {
        Point2::new(v[0], v[1])
    }
}

/// Wraps an angle into (-pi, pi].
pub fn normalize_angle(theta: f64) -> f64 {
    let mut a = theta.rem_euclid(2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    }
    a
}

/// Planar robot pose in the world (ENU) frame.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Pose2D {
    pub x: f64,
    pub y: f64,
    /// Heading in radians, kept in (-pi, pi].
    pub yaw: f64,
}

impl Pose2D {
    pub fn new(x: f64, y: f64, yaw: f64) -> Self {
        Self {
            x,
            y,
            yaw: normalize_angle(yaw),
        }
    }

    pub fn position(&self) -> Point2 {
        Point2::new(self.x, self.y)
    }
}

/// Distance from `p` to segment `ab`, and the segment parameter of the closest point.
pub fn point_segment_distance(p: Point2, a: Point2, b: Point2) -> (f64, f64) {
    let ab = b - a;
    let len_sq = ab.dot(ab);
    if len_sq == 0.0 {
        return (p.distance(a), 0.0);
    }
    let t = ((p - a).dot(ab) / len_sq).clamp(0.0, 1.0);
    (p.distance(a + ab * t), t)
}

/// Total length of a polyline.
pub fn polyline_length(points: &[Point2]) -> f64 {
    points.windows(2).map(|w| w[0].distance(w[1])).sum()
}

/// Cumulative arc length at each vertex, starting at zero.
pub fn cumulative_arc_lengths(points: &[Point2]) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(points.len());
    for (i, p) in points.iter().enumerate() {
        if i > 0 {
            acc += points[i - 1].distance(*p);
        }
        out.push(acc);
    }
    out
}

/// Point at arc length `s` along a polyline with precomputed cumulative lengths.
/// `s` is clamped to the polyline extent.
pub fn point_at_arc(points: &[Point2], arcs: &[f64], s: f64) -> Point2 {
    debug_assert_eq!(points.len(), arcs.len());
    if points.is_empty() {
        return Point2::default();
    }
    let total = *arcs.last().unwrap();
    let s = s.clamp(0.0, total);
    let seg = arcs.partition_point(|&a| a <= s).saturating_sub(1);
    if seg + 1 >= points.len() {
        return *points.last().unwrap();
    }
    let span = arcs[seg + 1] - arcs[seg];
    if span <= 0.0 {
        return points[seg];
    }
    points[seg].lerp(points[seg + 1], (s - arcs[seg]) / span)
}

/// Nearest-point projection of `p` onto a polyline: (distance, arc length).
pub fn project_onto_polyline(points: &[Point2], arcs: &[f64], p: Point2) -> (f64, f64) {
    let mut best = (f64::INFINITY, 0.0);
    for (i, w) in points.windows(2).enumerate() {
        let (d, t) = point_segment_distance(p, w[0], w[1]);
        if d < best.0 {
            best = (d, arcs[i] + t * (arcs[i + 1] - arcs[i]));
        }
    }
    if points.len() == 1 {
        best = (p.distance(points[0]), 0.0);
    }
    best
}

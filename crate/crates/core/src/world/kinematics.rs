use crate::geometry::{Point2, Pose2D};

/// Moves toward `waypoint` by at most `speed * dt`, heading along the motion.
/// Lands exactly on the waypoint instead of overshooting it.
pub fn step_ugv(pose: Pose2D, waypoint: Point2, speed: f64, dt: f64) -> Pose2D {
    let here = pose.position();
    let delta = waypoint - here;
    let remaining = delta.norm();
    if remaining == 0.0 {
        return pose;
    }
    let yaw = delta.y.atan2(delta.x);
    let step = speed * dt;
    if step >= remaining {
        return Pose2D::new(waypoint.x, waypoint.y, yaw);
    }
    let p = here + delta * (step / remaining);
    Pose2D::new(p.x, p.y, yaw)
}

/// Follows a polyline waypoint by waypoint, spending the full distance budget
/// of each tick across waypoint boundaries.
#[derive(Debug, Clone, PartialEq)]
pub struct PathFollower {
    waypoints: Vec<Point2>,
    next: usize,
}

impl PathFollower {
    pub fn new(waypoints: Vec<Point2>) -> Self {
        Self { waypoints, next: 0 }
    }

    pub fn is_finished(&self) -> bool {
        self.next >= self.waypoints.len()
    }

    pub fn waypoints(&self) -> &[Point2] {
        &self.waypoints
    }

    /// Advances one tick; returns the new pose and the distance travelled.
    pub fn advance(&mut self, pose: Pose2D, speed: f64, dt: f64) -> (Pose2D, f64) {
        let mut pose = pose;
        let mut budget = speed * dt;
        let mut travelled = 0.0;
        while budget > 1e-12 && !self.is_finished() {
            let target = self.waypoints[self.next];
            let before = pose.position();
            let gap = before.distance(target);
            pose = step_ugv(pose, target, budget, 1.0);
            let moved = before.distance(pose.position());
            travelled += moved;
            budget -= moved;
            if moved >= gap {
                self.next += 1;
            }
        }
        (pose, travelled)
    }
}

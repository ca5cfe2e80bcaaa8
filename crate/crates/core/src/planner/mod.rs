//! Global path planning on the fused map and the frontier-exploration baseline.

mod costmap;
mod frontier;
mod rrt_star;
mod smoothing;

pub use costmap::PlanningMap;
pub use frontier::{frontier_cells, frontier_explore_step, ExploreTarget, FrontierParams};
pub use rrt_star::{plan_rrt_star, PlanRequest, PlannedPath};
pub use smoothing::{resample, shortcut, smooth_and_resample};

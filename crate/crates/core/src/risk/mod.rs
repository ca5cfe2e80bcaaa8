//! Corridor risk: which map cells lie ahead of the robot, how uncertain or
//! off-design they are, and whether the robot should stop.

mod assess;
mod corridor;
mod roi;

pub use assess::{assess, RiskParams, RiskReport, TriggerReason};
pub use corridor::{build_corridor, forward_window, Corridor, ForwardWindow};
pub use roi::{extract_roi, RegionOfInterest, RiskRaster};

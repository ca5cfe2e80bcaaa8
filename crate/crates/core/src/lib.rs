//! Simulation library for BIM-prior UGV navigation with risk-triggered UAV
//! rescans: occupancy fusion, corridor risk, RRT* planning, boustrophedon
//! sweeps and the scenario mission loop.

pub mod error;
pub mod geometry;
pub mod harness;
pub mod grid;
pub mod planner;
pub mod rescan;
pub mod risk;
pub mod world;

pub use error::{Error, Result};

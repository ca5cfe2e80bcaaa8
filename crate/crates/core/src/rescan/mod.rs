//! Risk-triggered UAV intervention: a lawnmower sweep over the region of
//! interest, a fresh map from the sweep's scans, and the handoff to the UGV.

mod handoff;
mod sweep;

pub use handoff::{execute_rescan, map_handoff, HandoffMode, RescanResult};
pub use sweep::{plan_sweep, SweepParams, SweepPlan};

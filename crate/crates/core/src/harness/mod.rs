//! Scenario orchestration: configuration, the mission loop, metrics,
//! frame conversion, snapshot rendering and the shipped site map.

mod config;
pub mod frames;
mod metrics;
mod mission;
pub mod render;
pub mod site;

pub use config::{
    CorridorConfig, EditSpec, ExploreConfig, PlannerConfig, Policy, PriorConfig, ScenarioConfig,
    UavConfig, UgvConfig, WorldBox,
};
pub use frames::{enu_to_ned, ned_to_enu, Vec3};
pub use metrics::{compute_metrics, summarize_all, write_summary_csv, write_summary_json, MetricsSummary};
pub use mission::{
    run_batch, run_mission, run_mission_observed, Intervention, MissionRecord, Snapshot, TracePoint,
};

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::grid::{CellRect, FusionParams, GridMeta};
use crate::planner::FrontierParams;
use crate::rescan::{HandoffMode, SweepParams};
use crate::risk::RiskParams;
use crate::world::{EditKind, SensorSpec, WorldEdit};

/// What the UGV does when the safety trigger fires.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Policy {
    /// Halt and abandon the mission.
    StaticBim,
    /// Halt, sweep the ROI with the UAV, swap maps and replan.
    UavAssisted,
    /// Halt, explore nearby frontiers with the UGV alone, then replan.
    FrontierOnly,
}

/// Axis-aligned box in world metres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorldBox {
    pub min: [f64; 2],
    pub max: [f64; 2],
}

impl WorldBox {
    pub fn to_cells(&self, meta: &GridMeta) -> CellRect {
        meta.rect_from_world(self.min.into(), self.max.into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EditSpec {
    pub kind: EditKind,
    #[serde(flatten)]
    pub area: WorldBox,
    /// Simulation time at which the edit appears, seconds.
    #[serde(default)]
    pub time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PriorConfig {
    pub p_occ: f64,
    /// Wall margin frozen against updates, metres.
    pub frozen_margin: f64,
}

impl Default for PriorConfig {
    fn default() -> Self {
        Self {
            p_occ: 0.67,
            frozen_margin: 0.2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CorridorConfig {
    /// Corridor half-width, metres.
    pub half_width: f64,
    /// Look-ahead arc length, metres.
    pub lookahead: f64,
    /// Occupancy above which a cell counts as an obstacle.
    pub tau_occ: f64,
    /// Occupancy below which a cell counts as free for planning.
    pub free_thresh: f64,
}

impl Default for CorridorConfig {
    fn default() -> Self {
        Self {
            half_width: 1.0,
            lookahead: 5.0,
            tau_occ: 0.65,
            free_thresh: 0.35,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct UgvConfig {
    pub speed: f64,
    /// Simulation tick, seconds.
    pub dt: f64,
    pub sensor: SensorSpec,
}

impl Default for UgvConfig {
    fn default() -> Self {
        Self {
            speed: 1.0,
            dt: 0.1,
            sensor: SensorSpec::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct UavConfig {
    pub sweep: SweepParams,
    pub sensor: SensorSpec,
    /// Distance flown between scans, metres.
    pub scan_stride: f64,
    pub handoff: HandoffMode,
    /// ROI rectangle size, metres.
    pub roi_size: [f64; 2],
}

impl Default for UavConfig {
    fn default() -> Self {
        Self {
            sweep: SweepParams::default(),
            sensor: SensorSpec {
                range_max: 6.0,
                ..SensorSpec::default()
            },
            scan_stride: 0.25,
            handoff: HandoffMode::FullReplace,
            roi_size: [5.0, 5.0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlannerConfig {
    pub max_iterations: usize,
    pub step: f64,
    pub goal_bias: f64,
    pub rewire_radius: f64,
    pub resample_spacing: f64,
    /// Added to `r_ugv + m_min` when inflating obstacles. Obstacle distance
    /// is checked at cell centres, so one cell of slack keeps the clearance
    /// at points between centres from dipping under `m_min`.
    pub inflation_slack: f64,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            max_iterations: 20_000,
            step: 1.0,
            goal_bias: 0.1,
            rewire_radius: 3.0,
            resample_spacing: 0.5,
            inflation_slack: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExploreConfig {
    /// Frontier search radius around the robot, metres.
    pub radius: f64,
    /// Driving speed while exploring, m/s.
    pub speed: f64,
    /// Time spent scanning at each reached frontier, seconds.
    pub dwell: f64,
    /// Upper bound on frontier targets per intervention.
    pub max_targets: usize,
    pub frontier: FrontierParams,
}

impl Default for ExploreConfig {
    fn default() -> Self {
        Self {
            radius: 5.0,
            speed: 0.5,
            dwell: 2.0,
            max_targets: 40,
            // Routes keep the same distance from obstacles as planned paths,
            // so the robot never parks where the clearance trigger fires.
            frontier: FrontierParams {
                robot_radius: 0.7,
                ..FrontierParams::default()
            },
        }
    }
}

/// One mission scenario: the BIM map, how the real site differs from it, and
/// every tunable of the loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub policy: Policy,
    /// YAML sidecar of the BIM occupancy map, relative to the scenario file.
    pub map: PathBuf,
    pub start: [f64; 2],
    pub goal: [f64; 2],
    #[serde(default)]
    pub edits: Vec<EditSpec>,
    /// Regions exempt from the frozen wall margin.
    #[serde(default)]
    pub openings: Vec<WorldBox>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default = "default_tick_budget")]
    pub tick_budget: usize,
    /// Interventions allowed before the mission is abandoned.
    #[serde(default = "default_max_interventions")]
    pub max_interventions: usize,
    #[serde(default)]
    pub prior: PriorConfig,
    #[serde(default)]
    pub fusion: FusionParams,
    #[serde(default)]
    pub risk: RiskParams,
    #[serde(default)]
    pub corridor: CorridorConfig,
    #[serde(default)]
    pub ugv: UgvConfig,
    #[serde(default)]
    pub uav: UavConfig,
    #[serde(default)]
    pub planner: PlannerConfig,
    #[serde(default)]
    pub explore: ExploreConfig,
}

fn default_seed() -> u64 {
    1
}

fn default_runs() -> usize {
    5
}

fn default_tick_budget() -> usize {
    10_000
}

fn default_max_interventions() -> usize {
    4
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    /// Reads a scenario file; the map path is resolved against its directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml(&text)?;
        if cfg.map.is_relative() {
            if let Some(dir) = path.parent() {
                cfg.map = dir.join(&cfg.map);
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.map.exists() {
            return Err(Error::Config(format!("map file {} does not exist", self.map.display())));
        }
        crate::grid::validate_p_occ(self.prior.p_occ)?;
        self.fusion.validate()?;
        self.risk.validate()?;
        self.ugv.sensor.validate()?;
        self.uav.sensor.validate()?;
        let c = &self.corridor;
        if !(c.half_width > 0.0 && c.lookahead > 0.0) {
            return Err(Error::Config("corridor half width and look-ahead must be positive".into()));
        }
        if !(0.0 < c.free_thresh && c.free_thresh < c.tau_occ && c.tau_occ < 1.0) {
            return Err(Error::Config("need 0 < free_thresh < tau_occ < 1".into()));
        }
        if !(self.ugv.speed > 0.0 && self.ugv.dt > 0.0) {
            return Err(Error::Config("UGV speed and tick must be positive".into()));
        }
        if !(self.explore.speed > 0.0 && self.explore.speed <= self.ugv.speed) {
            return Err(Error::Config("exploration speed must be in (0, UGV speed]".into()));
        }
        if !(self.explore.radius > 0.0 && self.explore.dwell >= 0.0) {
            return Err(Error::Config("exploration radius must be positive, dwell >= 0".into()));
        }
        if !(self.uav.roi_size[0] > 0.0 && self.uav.roi_size[1] > 0.0 && self.uav.scan_stride > 0.0) {
            return Err(Error::Config("ROI size and scan stride must be positive".into()));
        }
        if !(self.planner.inflation_slack >= 0.0) {
            return Err(Error::Config("inflation slack must be >= 0".into()));
        }
        if self.runs == 0 || self.tick_budget == 0 {
            return Err(Error::Config("runs and tick budget must be positive".into()));
        }
        Ok(())
    }

    pub fn start(&self) -> Point2 {
        self.start.into()
    }

    pub fn goal(&self) -> Point2 {
        self.goal.into()
    }

    /// Truth edits rasterised onto `meta`.
    pub fn world_edits(&self, meta: &GridMeta) -> Vec<WorldEdit> {
        self.edits
            .iter()
            .map(|e| WorldEdit {
                kind: e.kind,
                rect: e.area.to_cells(meta),
                time: e.time,
            })
            .collect()
    }

    pub fn opening_rects(&self, meta: &GridMeta) -> Vec<CellRect> {
        self.openings.iter().map(|b| b.to_cells(meta)).collect()
    }
}

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::{Policy, ScenarioConfig};
use crate::error::{Error, Result};
use crate::geometry::{Point2, Pose2D};
use crate::grid::mapio::load_map;
use crate::grid::{BimPrior, CellRect, LayerStack, OccupancyGrid};
use crate::planner::{frontier_explore_step, plan_rrt_star, ExploreTarget, PlanRequest, PlanningMap};
use crate::rescan::{execute_rescan, map_handoff, plan_sweep};
use crate::risk::{
    assess, build_corridor, extract_roi, forward_window, Corridor, RiskRaster, RiskReport,
    TriggerReason,
};
use crate::world::{raycast, GroundTruthWorld, PathFollower, TruthRaster};

/// Layers are computed around the look-ahead window with this much slack, so
/// clearances below it are exact.
const LAYER_MARGIN: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub tick: usize,
    pub time: f64,
    /// Distance driven so far, metres.
    pub distance: f64,
    pub x: f64,
    pub y: f64,
    pub corridor_risk: f64,
    pub mean_entropy: f64,
    pub discrepancy_contribution: f64,
    /// Look-ahead minimum clearance; `None` when the window is empty.
    pub min_clearance: Option<f64>,
    pub trigger: bool,
    pub reason: TriggerReason,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Intervention {
    pub tick: usize,
    pub time: f64,
    pub distance: f64,
    pub reason: TriggerReason,
    /// ROI rectangle (UAV policy only).
    pub roi: Option<CellRect>,
    pub risk_before: f64,
    pub risk_after: f64,
    pub entropy_before: f64,
    pub entropy_after: f64,
    /// Time spent halted for the sweep or the exploration, seconds.
    pub duration: f64,
    /// Scans fused by the UAV, or frontier targets visited by the UGV.
    pub scans: usize,
    pub replanned_length: Option<f64>,
}

/// Outcome of one mission run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissionRecord {
    pub scenario: String,
    /// Scenario file the run was loaded from, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario_file: Option<String>,
    pub policy: Policy,
    pub seed: u64,
    pub goal_reached: bool,
    /// Why the mission stopped short of the goal.
    pub cause: Option<String>,
    pub path_length: f64,
    pub mission_time: f64,
    pub ticks: usize,
    /// Minimum clearance at the executed poses, metres.
    pub min_clearance: Option<f64>,
    /// Same, restricted to poses after the first intervention.
    pub min_clearance_after_intervention: Option<f64>,
    pub delta_r_pct: Option<f64>,
    pub delta_h_pct: Option<f64>,
    /// Corridor risk at the last evaluated tick.
    pub final_risk: f64,
    pub planned_length: f64,
    pub first_trigger: Option<TracePoint>,
    pub interventions: Vec<Intervention>,
    pub trace: Vec<TracePoint>,
}

impl MissionRecord {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()? + "\n").map_err(|e| Error::io(path, e))
    }

    /// One CSV row per tick of the risk trace.
    pub fn write_trace_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut w = csv::Writer::from_path(path)?;
        w.write_record([
            "tick", "time", "distance", "x", "y", "corridor_risk", "mean_entropy",
            "discrepancy_contribution", "min_clearance", "trigger", "reason",
        ])?;
        for t in &self.trace {
            let reason = serde_json::to_value(t.reason)?;
            w.write_record([
                t.tick.to_string(),
                format!("{:.3}", t.time),
                format!("{:.4}", t.distance),
                format!("{:.4}", t.x),
                format!("{:.4}", t.y),
                format!("{:.6}", t.corridor_risk),
                format!("{:.6}", t.mean_entropy),
                format!("{:.6}", t.discrepancy_contribution),
                t.min_clearance.map(|c| format!("{c:.4}")).unwrap_or_default(),
                t.trigger.to_string(),
                reason.as_str().unwrap_or_default().to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

/// Mission state handed to observers once per tick.
pub struct Snapshot<'a> {
    pub tick: usize,
    pub time: f64,
    pub pose: Pose2D,
    pub grid: &'a OccupancyGrid,
    pub prior: &'a BimPrior,
    pub path: &'a [Point2],
    pub corridor: &'a Corridor,
    pub roi: Option<CellRect>,
}

/// Runs `seeds` in parallel; results keep the order of `seeds`.
pub fn run_batch(cfg: &ScenarioConfig, seeds: &[u64]) -> Vec<Result<MissionRecord>> {
    use rayon::prelude::*;
    seeds.par_iter().map(|&s| run_mission(cfg, s)).collect()
}

/// Runs one mission with the given RRT* seed.
pub fn run_mission(cfg: &ScenarioConfig, seed: u64) -> Result<MissionRecord> {
    run_mission_observed(cfg, seed, |_| {})
}

struct Evaluation {
    report: RiskReport,
    pose_clearance: f64,
}

struct Mission<'c> {
    cfg: &'c ScenarioConfig,
    seed: u64,
    prior: BimPrior,
    world: GroundTruthWorld,
    truth: TruthRaster,
    active_edits: usize,
    grid: OccupancyGrid,
    pose: Pose2D,
    time: f64,
    ticks: usize,
    path_length: f64,
    plans: u64,
}

impl<'c> Mission<'c> {
    fn new(cfg: &'c ScenarioConfig, seed: u64) -> Result<Self> {
        let map = load_map(&cfg.map)?;
        let meta = map.meta;
        let prior = BimPrior::from_map(
            &map,
            cfg.prior.p_occ,
            cfg.prior.frozen_margin,
            cfg.opening_rects(&meta),
        )?;
        let world = GroundTruthWorld::new(meta, map.occupied_mask(), cfg.world_edits(&meta))?;
        let truth = world.apply_edits(0.0);
        let active_edits = world.edits().iter().filter(|e| e.time <= 0.0).count();
        let grid = OccupancyGrid::init_from_prior(&prior, cfg.fusion)?;
        let start = cfg.start();
        if !meta.contains_point(start) || !meta.contains_point(cfg.goal()) {
            return Err(Error::OutOfBounds { x: start.x, y: start.y });
        }
        Ok(Self {
            cfg,
            seed,
            prior,
            world,
            truth,
            active_edits,
            grid,
            pose: Pose2D::new(start.x, start.y, 0.0),
            time: 0.0,
            ticks: 0,
            path_length: 0.0,
            plans: 0,
        })
    }

    fn refresh_truth(&mut self) {
        let active = self.world.edits().iter().filter(|e| e.time <= self.time).count();
        if active != self.active_edits {
            self.truth = self.world.apply_edits(self.time);
            self.active_edits = active;
        }
    }

    fn scan(&mut self) -> Result<()> {
        self.refresh_truth();
        let scan = raycast(&self.truth, self.pose, &self.cfg.ugv.sensor, self.time)?;
        self.grid.fuse_scan(&self.prior, &scan)?;
        Ok(())
    }

    /// Plans from the current pose to the goal on the live map. When the pose
    /// sits inside the inflated obstacle band the tree starts from the
    /// nearest free point and the pose is prepended.
    fn plan(&mut self) -> Result<Vec<Point2>> {
        let c = self.cfg;
        let map = PlanningMap::from_grid(
            &self.grid,
            c.corridor.tau_occ,
            c.corridor.free_thresh,
            c.risk.r_ugv + c.risk.m_min + c.planner.inflation_slack,
        );
        let here = self.pose.position();
        let start = if map.is_free(here) {
            here
        } else {
            map.nearest_free(here)
                .ok_or_else(|| Error::PlanningFailed("no free cell near the robot".into()))?
        };
        let request = PlanRequest {
            start,
            goal: c.goal(),
            max_iterations: c.planner.max_iterations,
            step: c.planner.step,
            goal_bias: c.planner.goal_bias,
            rewire_radius: c.planner.rewire_radius,
            seed: self.seed.wrapping_add(self.plans.wrapping_mul(0x9E37_79B9)),
            resample_spacing: c.planner.resample_spacing,
        };
        self.plans += 1;
        let planned = plan_rrt_star(&map, &request)?;
        let mut waypoints = planned.waypoints;
        if start != here {
            waypoints.insert(0, here);
        }
        Ok(waypoints)
    }

    fn evaluate(&self, corridor: &Corridor) -> Result<Evaluation> {
        let c = self.cfg;
        let meta = self.grid.meta();
        let window = forward_window(corridor, self.pose, c.corridor.lookahead);
        let here = meta.cell_of(self.pose.position());
        let margin = (LAYER_MARGIN / meta.resolution).ceil() as i64;
        let region = CellRect::bounding(window.cells.iter().copied().chain([here]))
            .unwrap()
            .expand(margin);
        let layers = LayerStack::compute_region(&self.grid, &self.prior, c.corridor.tau_occ, region)?;
        let report = assess(&layers, corridor, &window, &c.risk)?;
        let pose_clearance = layers.clearance_at(self.pose.position(), c.risk.r_ugv)?;
        Ok(Evaluation {
            report,
            pose_clearance,
        })
    }

    fn advance(&mut self, follower: &mut PathFollower, speed: f64) {
        let (pose, moved) = follower.advance(self.pose, speed, self.cfg.ugv.dt);
        self.pose = pose;
        self.path_length += moved;
    }

    /// UAV sweep over the riskiest window rectangle and a full map swap.
    /// Returns (roi, duration, scans).
    fn uav_rescan(&mut self, report: &RiskReport) -> Result<(CellRect, f64, usize)> {
        let c = self.cfg;
        let meta = *self.grid.meta();
        let raster = RiskRaster::from_report(report)
            .ok_or_else(|| Error::Config("trigger fired on an empty window".into()))?;
        let w = (c.uav.roi_size[0] / meta.resolution).round().max(1.0) as usize;
        let h = (c.uav.roi_size[1] / meta.resolution).round().max(1.0) as usize;
        let roi = extract_roi(&raster, &meta, w, h)?;
        let sweep = plan_sweep(&roi, &meta, &c.uav.sweep)?;
        self.refresh_truth();
        let rescan = execute_rescan(
            &self.truth,
            &sweep,
            &self.prior,
            c.fusion,
            &c.uav.sensor,
            c.uav.scan_stride,
            self.time,
        )?;
        self.grid = map_handoff(&self.grid, &rescan.grid, c.uav.handoff, roi.rect)?;
        log::info!(
            "UAV swept {} lanes ({:.1} m, {:.1} s) over ROI {:?}",
            sweep.lanes,
            sweep.length,
            sweep.duration,
            roi.rect
        );
        Ok((roi.rect, sweep.duration, rescan.scans))
    }

    /// UGV-only frontier exploration around the halt point.
    /// Returns (duration, targets visited).
    fn explore(&mut self) -> Result<(f64, usize)> {
        let c = self.cfg;
        let meta = *self.grid.meta();
        let reach = c.explore.radius * 1.5 + LAYER_MARGIN;
        let t0 = self.time;
        let mut visited = Vec::new();
        while visited.len() < c.explore.max_targets && self.ticks < c.tick_budget {
            // The search disc follows the robot from target to target.
            let centre = self.pose.position();
            let region = meta.rect_from_world(
                centre - Point2::new(reach, reach),
                centre + Point2::new(reach, reach),
            );
            let layers =
                LayerStack::compute_region(&self.grid, &self.prior, c.corridor.tau_occ, region)?;
            let step = frontier_explore_step(
                &layers,
                &self.prior,
                centre,
                centre,
                c.explore.radius,
                &c.explore.frontier,
                &visited,
            );
            let ExploreTarget::Waypoint { target, route } = step else {
                break;
            };
            visited.push(target);
            let mut follower = PathFollower::new(route);
            while !follower.is_finished() && self.ticks < c.tick_budget {
                self.advance(&mut follower, c.explore.speed);
                self.time += c.ugv.dt;
                self.ticks += 1;
                self.scan()?;
            }
            self.time += c.explore.dwell;
        }
        Ok((self.time - t0, visited.len()))
    }
}

fn trace_point(m: &Mission, report: &RiskReport) -> TracePoint {
    TracePoint {
        tick: m.ticks,
        time: m.time,
        distance: m.path_length,
        x: m.pose.x,
        y: m.pose.y,
        corridor_risk: report.corridor_risk,
        mean_entropy: report.mean_entropy,
        discrepancy_contribution: report.discrepancy_contribution(),
        min_clearance: report.min_clearance.is_finite().then_some(report.min_clearance),
        trigger: report.trigger,
        reason: report.reason,
    }
}

fn percent_drop(before: f64, after: f64) -> Option<f64> {
    (before > 0.0).then(|| 100.0 * (before - after) / before)
}

fn min_opt(acc: Option<f64>, v: f64) -> Option<f64> {
    if !v.is_finite() {
        return acc;
    }
    Some(acc.map_or(v, |a| a.min(v)))
}

/// Runs one mission, calling `observer` after every evaluated tick.
///
/// Each tick fuses a UGV scan, recomputes the layers around the look-ahead
/// window and assesses the corridor risk. Without a trigger the UGV advances
/// one tick along the path; with one, the configured policy responds.
pub fn run_mission_observed(
    cfg: &ScenarioConfig,
    seed: u64,
    mut observer: impl FnMut(&Snapshot),
) -> Result<MissionRecord> {
    let mut m = Mission::new(cfg, seed)?;
    let mut record = MissionRecord {
        scenario: cfg.name.clone(),
        scenario_file: None,
        policy: cfg.policy,
        seed,
        goal_reached: false,
        cause: None,
        path_length: 0.0,
        mission_time: 0.0,
        ticks: 0,
        min_clearance: None,
        min_clearance_after_intervention: None,
        delta_r_pct: None,
        delta_h_pct: None,
        final_risk: 0.0,
        planned_length: 0.0,
        first_trigger: None,
        interventions: Vec::new(),
        trace: Vec::new(),
    };

    let mut path = match m.plan() {
        Ok(p) => p,
        Err(e @ Error::PlanningFailed(_)) => {
            record.cause = Some(e.to_string());
            return Ok(record);
        }
        Err(e) => return Err(e),
    };
    record.planned_length = crate::geometry::polyline_length(&path);
    if path.len() >= 2 {
        let d = path[1] - path[0];
        m.pose = Pose2D::new(m.pose.x, m.pose.y, d.y.atan2(d.x));
    }
    let meta = *m.grid.meta();
    let mut corridor = build_corridor(&path, cfg.corridor.half_width, &meta)?;
    let mut follower = PathFollower::new(path.clone());
    let mut roi = None;

    loop {
        if m.ticks >= cfg.tick_budget {
            record.cause = Some("tick budget exhausted".into());
            break;
        }
        m.scan()?;
        let eval = m.evaluate(&corridor)?;
        let report = eval.report;
        record.min_clearance = min_opt(record.min_clearance, eval.pose_clearance);
        if !record.interventions.is_empty() {
            record.min_clearance_after_intervention =
                min_opt(record.min_clearance_after_intervention, eval.pose_clearance);
        }
        let tp = trace_point(&m, &report);
        record.final_risk = report.corridor_risk;
        record.trace.push(tp.clone());
        observer(&Snapshot {
            tick: m.ticks,
            time: m.time,
            pose: m.pose,
            grid: &m.grid,
            prior: &m.prior,
            path: &path,
            corridor: &corridor,
            roi,
        });

        if follower.is_finished() {
            record.goal_reached = true;
            break;
        }

        if report.trigger {
            if record.first_trigger.is_none() {
                record.first_trigger = Some(tp.clone());
            }
            if cfg.policy == Policy::StaticBim {
                record.cause = Some(format!(
                    "halted at {:.1} m: corridor risk {:.3}, clearance {}",
                    m.path_length,
                    report.corridor_risk,
                    tp.min_clearance.map_or("n/a".into(), |c| format!("{c:.2} m"))
                ));
                break;
            }
            if record.interventions.len() >= cfg.max_interventions {
                record.cause = Some("intervention limit reached".into());
                break;
            }
            let t_halt = m.time;
            let (rect, scans) = match cfg.policy {
                Policy::UavAssisted => {
                    let (rect, duration, scans) = m.uav_rescan(&report)?;
                    m.time += duration;
                    (Some(rect), scans)
                }
                Policy::FrontierOnly => {
                    let (_, visited) = m.explore()?;
                    (None, visited)
                }
                Policy::StaticBim => unreachable!(),
            };
            roi = rect;
            path = match m.plan() {
                Ok(p) => p,
                Err(e @ Error::PlanningFailed(_)) => {
                    record.cause = Some(format!("replanning failed: {e}"));
                    break;
                }
                Err(e) => return Err(e),
            };
            corridor = build_corridor(&path, cfg.corridor.half_width, &meta)?;
            follower = PathFollower::new(path.clone());
            let after = m.evaluate(&corridor)?.report;
            let iv = Intervention {
                tick: tp.tick,
                time: t_halt,
                distance: tp.distance,
                reason: report.reason,
                roi: rect,
                risk_before: report.corridor_risk,
                risk_after: after.corridor_risk,
                entropy_before: report.mean_entropy,
                entropy_after: after.mean_entropy,
                duration: m.time - t_halt,
                scans,
                replanned_length: Some(crate::geometry::polyline_length(&path)),
            };
            if record.interventions.is_empty() {
                record.delta_r_pct = percent_drop(iv.risk_before, iv.risk_after);
                record.delta_h_pct = percent_drop(iv.entropy_before, iv.entropy_after);
            }
            log::info!(
                "intervention at {:.1} m: R {:.3} -> {:.3}, H {:.3} -> {:.3}",
                iv.distance,
                iv.risk_before,
                iv.risk_after,
                iv.entropy_before,
                iv.entropy_after
            );
            record.interventions.push(iv);
        } else {
            m.advance(&mut follower, cfg.ugv.speed);
        }
        m.time += cfg.ugv.dt;
        m.ticks += 1;
    }

    record.path_length = m.path_length;
    record.mission_time = m.time;
    record.ticks = m.ticks;
    Ok(record)
}

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::costmap::PlanningMap;
use super::smoothing::smooth_and_resample;
use crate::error::{Error, Result};
use crate::geometry::{polyline_length, Point2};

/// RRT* query and tuning.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanRequest {
    pub start: Point2,
    pub goal: Point2,
    pub max_iterations: usize,
    /// Maximum edge length, metres.
    pub step: f64,
    pub goal_bias: f64,
    pub rewire_radius: f64,
    pub seed: u64,
    /// Waypoint spacing of the executed path, metres.
    pub resample_spacing: f64,
}

impl PlanRequest {
    pub fn new(start: Point2, goal: Point2, seed: u64) -> Self {
        Self {
            start,
            goal,
            max_iterations: 20_000,
            step: 1.0,
            goal_bias: 0.1,
            rewire_radius: 3.0,
            seed,
            resample_spacing: 0.5,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.rewire_radius > 0.0 && self.resample_spacing > 0.0) {
            return Err(Error::Config("step, rewire radius and spacing must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.goal_bias) {
            return Err(Error::Config(format!("goal bias must be in [0, 1], got {}", self.goal_bias)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlannedPath {
    /// Tree vertices from start to goal.
    pub raw: Vec<Point2>,
    /// After shortcutting.
    pub smoothed: Vec<Point2>,
    /// Waypoints handed to the path follower.
    pub waypoints: Vec<Point2>,
    /// Length of `waypoints`, metres.
    pub length: f64,
    /// Tree cost of the raw path, metres.
    pub cost: f64,
}

struct Node {
    pos: Point2,
    parent: usize,
    cost: f64,
    children: Vec<usize>,
}

/// Nodes bucketed on a square lattice of side `cell` for radius queries.
struct SpatialHash {
    cell: f64,
    buckets: HashMap<(i64, i64), Vec<usize>>,
}

impl SpatialHash {
    fn key(&self, p: Point2) -> (i64, i64) {
        ((p.x / self.cell).floor() as i64, (p.y / self.cell).floor() as i64)
    }

    fn insert(&mut self, p: Point2, id: usize) {
        let k = self.key(p);
        self.buckets.entry(k).or_default().push(id);
    }

    fn within(&self, nodes: &[Node], p: Point2, radius: f64) -> Vec<usize> {
        let (kx, ky) = self.key(p);
        let reach = (radius / self.cell).ceil() as i64;
        let mut out = Vec::new();
        for dy in -reach..=reach {
            for dx in -reach..=reach {
                if let Some(b) = self.buckets.get(&(kx + dx, ky + dy)) {
                    out.extend(b.iter().copied().filter(|&i| nodes[i].pos.distance(p) <= radius));
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Nearest node, searching outward ring by ring.
    fn nearest(&self, nodes: &[Node], p: Point2) -> usize {
        let (kx, ky) = self.key(p);
        let mut best = (f64::INFINITY, usize::MAX);
        let mut ring = 0i64;
        loop {
            for dy in -ring..=ring {
                for dx in -ring..=ring {
                    if dx.abs() != ring && dy.abs() != ring {
                        continue;
                    }
                    if let Some(b) = self.buckets.get(&(kx + dx, ky + dy)) {
                        for &i in b {
                            let d = nodes[i].pos.distance(p);
                            if d < best.0 || (d == best.0 && i < best.1) {
                                best = (d, i);
                            }
                        }
                    }
                }
            }
            // Anything in ring r+1 or beyond is at least r * cell away.
            if best.1 != usize::MAX && best.0 <= ring as f64 * self.cell {
                return best.1;
            }
            ring += 1;
            if ring > 100_000 {
                return best.1;
            }
        }
    }
}

/// RRT* from `start` to `goal` on the planning map. All iterations are run,
/// so a larger iteration budget with the same seed never yields a worse path.
pub fn plan_rrt_star(map: &PlanningMap, request: &PlanRequest) -> Result<PlannedPath> {
    request.validate()?;
    for (what, p) in [("start", request.start), ("goal", request.goal)] {
        if !map.is_free(p) {
            return Err(Error::PlanningFailed(format!(
                "{what} ({:.2}, {:.2}) is not in free inflated space",
                p.x, p.y
            )));
        }
    }
    let (lo, hi) = map.meta().world_extent();
    let mut rng = ChaCha8Rng::seed_from_u64(request.seed);
    let mut nodes = vec![Node {
        pos: request.start,
        parent: usize::MAX,
        cost: 0.0,
        children: Vec::new(),
    }];
    let mut hash = SpatialHash {
        cell: request.rewire_radius,
        buckets: HashMap::new(),
    };
    hash.insert(request.start, 0);
    // Nodes with a collision-free edge to the goal.
    let mut goal_parents: Vec<usize> = Vec::new();
    if map.segment_free(request.start, request.goal) && request.start.distance(request.goal) <= request.step {
        goal_parents.push(0);
    }

    for _ in 0..request.max_iterations {
        let sample = if rng.random::<f64>() < request.goal_bias {
            request.goal
        } else {
            Point2::new(rng.random_range(lo.x..hi.x), rng.random_range(lo.y..hi.y))
        };
        let near_id = hash.nearest(&nodes, sample);
        let from = nodes[near_id].pos;
        let d = from.distance(sample);
        if d == 0.0 {
            continue;
        }
        let new_pos = if d > request.step {
            from.lerp(sample, request.step / d)
        } else {
            sample
        };
        if !map.segment_free(from, new_pos) {
            continue;
        }

        // Cheapest collision-free parent among neighbours.
        let near = hash.within(&nodes, new_pos, request.rewire_radius);
        let mut candidates: Vec<(f64, usize)> = near
            .iter()
            .map(|&i| (nodes[i].cost + nodes[i].pos.distance(new_pos), i))
            .collect();
        candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut parent = (nodes[near_id].cost + d.min(request.step), near_id);
        for &(c, i) in &candidates {
            if c >= parent.0 {
                break;
            }
            if map.segment_free(nodes[i].pos, new_pos) {
                parent = (c, i);
                break;
            }
        }
        let id = nodes.len();
        nodes.push(Node {
            pos: new_pos,
            parent: parent.1,
            cost: parent.0,
            children: Vec::new(),
        });
        nodes[parent.1].children.push(id);
        hash.insert(new_pos, id);

        // Rewire neighbours through the new node.
        for &i in &near {
            if i == parent.1 {
                continue;
            }
            let via = nodes[id].cost + new_pos.distance(nodes[i].pos);
            if via + 1e-12 < nodes[i].cost && map.segment_free(new_pos, nodes[i].pos) {
                let old_parent = nodes[i].parent;
                nodes[old_parent].children.retain(|&c| c != i);
                nodes[i].parent = id;
                nodes[id].children.push(i);
                let delta = nodes[i].cost - via;
                propagate(&mut nodes, i, delta);
            }
        }

        if new_pos.distance(request.goal) <= request.step && map.segment_free(new_pos, request.goal) {
            goal_parents.push(id);
        }
    }

    let best = goal_parents
        .iter()
        .map(|&i| (nodes[i].cost + nodes[i].pos.distance(request.goal), i))
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let Some((cost, last)) = best else {
        return Err(Error::PlanningFailed(format!(
            "no path to ({:.2}, {:.2}) after {} iterations",
            request.goal.x, request.goal.y, request.max_iterations
        )));
    };
    let mut raw = vec![request.goal];
    let mut at = last;
    loop {
        if nodes[at].pos != *raw.last().unwrap() {
            raw.push(nodes[at].pos);
        }
        if at == 0 {
            break;
        }
        at = nodes[at].parent;
    }
    raw.reverse();
    if raw.len() == 1 {
        raw.push(request.goal);
    }
    let (smoothed, waypoints) = smooth_and_resample(&raw, map, request.resample_spacing);
    Ok(PlannedPath {
        length: polyline_length(&waypoints),
        raw,
        smoothed,
        waypoints,
        cost,
    })
}

/// Lowers the cost of `root` and all its descendants by `delta`.
fn propagate(nodes: &mut [Node], root: usize, delta: f64) {
    let mut stack = vec![root];
    while let Some(i) = stack.pop() {
        nodes[i].cost -= delta;
        stack.extend(nodes[i].children.iter().copied());
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{BimPrior, Cell, CellRect, FusionParams, GridMeta, OccupancyGrid};

    fn map_with(walls: &[CellRect]) -> PlanningMap {
        let meta = GridMeta::new(500, 500, 0.1, Point2::default()).unwrap();
        let mut occ = vec![false; meta.len()];
        for r in walls {
            for c in r.cells() {
                occ[meta.index(c).unwrap()] = true;
            }
        }
        let prior = BimPrior::unfrozen(meta, occ, 0.8).unwrap();
        let grid = OccupancyGrid::init_from_prior(&prior, FusionParams::default()).unwrap();
        PlanningMap::from_grid(&grid, 0.65, 0.35, 0.6)
    }

    /// 8-connected grid shortest path length over free cells (metres).
    fn grid_shortest(map: &PlanningMap, a: Point2, b: Point2) -> f64 {
        let meta = map.meta();
        let (start, goal) = (meta.cell_of(a), meta.cell_of(b));
        let mut dist = vec![f64::INFINITY; meta.len()];
        let mut heap = std::collections::BinaryHeap::new();
        dist[meta.index(start).unwrap()] = 0.0;
        heap.push((std::cmp::Reverse(0u64), start));
        while let Some((std::cmp::Reverse(dq), c)) = heap.pop() {
            let d = dq as f64 / 1e6;
            if c == goal {
                return d;
            }
            if d > dist[meta.index(c).unwrap()] {
                continue;
            }
            for dy in -1..=1i64 {
                for dx in -1..=1i64 {
                    let n = Cell::new(c.x + dx, c.y + dy);
                    if (dx, dy) == (0, 0) || !map.is_cell_free(n) {
                        continue;
                    }
                    let nd = d + meta.resolution * ((dx * dx + dy * dy) as f64).sqrt();
                    let i = meta.index(n).unwrap();
                    if nd < dist[i] {
                        dist[i] = nd;
                        heap.push((std::cmp::Reverse((nd * 1e6) as u64), n));
                    }
                }
            }
        }
        f64::INFINITY
    }

    #[test]
    fn open_space_is_nearly_straight() {
        let map = map_with(&[]);
        let req = PlanRequest::new(Point2::new(5.0, 5.0), Point2::new(45.0, 45.0), 7);
        let path = plan_rrt_star(&map, &req).unwrap();
        let straight = 40.0 * 2f64.sqrt();
        assert!(path.length <= straight * 1.1, "{} vs {straight}", path.length);
        assert!(path.length >= straight - 1e-9);
        assert_eq!(path.waypoints[0], req.start);
        assert_eq!(*path.waypoints.last().unwrap(), req.goal);
        assert!(map.polyline_free(&path.waypoints));
    }

    #[test]
    fn goal_in_obstacle_fails() {
        let map = map_with(&[CellRect::new(200, 200, 260, 260)]);
        let req = PlanRequest::new(Point2::new(5.0, 5.0), Point2::new(23.0, 23.0), 1);
        assert!(matches!(plan_rrt_star(&map, &req), Err(Error::PlanningFailed(_))));
    }

    #[test]
    fn u_shaped_wall_forces_detour() {
        // U opening toward the start; goal behind its base.
        let walls = [
            CellRect::new(150, 150, 350, 160),
            CellRect::new(150, 340, 350, 350),
            CellRect::new(340, 150, 350, 350),
        ];
        let map = map_with(&walls);
        let (a, b) = (Point2::new(25.0, 25.0), Point2::new(40.0, 25.0));
        let req = PlanRequest { max_iterations: 8000, ..PlanRequest::new(a, b, 3) };
        let path = plan_rrt_star(&map, &req).unwrap();
        let lower = grid_shortest(&map, a, b);
        assert!(path.length > a.distance(b) + 5.0);
        // The grid path overestimates the continuous optimum by at most the
        // octile factor; the planner cannot beat the continuous optimum.
        assert!(path.length >= lower / 1.0824 - 0.2, "{} vs grid {lower}", path.length);
        for p in &path.waypoints {
            let d = map.obstacle_distance(map.meta().cell_of(*p)).unwrap();
            assert!(d >= map.inflation());
        }
        assert!(map.polyline_free(&path.waypoints));
    }

    #[test]
    fn deterministic_and_monotone_in_iterations() {
        let walls = [CellRect::new(200, 0, 210, 350), CellRect::new(300, 150, 310, 500)];
        let map = map_with(&walls);
        let base = PlanRequest::new(Point2::new(5.0, 5.0), Point2::new(45.0, 45.0), 11);
        let mut last = f64::INFINITY;
        for n in [2500, 5000, 10000, 20000] {
            let req = PlanRequest { max_iterations: n, ..base };
            let Ok(a) = plan_rrt_star(&map, &req) else { continue };
            let b = plan_rrt_star(&map, &req).unwrap();
            assert_eq!(a, b);
            assert!(a.cost <= last + 1e-9, "{n}: {} > {last}", a.cost);
            last = a.cost;
        }
        assert!(last.is_finite());
    }
}

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::geometry::Point2;
use crate::grid::{BimPrior, Cell, CellRect, LayerStack};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FrontierParams {
    /// Occupancy below which a cell counts as free.
    pub free_thresh: f64,
    /// Entropy (bits) above which a cell counts as unknown.
    pub unknown_entropy: f64,
    /// Minimum obstacle distance for a cell to be driven through, metres.
    pub robot_radius: f64,
    /// Clusters smaller than this are ignored.
    pub min_cluster: usize,
    /// Targets within this distance of an excluded point are skipped, metres.
    pub exclusion_radius: f64,
}

impl Default for FrontierParams {
    fn default() -> Self {
        Self {
            free_thresh: 0.35,
            unknown_entropy: 0.9,
            robot_radius: 0.3,
            min_cluster: 5,
            exclusion_radius: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExploreTarget {
    /// Drive along `route` (cell centres from the robot) to reach `target`.
    Waypoint { target: Point2, route: Vec<Point2> },
    Done,
}

fn is_unknown(layers: &LayerStack, prior: &BimPrior, c: Cell, p: &FrontierParams) -> bool {
    // Frozen wall margins never change, so they are not worth exploring.
    let frozen = layers.meta().index(c).is_some_and(|i| prior.is_frozen(i));
    !frozen && layers.entropy(c).is_some_and(|h| h > p.unknown_entropy)
}

fn is_known_free(layers: &LayerStack, c: Cell, p: &FrontierParams) -> bool {
    layers.occupancy(c).is_some_and(|o| o < p.free_thresh)
        && layers.entropy(c).is_some_and(|h| h <= p.unknown_entropy)
}

const NEIGHBOURS: [(i64, i64); 8] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (-1, 0),
    (1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

/// Observed free cells 8-adjacent to an unknown cell, within `radius` of
/// `centre` and inside the layer region, in row-major order.
pub fn frontier_cells(
    layers: &LayerStack,
    prior: &BimPrior,
    centre: Point2,
    radius: f64,
    params: &FrontierParams,
) -> Vec<Cell> {
    let meta = layers.meta();
    let rect = meta
        .rect_from_world(centre - Point2::new(radius, radius), centre + Point2::new(radius, radius))
        .intersect(&layers.region());
    rect.cells()
        .filter(|&c| meta.world_of(c).distance(centre) <= radius)
        .filter(|&c| is_known_free(layers, c, params))
        .filter(|&c| {
            NEIGHBOURS
                .iter()
                .any(|(dx, dy)| is_unknown(layers, prior, Cell::new(c.x + dx, c.y + dy), params))
        })
        .collect()
}

/// Chooses the next frontier to visit: frontier cells near `centre` are
/// grouped into 8-connected clusters; each cluster's target is its cell
/// nearest the cluster centroid that the robot can reach over observed free
/// cells with enough clearance; the cluster with the shortest route wins.
/// When frontiers exist but none is reachable, the radius grows by half once.
pub fn frontier_explore_step(
    layers: &LayerStack,
    prior: &BimPrior,
    robot: Point2,
    centre: Point2,
    radius: f64,
    params: &FrontierParams,
    exclude: &[Point2],
) -> ExploreTarget {
    let mut radius = radius;
    for attempt in 0..2 {
        let cells = frontier_cells(layers, prior, centre, radius, params);
        if cells.is_empty() {
            return ExploreTarget::Done;
        }
        if let Some(t) = pick_target(layers, robot, &cells, params, exclude) {
            return t;
        }
        if attempt == 0 {
            radius *= 1.5;
        }
    }
    ExploreTarget::Done
}

fn pick_target(
    layers: &LayerStack,
    robot: Point2,
    cells: &[Cell],
    params: &FrontierParams,
    exclude: &[Point2],
) -> Option<ExploreTarget> {
    let meta = layers.meta();
    let region = layers.region();
    let local = |c: Cell| -> Option<usize> {
        region.contains(c).then(|| {
            (c.y - region.y0) as usize * region.width() as usize + (c.x - region.x0) as usize
        })
    };

    let clusters = cluster(cells, region);
    let start = meta.cell_of(robot);
    let start_i = local(start)?;

    // BFS over drivable cells from the robot.
    let drivable = |c: Cell| {
        c == start
            || (layers.occupancy(c).is_some_and(|o| o < params.free_thresh)
                && layers.distance(c).is_some_and(|d| d >= params.robot_radius))
    };
    let mut dist = vec![u32::MAX; region.area()];
    let mut parent = vec![usize::MAX; region.area()];
    dist[start_i] = 0;
    let mut queue = VecDeque::from([start]);
    while let Some(c) = queue.pop_front() {
        let ci = local(c).unwrap();
        for (dx, dy) in NEIGHBOURS {
            let n = Cell::new(c.x + dx, c.y + dy);
            let Some(ni) = local(n) else { continue };
            if dist[ni] != u32::MAX || !drivable(n) {
                continue;
            }
            dist[ni] = dist[ci] + 1;
            parent[ni] = ci;
            queue.push_back(n);
        }
    }

    let mut best: Option<(u32, Cell)> = None;
    for members in clusters.iter().filter(|m| m.len() >= params.min_cluster) {
        let n = members.len() as f64;
        let centroid = members
            .iter()
            .fold(Point2::default(), |acc, &c| acc + meta.world_of(c))
            * (1.0 / n);
        let mut reachable: Vec<&Cell> = members
            .iter()
            .filter(|&&c| dist[local(c).unwrap()] != u32::MAX)
            .collect();
        reachable.sort_by(|a, b| {
            meta.world_of(**a)
                .distance(centroid)
                .total_cmp(&meta.world_of(**b).distance(centroid))
                .then(a.cmp(b))
        });
        let Some(&&target) = reachable.first() else { continue };
        let tp = meta.world_of(target);
        if exclude.iter().any(|e| e.distance(tp) <= params.exclusion_radius) {
            continue;
        }
        let d = dist[local(target).unwrap()];
        if best.is_none_or(|(bd, bc)| d < bd || (d == bd && target < bc)) {
            best = Some((d, target));
        }
    }

    let (_, target) = best?;
    let mut route = Vec::new();
    let mut at = local(target).unwrap();
    while at != start_i {
        let c = Cell::new(
            region.x0 + (at % region.width() as usize) as i64,
            region.y0 + (at / region.width() as usize) as i64,
        );
        route.push(meta.world_of(c));
        at = parent[at];
    }
    route.reverse();
    Some(ExploreTarget::Waypoint {
        target: meta.world_of(target),
        route,
    })
}

/// 8-connected components of `cells`, each in row-major order.
fn cluster(cells: &[Cell], region: CellRect) -> Vec<Vec<Cell>> {
    let w = region.width() as usize;
    let idx = |c: Cell| (c.y - region.y0) as usize * w + (c.x - region.x0) as usize;
    let mut member = vec![false; region.area()];
    for &c in cells {
        member[idx(c)] = true;
    }
    let mut seen = vec![false; region.area()];
    let mut out = Vec::new();
    for &c in cells {
        if seen[idx(c)] {
            continue;
        }
        seen[idx(c)] = true;
        let mut group = vec![c];
        let mut queue = VecDeque::from([c]);
        while let Some(c) = queue.pop_front() {
            for (dx, dy) in NEIGHBOURS {
                let n = Cell::new(c.x + dx, c.y + dy);
                if region.contains(n) && member[idx(n)] && !seen[idx(n)] {
                    seen[idx(n)] = true;
                    group.push(n);
                    queue.push_back(n);
                }
            }
        }
        group.sort_by_key(|c| (c.y, c.x));
        out.push(group);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{FusionParams, GridMeta, OccupancyGrid};

    fn setup(known: impl Fn(Point2) -> bool) -> (BimPrior, LayerStack) {
        let meta = GridMeta::new(200, 100, 0.1, Point2::default()).unwrap();
        let prior = BimPrior::unfrozen(meta, vec![false; meta.len()], 0.67).unwrap();
        let mut grid = OccupancyGrid::init_from_prior(&prior, FusionParams::default()).unwrap();
        for i in 0..meta.len() {
            if known(meta.world_of(meta.cell_at(i))) {
                grid.set_log_odds(i, -4.0);
            }
        }
        let layers = LayerStack::compute(&grid, &prior, 0.65).unwrap();
        (prior, layers)
    }

    #[test]
    fn fully_known_disc_is_done() {
        let (prior, layers) = setup(|p| p.distance(Point2::new(10.0, 5.0)) < 4.5);
        let t = frontier_explore_step(
            &layers, &prior, Point2::new(10.0, 5.0), Point2::new(10.0, 5.0), 3.0,
            &FrontierParams::default(), &[],
        );
        assert_eq!(t, ExploreTarget::Done);
    }

    #[test]
    fn half_plane_boundary() {
        let (prior, layers) = setup(|p| p.x < 10.0);
        let robot = Point2::new(8.0, 5.0);
        let params = FrontierParams::default();
        let cells = frontier_cells(&layers, &prior, robot, 5.0, &params);
        // Brute force: known-free cells with an unknown neighbour.
        let meta = layers.meta();
        let brute: Vec<Cell> = meta
            .bounds()
            .cells()
            .filter(|&c| meta.world_of(c).distance(robot) <= 5.0)
            .filter(|&c| meta.world_of(c).x < 10.0)
            .filter(|&c| meta.world_of(Cell::new(c.x + 1, c.y)).x > 10.0)
            .collect();
        assert_eq!(cells, brute);
        match frontier_explore_step(&layers, &prior, robot, robot, 5.0, &params, &[]) {
            ExploreTarget::Waypoint { target, route } => {
                assert!((target.x - 9.95).abs() < 1e-9);
                assert!((target.y - 5.05).abs() < 0.11);
                assert_eq!(*route.last().unwrap(), target);
            }
            ExploreTarget::Done => panic!("expected a frontier"),
        }
    }

    #[test]
    fn nearer_cluster_wins() {
        // Known disc with unknown pockets 2 m and 4 m from the robot.
        let robot = Point2::new(10.0, 5.0);
        let (prior, layers) = setup(|p| {
            let pocket = |cx: f64| (p.x - cx).abs() < 0.3 && (p.y - 5.0).abs() < 0.3;
            p.distance(robot) < 7.0 && !pocket(12.0) && !pocket(6.0)
        });
        let t = frontier_explore_step(
            &layers, &prior, robot, robot, 5.0, &FrontierParams::default(), &[],
        );
        let ExploreTarget::Waypoint { target, .. } = t else { panic!() };
        assert!((target.x - 12.0).abs() < 0.6, "{target:?}");
        // Excluding it moves on to the other pocket.
        let t = frontier_explore_step(
            &layers, &prior, robot, robot, 5.0, &FrontierParams::default(), &[target],
        );
        let ExploreTarget::Waypoint { target: second, .. } = t else { panic!() };
        assert!(second.distance(target) > 1.0);
    }
}

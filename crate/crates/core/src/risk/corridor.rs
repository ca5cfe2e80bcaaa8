use crate::error::{Error, Result};
use crate::geometry::{
    cumulative_arc_lengths, point_at_arc, point_segment_distance, project_onto_polyline, Point2,
    Pose2D,
};
use crate::grid::{Cell, CellRect, GridMeta};

/// Band of cells around a planned path, ordered by the arc length of each
/// cell's nearest path point.
#[derive(Debug, Clone, PartialEq)]
pub struct Corridor {
    meta: GridMeta,
    path: Vec<Point2>,
    arcs: Vec<f64>,
    half_width: f64,
    cells: Vec<Cell>,
    cell_arcs: Vec<f64>,
}

impl Corridor {
    pub fn path(&self) -> &[Point2] {
        &self.path
    }

    /// Cumulative arc length at each path vertex.
    pub fn arcs(&self) -> &[f64] {
        &self.arcs
    }

    pub fn length(&self) -> f64 {
        *self.arcs.last().unwrap()
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn meta(&self) -> &GridMeta {
        &self.meta
    }

    /// Member cells, sorted by nearest-point arc length.
    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cell_arcs(&self) -> &[f64] {
        &self.cell_arcs
    }

    pub fn bounding_rect(&self) -> Option<CellRect> {
        CellRect::bounding(self.cells.iter().copied())
    }

    /// Nearest-point projection of a world point: (lateral distance, arc length).
    pub fn project(&self, p: Point2) -> (f64, f64) {
        project_onto_polyline(&self.path, &self.arcs, p)
    }

    pub fn point_at(&self, s: f64) -> Point2 {
        point_at_arc(&self.path, &self.arcs, s)
    }

    /// Path points every `spacing` metres over `[from, to]`, both ends included.
    pub fn samples(&self, from: f64, to: f64, spacing: f64) -> Vec<Point2> {
        let to = to.min(self.length());
        if to < from {
            return Vec::new();
        }
        let n = ((to - from) / spacing).floor() as usize;
        let mut out: Vec<Point2> = (0..=n).map(|k| self.point_at(from + k as f64 * spacing)).collect();
        if from + n as f64 * spacing < to {
            out.push(self.point_at(to));
        }
        out
    }
}

/// Cells whose centres lie within `half_width` of any path segment.
pub fn build_corridor(path: &[Point2], half_width: f64, meta: &GridMeta) -> Result<Corridor> {
    if path.len() < 2 {
        return Err(Error::DegeneratePath(format!(
            "need at least 2 vertices, got {}",
            path.len()
        )));
    }
    if let Some(k) = path.windows(2).position(|w| w[0] == w[1]) {
        return Err(Error::DegeneratePath(format!("vertices {k} and {} coincide", k + 1)));
    }
    if let Some(p) = path.iter().find(|p| !meta.contains_point(**p)) {
        return Err(Error::OutOfBounds { x: p.x, y: p.y });
    }
    if !(half_width.is_finite() && half_width >= 0.0) {
        return Err(Error::Config(format!("corridor half-width must be >= 0, got {half_width}")));
    }
    let arcs = cumulative_arc_lengths(path);

    let lo = Point2::new(
        path.iter().map(|p| p.x).fold(f64::INFINITY, f64::min) - half_width,
        path.iter().map(|p| p.y).fold(f64::INFINITY, f64::min) - half_width,
    );
    let hi = Point2::new(
        path.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max) + half_width,
        path.iter().map(|p| p.y).fold(f64::NEG_INFINITY, f64::max) + half_width,
    );
    let bbox = meta.rect_from_world(lo, hi);
    let bw = bbox.width() as usize;
    // Best (distance, arc) per bounding-box cell.
    let mut best = vec![(f64::INFINITY, 0.0); bbox.area()];

    for (k, seg) in path.windows(2).enumerate() {
        let (a, b) = (seg[0], seg[1]);
        let seg_lo = Point2::new(a.x.min(b.x) - half_width, a.y.min(b.y) - half_width);
        let seg_hi = Point2::new(a.x.max(b.x) + half_width, a.y.max(b.y) + half_width);
        let rect = meta.rect_from_world(seg_lo, seg_hi);
        for c in rect.cells() {
            let (d, t) = point_segment_distance(meta.world_of(c), a, b);
            if d > half_width {
                continue;
            }
            let slot = &mut best[(c.y - bbox.y0) as usize * bw + (c.x - bbox.x0) as usize];
            let s = arcs[k] + t * (arcs[k + 1] - arcs[k]);
            if d < slot.0 || (d == slot.0 && s < slot.1) {
                *slot = (d, s);
            }
        }
    }

    let mut members: Vec<(f64, Cell)> = bbox
        .cells()
        .zip(&best)
        .filter(|(_, b)| b.0.is_finite())
        .map(|(c, b)| (b.1, c))
        .collect();
    members.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    Ok(Corridor {
        meta: *meta,
        path: path.to_vec(),
        arcs,
        half_width,
        cell_arcs: members.iter().map(|m| m.0).collect(),
        cells: members.into_iter().map(|m| m.1).collect(),
    })
}

/// Look-ahead slice of a corridor.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardWindow {
    pub cells: Vec<Cell>,
    /// Arc length of the robot's projection onto the path.
    pub arc_start: f64,
    /// End of the window, clipped to the path length.
    pub arc_end: f64,
    /// Distance from the robot to the path.
    pub lateral_offset: f64,
    /// Set when the robot is farther than `d_c + 2Δ` from the path.
    pub off_corridor: bool,
}

/// Corridor cells whose nearest arc length lies in `[s, s + lookahead]`,
/// where `s` is the robot's projection onto the path.
pub fn forward_window(corridor: &Corridor, pose: Pose2D, lookahead: f64) -> ForwardWindow {
    let (offset, s) = corridor.project(pose.position());
    let end = (s + lookahead).min(corridor.length());
    let off = offset > corridor.half_width + 2.0 * corridor.meta.resolution;
    if off {
        log::warn!(
            "robot at ({:.2}, {:.2}) is {offset:.2} m from the corridor centreline",
            pose.x,
            pose.y
        );
    }
    let lo = corridor.cell_arcs.partition_point(|&a| a < s);
    let hi = corridor.cell_arcs.partition_point(|&a| a <= end);
    ForwardWindow {
        cells: corridor.cells[lo..hi.max(lo)].to_vec(),
        arc_start: s,
        arc_end: end,
        lateral_offset: offset,
        off_corridor: off,
    }
}

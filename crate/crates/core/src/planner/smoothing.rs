use super::costmap::PlanningMap;
use crate::geometry::{cumulative_arc_lengths, point_at_arc, polyline_length, Point2};

/// Greedy shortcutting: from each kept vertex jump to the farthest later
/// vertex reachable by a collision-free straight segment.
pub fn shortcut(raw: &[Point2], map: &PlanningMap) -> Vec<Point2> {
    if raw.len() <= 2 {
        return raw.to_vec();
    }
    let mut out = vec![raw[0]];
    let mut i = 0;
    while i < raw.len() - 1 {
        let mut j = raw.len() - 1;
        while j > i + 1 && !map.segment_free(raw[i], raw[j]) {
            j -= 1;
        }
        out.push(raw[j]);
        i = j;
    }
    out
}

/// Evenly spaced points along a polyline: `max(1, round(L / spacing))`
/// intervals, endpoints included.
pub fn resample(points: &[Point2], spacing: f64) -> Vec<Point2> {
    if points.len() < 2 {
        return points.to_vec();
    }
    let arcs = cumulative_arc_lengths(points);
    let total = *arcs.last().unwrap();
    let n = ((total / spacing).round() as usize).max(1);
    let mut out: Vec<Point2> = (0..n)
        .map(|k| point_at_arc(points, &arcs, total * k as f64 / n as f64))
        .collect();
    out.push(*points.last().unwrap());
    out
}

/// Shortcut smoothing then resampling at `spacing`. Returns
/// (smoothed, resampled). If a chord of the uniform resampling cuts an
/// inflated obstacle at a corner, each smoothed segment is resampled on its
/// own so the corners are kept.
pub fn smooth_and_resample(
    raw: &[Point2],
    map: &PlanningMap,
    spacing: f64,
) -> (Vec<Point2>, Vec<Point2>) {
    let smoothed = shortcut(raw, map);
    let uniform = resample(&smoothed, spacing);
    if map.polyline_free(&uniform) || !map.polyline_free(&smoothed) {
        return (smoothed, uniform);
    }
    let mut out = vec![smoothed[0]];
    for w in smoothed.windows(2) {
        out.extend(resample(w, spacing).into_iter().skip(1));
    }
    debug_assert!(polyline_length(&out) <= polyline_length(&smoothed) + 1e-9);
    (smoothed, out)
}

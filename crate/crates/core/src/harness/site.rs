//! The shipped construction-site map: a 50 m x 50 m corridor network carved
//! out of solid structure at 0.1 m resolution.
//!
//! Route from the south-west: corridor A runs east, V1 climbs the east side,
//! B runs west across the middle and narrows to 2 m past x = 20, V3 climbs
//! near the west end to C along the north. V2 is a parallel western riser one
//! corridor over, so B -> V2 -> C is the detour when V3 is blocked. Eight
//! store rooms (an outer and an inner row) open off the narrow part of B.
//! Most inner corners are chamfered to keep sight lines open; the B -> V3
//! and B -> V2 turns are square.

use crate::geometry::Point2;
use crate::grid::mapio::{MapClass, TrinaryMap};
use crate::grid::GridMeta;

pub const SITE_SIZE: usize = 500;
pub const SITE_RESOLUTION: f64 = 0.1;

enum Shape {
    Rect([f64; 4]),
    Triangle([Point2; 3]),
}

impl Shape {
    fn contains(&self, p: Point2) -> bool {
        match self {
            Shape::Rect([x0, y0, x1, y1]) => p.x >= *x0 && p.x <= *x1 && p.y >= *y0 && p.y <= *y1,
            Shape::Triangle([a, b, c]) => {
                let side = |u: Point2, v: Point2| (v.x - u.x) * (p.y - u.y) - (v.y - u.y) * (p.x - u.x);
                let (d1, d2, d3) = (side(*a, *b), side(*b, *c), side(*c, *a));
                let neg = d1 < 0.0 || d2 < 0.0 || d3 < 0.0;
                let pos = d1 > 0.0 || d2 > 0.0 || d3 > 0.0;
                !(neg && pos)
            }
        }
    }
}

fn tri(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> Shape {
    Shape::Triangle([a.into(), b.into(), c.into()])
}

fn free_space() -> Vec<Shape> {
    vec![
        Shape::Rect([15.0, 3.0, 47.0, 7.0]),  // A
        Shape::Rect([43.0, 3.0, 47.0, 27.0]), // V1
        Shape::Rect([20.0, 23.0, 47.0, 27.0]), // B
        Shape::Rect([3.0, 25.0, 20.0, 27.0]),  // B, narrow west end
        // Store rooms south of the narrow end: an outer room off each door
        // and an inner room behind it through an offset doorway.
        Shape::Rect([3.5, 21.5, 7.0, 24.5]),
        Shape::Rect([7.5, 21.5, 11.0, 24.5]),
        Shape::Rect([11.5, 21.5, 15.0, 24.5]),
        Shape::Rect([15.5, 21.5, 19.0, 24.5]),
        Shape::Rect([4.45, 24.5, 6.05, 25.0]),
        Shape::Rect([8.45, 24.5, 10.05, 25.0]),
        Shape::Rect([12.45, 24.5, 14.05, 25.0]),
        Shape::Rect([16.45, 24.5, 18.05, 25.0]),
        Shape::Rect([3.5, 18.0, 7.0, 21.0]),
        Shape::Rect([7.5, 18.0, 11.0, 21.0]),
        Shape::Rect([11.5, 18.0, 15.0, 21.0]),
        Shape::Rect([15.5, 18.0, 19.0, 21.0]),
        Shape::Rect([3.5, 21.0, 5.1, 21.5]),
        Shape::Rect([7.5, 21.0, 9.1, 21.5]),
        Shape::Rect([11.5, 21.0, 13.1, 21.5]),
        Shape::Rect([15.5, 21.0, 17.1, 21.5]),
        Shape::Rect([3.0, 25.0, 7.0, 47.0]),  // V2
        Shape::Rect([9.0, 25.0, 12.0, 47.0]), // V3
        Shape::Rect([3.0, 43.0, 30.0, 47.0]), // C
        tri([40.0, 7.0], [43.0, 7.0], [43.0, 10.0]),
        tri([43.0, 20.0], [43.0, 23.0], [40.0, 23.0]),
        tri([12.0, 40.0], [12.0, 43.0], [15.0, 43.0]),
        tri([7.0, 40.0], [7.0, 43.0], [9.0, 43.0]),
    ]
}

pub fn site_meta() -> GridMeta {
    GridMeta::new(SITE_SIZE, SITE_SIZE, SITE_RESOLUTION, Point2::default()).unwrap()
}

/// Occupied everywhere except the corridor network.
pub fn site_map() -> TrinaryMap {
    let meta = site_meta();
    let shapes = free_space();
    let cells = (0..meta.len())
        .map(|i| {
            let p = meta.world_of(meta.cell_at(i));
            if shapes.iter().any(|s| s.contains(p)) {
                MapClass::Free
            } else {
                MapClass::Occupied
            }
        })
        .collect();
    TrinaryMap::new(meta, cells).unwrap()
}

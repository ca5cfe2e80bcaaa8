//! Map snapshots as RGB rasters, one pixel per cell, north up.
//!
//! Palette: free cells are dark blue `(16, 24, 48)`, occupied cells gray
//! `(150, 150, 150)`, undecided cells `(70, 70, 70)`. Entropy brightens every
//! channel by `round(100 * H)`. Corridor cells get `+40` green, the path is
//! drawn in amber `(255, 200, 0)` and the ROI outline in red `(255, 60, 60)`.

use std::path::Path;

use image::{ImageFormat, RgbImage};

use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::grid::{Cell, CellRect, GridMeta, LayerStack};
use crate::risk::Corridor;

pub const FREE_RGB: [u8; 3] = [16, 24, 48];
pub const OCCUPIED_RGB: [u8; 3] = [150, 150, 150];
pub const UNDECIDED_RGB: [u8; 3] = [70, 70, 70];
pub const PATH_RGB: [u8; 3] = [255, 200, 0];
pub const ROI_RGB: [u8; 3] = [255, 60, 60];
const ENTROPY_GAIN: f64 = 100.0;
const CORRIDOR_GREEN: u8 = 40;

/// Overlays for a snapshot.
#[derive(Default)]
pub struct Overlay<'a> {
    pub path: &'a [Point2],
    pub corridor: Option<&'a Corridor>,
    pub roi: Option<CellRect>,
}

/// Base colour plus entropy brightening for one cell.
pub fn cell_colour(occupancy: f64, entropy: f64, free_thresh: f64, tau_occ: f64) -> [u8; 3] {
    let base = if occupancy > tau_occ {
        OCCUPIED_RGB
    } else if occupancy < free_thresh {
        FREE_RGB
    } else {
        UNDECIDED_RGB
    };
    let lift = (ENTROPY_GAIN * entropy.clamp(0.0, 1.0)).round() as u8;
    base.map(|v| v.saturating_add(lift))
}

fn pixel_of(meta: &GridMeta, c: Cell) -> Option<(u32, u32)> {
    meta.in_bounds(c)
        .then(|| (c.x as u32, (meta.height as i64 - 1 - c.y) as u32))
}

/// Renders layers computed over the whole grid.
pub fn render_layers(layers: &LayerStack, free_thresh: f64, overlay: &Overlay) -> Result<RgbImage> {
    let meta = *layers.meta();
    if layers.region() != meta.bounds() {
        return Err(Error::Config("rendering needs layers over the whole grid".into()));
    }
    let mut img = RgbImage::new(meta.width as u32, meta.height as u32);
    for c in meta.bounds().cells() {
        let rgb = cell_colour(
            layers.occupancy(c).unwrap(),
            layers.entropy(c).unwrap(),
            free_thresh,
            layers.tau_occ(),
        );
        let (x, y) = pixel_of(&meta, c).unwrap();
        img.put_pixel(x, y, image::Rgb(rgb));
    }
    if let Some(corridor) = overlay.corridor {
        for &c in corridor.cells() {
            if let Some((x, y)) = pixel_of(&meta, c) {
                let p = img.get_pixel_mut(x, y);
                p.0[1] = p.0[1].saturating_add(CORRIDOR_GREEN);
            }
        }
    }
    for w in overlay.path.windows(2) {
        let n = (w[0].distance(w[1]) / (meta.resolution / 2.0)).ceil().max(1.0) as usize;
        for k in 0..=n {
            let c = meta.cell_of(w[0].lerp(w[1], k as f64 / n as f64));
            if let Some((x, y)) = pixel_of(&meta, c) {
                img.put_pixel(x, y, image::Rgb(PATH_RGB));
            }
        }
    }
    if let Some(r) = overlay.roi.filter(|r| !r.is_empty()) {
        for c in r.cells() {
            let edge = c.x == r.x0 || c.x == r.x1 - 1 || c.y == r.y0 || c.y == r.y1 - 1;
            if let Some((x, y)) = pixel_of(&meta, c).filter(|_| edge) {
                img.put_pixel(x, y, image::Rgb(ROI_RGB));
            }
        }
    }
    Ok(img)
}

/// Writes a snapshot; `.ppm` gives binary PPM, anything else PNG.
pub fn render_snapshot(
    layers: &LayerStack,
    free_thresh: f64,
    overlay: &Overlay,
    out: impl AsRef<Path>,
) -> Result<()> {
    let out = out.as_ref();
    let img = render_layers(layers, free_thresh, overlay)?;
    if out
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("ppm"))
    {
        let mut bytes = format!("P6\n{} {}\n255\n", img.width(), img.height()).into_bytes();
        bytes.extend_from_slice(img.as_raw());
        std::fs::write(out, bytes).map_err(|e| Error::io(out, e))?;
    } else {
        img.save_with_format(out, ImageFormat::Png)?;
    }
    Ok(())
}

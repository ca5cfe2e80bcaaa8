//! Occupancy maps on disk: a binary PGM (P5) image plus a YAML sidecar,
//! following the ROS map_server conventions.
//!
//! Export writes occupied as 0, free as 254 and unknown as 205. Import maps
//! each pixel to an occupancy value `p = (255 - px) / 255` (or `px / 255`
//! when `negate` is set) and classifies it against the sidecar thresholds.
//! Image row 0 is the top (northern) edge of the map.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{Cell, GridMeta, OccupancyGrid};
use crate::error::{Error, Result};
use crate::geometry::Point2;

pub const PIXEL_OCCUPIED: u8 = 0;
pub const PIXEL_FREE: u8 = 254;
pub const PIXEL_UNKNOWN: u8 = 205;

/// Sidecar thresholds written on export.
pub const EXPORT_OCCUPIED_THRESH: f64 = 0.65;
pub const EXPORT_FREE_THRESH: f64 = 0.196;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MapClass {
    Occupied,
    Free,
    Unknown,
}

/// Three-valued occupancy raster.
#[derive(Debug, Clone, PartialEq)]
pub struct TrinaryMap {
    pub meta: GridMeta,
    pub cells: Vec<MapClass>,
}

impl TrinaryMap {
    pub fn new(meta: GridMeta, cells: Vec<MapClass>) -> Result<Self> {
        meta.validate()?;
        if cells.len() != meta.len() {
            return Err(Error::Config(format!(
                "map has {} cells, metadata needs {}",
                cells.len(),
                meta.len()
            )));
        }
        Ok(Self { meta, cells })
    }

    /// Classifies a fused grid: `O > occ` occupied, `O < free` free, else unknown.
    pub fn from_grid(grid: &OccupancyGrid, occ: f64, free: f64) -> Self {
        let cells = (0..grid.meta().len())
            .map(|i| classify(grid.probability_at(i), occ, free))
            .collect();
        Self {
            meta: *grid.meta(),
            cells,
        }
    }

    pub fn get(&self, c: Cell) -> Option<MapClass> {
        self.meta.index(c).map(|i| self.cells[i])
    }

    pub fn occupied_mask(&self) -> Vec<bool> {
        self.cells.iter().map(|&c| c == MapClass::Occupied).collect()
    }
}

fn classify(p: f64, occ: f64, free: f64) -> MapClass {
    if p > occ {
        MapClass::Occupied
    } else if p < free {
        MapClass::Free
    } else {
        MapClass::Unknown
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum Flag {
    Int(i64),
    Bool(bool),
}

impl Flag {
    fn is_set(&self) -> bool {
        match self {
            Flag::Int(v) => *v != 0,
            Flag::Bool(b) => *b,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Sidecar {
    image: String,
    resolution: f64,
    origin: [f64; 3],
    occupied_thresh: f64,
    free_thresh: f64,
    negate: Flag,
}

/// Loads a map from its YAML sidecar; the image path is resolved relative to it.
pub fn load_map(yaml_path: impl AsRef<Path>) -> Result<TrinaryMap> {
    let yaml_path = yaml_path.as_ref();
    let text = fs::read_to_string(yaml_path).map_err(|e| Error::io(yaml_path, e))?;
    let sidecar: Sidecar = serde_yaml::from_str(&text).map_err(|e| Error::MapParse {
        offset: e.location().map_or(0, |l| l.index()),
        message: format!("{}: {e}", yaml_path.display()),
    })?;
    if !(0.0..=1.0).contains(&sidecar.free_thresh)
        || !(0.0..=1.0).contains(&sidecar.occupied_thresh)
        || sidecar.free_thresh > sidecar.occupied_thresh
    {
        return Err(Error::Config(format!(
            "{}: thresholds must satisfy 0 <= free_thresh <= occupied_thresh <= 1",
            yaml_path.display()
        )));
    }
    let image_path = resolve(yaml_path, &sidecar.image);
    let bytes = fs::read(&image_path).map_err(|e| Error::io(&image_path, e))?;
    let pgm = parse_pgm(&bytes)?;
    let meta = GridMeta::new(
        pgm.width,
        pgm.height,
        sidecar.resolution,
        Point2::new(sidecar.origin[0], sidecar.origin[1]),
    )?;
    let negate = sidecar.negate.is_set();
    let mut cells = vec![MapClass::Unknown; meta.len()];
    for row in 0..pgm.height {
        let y = pgm.height - 1 - row;
        for x in 0..pgm.width {
            let px = pgm.pixels[row * pgm.width + x] as f64;
            let p = if negate { px / 255.0 } else { (255.0 - px) / 255.0 };
            cells[y * pgm.width + x] = classify(p, sidecar.occupied_thresh, sidecar.free_thresh);
        }
    }
    TrinaryMap::new(meta, cells)
}

/// Writes `<stem>.pgm` next to `yaml_path` and the sidecar itself.
pub fn save_map(map: &TrinaryMap, yaml_path: impl AsRef<Path>) -> Result<()> {
    let yaml_path = yaml_path.as_ref();
    let image_name = format!(
        "{}.pgm",
        yaml_path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "map".into())
    );
    let image_path = resolve(yaml_path, &image_name);
    let (w, h) = (map.meta.width, map.meta.height);
    let mut bytes = format!("P5\n{w} {h}\n255\n").into_bytes();
    bytes.reserve(w * h);
    for row in 0..h {
        let y = h - 1 - row;
        bytes.extend(map.cells[y * w..(y + 1) * w].iter().map(|c| match c {
            MapClass::Occupied => PIXEL_OCCUPIED,
            MapClass::Free => PIXEL_FREE,
            MapClass::Unknown => PIXEL_UNKNOWN,
        }));
    }
    fs::write(&image_path, bytes).map_err(|e| Error::io(&image_path, e))?;

    let sidecar = Sidecar {
        image: image_name,
        resolution: map.meta.resolution,
        origin: [map.meta.origin.x, map.meta.origin.y, 0.0],
        occupied_thresh: EXPORT_OCCUPIED_THRESH,
        free_thresh: EXPORT_FREE_THRESH,
        negate: Flag::Int(0),
    };
    let text = serde_yaml::to_string(&sidecar).map_err(|e| Error::MapParse {
        offset: 0,
        message: e.to_string(),
    })?;
    fs::write(yaml_path, text).map_err(|e| Error::io(yaml_path, e))
}

fn resolve(yaml_path: &Path, name: &str) -> PathBuf {
    let p = Path::new(name);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        yaml_path.parent().unwrap_or(Path::new("")).join(p)
    }
}

struct Pgm<'a> {
    width: usize,
    height: usize,
    pixels: &'a [u8],
}

fn parse_pgm(bytes: &[u8]) -> Result<Pgm<'_>> {
    let err = |offset: usize, message: &str| Error::MapParse {
        offset,
        message: message.to_string(),
    };
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(err(0, "expected binary PGM magic 'P5'"));
    }
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for (k, name) in ["width", "height", "maxval"].iter().enumerate() {
        // Whitespace and comments between header fields.
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                _ => break,
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        if start == pos {
            return Err(err(start, &format!("expected {name}")));
        }
        let text = std::str::from_utf8(&bytes[start..pos]).unwrap();
        fields[k] = text
            .parse()
            .map_err(|_| err(start, &format!("{name} out of range")))?;
    }
    let [width, height, maxval] = fields;
    if width == 0 || height == 0 {
        return Err(err(2, "image must be non-empty"));
    }
    if maxval != 255 {
        return Err(err(pos, &format!("unsupported maxval {maxval}, expected 255")));
    }
    if !bytes.get(pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(err(pos, "expected whitespace after header"));
    }
    pos += 1;
    let needed = width * height;
    let available = bytes.len() - pos;
    if available != needed {
        return Err(err(
            pos,
            &format!("pixel data has {available} bytes, header declares {width}x{height}"),
        ));
    }
    Ok(Pgm {
        width,
        height,
        pixels: &bytes[pos..],
    })
}

use super::mapio::{MapClass, TrinaryMap};
use super::{squared_distance_transform, Cell, CellRect, GridMeta};
use crate::error::{Error, Result};

/// Accepted range for the prior confidence in BIM occupancy.
pub const P_OCC_RANGE: (f64, f64) = (0.6, 0.9);

/// As-designed occupancy raster with its soft-prior confidence and the
/// frozen wall-margin mask.
#[derive(Debug, Clone, PartialEq)]
pub struct BimPrior {
    meta: GridMeta,
    occupancy: Vec<bool>,
    p_occ: f64,
    openings: Vec<CellRect>,
    frozen: Vec<bool>,
}

impl BimPrior {
    /// Builds the prior and its frozen mask: BIM-occupied cells dilated by
    /// `ceil(margin / resolution)` cells (Euclidean disk), minus `openings`.
    pub fn new(
        meta: GridMeta,
        occupancy: Vec<bool>,
        p_occ: f64,
        margin: f64,
        openings: Vec<CellRect>,
    ) -> Result<Self> {
        meta.validate()?;
        if occupancy.len() != meta.len() {
            return Err(Error::Config(format!(
                "BIM raster has {} cells, grid needs {}",
                occupancy.len(),
                meta.len()
            )));
        }
        validate_p_occ(p_occ)?;
        if !(margin.is_finite() && margin >= 0.0) {
            return Err(Error::Config(format!("frozen margin must be >= 0, got {margin}")));
        }
        let radius = (margin / meta.resolution - 1e-9).ceil().max(0.0);
        let r2 = radius * radius;
        let d2 = squared_distance_transform(meta.width, meta.height, |i| occupancy[i]);
        let mut frozen: Vec<bool> = d2.iter().map(|&d| d <= r2).collect();
        for rect in &openings {
            for c in rect.intersect(&meta.bounds()).cells() {
                frozen[meta.index(c).unwrap()] = false;
            }
        }
        Ok(Self {
            meta,
            occupancy,
            p_occ,
            openings,
            frozen,
        })
    }

    /// A prior with no frozen cells; handy for tests and uniform worlds.
    pub fn unfrozen(meta: GridMeta, occupancy: Vec<bool>, p_occ: f64) -> Result<Self> {
        let mut prior = Self::new(meta, occupancy, p_occ, 0.0, Vec::new())?;
        prior.frozen.fill(false);
        Ok(prior)
    }

    /// Prior from a loaded map; only cells classified occupied count as walls.
    pub fn from_map(
        map: &TrinaryMap,
        p_occ: f64,
        margin: f64,
        openings: Vec<CellRect>,
    ) -> Result<Self> {
        let occupancy = map.cells.iter().map(|&c| c == MapClass::Occupied).collect();
        Self::new(map.meta, occupancy, p_occ, margin, openings)
    }

    pub fn meta(&self) -> &GridMeta {
        &self.meta
    }

    pub fn p_occ(&self) -> f64 {
        self.p_occ
    }

    pub fn openings(&self) -> &[CellRect] {
        &self.openings
    }

    pub fn occupancy(&self) -> &[bool] {
        &self.occupancy
    }

    pub fn frozen_mask(&self) -> &[bool] {
        &self.frozen
    }

    pub fn is_occupied(&self, index: usize) -> bool {
        self.occupancy[index]
    }

    pub fn is_frozen(&self, index: usize) -> bool {
        self.frozen[index]
    }

    pub fn cell_occupied(&self, c: Cell) -> bool {
        self.meta.index(c).is_some_and(|i| self.occupancy[i])
    }

    /// Prior occupancy probability of a cell.
    pub fn prior_probability(&self, index: usize) -> f64 {
        if self.occupancy[index] {
            self.p_occ
        } else {
            1.0 - self.p_occ
        }
    }

    /// Prior log-odds of a cell.
    pub fn prior_log_odds(&self, index: usize) -> f64 {
        let p = self.prior_probability(index);
        (p / (1.0 - p)).ln()
    }

    /// Binary design value as 0.0 / 1.0.
    pub fn design_value(&self, index: usize) -> f64 {
        if self.occupancy[index] {
            1.0
        } else {
            0.0
        }
    }
}

pub(crate) fn validate_p_occ(p_occ: f64) -> Result<()> {
    if !(P_OCC_RANGE.0..=P_OCC_RANGE.1).contains(&p_occ) {
        return Err(Error::Config(format!(
            "prior confidence p_occ must lie in [{}, {}], got {p_occ}",
            P_OCC_RANGE.0, P_OCC_RANGE.1
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point2;

    fn meta(w: usize, h: usize) -> GridMeta {
        GridMeta::new(w, h, 0.1, Point2::default()).unwrap()
    }

    #[test]
    fn rejects_confidence_out_of_range() {
        let m = meta(4, 4);
        assert!(BimPrior::new(m, vec![false; 16], 0.5, 0.2, vec![]).is_err());
        assert!(BimPrior::new(m, vec![false; 16], 0.95, 0.2, vec![]).is_err());
        assert!(BimPrior::new(m, vec![false; 16], 0.6, 0.2, vec![]).is_ok());
    }

    #[test]
    fn margin_of_two_cells_is_a_disk() {
        let m = meta(11, 11);
        let mut occ = vec![false; 121];
        occ[5 * 11 + 5] = true;
        let prior = BimPrior::new(m, occ, 0.7, 0.2, vec![]).unwrap();
        let frozen = |x: i64, y: i64| prior.is_frozen(m.index(Cell::new(x, y)).unwrap());
        assert!(frozen(5, 5));
        assert!(frozen(7, 5));
        assert!(frozen(6, 6));
        assert!(!frozen(7, 7));
        assert!(!frozen(8, 5));
        assert_eq!(prior.frozen_mask().iter().filter(|&&f| f).count(), 13);
    }

    #[test]
    fn openings_are_never_frozen() {
        let m = meta(20, 20);
        let occ: Vec<bool> = (0..400).map(|i| i % 20 == 10).collect();
        let door = CellRect::new(8, 5, 13, 9);
        let prior = BimPrior::new(m, occ, 0.8, 0.2, vec![door]).unwrap();
        for c in door.cells() {
            assert!(!prior.is_frozen(m.index(c).unwrap()));
        }
        assert!(prior.is_frozen(m.index(Cell::new(10, 12)).unwrap()));
    }

    #[test]
    fn prior_log_odds_closed_form() {
        let m = meta(2, 1);
        let prior = BimPrior::unfrozen(m, vec![true, false], 0.7).unwrap();
        assert!((prior.prior_log_odds(1) - (0.3f64 / 0.7).ln()).abs() < 1e-15);
        assert!((prior.prior_log_odds(1) + 0.8473).abs() < 1e-4);
        assert!((prior.prior_log_odds(0) - 0.8473).abs() < 1e-4);
    }
}

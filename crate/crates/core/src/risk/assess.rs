use serde::{Deserialize, Serialize};

use super::corridor::{Corridor, ForwardWindow};
use crate::error::{Error, Result};
use crate::grid::{Cell, LayerStack};

/// Weights and thresholds for the safety decision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RiskParams {
    /// Weight of the entropy term.
    pub alpha: f64,
    /// Weight of the discrepancy term.
    pub beta: f64,
    pub tau_safe: f64,
    /// Minimum acceptable clearance, metres.
    pub m_min: f64,
    /// UGV footprint radius, metres.
    pub r_ugv: f64,
}

impl Default for RiskParams {
    fn default() -> Self {
        Self {
            alpha: 0.5,
            beta: 0.5,
            tau_safe: 0.5,
            m_min: 0.3,
            r_ugv: 0.3,
        }
    }
}

impl RiskParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0 && self.beta >= 0.0 && self.alpha + self.beta > 0.0) {
            return Err(Error::Config("risk weights must be non-negative and not both zero".into()));
        }
        if !(self.m_min >= 0.0 && self.r_ugv >= 0.0 && self.tau_safe.is_finite()) {
            return Err(Error::Config("m_min, r_ugv must be >= 0 and tau_safe finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TriggerReason {
    None,
    Risk,
    Clearance,
    Both,
}

/// Outcome of one look-ahead assessment.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskReport {
    /// Window cells inside the corridor.
    pub cells: Vec<Cell>,
    /// Per-cell risk, parallel to `cells`.
    pub risks: Vec<f64>,
    /// Mean risk over the window; 0 when the window is empty.
    pub corridor_risk: f64,
    pub mean_entropy: f64,
    pub mean_discrepancy: f64,
    /// Minimum clearance over sampled look-ahead path points.
    pub min_clearance: f64,
    pub empty_window: bool,
    pub trigger: bool,
    pub reason: TriggerReason,
    pub alpha: f64,
    pub beta: f64,
}

impl RiskReport {
    /// Share of the corridor risk contributed by the discrepancy term.
    pub fn discrepancy_contribution(&self) -> f64 {
        self.beta * self.mean_discrepancy
    }

    pub fn entropy_contribution(&self) -> f64 {
        self.alpha * self.mean_entropy
    }
}

/// Aggregates risk over the window and evaluates the dual trigger
/// `R > tau_safe or c_min < m_min`. Clearance is sampled along the path every
/// grid cell of arc length over the window's arc span.
pub fn assess(
    layers: &LayerStack,
    corridor: &Corridor,
    window: &ForwardWindow,
    params: &RiskParams,
) -> Result<RiskReport> {
    layers.meta().check_same(corridor.meta())?;
    let mut risks = Vec::with_capacity(window.cells.len());
    let (mut sum_h, mut sum_d) = (0.0, 0.0);
    for &c in &window.cells {
        let (Some(h), Some(d)) = (layers.entropy(c), layers.discrepancy(c)) else {
            return Err(Error::OutOfBounds {
                x: layers.meta().world_of(c).x,
                y: layers.meta().world_of(c).y,
            });
        };
        sum_h += h;
        sum_d += d;
        risks.push(params.alpha * h + params.beta * d);
    }
    let n = window.cells.len();
    let empty = n == 0;
    let (corridor_risk, mean_h, mean_d) = if empty {
        (0.0, 0.0, 0.0)
    } else {
        (
            risks.iter().sum::<f64>() / n as f64,
            sum_h / n as f64,
            sum_d / n as f64,
        )
    };

    let spacing = layers.meta().resolution;
    let mut min_clearance = f64::INFINITY;
    if !empty {
        for p in corridor.samples(window.arc_start, window.arc_end, spacing) {
            min_clearance = min_clearance.min(layers.clearance_at(p, params.r_ugv)?);
        }
    }

    let risky = !empty && corridor_risk > params.tau_safe;
    let tight = !empty && min_clearance < params.m_min;
    let reason = match (risky, tight) {
        (true, true) => TriggerReason::Both,
        (true, false) => TriggerReason::Risk,
        (false, true) => TriggerReason::Clearance,
        (false, false) => TriggerReason::None,
    };
    Ok(RiskReport {
        cells: window.cells.clone(),
        risks,
        corridor_risk,
        mean_entropy: mean_h,
        mean_discrepancy: mean_d,
        min_clearance,
        empty_window: empty,
        trigger: risky || tight,
        reason,
        alpha: params.alpha,
        beta: params.beta,
    })
}

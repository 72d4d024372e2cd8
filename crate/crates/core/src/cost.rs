//! Cycle cost accounting and long-run cost rate.
//!
//! A cycle's cost is the sum of ten terms: inspections, imperfect actions,
//! perfect actions, the corrective action, malfunction and downtime (both
//! rates times durations), ordinary and emergency ordering, holding (rate
//! times the integral of on-hand stock) and purchasing.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CostError {
    #[error("costs.{field}: {reason}")]
    Invalid { field: &'static str, reason: String },
    #[error("intervention gain {gain} must lie strictly inside (0, {x_before})")]
    GainOutOfRange { gain: f64, x_before: f64 },
    #[error("cost rate needs at least one cycle")]
    NoCycles,
    #[error("total cycle length is zero")]
    ZeroLength,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CostParams {
    pub c_ins: f64,
    pub c_p0: f64,
    pub c_c: f64,
    /// Malfunction cost per unit time.
    pub c_d1: f64,
    /// Downtime cost per unit time.
    pub c_d2: f64,
    /// Holding cost per part per unit time.
    pub c_h: f64,
    pub c_o: f64,
    pub c_oe: f64,
    pub c_pur: f64,
    /// Exponent of the imperfect-maintenance cost curve.
    pub eta: f64,
}

impl CostParams {
    pub fn validate(&self) -> Result<(), CostError> {
        let fields = [
            ("c_ins", self.c_ins),
            ("c_p0", self.c_p0),
            ("c_c", self.c_c),
            ("c_d1", self.c_d1),
            ("c_d2", self.c_d2),
            ("c_h", self.c_h),
            ("c_o", self.c_o),
            ("c_oe", self.c_oe),
            ("c_pur", self.c_pur),
        ];
        for (field, value) in fields {
            if !(value.is_finite() && value > 0.0) {
                return Err(CostError::Invalid {
                    field,
                    reason: format!("must be positive (got {value})"),
                });
            }
        }
        if !(self.eta.is_finite() && self.eta >= 0.0) {
            return Err(CostError::Invalid {
                field: "eta",
                reason: format!("must be non-negative (got {})", self.eta),
            });
        }
        if self.c_c <= self.c_p0 {
            return Err(CostError::Invalid {
                field: "c_c",
                reason: format!(
                    "corrective cost c_c ({}) must exceed perfect preventive cost c_p0 ({})",
                    self.c_c, self.c_p0
                ),
            });
        }
        if self.c_d2 <= self.c_d1 {
            return Err(CostError::Invalid {
                field: "c_d2",
                reason: format!(
                    "downtime cost rate c_d2 ({}) must exceed malfunction cost rate c_d1 ({})",
                    self.c_d2, self.c_d1
                ),
            });
        }
        if self.c_oe <= self.c_o {
            return Err(CostError::Invalid {
                field: "c_oe",
                reason: format!(
                    "emergency ordering cost c_oe ({}) must exceed ordinary ordering cost c_o ({})",
                    self.c_oe, self.c_o
                ),
            });
        }
        Ok(())
    }

    /// Every monetary parameter multiplied by `factor`; `eta` unchanged.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            c_ins: self.c_ins * factor,
            c_p0: self.c_p0 * factor,
            c_c: self.c_c * factor,
            c_d1: self.c_d1 * factor,
            c_d2: self.c_d2 * factor,
            c_h: self.c_h * factor,
            c_o: self.c_o * factor,
            c_oe: self.c_oe * factor,
            c_pur: self.c_pur * factor,
            eta: self.eta,
        }
    }
}

/// Event counters and accumulators for one cycle.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct CostLedger {
    pub n_ins: u64,
    pub n_ip: u64,
    pub n_p: u64,
    pub n_c: u64,
    pub n_o: u64,
    pub n_oe: u64,
    pub imperfect_cost_sum: f64,
    /// Malfunction duration.
    pub d1: f64,
    /// Downtime duration.
    pub d2: f64,
    /// Integral of on-hand stock over time.
    pub holding_integral: f64,
    pub purchased: u64,
}

impl CostLedger {
    pub fn accrue_holding(&mut self, on_hand: u32, dt: f64) {
        debug_assert!(dt >= 0.0);
        self.holding_integral += f64::from(on_hand) * dt;
    }
}

/// `C_p^k = c_p0 · (gain / x_before)^η`.
pub fn imperfect_cost(gain: f64, x_before: f64, params: &CostParams) -> Result<f64, CostError> {
    if !(gain > 0.0 && gain < x_before) {
        return Err(CostError::GainOutOfRange { gain, x_before });
    }
    Ok(params.c_p0 * (gain / x_before).powf(params.eta))
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct CostBreakdown {
    pub inspection: f64,
    pub imperfect: f64,
    pub perfect: f64,
    pub corrective: f64,
    pub malfunction: f64,
    pub downtime: f64,
    pub ordering: f64,
    pub emergency_ordering: f64,
    pub holding: f64,
    pub purchasing: f64,
}

impl CostBreakdown {
    pub fn from_ledger(ledger: &CostLedger, params: &CostParams) -> Self {
        Self {
            inspection: params.c_ins * ledger.n_ins as f64,
            imperfect: ledger.imperfect_cost_sum,
            perfect: params.c_p0 * ledger.n_p as f64,
            corrective: params.c_c * ledger.n_c as f64,
            malfunction: params.c_d1 * ledger.d1,
            downtime: params.c_d2 * ledger.d2,
            ordering: params.c_o * ledger.n_o as f64,
            emergency_ordering: params.c_oe * ledger.n_oe as f64,
            holding: params.c_h * ledger.holding_integral,
            purchasing: params.c_pur * ledger.purchased as f64,
        }
    }

    pub fn terms(&self) -> [(&'static str, f64); 10] {
        [
            ("inspection", self.inspection),
            ("imperfect", self.imperfect),
            ("perfect", self.perfect),
            ("corrective", self.corrective),
            ("malfunction", self.malfunction),
            ("downtime", self.downtime),
            ("ordering", self.ordering),
            ("emergency_ordering", self.emergency_ordering),
            ("holding", self.holding),
            ("purchasing", self.purchasing),
        ]
    }

    /// Sum of the terms, left to right in [`terms`](Self::terms) order.
    pub fn total(&self) -> f64 {
        self.terms().iter().fold(0.0, |acc, (_, v)| acc + v)
    }

    pub fn add(&mut self, other: &Self) {
        self.inspection += other.inspection;
        self.imperfect += other.imperfect;
        self.perfect += other.perfect;
        self.corrective += other.corrective;
        self.malfunction += other.malfunction;
        self.downtime += other.downtime;
        self.ordering += other.ordering;
        self.emergency_ordering += other.emergency_ordering;
        self.holding += other.holding;
        self.purchasing += other.purchasing;
    }

    pub fn scale(&mut self, factor: f64) {
        for field in [
            &mut self.inspection,
            &mut self.imperfect,
            &mut self.perfect,
            &mut self.corrective,
            &mut self.malfunction,
            &mut self.downtime,
            &mut self.ordering,
            &mut self.emergency_ordering,
            &mut self.holding,
            &mut self.purchasing,
        ] {
            *field *= factor;
        }
    }
}

pub fn total_cost(ledger: &CostLedger, params: &CostParams) -> f64 {
    CostBreakdown::from_ledger(ledger, params).total()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostRateEstimator {
    /// Σ cost / Σ length over regeneration cycles.
    #[default]
    RenewalReward,
    /// Mean of per-cycle cost/length ratios (biased; for comparison).
    CycleMean,
}

/// Anything carrying a cycle's cost and length.
pub trait CycleOutcome {
    fn total_cost(&self) -> f64;
    fn cycle_length(&self) -> f64;
}

impl CycleOutcome for (f64, f64) {
    fn total_cost(&self) -> f64 {
        self.0
    }

    fn cycle_length(&self) -> f64 {
        self.1
    }
}

pub fn cost_rate<C: CycleOutcome>(
    cycles: &[C],
    estimator: CostRateEstimator,
) -> Result<f64, CostError> {
    if cycles.is_empty() {
        return Err(CostError::NoCycles);
    }
    match estimator {
        CostRateEstimator::RenewalReward => {
            let cost: f64 = cycles.iter().map(|c| c.total_cost()).sum();
            let length: f64 = cycles.iter().map(|c| c.cycle_length()).sum();
            if length <= 0.0 {
                return Err(CostError::ZeroLength);
            }
            Ok(cost / length)
        }
        CostRateEstimator::CycleMean => {
            if cycles.iter().any(|c| c.cycle_length() <= 0.0) {
                return Err(CostError::ZeroLength);
            }
            Ok(cycles
                .iter()
                .map(|c| c.total_cost() / c.cycle_length())
                .sum::<f64>()
                / cycles.len() as f64)
        }
    }
}

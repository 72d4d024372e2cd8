//! Action classification at inspections and the joint inspection scheduler.

use serde::Serialize;
use thiserror::Error;

use crate::degradation::{DegradationParams, SystemState};
use crate::inventory::{Coverage, InventoryState, SpareRequirements};
use crate::numerics::{gamma_sf, solve_monotone_increasing, NumericsError};

/// Tolerance on the failure probability when solving for the next inspection.
pub const RUL_PROBABILITY_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolicyError {
    #[error("policy.{field}: {reason}")]
    Invalid { field: &'static str, reason: String },
    #[error("cannot schedule from a failed state (x={x} >= L={threshold})")]
    AlreadyFailed { x: f64, threshold: f64 },
    #[error("inspection delay solver failed: {0}")]
    Solver(#[from] NumericsError),
}

/// The decision vector `(M, K, T, S, Q)` plus the availability floor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolicyParams {
    /// Preventive maintenance threshold.
    pub m: f64,
    /// Maximum number of successive imperfect actions.
    pub k: u32,
    /// Re-order level of deterioration.
    pub t_reorder: f64,
    /// Order-up-to stock level.
    pub s: u32,
    /// Admissible failure probability between two inspections.
    pub q: f64,
    /// Availability floor.
    pub a_star: f64,
}

impl PolicyParams {
    pub fn validate(&self, failure_threshold: f64) -> Result<(), PolicyError> {
        let invalid = |field, reason: String| Err(PolicyError::Invalid { field, reason });
        if !(self.m.is_finite() && self.m > 0.0) {
            return invalid("M", format!("M must be positive (got {})", self.m));
        }
        if self.m >= failure_threshold {
            return invalid(
                "M",
                format!(
                    "M must be below failure threshold L (M={}, L={failure_threshold})",
                    self.m
                ),
            );
        }
        if !(self.t_reorder.is_finite() && self.t_reorder > 0.0) {
            return invalid("T", format!("T must be positive (got {})", self.t_reorder));
        }
        if self.s < 1 {
            return invalid("S", "S must be at least 1".to_string());
        }
        if !(self.q > 0.0 && self.q < 1.0) {
            return invalid(
                "Q",
                format!("Q must lie strictly between 0 and 1 (got {})", self.q),
            );
        }
        if !(0.0..=1.0).contains(&self.a_star) {
            return invalid(
                "A_star",
                format!("A_star must lie in [0, 1] (got {})", self.a_star),
            );
        }
        Ok(())
    }

    /// The action expected at the next inspection if a preventive one is due.
    pub fn expected_action(&self, k: u32) -> ActionKind {
        if k < self.k {
            ActionKind::Imperfect
        } else {
            ActionKind::Perfect
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ActionKind {
    NoAction,
    Imperfect,
    Perfect,
    Corrective,
}

pub fn classify_action(
    x: f64,
    k: u32,
    policy: &PolicyParams,
    failure_threshold: f64,
) -> ActionKind {
    if x >= failure_threshold {
        ActionKind::Corrective
    } else if x >= policy.m {
        policy.expected_action(k)
    } else {
        ActionKind::NoAction
    }
}

/// Delay `ΔT` after which the probability of having crossed `L`, starting
/// from level `x` at speed `v`, equals `q`. Floored at the path step.
pub fn rul_delay(x: f64, v: f64, q: f64, params: &DegradationParams) -> Result<f64, PolicyError> {
    let threshold = params.failure_threshold;
    if x >= threshold {
        return Err(PolicyError::AlreadyFailed { x, threshold });
    }
    if !(q > 0.0 && q < 1.0) {
        return Err(PolicyError::Invalid {
            field: "Q",
            reason: format!("Q={q} outside (0, 1)"),
        });
    }
    let gap = threshold - x;
    let mut failure: Option<NumericsError> = None;
    let crossing_probability = |dt: f64| {
        if dt <= 0.0 {
            return 0.0;
        }
        match params
            .increment_law(v, dt)
            .and_then(|law| gamma_sf(gap, law))
        {
            Ok(p) => p,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        }
    };
    let solved = solve_monotone_increasing(
        crossing_probability,
        q,
        0.0,
        2.0 * gap / v,
        RUL_PROBABILITY_TOL,
    );
    if let Some(e) = failure {
        return Err(e.into());
    }
    Ok(solved?.max(params.path_step))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InspectionPlan {
    /// `t + ΔT` from the reliability step alone.
    pub candidate: f64,
    /// Candidate pushed back until spares for the expected action are on hand.
    pub next: f64,
    /// Spares the expected action needs.
    pub requirement: u32,
    /// No pipeline delivery can cover the requirement.
    pub shortfall: bool,
}

pub fn schedule_next_inspection(
    state: &SystemState,
    inventory: &InventoryState,
    policy: &PolicyParams,
    params: &DegradationParams,
    requirements: &SpareRequirements,
) -> Result<InspectionPlan, PolicyError> {
    let candidate = state.t + rul_delay(state.x, state.v, policy.q, params)?;
    let requirement = requirements.for_action(policy.expected_action(state.k));
    let (next, shortfall) = match inventory.earliest_coverage(requirement) {
        Coverage::OnHand => (candidate, false),
        Coverage::At(ready) => (candidate.max(ready), false),
        Coverage::Never => (candidate, true),
    };
    Ok(InspectionPlan {
        candidate,
        next,
        requirement,
        shortfall,
    })
}

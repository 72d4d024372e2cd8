//! On-hand and pipeline stock under the degradation-triggered (T, S) policy.

use serde::Serialize;
use thiserror::Error;

use crate::maintenance::ActionKind;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InventoryError {
    #[error("spare shortage: {requested} requested, {on_hand} on hand")]
    Shortage { requested: u32, on_hand: u32 },
    #[error("requirements.{field}: {reason}")]
    InvalidRequirements { field: &'static str, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Order {
    pub quantity: u32,
    pub placed_at: f64,
    pub delivery_at: f64,
    pub supplier_id: usize,
    pub emergency: bool,
}

impl Order {
    pub fn new(
        quantity: u32,
        placed_at: f64,
        lead_time: f64,
        supplier_id: usize,
        emergency: bool,
    ) -> Self {
        debug_assert!(quantity >= 1);
        Self {
            quantity,
            placed_at,
            delivery_at: placed_at + lead_time,
            supplier_id,
            emergency,
        }
    }
}

/// Spares consumed by each kind of action.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpareRequirements {
    /// Parts used by corrective maintenance.
    pub cms: u32,
    /// Parts used by perfect preventive maintenance.
    pub pms: u32,
    /// Probability that an imperfect action replaces one part.
    pub ipms_prob: f64,
}

impl Default for SpareRequirements {
    fn default() -> Self {
        Self {
            cms: 1,
            pms: 1,
            ipms_prob: 0.5,
        }
    }
}

impl SpareRequirements {
    pub fn new(cms: u32, pms: u32, ipms_prob: f64) -> Result<Self, InventoryError> {
        if cms < 1 {
            return Err(InventoryError::InvalidRequirements {
                field: "CMS",
                reason: "must be at least 1".into(),
            });
        }
        if pms < 1 {
            return Err(InventoryError::InvalidRequirements {
                field: "PMS",
                reason: "must be at least 1".into(),
            });
        }
        if !(0.0..=1.0).contains(&ipms_prob) {
            return Err(InventoryError::InvalidRequirements {
                field: "ipms_prob",
                reason: format!("must lie in [0, 1] (got {ipms_prob})"),
            });
        }
        Ok(Self {
            cms,
            pms,
            ipms_prob,
        })
    }

    /// Parts that must be on hand before the action can go ahead. An
    /// imperfect action counts as one part whenever it may replace one.
    pub fn for_action(&self, action: ActionKind) -> u32 {
        match action {
            ActionKind::NoAction => 0,
            ActionKind::Imperfect => u32::from(self.ipms_prob > 0.0),
            ActionKind::Perfect => self.pms,
            ActionKind::Corrective => self.cms,
        }
    }
}

/// When a requirement can be met from stock.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coverage {
    OnHand,
    At(f64),
    Never,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct InventoryState {
    pub on_hand: u32,
    /// Undelivered orders, ordered by delivery time (ties keep placement order).
    pipeline: Vec<Order>,
}

impl InventoryState {
    pub fn new(on_hand: u32) -> Self {
        Self {
            on_hand,
            pipeline: Vec::new(),
        }
    }

    pub fn pipeline(&self) -> &[Order] {
        &self.pipeline
    }

    pub fn pipeline_quantity(&self) -> u32 {
        self.pipeline.iter().map(|o| o.quantity).sum()
    }

    /// On hand plus undelivered.
    pub fn total_stock(&self) -> u32 {
        self.on_hand + self.pipeline_quantity()
    }

    pub fn place(&mut self, order: Order) {
        let at = self
            .pipeline
            .partition_point(|o| o.delivery_at <= order.delivery_at);
        self.pipeline.insert(at, order);
    }

    pub fn next_delivery(&self) -> Option<&Order> {
        self.pipeline.first()
    }

    /// Moves the earliest order into stock if it is due by `now`.
    pub fn receive_next(&mut self, now: f64) -> Option<Order> {
        if self.pipeline.first().is_some_and(|o| o.delivery_at <= now) {
            let order = self.pipeline.remove(0);
            self.on_hand += order.quantity;
            Some(order)
        } else {
            None
        }
    }

    /// Receives every order due by `now` (inclusive).
    pub fn receive_due(&mut self, now: f64) -> Vec<Order> {
        let mut delivered = Vec::new();
        while let Some(order) = self.receive_next(now) {
            delivered.push(order);
        }
        delivered
    }

    /// Stock on hand at time `at` if nothing is consumed before then.
    pub fn projected_on_hand(&self, at: f64) -> u32 {
        self.on_hand
            + self
                .pipeline
                .iter()
                .take_while(|o| o.delivery_at <= at)
                .map(|o| o.quantity)
                .sum::<u32>()
    }

    pub fn earliest_coverage(&self, requirement: u32) -> Coverage {
        if self.on_hand >= requirement {
            return Coverage::OnHand;
        }
        let mut stock = self.on_hand;
        for order in &self.pipeline {
            stock += order.quantity;
            if stock >= requirement {
                return Coverage::At(order.delivery_at);
            }
        }
        Coverage::Never
    }

    pub fn consume(&mut self, n: u32) -> Result<(), InventoryError> {
        if self.on_hand < n {
            return Err(InventoryError::Shortage {
                requested: n,
                on_hand: self.on_hand,
            });
        }
        self.on_hand -= n;
        Ok(())
    }
}

/// `max(0, S - total stock)`.
pub fn order_up_to_quantity(inventory: &InventoryState, s: u32) -> u32 {
    s.saturating_sub(inventory.total_stock())
}

/// Orders are triggered when the post-action level is strictly above `T`.
pub fn should_order(x_post_action: f64, t_reorder: f64) -> bool {
    x_post_action > t_reorder
}

/// Quantity that brings total stock to `S` once `pending` parts have been
/// used for the corrective action. Never less than the parts missing now.
pub fn emergency_order_quantity(inventory: &InventoryState, s: u32, pending: u32) -> u32 {
    let after_repair = (s + pending).saturating_sub(inventory.total_stock());
    after_repair.max(pending.saturating_sub(inventory.on_hand))
}

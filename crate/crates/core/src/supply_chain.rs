//! Local and main suppliers, and the enquiry rule that picks one per order.

use serde::Serialize;
use thiserror::Error;

use crate::numerics::RngStream;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SupplyChainError {
    #[error("supply chain: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SupplierKind {
    Local,
    Main,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Supplier {
    pub id: usize,
    pub lead_time: f64,
    pub availability_prob: f64,
    pub ordering_cost: f64,
    pub kind: SupplierKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupplyChain {
    locals: Vec<Supplier>,
    main: Supplier,
    reenquiry_interval: f64,
}

/// Checks `LT_1 < LT_2 < … < LT_e` and the matching cost ordering.
///
/// Local suppliers must be listed closest first. Local ordering costs may
/// be equal (a single ordinary ordering cost is common) but must not
/// decrease, and every local must be cheaper than the main supplier.
pub fn validate_chain(suppliers: &[Supplier]) -> Result<SupplyChain, SupplyChainError> {
    let err = |msg: String| Err(SupplyChainError::Invalid(msg));
    for s in suppliers {
        if !(s.lead_time.is_finite() && s.lead_time > 0.0) {
            return err(format!(
                "supplier {} lead time must be positive (got {})",
                s.id, s.lead_time
            ));
        }
        if !(0.0..=1.0).contains(&s.availability_prob) {
            return err(format!(
                "supplier {} availability probability must lie in [0, 1] (got {})",
                s.id, s.availability_prob
            ));
        }
        if !(s.ordering_cost.is_finite() && s.ordering_cost > 0.0) {
            return err(format!(
                "supplier {} ordering cost must be positive (got {})",
                s.id, s.ordering_cost
            ));
        }
    }
    let mains: Vec<&Supplier> = suppliers
        .iter()
        .filter(|s| s.kind == SupplierKind::Main)
        .collect();
    if mains.len() != 1 {
        return err(format!(
            "exactly one main supplier is required (found {})",
            mains.len()
        ));
    }
    let main = mains[0].clone();
    let locals: Vec<Supplier> = suppliers
        .iter()
        .filter(|s| s.kind == SupplierKind::Local)
        .cloned()
        .collect();
    if locals.is_empty() {
        return err("at least one local supplier is required".into());
    }
    for pair in locals.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        if a.lead_time >= b.lead_time {
            return err(format!(
                "local lead times must increase: LT_{} = {} is not below LT_{} = {}",
                a.id, a.lead_time, b.id, b.lead_time
            ));
        }
        if a.ordering_cost > b.ordering_cost {
            return err(format!(
                "local ordering costs must not decrease with lead time: C_{} = {} exceeds C_{} = {}",
                a.id, a.ordering_cost, b.id, b.ordering_cost
            ));
        }
    }
    let slowest = locals.last().expect("non-empty");
    if slowest.lead_time >= main.lead_time {
        return err(format!(
            "main supplier lead time {} must exceed every local lead time (LT_{} = {})",
            main.lead_time, slowest.id, slowest.lead_time
        ));
    }
    if let Some(dear) = locals
        .iter()
        .find(|l| l.ordering_cost >= main.ordering_cost)
    {
        return err(format!(
            "main supplier ordering cost {} must exceed local ordering cost C_{} = {}",
            main.ordering_cost, dear.id, dear.ordering_cost
        ));
    }
    let reenquiry_interval = locals[0].lead_time;
    Ok(SupplyChain {
        locals,
        main,
        reenquiry_interval,
    })
}

impl SupplyChain {
    pub fn locals(&self) -> &[Supplier] {
        &self.locals
    }

    pub fn main(&self) -> &Supplier {
        &self.main
    }

    /// Delay before the main supplier is asked again after refusing an
    /// emergency order. Defaults to the fastest local lead time.
    pub fn reenquiry_interval(&self) -> f64 {
        self.reenquiry_interval
    }

    pub fn with_reenquiry_interval(mut self, interval: f64) -> Result<Self, SupplyChainError> {
        if !(interval.is_finite() && interval > 0.0) {
            return Err(SupplyChainError::Invalid(format!(
                "re-enquiry interval must be positive (got {interval})"
            )));
        }
        self.reenquiry_interval = interval;
        Ok(self)
    }

    /// Enquires locals closest first, one fresh uniform per enquiry; the
    /// main supplier is only asked for emergency orders. `None` means no
    /// supplier can deliver at this epoch.
    pub fn select_supplier(&self, emergency: bool, rng: &mut RngStream) -> Option<&Supplier> {
        self.select_with(emergency, || rng.uniform())
    }

    /// [`select_supplier`](Self::select_supplier) with the uniforms supplied
    /// by the caller.
    pub fn select_with(&self, emergency: bool, mut draw: impl FnMut() -> f64) -> Option<&Supplier> {
        if let Some(local) = self.locals.iter().find(|s| draw() < s.availability_prob) {
            return Some(local);
        }
        if emergency && draw() < self.main.availability_prob {
            return Some(&self.main);
        }
        None
    }
}

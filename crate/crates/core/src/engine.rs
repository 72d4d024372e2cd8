//! Life-cycle simulation and replication batches.
//!
//! A cycle starts from a new system with `S` spares on hand and ends when
//! the first corrective action is completed. Each inspection epoch:
//!
//! 1. receives deliveries that arrived since the last epoch,
//! 2. advances the latent path to the inspection time,
//! 3. observes the level and classifies the action,
//! 4. performs it (corrective ends the cycle, possibly after an emergency
//!    order and downtime),
//! 5. places an order-up-to-`S` order if the post-action level is above `T`
//!    or stock cannot cover the next expected action,
//! 6. schedules the next inspection.
//!
//! Holding cost accrues between every pair of consecutive events.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::cost::{
    cost_rate, CostBreakdown, CostError, CostLedger, CostParams, CostRateEstimator, CycleOutcome,
};
use crate::degradation::{
    advance_steps, apply_imperfect, apply_perfect, DegradationError, DegradationParams, SystemState,
};
use crate::inventory::{
    emergency_order_quantity, order_up_to_quantity, should_order, InventoryError, InventoryState,
    Order, SpareRequirements,
};
use crate::maintenance::{
    classify_action, schedule_next_inspection, ActionKind, PolicyError, PolicyParams,
};
use crate::numerics::{RngStream, StreamPurpose};
use crate::supply_chain::{SupplierKind, SupplyChain};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error(transparent)]
    Degradation(#[from] DegradationError),
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error(transparent)]
    Cost(#[from] CostError),
    #[error(transparent)]
    Inventory(#[from] InventoryError),
    #[error("invalid scenario: {0}")]
    InvalidConfig(String),
    #[error("stream {stream_id}: emergency order refused {refusals} times, giving up")]
    EmergencyRetriesExhausted { stream_id: u64, refusals: u32 },
    #[error("stream {stream_id}: no failure after {inspections} inspections")]
    InspectionLimit { stream_id: u64, inspections: u64 },
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationSettings {
    pub replications: u64,
    pub seed: u64,
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
    /// Push inspections back until spares for the expected action arrive.
    pub spare_deferral: bool,
    pub estimator: CostRateEstimator,
    pub max_emergency_retries: u32,
    pub max_inspections: u64,
    pub record_trace: bool,
}

impl Default for SimulationSettings {
    fn default() -> Self {
        Self {
            replications: 1_000,
            seed: 0,
            workers: None,
            spare_deferral: true,
            estimator: CostRateEstimator::RenewalReward,
            max_emergency_retries: 10_000,
            max_inspections: 10_000_000,
            record_trace: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub degradation: DegradationParams,
    pub policy: PolicyParams,
    pub costs: CostParams,
    pub suppliers: SupplyChain,
    pub requirements: SpareRequirements,
    pub simulation: SimulationSettings,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        self.policy.validate(self.degradation.failure_threshold)?;
        self.costs.validate()?;
        if self.policy.s < self.requirements.pms {
            return Err(SimError::InvalidConfig(format!(
                "policy.S ({}) must be at least requirements.PMS ({})",
                self.policy.s, self.requirements.pms
            )));
        }
        if self.simulation.replications < 1 {
            return Err(SimError::InvalidConfig(
                "simulation.replications must be at least 1".into(),
            ));
        }
        if self.simulation.workers == Some(0) {
            return Err(SimError::InvalidConfig(
                "simulation.workers must be at least 1".into(),
            ));
        }
        Ok(())
    }

    pub fn with_policy(&self, policy: PolicyParams) -> Self {
        Self {
            policy,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum EventKind {
    /// Latent threshold crossing (only known to the simulator).
    Failure,
    Delivery {
        quantity: u32,
        supplier_id: usize,
        emergency: bool,
    },
    Inspection {
        level: f64,
        action: ActionKind,
    },
    Consumed {
        quantity: u32,
    },
    Imperfect {
        x_before: f64,
        gain: f64,
        eps: f64,
        cost: f64,
    },
    Perfect,
    PreventiveShortage {
        action: ActionKind,
        required: u32,
    },
    OrderPlaced {
        quantity: u32,
        supplier_id: usize,
        emergency: bool,
        delivery_at: f64,
        total_stock: u32,
    },
    OrderRefused {
        emergency: bool,
    },
    Repair,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceEvent {
    pub time: f64,
    /// On-hand stock right after the event.
    pub on_hand: u32,
    pub kind: EventKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationResult {
    pub stream_id: u64,
    pub cycle_length: f64,
    pub total_cost: f64,
    pub availability: f64,
    pub ledger: CostLedger,
    pub breakdown: CostBreakdown,
    pub spares_consumed: u64,
    /// Preventive actions postponed for lack of spares.
    pub preventive_shortages: u64,
    pub final_on_hand: u32,
    pub final_pipeline: u32,
    pub trace: Option<Vec<TraceEvent>>,
}

impl CycleOutcome for ReplicationResult {
    fn total_cost(&self) -> f64 {
        self.total_cost
    }

    fn cycle_length(&self) -> f64 {
        self.cycle_length
    }
}

/// `1 - d2 / cycle_length`; malfunction time does not count as downtime.
pub fn availability_of(result: &ReplicationResult) -> f64 {
    1.0 - result.ledger.d2 / result.cycle_length
}

pub fn run_cycle(config: &ScenarioConfig, stream_id: u64) -> Result<ReplicationResult, SimError> {
    CycleSim::new(config, stream_id, config.simulation.record_trace).run()
}

/// [`run_cycle`] with the event trace switched on.
pub fn run_cycle_traced(
    config: &ScenarioConfig,
    stream_id: u64,
) -> Result<ReplicationResult, SimError> {
    CycleSim::new(config, stream_id, true).run()
}

struct CycleSim<'a> {
    cfg: &'a ScenarioConfig,
    stream_id: u64,
    state: SystemState,
    tick: u64,
    inventory: InventoryState,
    ledger: CostLedger,
    /// Time up to which holding cost has been accrued.
    clock: f64,
    trace: Option<Vec<TraceEvent>>,
    path_rng: RngStream,
    maintenance_rng: RngStream,
    supply_rng: RngStream,
    consumed: u64,
    shortages: u64,
}

impl<'a> CycleSim<'a> {
    fn new(cfg: &'a ScenarioConfig, stream_id: u64, record_trace: bool) -> Self {
        let seed = cfg.simulation.seed;
        Self {
            cfg,
            stream_id,
            state: SystemState::new_system(&cfg.degradation),
            tick: 0,
            inventory: InventoryState::new(cfg.policy.s),
            ledger: CostLedger::default(),
            clock: 0.0,
            trace: record_trace.then(Vec::new),
            path_rng: RngStream::for_purpose(seed, stream_id, StreamPurpose::Degradation),
            maintenance_rng: RngStream::for_purpose(seed, stream_id, StreamPurpose::Maintenance),
            supply_rng: RngStream::for_purpose(seed, stream_id, StreamPurpose::Supply),
            consumed: 0,
            shortages: 0,
        }
    }

    fn time_of(&self, tick: u64) -> f64 {
        tick as f64 * self.cfg.degradation.path_step
    }

    fn accrue_to(&mut self, t: f64) {
        debug_assert!(t >= self.clock, "time went backwards: {t} < {}", self.clock);
        self.ledger
            .accrue_holding(self.inventory.on_hand, t - self.clock);
        self.clock = t;
    }

    fn log(&mut self, time: f64, kind: EventKind) {
        if let Some(trace) = self.trace.as_mut() {
            trace.push(TraceEvent {
                time,
                on_hand: self.inventory.on_hand,
                kind,
            });
        }
    }

    /// Receives the earliest pipeline order if it lands by `limit`.
    fn deliver_next(&mut self, limit: f64) -> Option<f64> {
        let due = self
            .inventory
            .next_delivery()
            .map(|o| o.delivery_at)
            .filter(|&t| t <= limit)?;
        self.accrue_to(due);
        let order = self.inventory.receive_next(due).expect("order is due");
        self.log(
            due,
            EventKind::Delivery {
                quantity: order.quantity,
                supplier_id: order.supplier_id,
                emergency: order.emergency,
            },
        );
        Some(due)
    }

    fn run(mut self) -> Result<ReplicationResult, SimError> {
        let mut next_tick = self.next_inspection_tick()?;
        loop {
            if self.ledger.n_ins >= self.cfg.simulation.max_inspections {
                return Err(SimError::InspectionLimit {
                    stream_id: self.stream_id,
                    inspections: self.ledger.n_ins,
                });
            }
            let t_ins = self.time_of(next_tick);
            let crossing = advance_steps(
                &mut self.state,
                next_tick - self.tick,
                &self.cfg.degradation,
                &mut self.path_rng,
            )?;
            let failure_time = crossing.map(|step| self.time_of(self.tick + step));
            self.tick = next_tick;
            self.state.t = t_ins;

            let mut pending_failure = failure_time;
            loop {
                let delivery = self
                    .inventory
                    .next_delivery()
                    .map(|o| o.delivery_at)
                    .filter(|&d| d <= t_ins);
                match (pending_failure, delivery) {
                    (Some(f), d) if d.is_none_or(|d| f <= d) => {
                        self.accrue_to(f);
                        self.log(f, EventKind::Failure);
                        pending_failure = None;
                    }
                    (_, Some(_)) => {
                        self.deliver_next(t_ins);
                    }
                    _ => break,
                }
            }

            self.accrue_to(t_ins);
            self.ledger.n_ins += 1;
            let level = self.state.x;
            let action = classify_action(
                level,
                self.state.k,
                &self.cfg.policy,
                self.cfg.degradation.failure_threshold,
            );
            self.log(t_ins, EventKind::Inspection { level, action });

            match action {
                ActionKind::Corrective => {
                    let failed_at =
                        failure_time.expect("a level above L was crossed during this interval");
                    return self.corrective(t_ins, failed_at);
                }
                ActionKind::Imperfect | ActionKind::Perfect => self.preventive(t_ins, action)?,
                ActionKind::NoAction => {}
            }
            self.reorder(t_ins);
            next_tick = self.next_inspection_tick()?;
        }
    }

    fn preventive(&mut self, t: f64, action: ActionKind) -> Result<(), SimError> {
        let req = &self.cfg.requirements;
        let need = match action {
            ActionKind::Perfect => req.pms,
            _ => u32::from(self.maintenance_rng.uniform() < req.ipms_prob),
        };
        if self.inventory.on_hand < need {
            self.shortages += 1;
            self.log(
                t,
                EventKind::PreventiveShortage {
                    action,
                    required: need,
                },
            );
            return Ok(());
        }
        if need > 0 {
            self.inventory.consume(need)?;
            self.consumed += u64::from(need);
            self.log(t, EventKind::Consumed { quantity: need });
        }
        if action == ActionKind::Perfect {
            self.state = apply_perfect(self.state, &self.cfg.degradation);
            self.ledger.n_p += 1;
            self.log(t, EventKind::Perfect);
        } else {
            let x_before = self.state.x;
            let (next, outcome) =
                apply_imperfect(self.state, &self.cfg.degradation, &mut self.maintenance_rng)?;
            let cost = crate::cost::imperfect_cost(outcome.gain, x_before, &self.cfg.costs)?;
            self.ledger.imperfect_cost_sum += cost;
            self.ledger.n_ip += 1;
            self.state = next;
            self.log(
                t,
                EventKind::Imperfect {
                    x_before,
                    gain: outcome.gain,
                    eps: outcome.eps,
                    cost,
                },
            );
        }
        Ok(())
    }

    fn reorder(&mut self, t: f64) {
        let policy = &self.cfg.policy;
        let expected = self
            .cfg
            .requirements
            .for_action(policy.expected_action(self.state.k));
        let shortfall = self.inventory.total_stock() < expected;
        if !(should_order(self.state.x, policy.t_reorder) || shortfall) {
            return;
        }
        let quantity = order_up_to_quantity(&self.inventory, policy.s);
        if quantity == 0 {
            return;
        }
        match self
            .cfg
            .suppliers
            .select_supplier(false, &mut self.supply_rng)
            .cloned()
        {
            Some(supplier) => {
                self.inventory.place(Order::new(
                    quantity,
                    t,
                    supplier.lead_time,
                    supplier.id,
                    false,
                ));
                self.ledger.n_o += 1;
                self.ledger.purchased += u64::from(quantity);
                self.log(
                    t,
                    EventKind::OrderPlaced {
                        quantity,
                        supplier_id: supplier.id,
                        emergency: false,
                        delivery_at: t + supplier.lead_time,
                        total_stock: self.inventory.total_stock(),
                    },
                );
            }
            None => self.log(t, EventKind::OrderRefused { emergency: false }),
        }
    }

    fn next_inspection_tick(&mut self) -> Result<u64, SimError> {
        let cfg = self.cfg;
        let plan = schedule_next_inspection(
            &self.state,
            &self.inventory,
            &cfg.policy,
            &cfg.degradation,
            &cfg.requirements,
        )?;
        let step = cfg.degradation.path_step;
        let mut tick = ((plan.candidate / step).round() as u64).max(self.tick + 1);
        if cfg.simulation.spare_deferral && plan.next > plan.candidate {
            let mut ready = (plan.next / step).ceil() as u64;
            while self.time_of(ready) < plan.next {
                ready += 1;
            }
            tick = tick.max(ready);
        }
        Ok(tick)
    }

    fn corrective(mut self, t_ins: f64, failed_at: f64) -> Result<ReplicationResult, SimError> {
        self.ledger.d1 = t_ins - failed_at;
        let need = self.cfg.requirements.cms;
        let repair_at = if self.inventory.on_hand >= need {
            t_ins
        } else {
            self.emergency(t_ins, need)?
        };
        self.ledger.d2 = repair_at - t_ins;
        self.accrue_to(repair_at);
        self.inventory.consume(need)?;
        self.consumed += u64::from(need);
        self.log(repair_at, EventKind::Consumed { quantity: need });
        self.state = apply_perfect(self.state, &self.cfg.degradation);
        self.state.t = repair_at;
        self.ledger.n_c = 1;
        self.log(repair_at, EventKind::Repair);
        Ok(self.finish(repair_at))
    }

    /// Emergency ordering at a corrective shortage; returns the repair time.
    fn emergency(&mut self, detected_at: f64, need: u32) -> Result<f64, SimError> {
        let mut enquiry = detected_at;
        let mut refusals = 0;
        loop {
            self.accrue_to(enquiry);
            match self
                .cfg
                .suppliers
                .select_supplier(true, &mut self.supply_rng)
                .cloned()
            {
                Some(supplier) => {
                    let quantity =
                        emergency_order_quantity(&self.inventory, self.cfg.policy.s, need);
                    self.inventory.place(Order::new(
                        quantity,
                        enquiry,
                        supplier.lead_time,
                        supplier.id,
                        true,
                    ));
                    match supplier.kind {
                        SupplierKind::Main => self.ledger.n_oe += 1,
                        SupplierKind::Local => self.ledger.n_o += 1,
                    }
                    self.ledger.purchased += u64::from(quantity);
                    self.log(
                        enquiry,
                        EventKind::OrderPlaced {
                            quantity,
                            supplier_id: supplier.id,
                            emergency: true,
                            delivery_at: enquiry + supplier.lead_time,
                            total_stock: self.inventory.total_stock(),
                        },
                    );
                    loop {
                        let t = self
                            .deliver_next(f64::INFINITY)
                            .expect("pipeline covers the corrective need");
                        if self.inventory.on_hand >= need {
                            return Ok(t);
                        }
                    }
                }
                None => {
                    self.log(enquiry, EventKind::OrderRefused { emergency: true });
                    refusals += 1;
                    if refusals > self.cfg.simulation.max_emergency_retries {
                        return Err(SimError::EmergencyRetriesExhausted {
                            stream_id: self.stream_id,
                            refusals,
                        });
                    }
                    let next = enquiry + self.cfg.suppliers.reenquiry_interval();
                    while let Some(t) = self.deliver_next(next) {
                        if self.inventory.on_hand >= need {
                            return Ok(t);
                        }
                    }
                    enquiry = next;
                }
            }
        }
    }

    fn finish(self, end: f64) -> ReplicationResult {
        let breakdown = CostBreakdown::from_ledger(&self.ledger, &self.cfg.costs);
        ReplicationResult {
            stream_id: self.stream_id,
            cycle_length: end,
            total_cost: breakdown.total(),
            availability: 1.0 - self.ledger.d2 / end,
            ledger: self.ledger,
            breakdown,
            spares_consumed: self.consumed,
            preventive_shortages: self.shortages,
            final_on_hand: self.inventory.on_hand,
            final_pipeline: self.inventory.pipeline_quantity(),
            trace: self.trace,
        }
    }
}

/// Aggregates over a batch of independent cycles.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchStats {
    pub replications: u64,
    pub estimator: CostRateEstimator,
    pub cost_rate: f64,
    pub cost_rate_se: f64,
    pub mean_availability: f64,
    pub availability_se: f64,
    pub mean_cycle_length: f64,
    pub mean_cycle_cost: f64,
    /// Each term's contribution to the renewal-reward cost rate.
    pub rate_breakdown: CostBreakdown,
    pub results: Vec<ReplicationResult>,
}

fn mean_and_se(values: impl ExactSizeIterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.clone().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = values.map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1.0) / n).sqrt())
}

impl BatchStats {
    pub fn from_results(
        results: Vec<ReplicationResult>,
        estimator: CostRateEstimator,
    ) -> Result<Self, SimError> {
        let rate = cost_rate(&results, estimator)?;
        let n = results.len() as f64;
        let mean_cycle_length = results.iter().map(|r| r.cycle_length).sum::<f64>() / n;
        let mean_cycle_cost = results.iter().map(|r| r.total_cost).sum::<f64>() / n;
        let cost_rate_se = match estimator {
            CostRateEstimator::RenewalReward if results.len() > 1 => {
                // Delta-method standard error of a ratio of means.
                let ss: f64 = results
                    .iter()
                    .map(|r| {
                        let e = r.total_cost - rate * r.cycle_length;
                        e * e
                    })
                    .sum();
                (ss / (n - 1.0) / n).sqrt() / mean_cycle_length
            }
            CostRateEstimator::RenewalReward => 0.0,
            CostRateEstimator::CycleMean => {
                mean_and_se(results.iter().map(|r| r.total_cost / r.cycle_length)).1
            }
        };
        let (mean_availability, availability_se) =
            mean_and_se(results.iter().map(|r| r.availability));
        let mut rate_breakdown = CostBreakdown::default();
        for r in &results {
            rate_breakdown.add(&r.breakdown);
        }
        rate_breakdown.scale(1.0 / (mean_cycle_length * n));
        Ok(Self {
            replications: results.len() as u64,
            estimator,
            cost_rate: rate,
            cost_rate_se,
            mean_availability,
            availability_se,
            mean_cycle_length,
            mean_cycle_cost,
            rate_breakdown,
            results,
        })
    }

    /// Empirical `p`-quantile of per-cycle availability (lower order statistic).
    pub fn availability_quantile(&self, p: f64) -> f64 {
        let mut values: Vec<f64> = self.results.iter().map(|r| r.availability).collect();
        values.sort_by(f64::total_cmp);
        let idx =
            ((p.clamp(0.0, 1.0) * values.len() as f64).ceil() as usize).clamp(1, values.len()) - 1;
        values[idx]
    }
}

/// Runs `f` on a pool of `workers` threads, or on the global pool.
pub fn with_workers<T: Send>(
    workers: Option<usize>,
    f: impl FnOnce() -> T + Send,
) -> Result<T, SimError> {
    match workers {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| SimError::ThreadPool(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

/// Replications on streams `0..replications`, reduced in stream order.
pub fn run_replications(config: &ScenarioConfig) -> Result<BatchStats, SimError> {
    config.validate()?;
    let n = config.simulation.replications;
    let results = with_workers(config.simulation.workers, || {
        (0..n)
            .into_par_iter()
            .map(|id| run_cycle(config, id))
            .collect::<Result<Vec<_>, _>>()
    })??;
    BatchStats::from_results(results, config.simulation.estimator)
}

//! Condition-based maintenance of a single degrading unit, jointly with the
//! spare-parts orders that feed it.
//!
//! A unit degrades as a gamma process and is inspected on a schedule chosen
//! from its remaining-useful-life distribution. Inspections trigger imperfect
//! or perfect preventive actions, or corrective replacement after failure.
//! Spares are ordered order-up-to-`S` from local suppliers, with an
//! emergency channel through a main supplier. [`engine`] simulates
//! regeneration cycles and [`optimizer`] searches the policy space.

pub mod cli;
pub mod config;
pub mod cost;
pub mod degradation;
pub mod engine;
pub mod inventory;
pub mod maintenance;
pub mod numerics;
pub mod optimizer;
pub mod supply_chain;

pub use config::{load_config, parse_config, ConfigError, LoadedConfig};
pub use cost::{CostBreakdown, CostLedger, CostParams, CostRateEstimator};
pub use degradation::{DegradationParams, SystemState};
pub use engine::{
    run_cycle, run_cycle_traced, run_replications, BatchStats, ReplicationResult, ScenarioConfig,
    SimError, SimulationSettings,
};
pub use inventory::{InventoryState, Order, SpareRequirements};
pub use maintenance::{ActionKind, PolicyParams};
pub use optimizer::{grid_search, random_search, OptimizationResult, SearchGrid, SearchOptions};
pub use supply_chain::{Supplier, SupplierKind, SupplyChain};

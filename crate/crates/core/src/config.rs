//! Scenario files: a TOML document with one section per model area.
//!
//! ```toml
//! [degradation]   # alpha0, beta, L, gamma_rate, path_step (optional)
//! [policy]        # M, K, T, S, Q, A_star
//! [costs]         # c_ins, c_p0, c_c, c_d1, c_d2, c_h, c_o, c_oe, c_pur, eta
//! [suppliers]     # lead_time_s1, lead_time_s2, lead_time_se, p_s1, p_s2, p_se
//! [requirements]  # CMS, PMS, ipms_prob
//! [simulation]    # replications, seed, and optional engine switches
//! [grid]          # optional: M, K, T, S, Q value lists
//! [random_search] # optional: [lo, hi] per variable and a budget
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::cost::{CostParams, CostRateEstimator};
use crate::degradation::DegradationParams;
use crate::engine::{ScenarioConfig, SimulationSettings};
use crate::inventory::SpareRequirements;
use crate::maintenance::PolicyParams;
use crate::optimizer::{FeasibilityRule, SearchBounds, SearchGrid, SearchOptions};
use crate::supply_chain::{validate_chain, Supplier, SupplierKind};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed scenario file: {0}")]
    Parse(String),
    #[error("invalid scenario: {0}")]
    Invalid(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    degradation: RawDegradation,
    policy: RawPolicy,
    costs: CostParamsRaw,
    suppliers: RawSuppliers,
    requirements: RawRequirements,
    simulation: RawSimulation,
    grid: Option<RawGrid>,
    random_search: Option<RawRandomSearch>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDegradation {
    alpha0: f64,
    beta: f64,
    #[serde(rename = "L")]
    l: f64,
    gamma_rate: f64,
    path_step: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPolicy {
    #[serde(rename = "M")]
    m: f64,
    #[serde(rename = "K")]
    k: u32,
    #[serde(rename = "T")]
    t: f64,
    #[serde(rename = "S")]
    s: u32,
    #[serde(rename = "Q")]
    q: f64,
    #[serde(rename = "A_star")]
    a_star: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CostParamsRaw {
    c_ins: f64,
    c_p0: f64,
    c_c: f64,
    c_d1: f64,
    c_d2: f64,
    c_h: f64,
    c_o: f64,
    c_oe: f64,
    c_pur: f64,
    eta: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSuppliers {
    lead_time_s1: f64,
    lead_time_s2: f64,
    lead_time_se: f64,
    p_s1: f64,
    p_s2: f64,
    p_se: f64,
    reenquiry_interval: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRequirements {
    #[serde(rename = "CMS")]
    cms: u32,
    #[serde(rename = "PMS")]
    pms: u32,
    ipms_prob: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSimulation {
    replications: u64,
    seed: u64,
    workers: Option<usize>,
    spare_deferral: Option<bool>,
    cost_rate_estimator: Option<CostRateEstimator>,
    common_random_numbers: Option<bool>,
    feasibility: Option<FeasibilityRule>,
    max_emergency_retries: Option<u32>,
    max_inspections: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    #[serde(rename = "M")]
    m: Vec<f64>,
    #[serde(rename = "K")]
    k: Vec<u32>,
    #[serde(rename = "T")]
    t: Vec<f64>,
    #[serde(rename = "S")]
    s: Vec<u32>,
    #[serde(rename = "Q")]
    q: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRandomSearch {
    #[serde(rename = "M")]
    m: (f64, f64),
    #[serde(rename = "K")]
    k: (u32, u32),
    #[serde(rename = "T")]
    t: (f64, f64),
    #[serde(rename = "S")]
    s: (u32, u32),
    #[serde(rename = "Q")]
    q: (f64, f64),
    budget: usize,
}

/// Everything a scenario file describes.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedConfig {
    pub scenario: ScenarioConfig,
    pub search: SearchOptions,
    pub grid: Option<SearchGrid>,
    pub random_search: Option<(SearchBounds, usize)>,
}

pub fn load_config(path: &Path) -> Result<LoadedConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<LoadedConfig, ConfigError> {
    let raw: RawScenario = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    let invalid = |e: &dyn std::fmt::Display| ConfigError::Invalid(e.to_string());

    let d = raw.degradation;
    let degradation = DegradationParams::new(d.alpha0, d.beta, d.l, d.gamma_rate, d.path_step)
        .map_err(|e| invalid(&e))?;

    let p = raw.policy;
    let policy = PolicyParams {
        m: p.m,
        k: p.k,
        t_reorder: p.t,
        s: p.s,
        q: p.q,
        a_star: p.a_star,
    };
    policy
        .validate(degradation.failure_threshold)
        .map_err(|e| invalid(&e))?;

    let c = raw.costs;
    let costs = CostParams {
        c_ins: c.c_ins,
        c_p0: c.c_p0,
        c_c: c.c_c,
        c_d1: c.c_d1,
        c_d2: c.c_d2,
        c_h: c.c_h,
        c_o: c.c_o,
        c_oe: c.c_oe,
        c_pur: c.c_pur,
        eta: c.eta,
    };
    costs.validate().map_err(|e| invalid(&e))?;

    let s = raw.suppliers;
    let local = |id, lead_time, availability_prob| Supplier {
        id,
        lead_time,
        availability_prob,
        ordering_cost: costs.c_o,
        kind: SupplierKind::Local,
    };
    let chain = validate_chain(&[
        local(1, s.lead_time_s1, s.p_s1),
        local(2, s.lead_time_s2, s.p_s2),
        Supplier {
            id: 3,
            lead_time: s.lead_time_se,
            availability_prob: s.p_se,
            ordering_cost: costs.c_oe,
            kind: SupplierKind::Main,
        },
    ])
    .map_err(|e| invalid(&e))?;
    let suppliers = match s.reenquiry_interval {
        Some(interval) => chain
            .with_reenquiry_interval(interval)
            .map_err(|e| invalid(&e))?,
        None => chain,
    };

    let r = raw.requirements;
    let requirements =
        SpareRequirements::new(r.cms, r.pms, r.ipms_prob).map_err(|e| invalid(&e))?;

    let sim = raw.simulation;
    let defaults = SimulationSettings::default();
    let simulation = SimulationSettings {
        replications: sim.replications,
        seed: sim.seed,
        workers: sim.workers,
        spare_deferral: sim.spare_deferral.unwrap_or(defaults.spare_deferral),
        estimator: sim.cost_rate_estimator.unwrap_or_default(),
        max_emergency_retries: sim
            .max_emergency_retries
            .unwrap_or(defaults.max_emergency_retries),
        max_inspections: sim.max_inspections.unwrap_or(defaults.max_inspections),
        record_trace: false,
    };
    let search = SearchOptions {
        common_random_numbers: sim.common_random_numbers.unwrap_or(true),
        feasibility: sim.feasibility.unwrap_or_default(),
    };
    if let FeasibilityRule::CycleQuantile { p } = search.feasibility {
        if !(0.0..=1.0).contains(&p) {
            return Err(ConfigError::Invalid(format!(
                "simulation.feasibility.p must lie in [0, 1] (got {p})"
            )));
        }
    }

    let scenario = ScenarioConfig {
        degradation,
        policy,
        costs,
        suppliers,
        requirements,
        simulation,
    };
    scenario.validate().map_err(|e| invalid(&e))?;

    let grid = raw.grid.map(|g| SearchGrid {
        m_values: g.m,
        k_values: g.k,
        t_values: g.t,
        s_values: g.s,
        q_values: g.q,
    });
    if let Some(g) = &grid {
        g.validate().map_err(|e| invalid(&e))?;
        if let Some(m) = g
            .m_values
            .iter()
            .find(|&&m| m >= degradation.failure_threshold)
        {
            return Err(ConfigError::Invalid(format!(
                "grid.M value {m} must be below failure threshold L ({})",
                degradation.failure_threshold
            )));
        }
    }
    let random_search = match raw.random_search {
        Some(rs) => {
            let bounds = SearchBounds {
                m: rs.m,
                k: rs.k,
                t: rs.t,
                s: rs.s,
                q: rs.q,
            };
            bounds.validate().map_err(|e| invalid(&e))?;
            if rs.budget < 1 {
                return Err(ConfigError::Invalid(
                    "random_search.budget must be at least 1".into(),
                ));
            }
            Some((bounds, rs.budget))
        }
        None => None,
    };

    Ok(LoadedConfig {
        scenario,
        search,
        grid,
        random_search,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const DEFAULT: &str = include_str!("../scenarios/default.toml");

    #[test]
    fn default_scenario_parses() {
        let cfg = parse_config(DEFAULT).unwrap();
        assert_eq!(cfg.scenario.policy.s, 2);
        assert_eq!(cfg.scenario.suppliers.locals().len(), 2);
        assert!(cfg.grid.is_some());
    }

    #[test]
    fn preventive_threshold_above_failure_is_named() {
        let text = DEFAULT.replace("M = 7.0", "M = 10.0");
        let err = parse_config(&text).unwrap_err().to_string();
        assert!(err.contains("M must be below failure threshold L"), "{err}");
    }

    #[test]
    fn downtime_rate_ordering_is_enforced() {
        let text = DEFAULT.replace("c_d2 = 200.0", "c_d2 = 40.0");
        let err = parse_config(&text).unwrap_err().to_string();
        assert!(err.contains("downtime cost rate c_d2"), "{err}");
        assert!(err.contains("malfunction cost rate c_d1"), "{err}");
    }

    #[test]
    fn missing_and_mistyped_keys() {
        let err = parse_config(&DEFAULT.replace("beta = 2.0\n", ""))
            .unwrap_err()
            .to_string();
        assert!(err.contains("beta"), "{err}");
        let err = parse_config(&DEFAULT.replace("K = 2\n", "K = \"two\"\n")).unwrap_err();
        assert!(matches!(err, ConfigError::Parse(_)));
        let err = parse_config(&DEFAULT.replace("ipms_prob = 0.5", "ipms_prob = 0.5\nbogus = 1"))
            .unwrap_err();
        assert!(err.to_string().contains("bogus"));
    }

    #[test]
    fn supplier_ordering_is_checked() {
        let err = parse_config(&DEFAULT.replace("lead_time_s2 = 1.0", "lead_time_s2 = 0.25"))
            .unwrap_err();
        assert!(
            err.to_string().contains("local lead times must increase"),
            "{err}"
        );
    }
}

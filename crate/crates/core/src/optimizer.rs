//! Search over `(M, K, T, S, Q)` for the lowest cost rate whose availability
//! clears the floor `A*`.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{run_replications, with_workers, BatchStats, ScenarioConfig, SimError};
use crate::maintenance::PolicyParams;
use crate::numerics::{RngStream, StreamPurpose};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OptimizeError {
    #[error("search space: {0}")]
    InvalidSpace(String),
    #[error("no evaluated point meets the availability floor ({} points evaluated)", table.len())]
    Infeasible { table: Vec<PointRecord> },
    #[error(transparent)]
    Simulation(#[from] SimError),
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum FeasibilityRule {
    /// Batch mean availability must reach `A*`.
    #[default]
    MeanAvailability,
    /// The `p`-quantile of per-cycle availability must reach `A*`.
    CycleQuantile { p: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOptions {
    /// Same stream ids at every point.
    pub common_random_numbers: bool,
    pub feasibility: FeasibilityRule,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            common_random_numbers: true,
            feasibility: FeasibilityRule::MeanAvailability,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SearchGrid {
    pub m_values: Vec<f64>,
    pub k_values: Vec<u32>,
    pub t_values: Vec<f64>,
    pub s_values: Vec<u32>,
    pub q_values: Vec<f64>,
}

impl SearchGrid {
    pub fn validate(&self) -> Result<(), OptimizeError> {
        let axes = [
            ("M", self.m_values.len()),
            ("K", self.k_values.len()),
            ("T", self.t_values.len()),
            ("S", self.s_values.len()),
            ("Q", self.q_values.len()),
        ];
        if let Some((axis, _)) = axes.iter().find(|(_, n)| *n == 0) {
            return Err(OptimizeError::InvalidSpace(format!(
                "grid axis {axis} is empty"
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.m_values.len()
            * self.k_values.len()
            * self.t_values.len()
            * self.s_values.len()
            * self.q_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Every combination, `Q` varying fastest.
    pub fn points(&self, a_star: f64) -> Vec<PolicyParams> {
        let mut out = Vec::with_capacity(self.len());
        for &m in &self.m_values {
            for &k in &self.k_values {
                for &t_reorder in &self.t_values {
                    for &s in &self.s_values {
                        for &q in &self.q_values {
                            out.push(PolicyParams {
                                m,
                                k,
                                t_reorder,
                                s,
                                q,
                                a_star,
                            });
                        }
                    }
                }
            }
        }
        out
    }
}

/// Box for random search; integer ranges are inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchBounds {
    pub m: (f64, f64),
    pub k: (u32, u32),
    pub t: (f64, f64),
    pub s: (u32, u32),
    pub q: (f64, f64),
}

impl SearchBounds {
    pub fn validate(&self) -> Result<(), OptimizeError> {
        let real = |name: &str, (lo, hi): (f64, f64)| {
            if lo.is_finite() && hi.is_finite() && lo <= hi {
                Ok(())
            } else {
                Err(OptimizeError::InvalidSpace(format!(
                    "bounds for {name} must satisfy lo <= hi (got {lo}, {hi})"
                )))
            }
        };
        real("M", self.m)?;
        real("T", self.t)?;
        real("Q", self.q)?;
        if self.k.0 > self.k.1 || self.s.0 > self.s.1 {
            return Err(OptimizeError::InvalidSpace(
                "integer bounds for K and S must satisfy lo <= hi".into(),
            ));
        }
        Ok(())
    }

    fn sample(&self, a_star: f64, rng: &mut RngStream) -> PolicyParams {
        let real = |(lo, hi): (f64, f64), rng: &mut RngStream| lo + (hi - lo) * rng.uniform();
        let m = real(self.m, rng);
        let k = rng.integer_inclusive(self.k.0, self.k.1);
        let t_reorder = real(self.t, rng);
        let s = rng.integer_inclusive(self.s.0, self.s.1);
        let q = real(self.q, rng);
        PolicyParams {
            m,
            k,
            t_reorder,
            s,
            q,
            a_star,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointRecord {
    pub params: PolicyParams,
    pub cost_rate: f64,
    pub cost_rate_se: f64,
    pub availability: f64,
    pub availability_se: f64,
    /// Availability figure compared against `A*` under the feasibility rule.
    pub feasibility_metric: f64,
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub best: PolicyParams,
    pub best_cost_rate: f64,
    pub best_availability: f64,
    /// Full statistics at the optimum, re-run with the same streams.
    pub best_stats: BatchStats,
    pub table: Vec<PointRecord>,
    /// Points left out because they violate a parameter invariant.
    pub skipped: Vec<(PolicyParams, String)>,
}

fn tie_key(p: &PolicyParams) -> (u32, u32, f64, f64, f64) {
    (p.s, p.k, p.m, p.t_reorder, p.q)
}

/// Lower cost rate first; ties go to smaller S, then K, then (M, T, Q).
fn rank(a: &PointRecord, b: &PointRecord) -> Ordering {
    let (sa, ka, ma, ta, qa) = tie_key(&a.params);
    let (sb, kb, mb, tb, qb) = tie_key(&b.params);
    a.cost_rate
        .total_cmp(&b.cost_rate)
        .then(sa.cmp(&sb))
        .then(ka.cmp(&kb))
        .then(ma.total_cmp(&mb))
        .then(ta.total_cmp(&tb))
        .then(qa.total_cmp(&qb))
}

fn point_config(
    config: &ScenarioConfig,
    params: PolicyParams,
    index: usize,
    options: &SearchOptions,
) -> ScenarioConfig {
    let mut cfg = config.with_policy(params);
    // Points already run inside the search's pool.
    cfg.simulation.workers = None;
    if !options.common_random_numbers {
        cfg.simulation.seed =
            config.simulation.seed ^ (index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    }
    cfg
}

fn evaluate(cfg: &ScenarioConfig, options: &SearchOptions) -> Result<PointRecord, SimError> {
    let stats = run_replications(cfg)?;
    let feasibility_metric = match options.feasibility {
        FeasibilityRule::MeanAvailability => stats.mean_availability,
        FeasibilityRule::CycleQuantile { p } => stats.availability_quantile(p),
    };
    Ok(PointRecord {
        params: cfg.policy,
        cost_rate: stats.cost_rate,
        cost_rate_se: stats.cost_rate_se,
        availability: stats.mean_availability,
        availability_se: stats.availability_se,
        feasibility_metric,
        feasible: feasibility_metric >= cfg.policy.a_star,
    })
}

fn search(
    config: &ScenarioConfig,
    candidates: Vec<PolicyParams>,
    options: &SearchOptions,
) -> Result<OptimizationResult, OptimizeError> {
    let mut skipped = Vec::new();
    let mut runnable = Vec::new();
    for (index, params) in candidates.into_iter().enumerate() {
        let cfg = point_config(config, params, index, options);
        match cfg.validate() {
            Ok(()) => runnable.push(cfg),
            Err(e) => skipped.push((params, e.to_string())),
        }
    }
    let table = with_workers(config.simulation.workers, || {
        runnable
            .par_iter()
            .map(|cfg| evaluate(cfg, options))
            .collect::<Result<Vec<_>, _>>()
    })??;

    let best_index = table
        .iter()
        .enumerate()
        .filter(|(_, r)| r.feasible)
        .min_by(|(_, a), (_, b)| rank(a, b))
        .map(|(i, _)| i);
    let Some(best_index) = best_index else {
        return Err(OptimizeError::Infeasible { table });
    };
    let best_stats = run_replications(&runnable[best_index])?;
    let best = table[best_index].clone();
    Ok(OptimizationResult {
        best: best.params,
        best_cost_rate: best.cost_rate,
        best_availability: best.availability,
        best_stats,
        table,
        skipped,
    })
}

/// Exhaustive evaluation of every grid point.
pub fn grid_search(
    grid: &SearchGrid,
    config: &ScenarioConfig,
    options: &SearchOptions,
) -> Result<OptimizationResult, OptimizeError> {
    grid.validate()?;
    search(config, grid.points(config.policy.a_star), options)
}

/// `budget` points drawn uniformly from `bounds` with the scenario seed,
/// evaluated and ranked exactly as in [`grid_search`].
pub fn random_search(
    bounds: &SearchBounds,
    budget: usize,
    config: &ScenarioConfig,
    options: &SearchOptions,
) -> Result<OptimizationResult, OptimizeError> {
    bounds.validate()?;
    if budget < 1 {
        return Err(OptimizeError::InvalidSpace(
            "random search budget must be at least 1".into(),
        ));
    }
    let mut rng = RngStream::for_purpose(config.simulation.seed, 0, StreamPurpose::Search);
    let candidates = (0..budget)
        .map(|_| bounds.sample(config.policy.a_star, &mut rng))
        .collect();
    search(config, candidates, options)
}

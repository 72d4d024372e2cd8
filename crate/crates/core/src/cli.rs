//! Command dispatch and result files.
//!
//! Output files, columns in this order:
//!
//! * `replications.csv`: stream_id, cycle_length, total_cost, availability,
//!   n_ins, n_ip, n_p, n_o, n_oe, d1, d2, purchased
//! * `grid.csv` (optimize only): M, K, T, S, Q, cost_rate, cost_rate_se,
//!   availability, availability_se, feasible
//! * `summary.txt`: the text also printed to standard output
//!
//! Floats are written in Rust's shortest round-trip form, so parsing a cell
//! back gives the exact double.
//!
//! Exit codes: 0 success, 1 simulation error, 2 configuration error,
//! 3 no feasible policy, 4 I/O error.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::config::{load_config, ConfigError, LoadedConfig};
use crate::engine::{run_replications, BatchStats, SimError};
use crate::maintenance::PolicyParams;
use crate::optimizer::{
    grid_search, random_search, OptimizationResult, OptimizeError, PointRecord,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_SIMULATION: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Optimize,
    Validate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub command: Command,
    pub config_path: PathBuf,
    pub output_dir: Option<PathBuf>,
    pub seed_override: Option<u64>,
    pub replications_override: Option<u64>,
    pub workers_override: Option<usize>,
}

impl RunManifest {
    pub fn new(command: Command, config_path: impl Into<PathBuf>) -> Self {
        Self {
            command,
            config_path: config_path.into(),
            output_dir: None,
            seed_override: None,
            replications_override: None,
            workers_override: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("simulation failed: {0}")]
    Simulation(SimError),
    #[error("no feasible policy: every evaluated point misses the availability floor")]
    Infeasible,
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(ConfigError::Io { .. }) => EXIT_IO,
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Simulation(SimError::InvalidConfig(_)) => EXIT_CONFIG,
            CliError::Simulation(_) => EXIT_SIMULATION,
            CliError::Infeasible => EXIT_INFEASIBLE,
            CliError::Io { .. } => EXIT_IO,
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        CliError::Simulation(e)
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Runs one command, writing the summary to `out`.
pub fn run(manifest: &RunManifest, out: &mut dyn Write) -> Result<(), CliError> {
    let mut loaded = load_config(&manifest.config_path)?;
    let sim = &mut loaded.scenario.simulation;
    if let Some(seed) = manifest.seed_override {
        sim.seed = seed;
    }
    if let Some(n) = manifest.replications_override {
        sim.replications = n;
    }
    if manifest.workers_override.is_some() {
        sim.workers = manifest.workers_override;
    }
    loaded
        .scenario
        .validate()
        .map_err(|e| ConfigError::Invalid(e.to_string()))?;

    let stdout_err = |source| CliError::Io {
        path: PathBuf::from("<stdout>"),
        source,
    };
    match manifest.command {
        Command::Validate => {
            writeln!(out, "{}: ok", manifest.config_path.display()).map_err(stdout_err)?;
            Ok(())
        }
        Command::Simulate => {
            let dir = output_dir(manifest)?;
            let stats = run_replications(&loaded.scenario)?;
            let summary = simulate_summary(&loaded, &stats);
            write_replications(&dir.join("replications.csv"), &stats)?;
            write_summary(&dir, &summary, out)
        }
        Command::Optimize => {
            let dir = output_dir(manifest)?;
            let outcome = match (&loaded.grid, &loaded.random_search) {
                (Some(grid), _) => grid_search(grid, &loaded.scenario, &loaded.search),
                (None, Some((bounds, budget))) => {
                    random_search(bounds, *budget, &loaded.scenario, &loaded.search)
                }
                (None, None) => {
                    return Err(ConfigError::Invalid(
                        "optimize needs a [grid] or [random_search] section".into(),
                    )
                    .into())
                }
            };
            match outcome {
                Ok(result) => {
                    write_grid(&dir.join("grid.csv"), &result.table)?;
                    write_replications(&dir.join("replications.csv"), &result.best_stats)?;
                    write_summary(&dir, &optimize_summary(&loaded, &result), out)
                }
                Err(OptimizeError::Infeasible { table }) => {
                    write_grid(&dir.join("grid.csv"), &table)?;
                    let summary = format!(
                        "command: optimize\nresult: infeasible\npoints evaluated: {}\nbest availability seen: {}\n",
                        table.len(),
                        table.iter().map(|r| r.feasibility_metric).fold(f64::NAN, f64::max)
                    );
                    write_summary(&dir, &summary, out)?;
                    Err(CliError::Infeasible)
                }
                Err(OptimizeError::InvalidSpace(msg)) => Err(ConfigError::Invalid(msg).into()),
                Err(OptimizeError::Simulation(e)) => Err(e.into()),
            }
        }
    }
}

fn output_dir(manifest: &RunManifest) -> Result<PathBuf, CliError> {
    let dir = manifest
        .output_dir
        .clone()
        .ok_or_else(|| ConfigError::Invalid("an output directory (--out) is required".into()))?;
    std::fs::create_dir_all(&dir).map_err(io_err(&dir))?;
    Ok(dir)
}

/// Shortest representation that parses back to the same double.
pub fn format_float(v: f64) -> String {
    format!("{v:?}")
}

fn csv_writer(path: &Path) -> Result<csv::Writer<std::fs::File>, CliError> {
    csv::Writer::from_path(path).map_err(|e| csv_err(path, e))
}

fn csv_err(path: &Path, e: csv::Error) -> CliError {
    let source = match e.into_kind() {
        csv::ErrorKind::Io(io) => io,
        other => std::io::Error::other(format!("{other:?}")),
    };
    CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn write_replications(path: &Path, stats: &BatchStats) -> Result<(), CliError> {
    let mut w = csv_writer(path)?;
    w.write_record([
        "stream_id",
        "cycle_length",
        "total_cost",
        "availability",
        "n_ins",
        "n_ip",
        "n_p",
        "n_o",
        "n_oe",
        "d1",
        "d2",
        "purchased",
    ])
    .map_err(|e| csv_err(path, e))?;
    for r in &stats.results {
        let l = &r.ledger;
        w.write_record([
            r.stream_id.to_string(),
            format_float(r.cycle_length),
            format_float(r.total_cost),
            format_float(r.availability),
            l.n_ins.to_string(),
            l.n_ip.to_string(),
            l.n_p.to_string(),
            l.n_o.to_string(),
            l.n_oe.to_string(),
            format_float(l.d1),
            format_float(l.d2),
            l.purchased.to_string(),
        ])
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn write_grid(path: &Path, table: &[PointRecord]) -> Result<(), CliError> {
    let mut w = csv_writer(path)?;
    w.write_record([
        "M",
        "K",
        "T",
        "S",
        "Q",
        "cost_rate",
        "cost_rate_se",
        "availability",
        "availability_se",
        "feasible",
    ])
    .map_err(|e| csv_err(path, e))?;
    for r in table {
        let p = &r.params;
        w.write_record([
            format_float(p.m),
            p.k.to_string(),
            format_float(p.t_reorder),
            p.s.to_string(),
            format_float(p.q),
            format_float(r.cost_rate),
            format_float(r.cost_rate_se),
            format_float(r.availability),
            format_float(r.availability_se),
            r.feasible.to_string(),
        ])
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(io_err(path))
}

fn write_summary(dir: &Path, summary: &str, out: &mut dyn Write) -> Result<(), CliError> {
    let path = dir.join("summary.txt");
    std::fs::write(&path, summary).map_err(io_err(&path))?;
    out.write_all(summary.as_bytes())
        .map_err(|source| CliError::Io {
            path: PathBuf::from("<stdout>"),
            source,
        })
}

fn policy_line(p: &PolicyParams) -> String {
    format!(
        "M={} K={} T={} S={} Q={} A*={}",
        p.m, p.k, p.t_reorder, p.s, p.q, p.a_star
    )
}

fn stats_block(s: &mut String, stats: &BatchStats) {
    let estimator = match stats.estimator {
        crate::cost::CostRateEstimator::RenewalReward => "renewal-reward",
        crate::cost::CostRateEstimator::CycleMean => "cycle mean",
    };
    let _ = writeln!(s, "replications: {}", stats.replications);
    let _ = writeln!(
        s,
        "cost rate: {:.6} ± {:.6} ({estimator})",
        stats.cost_rate, stats.cost_rate_se
    );
    let _ = writeln!(
        s,
        "availability: {:.6} ± {:.6}",
        stats.mean_availability, stats.availability_se
    );
    let _ = writeln!(s, "mean cycle length: {:.6}", stats.mean_cycle_length);
    let _ = writeln!(s, "mean cycle cost: {:.6}", stats.mean_cycle_cost);
    let _ = writeln!(s, "cost rate by term:");
    for (name, value) in stats.rate_breakdown.terms() {
        let _ = writeln!(s, "  {name:<20} {value:.6}");
    }
}

fn simulate_summary(loaded: &LoadedConfig, stats: &BatchStats) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "command: simulate");
    let _ = writeln!(s, "seed: {}", loaded.scenario.simulation.seed);
    let _ = writeln!(s, "policy: {}", policy_line(&loaded.scenario.policy));
    stats_block(&mut s, stats);
    s
}

fn optimize_summary(loaded: &LoadedConfig, result: &OptimizationResult) -> String {
    let mut s = String::new();
    let feasible = result.table.iter().filter(|r| r.feasible).count();
    let _ = writeln!(s, "command: optimize");
    let _ = writeln!(s, "seed: {}", loaded.scenario.simulation.seed);
    let _ = writeln!(
        s,
        "points evaluated: {} ({feasible} feasible)",
        result.table.len()
    );
    for (params, reason) in &result.skipped {
        let _ = writeln!(s, "skipped {}: {reason}", policy_line(params));
    }
    let _ = writeln!(s, "best policy: {}", policy_line(&result.best));
    stats_block(&mut s, &result.best_stats);
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for v in [
            0.1,
            1.0 / 3.0,
            1e-300,
            6.02e23,
            0.0,
            123456.789,
            f64::MIN_POSITIVE,
        ] {
            assert_eq!(format_float(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Infeasible.exit_code(), EXIT_INFEASIBLE);
        assert_eq!(
            CliError::Config(ConfigError::Parse("x".into())).exit_code(),
            EXIT_CONFIG
        );
        let io = CliError::Io {
            path: "x".into(),
            source: std::io::Error::other("x"),
        };
        assert_eq!(io.exit_code(), EXIT_IO);
        assert_eq!(
            CliError::Simulation(SimError::InspectionLimit {
                stream_id: 0,
                inspections: 1
            })
            .exit_code(),
            EXIT_SIMULATION
        );
    }
}

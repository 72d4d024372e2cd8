//! Gamma-process deterioration and the state effects of maintenance.
//!
//! Over a grid step `δ` the increment is `Gamma(v·β·δ, β)`: mean `v·δ`,
//! variance `v·δ/β`, where `v` is the current mean deterioration speed.

use thiserror::Error;

use crate::numerics::{
    sample_exponential, sample_gamma, sample_truncated_normal, GammaSpec, NumericsError, RngStream,
    TruncNormSpec,
};

/// Default number of grid steps a fresh system needs, on average, to reach `L`.
pub const DEFAULT_STEPS_TO_FAILURE: f64 = 500.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DegradationError {
    #[error("degradation.{field}: {reason}")]
    InvalidParams { field: &'static str, reason: String },
    #[error("imperfect maintenance needs a positive deterioration level (got x={0})")]
    NothingToRestore(f64),
    #[error("negative advance duration {0}")]
    NegativeDuration(f64),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegradationParams {
    pub alpha0: f64,
    pub beta: f64,
    pub failure_threshold: f64,
    pub gamma_rate: f64,
    pub path_step: f64,
}

impl DegradationParams {
    /// Validates the parameters; `path_step = None` picks `(L/ν₀)/500`.
    pub fn new(
        alpha0: f64,
        beta: f64,
        failure_threshold: f64,
        gamma_rate: f64,
        path_step: Option<f64>,
    ) -> Result<Self, DegradationError> {
        let positive = |field: &'static str, value: f64| {
            if value.is_finite() && value > 0.0 {
                Ok(())
            } else {
                Err(DegradationError::InvalidParams {
                    field,
                    reason: format!("must be a finite positive number (got {value})"),
                })
            }
        };
        positive("alpha0", alpha0)?;
        positive("beta", beta)?;
        positive("L", failure_threshold)?;
        positive("gamma_rate", gamma_rate)?;
        let nominal_life = failure_threshold / (alpha0 / beta);
        let path_step = path_step.unwrap_or(nominal_life / DEFAULT_STEPS_TO_FAILURE);
        positive("path_step", path_step)?;
        if path_step > nominal_life / 20.0 {
            return Err(DegradationError::InvalidParams {
                field: "path_step",
                reason: format!(
                    "{path_step} is too coarse; it must not exceed L/(20·ν₀) = {}",
                    nominal_life / 20.0
                ),
            });
        }
        Ok(Self {
            alpha0,
            beta,
            failure_threshold,
            gamma_rate,
            path_step,
        })
    }

    /// ν₀ = α₀/β, the speed of a new system.
    pub fn nominal_speed(&self) -> f64 {
        self.alpha0 / self.beta
    }

    /// Law of the deterioration accumulated over `dt` at speed `v`.
    pub fn increment_law(&self, v: f64, dt: f64) -> Result<GammaSpec, NumericsError> {
        GammaSpec::new(v * self.beta * dt, self.beta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemState {
    /// Deterioration level.
    pub x: f64,
    /// Mean deterioration speed.
    pub v: f64,
    /// Successive imperfect actions since the last renewal.
    pub k: u32,
    pub t: f64,
}

impl SystemState {
    pub fn new_system(params: &DegradationParams) -> Self {
        Self {
            x: 0.0,
            v: params.nominal_speed(),
            k: 0,
            t: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImperfectOutcome {
    pub gain: f64,
    pub eps: f64,
}

/// Simulates the latent path over `dt` on the `δ`-grid, one gamma draw per
/// step. `dt` is rounded to a whole number of steps.
///
/// Returns `(time, level)` for every grid point from the current time on,
/// and leaves `state` at the final point.
pub fn advance(
    state: &mut SystemState,
    dt: f64,
    params: &DegradationParams,
    rng: &mut RngStream,
) -> Result<Vec<(f64, f64)>, DegradationError> {
    if dt < 0.0 || !dt.is_finite() {
        return Err(DegradationError::NegativeDuration(dt));
    }
    let steps = (dt / params.path_step).round() as u64;
    let t0 = state.t;
    let mut path = Vec::with_capacity(steps as usize + 1);
    path.push((t0, state.x));
    if steps == 0 {
        return Ok(path);
    }
    let law = params.increment_law(state.v, params.path_step)?;
    for i in 1..=steps {
        state.x += sample_gamma(law, rng);
        path.push((t0 + i as f64 * params.path_step, state.x));
    }
    state.t = t0 + steps as f64 * params.path_step;
    Ok(path)
}

/// Earliest grid time at which the path is at or above `threshold`.
pub fn first_passage(path: &[(f64, f64)], threshold: f64) -> Option<f64> {
    path.iter()
        .find(|&&(_, level)| level >= threshold)
        .map(|&(t, _)| t)
}

/// Advances `steps` grid steps and reports the first step (1-based) at which
/// the level reaches the failure threshold, if it does.
///
/// Same law at the grid points as [`advance`], but drawn as a gamma bridge:
/// the interval total comes first, and the per-step increments are only
/// materialised when the total crosses the threshold. Given the total, the
/// normalised increments are Dirichlet and independent of it, so scaling a
/// fresh set of step draws by `total / sum` reproduces the joint law.
pub fn advance_steps(
    state: &mut SystemState,
    steps: u64,
    params: &DegradationParams,
    rng: &mut RngStream,
) -> Result<Option<u64>, DegradationError> {
    if steps == 0 {
        return Ok(None);
    }
    let threshold = params.failure_threshold;
    let start = state.x;
    let total = sample_gamma(
        params.increment_law(state.v, steps as f64 * params.path_step)?,
        rng,
    );
    state.x = start + total;
    state.t += steps as f64 * params.path_step;
    if start >= threshold || state.x < threshold {
        return Ok(None);
    }

    let step_law = params.increment_law(state.v, params.path_step)?;
    let draws: Vec<f64> = (0..steps).map(|_| sample_gamma(step_law, rng)).collect();
    let sum: f64 = draws.iter().sum();
    if sum.is_nan() || sum <= 0.0 {
        // Every step draw underflowed: tiny shapes put (nearly) all the mass
        // on a single step, uniformly placed.
        let step = (rng.uniform() * steps as f64) as u64 + 1;
        return Ok(Some(step.min(steps)));
    }
    let scale = total / sum;
    let mut level = start;
    for (i, draw) in draws.iter().enumerate() {
        level += draw * scale;
        if level >= threshold {
            return Ok(Some(i as u64 + 1));
        }
    }
    Ok(Some(steps))
}

/// Perfect (or corrective) action: as good as new, clock untouched.
pub fn apply_perfect(state: SystemState, params: &DegradationParams) -> SystemState {
    SystemState {
        x: 0.0,
        v: params.nominal_speed(),
        k: 0,
        t: state.t,
    }
}

/// Imperfect preventive action.
///
/// Removes a gain `Z ~ TruncNormal(x/2, x/6)` on `[0, x]`, redrawn until
/// strictly inside `(0, x)`, and speeds the process up by `ε ~ Exp(γ)`.
pub fn apply_imperfect(
    state: SystemState,
    params: &DegradationParams,
    rng: &mut RngStream,
) -> Result<(SystemState, ImperfectOutcome), DegradationError> {
    if state.x.is_nan() || state.x <= 0.0 {
        return Err(DegradationError::NothingToRestore(state.x));
    }
    let window = TruncNormSpec::intervention_window(state.x)?;
    let gain = loop {
        let z = sample_truncated_normal(window, rng);
        if z > 0.0 && z < state.x {
            break z;
        }
    };
    let eps = sample_exponential(params.gamma_rate, rng)?;
    let next = SystemState {
        x: state.x - gain,
        v: state.v + eps,
        k: state.k + 1,
        t: state.t,
    };
    Ok((next, ImperfectOutcome { gain, eps }))
}

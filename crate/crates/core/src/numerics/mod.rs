//! Distribution functions, samplers and a monotone root solver.
//!
//! Everything here is pure given an [`RngStream`]; the simulation modules
//! build on these primitives only.

mod rng;
mod sample;
mod solve;
mod special;

pub use rng::{RngStream, StreamPurpose};
pub use sample::{sample_exponential, sample_gamma, sample_truncated_normal};
pub use solve::{solve_monotone_increasing, solve_monotone_increasing_with, SolverOptions};
pub use special::{
    gamma_cdf, gamma_pdf, gamma_sf, ln_gamma, normal_cdf, normal_quantile, regularized_gamma,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("invalid gamma parameters: shape={shape}, rate={rate} (both must be finite and > 0)")]
    InvalidGamma { shape: f64, rate: f64 },
    #[error("invalid truncated normal: {0}")]
    InvalidTruncNorm(String),
    #[error("argument outside the function domain: {0}")]
    Domain(String),
    #[error("series/continued fraction did not converge for a={a}, x={x}")]
    NoConvergence { a: f64, x: f64 },
    #[error("target {target} lies below f(lo)={f_lo}")]
    TargetBelowLowerBound { target: f64, f_lo: f64 },
    #[error("no upper bracket found after {doublings} doublings (last hi={hi})")]
    BracketNotFound { doublings: u32, hi: f64 },
    #[error("bisection stalled at x={x} with |f(x)-target|={residual}")]
    SolverStalled { x: f64, residual: f64 },
}

/// Gamma law with density `rate^shape x^(shape-1) e^(-rate x) / Γ(shape)`.
///
/// `rate` multiplies `x` in the exponent; it is not a scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaSpec {
    shape: f64,
    rate: f64,
}

impl GammaSpec {
    pub fn new(shape: f64, rate: f64) -> Result<Self, NumericsError> {
        if shape.is_finite() && rate.is_finite() && shape > 0.0 && rate > 0.0 {
            Ok(Self { shape, rate })
        } else {
            Err(NumericsError::InvalidGamma { shape, rate })
        }
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn mean(&self) -> f64 {
        self.shape / self.rate
    }

    pub fn variance(&self) -> f64 {
        self.shape / (self.rate * self.rate)
    }
}

/// Normal(mu, sigma) restricted to `[a, b]` and renormalized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncNormSpec {
    mu: f64,
    sigma: f64,
    a: f64,
    b: f64,
}

impl TruncNormSpec {
    pub fn new(mu: f64, sigma: f64, a: f64, b: f64) -> Result<Self, NumericsError> {
        if !(mu.is_finite() && sigma.is_finite() && a.is_finite() && b.is_finite()) {
            return Err(NumericsError::InvalidTruncNorm(format!(
                "non-finite parameter (mu={mu}, sigma={sigma}, a={a}, b={b})"
            )));
        }
        if sigma <= 0.0 {
            return Err(NumericsError::InvalidTruncNorm(format!(
                "sigma={sigma} must be > 0"
            )));
        }
        if a >= b {
            return Err(NumericsError::InvalidTruncNorm(format!(
                "a={a} must be < b={b}"
            )));
        }
        Ok(Self { mu, sigma, a, b })
    }

    /// The symmetric ±3σ window around `level / 2` used for intervention gains.
    pub fn intervention_window(level: f64) -> Result<Self, NumericsError> {
        let mu = level / 2.0;
        let sigma = level / 6.0;
        Self::new(mu, sigma, mu - 3.0 * sigma, mu + 3.0 * sigma)
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn lower(&self) -> f64 {
        self.a
    }

    pub fn upper(&self) -> f64 {
        self.b
    }
}

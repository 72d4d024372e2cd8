//! Special functions: gamma density and regularized incomplete gamma,
//! standard normal CDF and quantile.

use super::{GammaSpec, NumericsError};

const MAX_ITER: usize = 100_000;
const EPS: f64 = 1e-16;
const FPMIN: f64 = 1e-300;

pub fn ln_gamma(a: f64) -> f64 {
    libm::lgamma(a)
}

/// Gamma density at `x`; zero for negative `x`.
pub fn gamma_pdf(x: f64, spec: GammaSpec) -> Result<f64, NumericsError> {
    if !x.is_finite() {
        return Err(NumericsError::Domain(format!("gamma_pdf at x={x}")));
    }
    let (a, rate) = (spec.shape(), spec.rate());
    if x < 0.0 {
        return Ok(0.0);
    }
    if x == 0.0 {
        return Ok(if a < 1.0 {
            f64::INFINITY
        } else if a == 1.0 {
            rate
        } else {
            0.0
        });
    }
    let log_density = a * rate.ln() + (a - 1.0) * x.ln() - rate * x - ln_gamma(a);
    Ok(log_density.exp())
}

/// `P(X <= x)` for `X ~ Gamma(shape, rate)`.
pub fn gamma_cdf(x: f64, spec: GammaSpec) -> Result<f64, NumericsError> {
    if !x.is_finite() {
        return Err(NumericsError::Domain(format!("gamma_cdf at x={x}")));
    }
    if x <= 0.0 {
        return Ok(0.0);
    }
    regularized_gamma(spec.shape(), spec.rate() * x).map(|(p, _)| p)
}

/// `P(X > x)`, computed without the `1 - cdf` cancellation in the upper tail.
pub fn gamma_sf(x: f64, spec: GammaSpec) -> Result<f64, NumericsError> {
    if !x.is_finite() {
        return Err(NumericsError::Domain(format!("gamma_sf at x={x}")));
    }
    if x <= 0.0 {
        return Ok(1.0);
    }
    regularized_gamma(spec.shape(), spec.rate() * x).map(|(_, q)| q)
}

/// Regularized incomplete gamma pair `(P(a, x), Q(a, x))`.
///
/// Series for `x < a + 1`, Lentz continued fraction otherwise. Whichever of
/// the two is computed directly is accurate in relative terms; the other is
/// its complement.
pub fn regularized_gamma(a: f64, x: f64) -> Result<(f64, f64), NumericsError> {
    if !(a.is_finite() && x.is_finite()) || a <= 0.0 || x < 0.0 {
        return Err(NumericsError::Domain(format!(
            "regularized_gamma(a={a}, x={x})"
        )));
    }
    if x == 0.0 {
        return Ok((0.0, 1.0));
    }
    let log_prefactor = -x + a * x.ln() - ln_gamma(a);
    if x < a + 1.0 {
        let p = (lower_series(a, x)?.ln() + log_prefactor).exp().min(1.0);
        Ok((p, 1.0 - p))
    } else {
        let q = (upper_fraction(a, x)?.ln() + log_prefactor).exp().min(1.0);
        Ok((1.0 - q, q))
    }
}

// sum_{n>=0} x^n / (a (a+1) ... (a+n))
fn lower_series(a: f64, x: f64) -> Result<f64, NumericsError> {
    let mut ap = a;
    let mut term = 1.0 / a;
    let mut sum = term;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * EPS {
            return Ok(sum);
        }
    }
    Err(NumericsError::NoConvergence { a, x })
}

// Modified Lentz evaluation of 1/(x+1-a- 1(1-a)/(x+3-a- 2(2-a)/(x+5-a- ...)))
fn upper_fraction(a: f64, x: f64) -> Result<f64, NumericsError> {
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / FPMIN;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b + an / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            return Ok(h);
        }
    }
    Err(NumericsError::NoConvergence { a, x })
}

pub fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

/// Inverse standard normal CDF.
///
/// Acklam's rational approximation followed by one Halley step against
/// `erfc`, good to roughly machine precision on `(0, 1)`.
pub fn normal_quantile(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.02425;

    let tail = |q: f64| {
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    let mut x = if p < P_LOW {
        tail((-2.0 * p.ln()).sqrt())
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -tail((-2.0 * (1.0 - p).ln()).sqrt())
    };

    let e = normal_cdf(x) - p;
    let u = e * (2.0 * std::f64::consts::PI).sqrt() * (0.5 * x * x).exp();
    x -= u / (1.0 + 0.5 * x * u);
    x
}

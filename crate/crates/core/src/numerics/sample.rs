use super::special::{normal_cdf, normal_quantile};
use super::{GammaSpec, NumericsError, RngStream, TruncNormSpec};

/// Gamma draw by Marsaglia–Tsang; shapes below one are boosted through
/// `Gamma(shape + 1) · U^(1/shape)`.
pub fn sample_gamma(spec: GammaSpec, rng: &mut RngStream) -> f64 {
    let shape = spec.shape();
    let unit = if shape < 1.0 {
        let boosted = marsaglia_tsang(shape + 1.0, rng);
        boosted * rng.uniform_pos().powf(1.0 / shape)
    } else {
        marsaglia_tsang(shape, rng)
    };
    unit / spec.rate()
}

fn marsaglia_tsang(shape: f64, rng: &mut RngStream) -> f64 {
    debug_assert!(shape >= 1.0);
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let (x, v) = loop {
            let x = rng.standard_normal();
            let v = 1.0 + c * x;
            if v > 0.0 {
                break (x, v * v * v);
            }
        };
        let u = rng.uniform_pos();
        let x2 = x * x;
        if u < 1.0 - 0.0331 * x2 * x2 || u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
            return d * v;
        }
    }
}

/// Exponential draw with density `rate · e^(-rate x)`.
pub fn sample_exponential(rate: f64, rng: &mut RngStream) -> Result<f64, NumericsError> {
    if !(rate.is_finite() && rate > 0.0) {
        return Err(NumericsError::Domain(format!(
            "exponential rate={rate} must be > 0"
        )));
    }
    Ok(-rng.uniform_pos().ln() / rate)
}

/// Truncated normal draw by inversion on the renormalized interval.
///
/// Windows lying entirely in the upper tail are reflected so that the CDF
/// values stay in the accurate lower tail of `erfc`.
pub fn sample_truncated_normal(spec: TruncNormSpec, rng: &mut RngStream) -> f64 {
    let lo = (spec.lower() - spec.mu()) / spec.sigma();
    let hi = (spec.upper() - spec.mu()) / spec.sigma();
    let z = if lo > 0.0 {
        -standard_window(-hi, -lo, rng)
    } else {
        standard_window(lo, hi, rng)
    };
    (spec.mu() + spec.sigma() * z).clamp(spec.lower(), spec.upper())
}

fn standard_window(lo: f64, hi: f64, rng: &mut RngStream) -> f64 {
    let p_lo = normal_cdf(lo);
    let p_hi = normal_cdf(hi);
    let p = p_lo + rng.uniform_open() * (p_hi - p_lo);
    normal_quantile(p).clamp(lo, hi)
}

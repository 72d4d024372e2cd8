use super::NumericsError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverOptions {
    pub max_doublings: u32,
    pub max_bisections: u32,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_doublings: 60,
            max_bisections: 500,
        }
    }
}

/// Finds `x >= lo` with `|f(x) - target| <= tol` for a nondecreasing `f`.
///
/// The upper end of the bracket starts at `hi_init` and is pushed out by
/// doubling its distance from `lo`; the bracket is then bisected.
pub fn solve_monotone_increasing<F>(
    f: F,
    target: f64,
    lo: f64,
    hi_init: f64,
    tol: f64,
) -> Result<f64, NumericsError>
where
    F: FnMut(f64) -> f64,
{
    solve_monotone_increasing_with(f, target, lo, hi_init, tol, SolverOptions::default())
}

pub fn solve_monotone_increasing_with<F>(
    mut f: F,
    target: f64,
    lo: f64,
    hi_init: f64,
    tol: f64,
    options: SolverOptions,
) -> Result<f64, NumericsError>
where
    F: FnMut(f64) -> f64,
{
    if tol.is_nan() || tol <= 0.0 || !target.is_finite() || !lo.is_finite() {
        return Err(NumericsError::Domain(format!(
            "solver arguments target={target}, lo={lo}, tol={tol}"
        )));
    }
    let f_lo = f(lo);
    if (f_lo - target).abs() <= tol {
        return Ok(lo);
    }
    if f_lo > target {
        return Err(NumericsError::TargetBelowLowerBound { target, f_lo });
    }

    let mut width = if hi_init > lo { hi_init - lo } else { 1.0 };
    let mut left = lo;
    let mut right = lo + width;
    let mut doublings = 0;
    loop {
        let f_right = f(right);
        if (f_right - target).abs() <= tol {
            return Ok(right);
        }
        if f_right > target {
            break;
        }
        if doublings == options.max_doublings {
            return Err(NumericsError::BracketNotFound {
                doublings,
                hi: right,
            });
        }
        left = right;
        width *= 2.0;
        right = lo + width;
        doublings += 1;
    }

    let mut best = (left, (f_lo - target).abs());
    for _ in 0..options.max_bisections {
        let mid = 0.5 * (left + right);
        if mid <= left || mid >= right {
            break;
        }
        let f_mid = f(mid);
        let residual = (f_mid - target).abs();
        if residual <= tol {
            return Ok(mid);
        }
        if residual <= best.1 {
            best = (mid, residual);
        }
        if f_mid < target {
            left = mid;
        } else {
            right = mid;
        }
    }
    Err(NumericsError::SolverStalled {
        x: best.0,
        residual: best.1,
    })
}

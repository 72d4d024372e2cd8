#![allow(dead_code)]

use cbmsim::engine::{EventKind, ReplicationResult, TraceEvent};
use cbmsim::supply_chain::{validate_chain, Supplier, SupplierKind};
use cbmsim::{parse_config, CostParams, ScenarioConfig};

pub const DEFAULT_SCENARIO: &str = include_str!("../../scenarios/default.toml");

pub fn default_scenario() -> ScenarioConfig {
    parse_config(DEFAULT_SCENARIO)
        .expect("default scenario parses")
        .scenario
}

/// Same lead times and costs as `cfg`, new availability probabilities.
pub fn with_supplier_probs(mut cfg: ScenarioConfig, p1: f64, p2: f64, pe: f64) -> ScenarioConfig {
    let locals = cfg.suppliers.locals().to_vec();
    let main = cfg.suppliers.main().clone();
    let mut all: Vec<Supplier> = locals
        .into_iter()
        .zip([p1, p2])
        .map(|(s, p)| Supplier {
            availability_prob: p,
            ..s
        })
        .collect();
    all.push(Supplier {
        availability_prob: pe,
        kind: SupplierKind::Main,
        ..main
    });
    cfg.suppliers = validate_chain(&all).expect("valid chain");
    cfg
}

/// Adaptive Simpson quadrature to absolute tolerance `eps`.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, eps: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        eps: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * eps.max(1e-15 * whole.abs()) {
            return left + right + delta / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1)
    }
    // Split first so narrow peaks are not missed by the initial coarse rule.
    let pieces = 64;
    let h = (b - a) / pieces as f64;
    (0..pieces)
        .map(|i| {
            let (lo, hi) = (a + i as f64 * h, a + (i + 1) as f64 * h);
            let (fa, fm, fb) = (f(lo), f(0.5 * (lo + hi)), f(hi));
            recurse(
                f,
                lo,
                hi,
                fa,
                fm,
                fb,
                simpson(fa, fm, fb, lo, hi),
                eps / pieces as f64,
                40,
            )
        })
        .sum()
}

/// Gamma(shape, rate) cdf by quadrature of the unnormalised density,
/// normalised by quadrature too, so no special function is involved.
///
/// For shape < 2 the substitution `u = t^shape` removes the singular
/// behaviour of `t^(shape-1)` at the origin.
pub fn gamma_cdf_by_quadrature(x: f64, shape: f64, rate: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let upper = (shape + 40.0 * shape.sqrt() + 60.0) / rate;
    let eps = 1e-13;
    if shape < 2.0 {
        let g = move |u: f64| (-rate * u.powf(1.0 / shape)).exp();
        let part = integrate(&g, 0.0, x.min(upper).powf(shape), eps);
        let whole = integrate(&g, 0.0, upper.powf(shape), eps);
        return part / whole;
    }
    let mode = (shape - 1.0) / rate;
    let log_peak = if mode > 0.0 {
        (shape - 1.0) * mode.ln() - rate * mode
    } else {
        0.0
    };
    let f = move |t: f64| {
        if t <= 0.0 {
            return if shape == 1.0 { (-log_peak).exp() } else { 0.0 };
        }
        ((shape - 1.0) * t.ln() - rate * t - log_peak).exp()
    };
    let part = integrate(&f, 0.0, x.min(upper), eps);
    let whole = integrate(&f, 0.0, upper, eps);
    part / whole
}

/// Two-sample Kolmogorov–Smirnov statistic.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let t = a[i].min(b[j]);
        while i < a.len() && a[i] <= t {
            i += 1;
        }
        while j < b.len() && b[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

/// Asymptotic two-sample KS critical value at level `alpha`.
pub fn ks_critical(n: usize, m: usize, alpha: f64) -> f64 {
    let c = (-(alpha / 2.0).ln() / 2.0).sqrt();
    c * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}

/// One-sample KS statistic against a continuous cdf.
pub fn ks_one_sample(sample: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut s = sample.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

pub fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Cycle cost rebuilt term by term from the counters, with the imperfect
/// costs recomputed from the trace. Summed in the documented term order.
pub fn oracle_total_cost(r: &ReplicationResult, c: &CostParams) -> f64 {
    let l = &r.ledger;
    let imperfect: f64 = r
        .trace
        .as_ref()
        .expect("trace recorded")
        .iter()
        .filter_map(|e| match e.kind {
            EventKind::Imperfect { x_before, gain, .. } => {
                Some(c.c_p0 * (gain / x_before).powf(c.eta))
            }
            _ => None,
        })
        .fold(0.0, |acc, v| acc + v);
    let terms = [
        c.c_ins * l.n_ins as f64,
        imperfect,
        c.c_p0 * l.n_p as f64,
        c.c_c * l.n_c as f64,
        c.c_d1 * l.d1,
        c.c_d2 * l.d2,
        c.c_o * l.n_o as f64,
        c.c_oe * l.n_oe as f64,
        c.c_h * l.holding_integral,
        c.c_pur * l.purchased as f64,
    ];
    terms.iter().fold(0.0, |acc, v| acc + v)
}

/// Stock on hand replayed from deliveries and consumptions.
pub fn replay_on_hand(trace: &[TraceEvent], initial: u32) -> Vec<i64> {
    let mut level = i64::from(initial);
    trace
        .iter()
        .map(|e| {
            match e.kind {
                EventKind::Delivery { quantity, .. } => level += i64::from(quantity),
                EventKind::Consumed { quantity } => level -= i64::from(quantity),
                _ => {}
            }
            level
        })
        .collect()
}

/// Integral of on-hand stock over the cycle, rebuilt from the trace.
pub fn holding_from_trace(trace: &[TraceEvent], initial: u32) -> f64 {
    let (mut integral, mut clock, mut level) = (0.0f64, 0.0f64, initial);
    for e in trace {
        integral += f64::from(level) * (e.time - clock);
        clock = e.time;
        level = e.on_hand;
    }
    integral
}

/// Times from each renewal to the next failure, read off a trace.
pub fn renewal_to_failure_times(trace: &[TraceEvent]) -> Vec<f64> {
    let mut out = Vec::new();
    let mut last_renewal = 0.0;
    for e in trace {
        match e.kind {
            EventKind::Perfect | EventKind::Repair => last_renewal = e.time,
            EventKind::Failure => out.push(e.time - last_renewal),
            _ => {}
        }
    }
    out
}

pub fn report(name: &str, pass: bool, detail: &str) {
    println!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
}

mod common;

use cbmsim::numerics::{
    gamma_cdf, gamma_pdf, gamma_sf, normal_cdf, normal_quantile, sample_gamma,
    sample_truncated_normal, solve_monotone_increasing, GammaSpec, RngStream, TruncNormSpec,
};
use common::*;

#[test]
fn pdf_is_the_derivative_of_cdf() {
    for &(shape, rate) in &[(0.7, 1.3), (2.0, 0.4), (12.0, 3.0)] {
        let spec = GammaSpec::new(shape, rate).unwrap();
        for i in 1..40 {
            let x = i as f64 * 0.25 * shape / rate;
            let h = 1e-5 * x;
            let slope =
                (gamma_cdf(x + h, spec).unwrap() - gamma_cdf(x - h, spec).unwrap()) / (2.0 * h);
            let pdf = gamma_pdf(x, spec).unwrap();
            assert!(
                (slope - pdf).abs() <= 1e-6 * pdf.max(1e-3),
                "shape={shape} x={x}: {slope} vs {pdf}"
            );
        }
    }
}

#[test]
fn cdf_matches_quadrature_in_the_tails() {
    for &(shape, rate, x) in &[
        (0.25, 1.0, 1e-6),
        (0.25, 1.0, 30.0),
        (3.0, 2.0, 0.01),
        (40.0, 1.0, 80.0),
        (1.5, 0.2, 60.0),
    ] {
        let spec = GammaSpec::new(shape, rate).unwrap();
        let oracle = gamma_cdf_by_quadrature(x, shape, rate);
        let got = gamma_cdf(x, spec).unwrap();
        assert!(
            (got - oracle).abs() <= 1e-10,
            "shape={shape} rate={rate} x={x}: {got} vs {oracle}"
        );
        assert!((gamma_sf(x, spec).unwrap() - (1.0 - oracle)).abs() <= 1e-10);
    }
}

#[test]
fn gamma_sampler_against_its_cdf() {
    for (i, &(shape, rate)) in [(0.05, 1.0), (0.5, 4.0), (3.0, 0.5), (250.0, 10.0)]
        .iter()
        .enumerate()
    {
        let spec = GammaSpec::new(shape, rate).unwrap();
        let mut rng = RngStream::new(31, i as u64);
        let xs: Vec<f64> = (0..50_000).map(|_| sample_gamma(spec, &mut rng)).collect();
        let d = ks_one_sample(&xs, |x| gamma_cdf(x, spec).unwrap());
        // 1.95 / sqrt(n) is the 0.1% critical value.
        assert!(d < 1.95 / (xs.len() as f64).sqrt(), "shape={shape}: D={d}");
    }
}

#[test]
fn truncated_normal_against_its_cdf() {
    for (i, &(mu, sigma, a, b)) in [
        (0.0, 1.0, -1.0, 2.0),
        (5.0, 0.5, 6.0, 7.5),
        (1.0, 2.0, -10.0, -3.0),
    ]
    .iter()
    .enumerate()
    {
        let spec = TruncNormSpec::new(mu, sigma, a, b).unwrap();
        let (fa, fb) = (normal_cdf((a - mu) / sigma), normal_cdf((b - mu) / sigma));
        let mut rng = RngStream::new(32, i as u64);
        let xs: Vec<f64> = (0..50_000)
            .map(|_| sample_truncated_normal(spec, &mut rng))
            .collect();
        assert!(xs.iter().all(|&x| (a..=b).contains(&x)));
        let d = ks_one_sample(&xs, |x| (normal_cdf((x - mu) / sigma) - fa) / (fb - fa));
        assert!(d < 1.95 / (xs.len() as f64).sqrt(), "window {i}: D={d}");
    }
}

#[test]
fn normal_quantile_inverts_cdf() {
    for i in 1..1000 {
        let p = i as f64 / 1000.0;
        let z = normal_quantile(p);
        assert!((normal_cdf(z) - p).abs() < 1e-14, "p={p}");
    }
    for &p in &[1e-300, 1e-20, 1e-8] {
        let z = normal_quantile(p);
        assert!(((normal_cdf(z) - p) / p).abs() < 1e-9, "p={p}");
    }
}

#[test]
fn solver_inverts_the_gamma_cdf() {
    let spec = |x: f64| GammaSpec::new(x, 1.0).unwrap();
    // Shape solving P(shape, 1; 5) = 0.3 is decreasing in shape; use the sf.
    let shape =
        solve_monotone_increasing(|a| gamma_sf(5.0, spec(a)).unwrap(), 0.3, 0.01, 1.0, 1e-12)
            .unwrap();
    assert!((gamma_sf(5.0, spec(shape)).unwrap() - 0.3).abs() < 1e-12);
}

mod common;

use cbmsim::cost::{cost_rate, CostRateEstimator};
use cbmsim::degradation::{advance, advance_steps, first_passage};
use cbmsim::engine::{run_cycle, run_cycle_traced, BatchStats, EventKind};
use cbmsim::numerics::{RngStream, StreamPurpose};
use cbmsim::{run_replications, DegradationParams, SystemState};
use common::*;

#[test]
fn trace_is_time_ordered_and_consistent() {
    let cfg = with_supplier_probs(default_scenario(), 0.4, 0.3, 0.7);
    for id in 0..300 {
        let r = run_cycle_traced(&cfg, id).unwrap();
        let trace = r.trace.as_ref().unwrap();
        assert!(
            trace.windows(2).all(|w| w[0].time <= w[1].time),
            "stream {id}"
        );
        assert!(matches!(trace.last().unwrap().kind, EventKind::Repair));
        assert_eq!(
            trace
                .iter()
                .filter(|e| matches!(e.kind, EventKind::Failure))
                .count(),
            1
        );
        let inspections = trace
            .iter()
            .filter(|e| matches!(e.kind, EventKind::Inspection { .. }))
            .count() as u64;
        assert_eq!(inspections, r.ledger.n_ins);
        assert_eq!(r.cycle_length, trace.last().unwrap().time);
    }
}

#[test]
fn holding_cost_rebuilds_from_trace_exactly() {
    let cfg = with_supplier_probs(default_scenario(), 0.5, 0.5, 0.8);
    for id in 0..300 {
        let r = run_cycle_traced(&cfg, id).unwrap();
        let rebuilt = holding_from_trace(r.trace.as_ref().unwrap(), cfg.policy.s);
        assert_eq!(rebuilt, r.ledger.holding_integral, "stream {id}");
    }
}

#[test]
fn malfunction_and_downtime_match_trace() {
    let cfg = with_supplier_probs(default_scenario(), 0.2, 0.2, 0.5);
    let mut saw_downtime = false;
    for id in 0..300 {
        let r = run_cycle_traced(&cfg, id).unwrap();
        let trace = r.trace.as_ref().unwrap();
        let failure = trace
            .iter()
            .find(|e| matches!(e.kind, EventKind::Failure))
            .unwrap()
            .time;
        let detected = trace
            .iter()
            .rev()
            .find(|e| matches!(e.kind, EventKind::Inspection { .. }))
            .unwrap()
            .time;
        assert_eq!(r.ledger.d1, detected - failure);
        assert_eq!(r.ledger.d2, r.cycle_length - detected);
        assert_eq!(r.availability, 1.0 - r.ledger.d2 / r.cycle_length);
        saw_downtime |= r.ledger.d2 > 0.0;
    }
    assert!(saw_downtime);
}

#[test]
fn reliable_supply_means_full_availability() {
    let mut cfg = with_supplier_probs(default_scenario(), 1.0, 1.0, 1.0);
    cfg.policy.s = 3;
    cfg.simulation.replications = 2000;
    let stats = run_replications(&cfg).unwrap();
    assert!(stats.results.iter().all(|r| r.availability == 1.0));
}

#[test]
fn single_replication_stats_equal_the_cycle() {
    let mut cfg = default_scenario();
    cfg.simulation.replications = 1;
    let stats = run_replications(&cfg).unwrap();
    let r = run_cycle(&cfg, 0).unwrap();
    assert_eq!(stats.cost_rate, r.total_cost / r.cycle_length);
    assert_eq!(stats.mean_availability, r.availability);
    assert_eq!(stats.results[0], r);
}

#[test]
fn estimators_and_breakdown() {
    let mut cfg = default_scenario();
    cfg.simulation.replications = 500;
    let stats = run_replications(&cfg).unwrap();
    let rate = cost_rate(&stats.results, CostRateEstimator::RenewalReward).unwrap();
    assert_eq!(stats.cost_rate, rate);
    assert!((stats.rate_breakdown.total() - rate).abs() < 1e-9 * rate);
    let mean =
        BatchStats::from_results(stats.results.clone(), CostRateEstimator::CycleMean).unwrap();
    let direct = stats
        .results
        .iter()
        .map(|r| r.total_cost / r.cycle_length)
        .sum::<f64>()
        / 500.0;
    assert!((mean.cost_rate - direct).abs() < 1e-9 * direct);
}

#[test]
fn bridge_matches_fine_grid_first_passage() {
    let params = DegradationParams::new(2.0, 2.0, 10.0, 5.0, None).unwrap();
    let n = 4000;
    let mut fine = Vec::with_capacity(n);
    let mut bridged = Vec::with_capacity(n);
    let mut rng_a = RngStream::for_purpose(5, 0, StreamPurpose::Degradation);
    let mut rng_b = RngStream::for_purpose(6, 0, StreamPurpose::Degradation);
    let horizon = 30.0;
    let steps = (horizon / params.path_step).round() as u64;
    for _ in 0..n {
        let mut s = SystemState::new_system(&params);
        let path = advance(&mut s, horizon, &params, &mut rng_a).unwrap();
        fine.push(first_passage(&path, params.failure_threshold).expect("crosses within horizon"));
        // Bridge over uneven chunks, as the engine does between inspections.
        let mut s = SystemState::new_system(&params);
        let mut done = 0;
        let mut chunk = 37;
        let hit = loop {
            let take = chunk.min(steps - done);
            if let Some(k) = advance_steps(&mut s, take, &params, &mut rng_b).unwrap() {
                break Some(done + k);
            }
            done += take;
            chunk = chunk * 3 % 211 + 1;
            if done == steps {
                break None;
            }
        };
        bridged.push(hit.expect("crosses within horizon") as f64 * params.path_step);
    }
    let d = ks_statistic(&fine, &bridged);
    assert!(d < ks_critical(n, n, 0.001), "D={d}");
}

#[test]
fn perfect_action_renews_the_failure_time_law() {
    let cfg = with_supplier_probs(default_scenario(), 1.0, 1.0, 1.0);
    let mut first = Vec::new();
    let mut later = Vec::new();
    let params = cfg.degradation;
    let mut rng = RngStream::for_purpose(77, 0, StreamPurpose::Degradation);
    for _ in 0..4000 {
        let mut s = SystemState::new_system(&params);
        let path = advance(&mut s, 30.0, &params, &mut rng).unwrap();
        first.push(first_passage(&path, params.failure_threshold).unwrap());
    }
    // Paths restarted after a perfect action, with the clock offset removed.
    for _ in 0..4000 {
        let mut s = SystemState::new_system(&params);
        advance(&mut s, 3.0, &params, &mut rng).unwrap();
        let mut renewed = cbmsim::degradation::apply_perfect(s, &params);
        let t0 = renewed.t;
        let path = advance(&mut renewed, 30.0, &params, &mut rng).unwrap();
        later.push(first_passage(&path, params.failure_threshold).unwrap() - t0);
    }
    let d = ks_statistic(&first, &later);
    assert!(d < ks_critical(4000, 4000, 0.001), "D={d}");
}

#[test]
fn k_zero_disables_imperfect_actions() {
    let base = with_supplier_probs(default_scenario(), 1.0, 1.0, 1.0);
    let imperfect_per_cycle = |k: u32| {
        let mut cfg = base.clone();
        cfg.policy.k = k;
        cfg.simulation.replications = 3000;
        let stats = run_replications(&cfg).unwrap();
        stats
            .results
            .iter()
            .map(|r| r.ledger.n_ip as f64)
            .sum::<f64>()
            / 3000.0
    };
    assert_eq!(imperfect_per_cycle(0), 0.0);
    assert!(imperfect_per_cycle(3) > 0.0);
}

#[test]
fn deferral_waits_for_spares() {
    let mut cfg = with_supplier_probs(default_scenario(), 0.5, 0.5, 1.0);
    cfg.policy.s = 1;
    let mut deferred = cfg.clone();
    deferred.simulation.spare_deferral = true;
    cfg.simulation.spare_deferral = false;
    let shortages = |c: &cbmsim::ScenarioConfig| {
        (0..1000)
            .map(|id| run_cycle(c, id).unwrap().preventive_shortages)
            .sum::<u64>()
    };
    assert!(shortages(&deferred) <= shortages(&cfg));
}

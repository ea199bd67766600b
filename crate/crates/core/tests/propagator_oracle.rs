mod common;

use common::*;
use qchain::exec::rng_from_seed;
use qchain::lindblad::{evaluate_transfer, ChainGeometry};
use qchain::{Pattern, PhysicalConfig};
use rand::Rng;

#[test]
fn expm_matches_adaptive_ode_on_random_geometries() {
    let mut rng = rng_from_seed(2024);
    let mut worst = 0.0f64;
    for case in 0..100 {
        let n = rng.random_range(2..=8);
        let x = random_positions(&mut rng, n, 0.1);
        let mut config = PhysicalConfig::default().with_cells(n);
        config.sink_enabled = case % 2 == 0;
        let t = config.horizon_t;
        let a = library_rho(&x, &config, t);
        let b = oracle_rho(&x, &config, t);
        let d = max_abs_diff(&a, &b);
        worst = worst.max(d);
        assert!(
            d < 1e-8,
            "case {case}: N={n} sink={} x={x:?} max-abs {d:e}",
            config.sink_enabled
        );
    }
    println!("worst max-abs deviation {worst:e}");
}

#[test]
fn oracle_agrees_at_intermediate_times_with_strong_coupling() {
    let mut rng = rng_from_seed(7);
    for _ in 0..10 {
        let x = random_positions(&mut rng, 5, 0.15);
        let config = PhysicalConfig::default().with_cells(5).with_coupling(0.02);
        for t in [0.3, 1.7, 4.1] {
            let d = max_abs_diff(&library_rho(&x, &config, t), &oracle_rho(&x, &config, t));
            assert!(d < 1e-8, "t={t}: {d:e}");
        }
    }
}

#[test]
fn unitary_two_site_is_rabi_oscillation() {
    for j in [0.05, 0.2, 1.0] {
        let config = PhysicalConfig::unitary().with_cells(2).with_coupling(j);
        for k in 0..=50 {
            let t = 0.1 * k as f64;
            let rho = library_rho(&[0.0, 1.0], &config, t);
            let expected = (j * t).sin().powi(2);
            assert!((rho.at(1, 1).re - expected).abs() < 1e-8, "J={j} t={t}");
        }
    }
}

#[test]
fn two_site_time_series_follows_rabi_formula() {
    let config = PhysicalConfig::unitary().with_cells(2);
    let g = ChainGeometry::from_pattern(&Pattern::endpoints(2), &config).unwrap();
    let res = evaluate_transfer(&g, &config).unwrap();
    for s in &res.time_series {
        assert!((s.populations[1] - (0.05 * s.time).sin().powi(2)).abs() < 1e-8);
    }
    let expected_max = (0.05f64 * 5.0).sin().powi(2);
    assert!((res.target_population_max - expected_max).abs() < 1e-8);
}

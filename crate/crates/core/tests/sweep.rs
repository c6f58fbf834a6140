use std::time::{Duration, Instant};

use qpolar::harness::{designed_n8, entropy_grid, run_sweep, SweepConfig, SweepProtocol};

#[test]
fn entropy_grid_sweep_at_n8() {
    let spec = designed_n8().unwrap();
    let config = SweepConfig {
        spec: spec.clone(),
        grid: entropy_grid(0.05, 1.0, 99).unwrap(),
        protocols: SweepProtocol::ALL.to_vec(),
        mc_trials: 5000,
        seed: 4,
        delta: 0.05,
    };
    let start = Instant::now();
    let out = run_sweep(&config).unwrap();
    assert!(start.elapsed() < Duration::from_secs(60));
    assert_eq!(out.records.len(), 3 * 99);
    assert!(out.skipped.is_empty());

    let exact: Vec<_> = out.records.iter().filter(|r| r.protocol == "polar-exact").collect();
    let mc: Vec<_> = out.records.iter().filter(|r| r.protocol == "polar-mc").collect();
    for w in exact.windows(2).filter(|w| w[1].source_p <= spec.design_p()) {
        assert!(w[1].success_exact < w[0].success_exact, "{} -> {}", w[0].source_p, w[1].source_p);
    }
    for (e, m) in exact.iter().zip(&mc) {
        let (s, se) = (e.success_exact.unwrap(), m.stderr.unwrap());
        assert!((0.0..=1.0).contains(&s));
        assert!((s - m.success_mc.unwrap()).abs() <= 4.0 * se.max(1e-3), "p={}", e.source_p);
    }
}

#[test]
fn uniform_source_success_is_the_correctable_fraction() {
    let spec = designed_n8().unwrap();
    let config = SweepConfig {
        spec,
        grid: vec![0.5],
        protocols: vec![SweepProtocol::PolarExact],
        mc_trials: 1,
        seed: 0,
        delta: 0.05,
    };
    let out = run_sweep(&config).unwrap();
    assert_eq!(out.records[0].success_exact, Some(16.0 / 256.0));
}

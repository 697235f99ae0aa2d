use gentleak_core::sim::{exact_round_statistics, run_simulation, tradeoff_sweep, EveStrategy};

#[test]
fn monte_carlo_matches_enumeration() {
    let n = 100_000u64;
    let strategies = [
        EveStrategy::InterceptRandomBasis,
        EveStrategy::InterceptX,
        EveStrategy::InterceptZ,
        EveStrategy::gentle_default(0.1).unwrap(),
    ];
    for s in &strategies {
        let exact = exact_round_statistics(s).unwrap();
        let q_sigma = (exact.qber * (1.0 - exact.qber) / n as f64).sqrt();
        let d_sigma = (exact.disturbance_variance / n as f64).sqrt();
        for seed in 1..=5 {
            let r = run_simulation(s, n, seed).unwrap();
            assert!((r.qber - exact.qber).abs() <= 3.0 * q_sigma + 1e-15, "{s:?} seed {seed}: {r:?}");
            assert!(
                (r.mean_disturbance - exact.mean_disturbance).abs() <= 3.0 * d_sigma + 1e-12,
                "{s:?} seed {seed}: {r:?}"
            );
            assert_eq!(r.eve_leakage_bits, exact.eve_leakage_bits);
        }
    }
}

#[test]
fn reports_are_reproducible() {
    for s in [EveStrategy::InterceptRandomBasis, EveStrategy::gentle_default(0.07).unwrap()] {
        let a = run_simulation(&s, 12_345, 9).unwrap();
        let b = run_simulation(&s, 12_345, 9).unwrap();
        assert_eq!(format!("{a:?}"), format!("{b:?}"));
    }
}

#[test]
fn tradeoff_leakage_grows_with_epsilon() {
    let eps: Vec<f64> = (0..=10).map(|i| i as f64 / 100.0).collect();
    let rows = tradeoff_sweep(&eps, 20_000, 42).unwrap();
    assert_eq!(rows[0].qber, 0.0);
    for w in rows.windows(2) {
        assert!(w[1].leakage_bits >= w[0].leakage_bits);
        assert!(w[1].exact.qber >= w[0].exact.qber - 1e-15);
    }
    for r in &rows {
        let n = 20_000f64;
        let sigma = (r.exact.qber * (1.0 - r.exact.qber) / n).sqrt();
        assert!((r.qber - r.exact.qber).abs() <= 3.0 * sigma + 1e-15, "{r:?}");
    }
}

#[test]
fn tradeoff_anchor_at_top_epsilon() {
    let rows = tradeoff_sweep(&[0.1], 1000, 42).unwrap();
    let x = rows[0].exact;
    // ε²(2 − √2)/4
    assert!((x.qber - 0.01 * (2.0 - 2f64.sqrt()) / 4.0).abs() < 1e-15);
    assert!((x.eve_leakage_bits - 0.102_369_945_031_280_84).abs() < 1e-12);
    assert!((x.mean_disturbance - 0.036_803_319_203_839_73).abs() < 1e-12);
}

use gentleak_core::leakage::{
    depolarized_leakage, gentle_leakage_interval, guessing_sum, leakage_upper_bound, maximal_quantum_leakage,
    mql_grid_oracle_d2, EstimateKind, OptimizerConfig,
};
use gentleak_core::measurements::{CertifyMode, GentlenessSpec};
use gentleak_core::random::{random_density, random_ensemble, random_unitary, stream_rng};
use gentleak_core::states::bb84_ensemble;
use gentleak_core::{CqEnsemble, DensityOperator, DepolarizingParam};
use proptest::prelude::*;

fn quick() -> OptimizerConfig {
    OptimizerConfig {
        starts: 8,
        evals_per_start: 1500,
        ..Default::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn estimates_are_bounded(seed in any::<u64>(), n in 1usize..5, d in 2usize..4) {
        let e = random_ensemble(n, d, &mut stream_rng(seed, 0));
        let est = maximal_quantum_leakage(&e, &quick()).unwrap();
        prop_assert!(est.bits >= 0.0);
        prop_assert!(est.bits <= leakage_upper_bound(&e) + 1e-9);
        if let Some(povm) = &est.achieving_povm {
            prop_assert!((guessing_sum(&e, povm).unwrap().log2() - est.bits).abs() < 1e-9);
        }
    }

    #[test]
    fn identical_states_leak_nothing(seed in any::<u64>(), n in 1usize..5, d in 2usize..4) {
        let rho = random_density(d, d, &mut stream_rng(seed, 1));
        let labels = (0..n).map(|i| format!("s{i}")).collect();
        let e = CqEnsemble::uniform(labels, vec![rho; n]).unwrap();
        let est = maximal_quantum_leakage(&e, &quick()).unwrap();
        prop_assert_eq!(est.bits, 0.0);
        if d == 2 {
            prop_assert_eq!(mql_grid_oracle_d2(&e, 61).unwrap().bits, 0.0);
        }
    }

    #[test]
    fn oracle_is_unitarily_invariant(seed in any::<u64>()) {
        let e = bb84_ensemble();
        let u = random_unitary(2, &mut stream_rng(seed, 2));
        let r = e.apply_unitary(&u).unwrap();
        let a = mql_grid_oracle_d2(&e, 181).unwrap().bits;
        let b = mql_grid_oracle_d2(&r, 181).unwrap().bits;
        prop_assert!((a - b).abs() <= 1e-6, "{} vs {}", a, b);
    }

    #[test]
    fn depolarizing_reduces_leakage(seed in any::<u64>(), p in 0.0f64..=1.0, q in 0.0f64..=1.0) {
        let e = random_ensemble(3, 2, &mut stream_rng(seed, 3));
        let (lo, hi) = (p.min(q), p.max(q));
        let a = mql_grid_oracle_d2(&e.depolarize(DepolarizingParam::new(lo).unwrap()), 91).unwrap().bits;
        let b = mql_grid_oracle_d2(&e.depolarize(DepolarizingParam::new(hi).unwrap()), 91).unwrap().bits;
        prop_assert!(b <= a + 1e-9);
    }
}

#[test]
fn optimizer_reaches_oracle_on_random_qubits() {
    let cfg = OptimizerConfig::default();
    for k in 0..50u64 {
        let mut rng = stream_rng(5150, k);
        let n = 2 + (k as usize % 3);
        let e = random_ensemble(n, 2, &mut rng);
        let oracle = mql_grid_oracle_d2(&e, 181).unwrap().bits;
        let est = maximal_quantum_leakage(&e, &cfg).unwrap();
        assert!(est.bits >= oracle - 1e-3, "ensemble {k}: {} < {}", est.bits, oracle);
    }
}

#[test]
fn bb84_depolarized_closed_form() {
    let e = bb84_ensemble();
    for p in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let dp = DepolarizingParam::new(p).unwrap();
        let expect = (p + (1.0 - p) * 2.0f64).log2();
        let oracle = mql_grid_oracle_d2(&e.depolarize(dp), 721).unwrap().bits;
        assert!((oracle - expect).abs() <= 1e-6, "p={p}: {oracle}");
        assert!((depolarized_leakage(1.0, dp) - expect).abs() < 1e-15);
    }
}

#[test]
fn commuting_ensembles_are_exact() {
    let diag = |v: &[f64]| {
        DensityOperator::new(gentleak_core::HermitianMatrix::from_real_diagonal(v)).unwrap()
    };
    let e = CqEnsemble::uniform(
        vec!["a".into(), "b".into()],
        vec![diag(&[0.5, 0.25, 0.25]), diag(&[0.1, 0.2, 0.7])],
    )
    .unwrap();
    let est = maximal_quantum_leakage(&e, &quick()).unwrap();
    assert_eq!(est.kind, EstimateKind::ExactCommuting);
    assert!((est.bits - (0.5f64 + 0.25 + 0.7).log2()).abs() < 1e-12);
}

#[test]
fn gentle_interval_is_ordered() {
    let e = bb84_ensemble();
    for (alpha, delta) in [(0.0, 0.0), (0.1, 0.05), (0.3, 0.1), (1.0, 0.0), (0.2, 1.0)] {
        let spec = GentlenessSpec::new(alpha, delta).unwrap();
        for mode in [CertifyMode::PerState, CertifyMode::AverageState] {
            let iv = gentle_leakage_interval(&e, spec, &quick(), mode).unwrap();
            assert!(iv.lower_bits <= iv.upper_bits + 1e-12, "{alpha} {delta}: {iv:?}");
            assert!(iv.lower_bits >= iv.cloning.lower_bits);
            if alpha == 1.0 || delta == 1.0 {
                assert!((iv.lower_bits - iv.upper_bits).abs() < 1e-12);
            }
        }
    }
}

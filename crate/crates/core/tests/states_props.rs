use gentleak_core::random::{random_density, random_ensemble, random_unitary, stream_rng};
use gentleak_core::states::bb84_ensemble;
use gentleak_core::DepolarizingParam;
use proptest::prelude::*;

fn dp(p: f64) -> DepolarizingParam {
    DepolarizingParam::new(p).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn depolarizing_composes(seed in any::<u64>(), d in 2usize..5, p in 0.0f64..=1.0, q in 0.0f64..=1.0) {
        let rho = random_density(d, d, &mut stream_rng(seed, 0));
        let twice = rho.depolarize(dp(p)).depolarize(dp(q));
        let once = rho.depolarize(dp(1.0 - (1.0 - p) * (1.0 - q)));
        prop_assert!(twice.matrix().as_matrix().max_abs_diff(once.matrix().as_matrix()) < 1e-12);
    }

    #[test]
    fn depolarizing_contracts_distance(seed in any::<u64>(), d in 2usize..5, p in 0.0f64..=1.0) {
        let mut rng = stream_rng(seed, 1);
        let a = random_density(d, 1, &mut rng);
        let b = random_density(d, d, &mut rng);
        let before = a.trace_distance(&b).unwrap();
        let after = a.depolarize(dp(p)).trace_distance(&b.depolarize(dp(p))).unwrap();
        prop_assert!((after - (1.0 - p) * before).abs() < 1e-10);
    }

    #[test]
    fn unitary_keeps_ensemble_valid(seed in any::<u64>(), n in 1usize..6, d in 2usize..4) {
        let mut rng = stream_rng(seed, 2);
        let e = random_ensemble(n, d, &mut rng);
        let u = random_unitary(d, &mut rng);
        let r = e.apply_unitary(&u).unwrap();
        prop_assert_eq!(r.probs(), e.probs());
        for (a, b) in r.states().iter().zip(e.states()) {
            prop_assert!((a.matrix().trace() - 1.0).abs() < 1e-10);
            prop_assert!(a.trace_distance(b).unwrap() <= e.dpi_beta(&u).unwrap() + 1e-12);
        }
        let avg = e.average_state();
        prop_assert!((avg.matrix().trace() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn bb84_pairwise_geometry() {
    let e = bb84_ensemble();
    assert!((e.max_pairwise_distance().unwrap() - 1.0).abs() < 1e-12);
    assert!(e.max_commutator_norm() > 0.5);
}

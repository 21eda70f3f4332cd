use proptest::prelude::*;
use qutrit_mes::generate::{generate_state, StateKind};
use qutrit_mes::pauli::{pauli, PauliIndex};
use qutrit_mes::sep::{
    check_eta_conditions, depolarize, eta_from_p, induced_initial, sep_feasible, witness_residual, ProbabilityVector, SepInstance,
};
use qutrit_mes::Mat3;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn prob_vector() -> impl Strategy<Value = ProbabilityVector<f64>> {
    (proptest::array::uniform9(0.0f64..1.0), proptest::array::uniform9(proptest::bool::weighted(0.4)))
        .prop_filter_map("empty support", |(w, keep)| {
            let p: [f64; 9] = std::array::from_fn(|k| if keep[k] { w[k] } else { 0.0 });
            let s: f64 = p.iter().sum();
            (s > 1e-3).then(|| ProbabilityVector::new(p.map(|x| x / s)).unwrap())
        })
}

fn kind() -> impl Strategy<Value = StateKind> {
    prop::sample::select(vec![StateKind::CaseI, StateKind::CaseII, StateKind::Lemma3, StateKind::Convertible, StateKind::Dense])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eta_is_a_character_sum(p in prob_vector()) {
        let eta = eta_from_p(&p);
        prop_assert!((eta.get(PauliIndex::ZERO).re - 1.0).abs() < 1e-12);
        for l in PauliIndex::ALL {
            prop_assert!(eta.get(l).norm() <= 1.0 + 1e-12);
            prop_assert!((eta.get(-l) - eta.get(l).conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn depolarization_scales_pauli_coordinates(p in prob_vector(), l in 0usize..9) {
        let l = PauliIndex::from_pos(l);
        let s: Mat3<f64> = pauli(l);
        let eta = eta_from_p(&p);
        let d = depolarize(&s, &p);
        prop_assert!(d.dist(&s.scale_c(eta.get(l))) < 1e-12);
    }

    #[test]
    fn eta_conditions_match_the_operator_identity(p in prob_vector(), k in kind(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = generate_state(k, &mut rng).unwrap();
        let h = t.gram();
        let g = induced_initial(&h, &p);
        let eta_ok = check_eta_conditions(&h.coords, &eta_from_p(&p)).ok;
        let identity = witness_residual(&g, &h, &p) <= 1e-9;
        prop_assert_eq!(eta_ok, identity);
        if eta_ok && g.is_positive() {
            prop_assert!(sep_feasible(&SepInstance::from_grams(t.seed, g, h)).unwrap().feasible);
        }
    }
}

#[test]
fn uniform_witness_satisfies_every_condition_on_the_sep_only_family() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..20 {
        let t = generate_state(StateKind::Lemma3, &mut rng).unwrap();
        let f = sep_feasible(&SepInstance::from_states(&qutrit_mes::GenericState::seed_state(t.seed), &t).unwrap()).unwrap();
        assert!(f.unique);
        assert!(f.eta_check.unwrap().ok);
    }
}

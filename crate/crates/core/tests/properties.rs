use proptest::prelude::*;
use qutrit_mes::classify::{classify, ClassifyOptions};
use qutrit_mes::generate::{generate_state, random_unitary, StateKind};
use qutrit_mes::pauli::{group_compose, pauli, PauliCoords, PauliIndex};
use qutrit_mes::state::{lu_equivalent, standard_form, GenericState};
use qutrit_mes::Mat3;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn index() -> impl Strategy<Value = PauliIndex> {
    (0usize..9).prop_map(PauliIndex::from_pos)
}

fn kind() -> impl Strategy<Value = StateKind> {
    prop::sample::select(StateKind::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pauli_products_close_up_to_phase(l in index(), m in index()) {
        let (n, phase) = group_compose::<f64>(l, m);
        prop_assert_eq!(n, l + m);
        let prod: Mat3<f64> = pauli(l) * pauli(m);
        prop_assert!(prod.dist(&pauli::<f64>(n).scale_c(phase)) < 1e-12);
        let u: Mat3<f64> = pauli(l);
        prop_assert!((u.adjoint() * u).dist(&Mat3::identity()) < 1e-12);
    }

    #[test]
    fn pauli_coordinates_reconstruct(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_unitary(&mut rng);
        prop_assert!(PauliCoords::of(&m).to_matrix().dist(&m) < 1e-12);
    }

    #[test]
    fn classification_ignores_relabeling_and_dressing(k in kind(), seed in any::<u64>(), perm in 0usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let opts = ClassifyOptions::default();
        let s = generate_state(k, &mut rng).unwrap();
        let d = GenericState::new(s.seed, std::array::from_fn(|i| random_unitary(&mut rng) * s.g[i])).unwrap();
        let p = s.permuted(qutrit_mes::classify::ALL_PERMUTATIONS[perm]);
        let (a, b, c) = (classify(&s.gram(), &opts), classify(&d.gram(), &opts), classify(&p.gram(), &opts));
        for other in [&b, &c] {
            prop_assert_eq!(a.sep_reachable, other.sep_reachable);
            prop_assert_eq!(a.locc_reachable, other.locc_reachable);
            prop_assert_eq!(a.locc_convertible, other.locc_convertible);
            prop_assert_eq!(a.isolated, other.isolated);
        }
        prop_assert!(lu_equivalent(&s, &d).unwrap());
    }

    #[test]
    fn standard_form_is_a_fixed_point(k in kind(), seed in any::<u64>()) {
        let s = generate_state(k, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let sf = standard_form(&s).unwrap();
        let again = standard_form(&sf.to_state().unwrap()).unwrap();
        prop_assert!(sf.dist(&again) < 1e-9);
    }
}

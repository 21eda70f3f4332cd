use qutrit_mes::classify::{classify, ClassifyOptions};
use qutrit_mes::generate::{generate_state, StateKind};
use qutrit_mes::protocol::{locc_protocol_reach, simulate};
use qutrit_mes::seed::verify_symmetries;
use qutrit_mes::state::{lu_equivalent, standard_form};
use qutrit_mes::{GenericStateF32, SeedParamsF32};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn single_precision_pipeline() {
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    let opts = ClassifyOptions::default();
    for kind in [StateKind::CaseI, StateKind::CaseII, StateKind::Dense] {
        let s64 = generate_state(kind, &mut rng).unwrap();
        let s: GenericStateF32 = s64.cast();
        let seed: SeedParamsF32 = s.seed;
        assert!(verify_symmetries(&seed).unwrap() < 1e-5);
        let sf = standard_form(&s).unwrap();
        let back = standard_form(&sf.to_state().unwrap()).unwrap();
        assert!(sf.dist(&back) < 1e-4);
        assert!(lu_equivalent(&s, &sf.to_state().unwrap()).unwrap());
        assert_eq!(classify(&s.gram(), &opts).locc_reachable, classify(&s64.gram(), &opts).locc_reachable, "{}", kind.name());
    }
}

#[test]
fn single_precision_protocol_simulates() {
    let mut rng = ChaCha8Rng::seed_from_u64(52);
    let t: GenericStateF32 = generate_state(StateKind::CaseII, &mut rng).unwrap().cast();
    let p = locc_protocol_reach(&t, &ClassifyOptions::default()).unwrap();
    let rep = simulate(&p);
    assert!((rep.probability_sum - 1.0).abs() < 1e-4);
    assert!(rep.max_residual() < 1e-3);
}

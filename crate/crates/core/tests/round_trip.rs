use proptest::prelude::*;
use qutrit_mes::classify::ClassifyOptions;
use qutrit_mes::generate::{generate_state, StateKind};
use qutrit_mes::io::{Metadata, ProtocolFile, StateFile};
use qutrit_mes::protocol::{locc_convert_step, locc_protocol_reach, sep_map_for_target, simulate, Epsilon};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn kind() -> impl Strategy<Value = StateKind> {
    prop::sample::select(StateKind::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn state_files_round_trip_exactly(k in kind(), seed in any::<u64>(), label in "[a-z]{0,8}") {
        let s = generate_state(k, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let file = StateFile::from_state(&s, Some(Metadata { label: Some(label), provenance: Some("proptest".into()) }));
        let (parsed, back) = StateFile::parse(&file.to_json()).unwrap();
        prop_assert_eq!(parsed, file);
        prop_assert_eq!(back, s);
    }

    #[test]
    fn protocol_files_round_trip_and_still_simulate(seed in any::<u64>(), which in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let opts = ClassifyOptions::default();
        let p = match which {
            0 => sep_map_for_target(&generate_state(StateKind::CaseI, &mut rng).unwrap(), &opts).unwrap(),
            1 => locc_protocol_reach(&generate_state(StateKind::CaseII, &mut rng).unwrap(), &opts).unwrap(),
            _ => locc_convert_step(&generate_state(StateKind::Convertible, &mut rng).unwrap(), None, Epsilon::Auto, &opts).unwrap().0,
        };
        let file = ProtocolFile::from_protocol(&p);
        let (parsed, back) = ProtocolFile::parse(&file.to_json()).unwrap();
        prop_assert_eq!(&parsed, &file);
        prop_assert_eq!(back.construction, p.construction);
        prop_assert_eq!(back.branch_count(), p.branch_count());
        let rep = simulate(&back);
        prop_assert!(rep.all_match);
        prop_assert!((rep.probability_sum - 1.0).abs() <= 1e-10);
    }
}

#[test]
fn unknown_fields_are_rejected() {
    let s = generate_state(StateKind::Seed, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
    let json = StateFile::from_state(&s, None).to_json().replacen('{', "{\n  \"extra\": 1,", 1);
    let e = StateFile::parse(&json).unwrap_err().to_string();
    assert!(e.contains("extra"), "{e}");
}

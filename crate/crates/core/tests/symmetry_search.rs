use qutrit_mes::generate::random_generic_seed;
use qutrit_mes::oracle::{numeric_symmetry_search, symmetry_search_from, SymmetryBudget};
use qutrit_mes::pauli::{pauli, PauliIndex};
use qutrit_mes::Mat3;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn random_starts_recover_exactly_the_pauli_group() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let seed = random_generic_seed(&mut rng).unwrap();
    let out = numeric_symmetry_search(&seed, &SymmetryBudget { starts: 200, ..SymmetryBudget::default() });
    assert!(out.matches_pauli_group, "{} clusters, {} converged", out.clusters.len(), out.converged);
    assert_eq!(out.clusters.len(), 9);
    let mut found: Vec<PauliIndex> = out.clusters.iter().filter_map(|c| c.pauli).collect();
    found.sort_by_key(|k| k.pos());
    assert_eq!(found, PauliIndex::ALL.to_vec());
}

#[test]
fn perturbed_pauli_starts_converge_back() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let seed = random_generic_seed(&mut rng).unwrap();
    let k = PauliIndex::new(2, 1);
    let s: Mat3<f64> = pauli(k);
    let bump = Mat3::from_fn(|i, j| qutrit_mes::scalar::C::new(0.01 * (i as f64 - j as f64), 0.005));
    let out = symmetry_search_from(&seed, &[[s + bump, s, s - bump]], 200);
    assert_eq!(out.converged, 1);
    assert_eq!(out.clusters[0].pauli, Some(k));
}

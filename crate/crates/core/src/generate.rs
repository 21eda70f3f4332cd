//! Random generic states realizing each structural class, verified by the classifier.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::classify::{classify, ClassifyOptions, SepCase, ALL_PERMUTATIONS};
use crate::error::{Error, Result};
use crate::linalg::Mat3;
use crate::pauli::{pauli, PauliIndex};
use crate::protocol::unitary_part;
use crate::scalar::C;
use crate::seed::{check_generic, SeedParams, DEFAULT_GENERICITY_MARGIN};
use crate::state::{positive_factor, GenericState};

pub const MAX_REJECTIONS: usize = 10_000;

/// Upper bound on `Σ 2|c_k|` for span Hermitians, keeping `I/3 + Σ(c_k S_k + h.c.)` positive.
pub const SPAN_BUDGET: f64 = 0.3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StateKind {
    Seed,
    Generic,
    CaseI,
    CaseII,
    Lemma3,
    Convertible,
    Dense,
}

impl StateKind {
    pub const ALL: [StateKind; 7] =
        [StateKind::Seed, StateKind::Generic, StateKind::CaseI, StateKind::CaseII, StateKind::Lemma3, StateKind::Convertible, StateKind::Dense];

    pub fn name(self) -> &'static str {
        match self {
            StateKind::Seed => "seed",
            StateKind::Generic => "generic",
            StateKind::CaseI => "case-i",
            StateKind::CaseII => "case-ii",
            StateKind::Lemma3 => "lemma3",
            StateKind::Convertible => "convertible",
            StateKind::Dense => "dense",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }
}

fn gaussian_c<R: Rng + ?Sized>(rng: &mut R) -> C<f64> {
    C::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Gaussian seed parameters, resampled until every exclusion condition clears the margin.
pub fn random_generic_seed<R: Rng + ?Sized>(rng: &mut R) -> Result<SeedParams<f64>> {
    let mut worst = f64::INFINITY;
    for _ in 0..MAX_REJECTIONS {
        let p = SeedParams::new(gaussian_c(rng), gaussian_c(rng), gaussian_c(rng));
        let report = check_generic(&p, DEFAULT_GENERICITY_MARGIN);
        if report.generic {
            return Ok(p);
        }
        worst = worst.min(report.margin);
    }
    Err(Error::Generation { attempts: MAX_REJECTIONS, reason: format!("genericity margin {worst:e} below {DEFAULT_GENERICITY_MARGIN:e}") })
}

pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R) -> Mat3<f64> {
    loop {
        let m = Mat3::from_fn(|_, _| gaussian_c(rng));
        if let Ok(u) = unitary_part(&m) {
            return u;
        }
    }
}

/// Well-conditioned factor with a dense Gram matrix.
pub fn random_dense_factor<R: Rng + ?Sized>(rng: &mut R) -> Mat3<f64> {
    loop {
        let m = Mat3::identity() + Mat3::from_fn(|_, _| gaussian_c(rng)).scale(0.4);
        let (vals, _) = (m.adjoint() * m).hermitian_eigen();
        if vals[0] > 1e-2 * vals[2] {
            return m;
        }
    }
}

/// `I/3 + Σ_{pairs}(c_u S_u + h.c.)` with one coefficient per listed pair, every `|c_u|`
/// bounded away from zero and `Σ 2|c_u| ≤ 0.3`.
pub fn random_span_hermitian<R: Rng + ?Sized>(rng: &mut R, pairs: &[PauliIndex]) -> Mat3<f64> {
    let mut m = Mat3::identity().scale(1.0 / 3.0);
    if pairs.is_empty() {
        return m;
    }
    let cap = SPAN_BUDGET / (2.0 * pairs.len() as f64);
    for &u in pairs {
        let r = rng.random_range(0.2 * cap..cap);
        let z = C::from_polar(r, rng.random_range(0.0..std::f64::consts::TAU));
        let t = pauli::<f64>(u).scale_c(z);
        m = m + t + t.adjoint();
    }
    m
}

/// A factor whose Gram matrix is a random Hermitian supported on `pairs`, dressed by a
/// random unitary on the left.
pub fn random_span_factor<R: Rng + ?Sized>(rng: &mut R, pairs: &[PauliIndex]) -> Mat3<f64> {
    let h = random_span_hermitian(rng, pairs);
    let root = positive_factor(&h).expect("span Hermitian within budget is positive");
    random_unitary(rng) * root
}

fn shuffled_pairs<R: Rng + ?Sized>(rng: &mut R) -> Vec<PauliIndex> {
    let mut p = PauliIndex::PAIRS.to_vec();
    p.shuffle(rng);
    p
}

fn random_perm<R: Rng + ?Sized>(rng: &mut R) -> [usize; 3] {
    ALL_PERMUTATIONS[rng.random_range(0..6)]
}

/// Raw factors in role order before relabeling.
fn role_factors<R: Rng + ?Sized>(kind: StateKind, rng: &mut R) -> [Mat3<f64>; 3] {
    match kind {
        StateKind::Seed => [Mat3::identity(); 3],
        StateKind::Generic | StateKind::Dense => std::array::from_fn(|_| random_dense_factor(rng)),
        StateKind::CaseI => {
            let pairs = shuffled_pairs(rng);
            let n1 = rng.random_range(1..=3);
            let n2 = rng.random_range(1..=4 - n1);
            [random_span_factor(rng, &pairs[..n1]), random_span_factor(rng, &pairs[n1..n1 + n2]), random_unitary(rng)]
        }
        StateKind::Lemma3 => {
            let pairs = shuffled_pairs(rng);
            [random_span_factor(rng, &pairs[..2]), random_span_factor(rng, &pairs[2..]), random_unitary(rng)]
        }
        StateKind::CaseII => {
            let w = PauliIndex::PAIRS[rng.random_range(0..4)];
            [random_dense_factor(rng), random_span_factor(rng, &[w]), random_span_factor(rng, &[w])]
        }
        StateKind::Convertible => {
            let w = PauliIndex::PAIRS[rng.random_range(0..4)];
            let g1 = if rng.random_bool(0.5) { random_span_factor(rng, &[w]) } else { random_dense_factor(rng) };
            [g1, random_span_factor(rng, &[w]), random_span_factor(rng, &[w])]
        }
    }
}

/// Whether a state belongs to the requested class according to the classifier.
pub fn satisfies_kind(s: &GenericState<f64>, kind: StateKind, opts: &ClassifyOptions) -> bool {
    let cl = classify(&s.gram(), opts);
    if cl.support.near_boundary {
        return false;
    }
    match kind {
        StateKind::Seed => cl.support.pairs == [0; 3],
        StateKind::Generic => true,
        StateKind::CaseI => cl.sep_cases.iter().any(|m| m.case == SepCase::I),
        StateKind::CaseII => cl.locc_reachable,
        StateKind::Lemma3 => cl.lemma3_family && cl.sep_only,
        StateKind::Convertible => cl.locc_convertible,
        StateKind::Dense => cl.isolated,
    }
}

/// Random state of the requested class over a random generic seed, relabeled by a random
/// party permutation (except for the seed kind).
pub fn generate_state<R: Rng + ?Sized>(kind: StateKind, rng: &mut R) -> Result<GenericState<f64>> {
    generate_over(kind, None, rng)
}

/// Like [`generate_state`] over a fixed generic seed, so that the output can be compared
/// with other states over the same seed.
pub fn generate_state_with_seed<R: Rng + ?Sized>(kind: StateKind, seed: SeedParams<f64>, rng: &mut R) -> Result<GenericState<f64>> {
    let report = check_generic(&seed, DEFAULT_GENERICITY_MARGIN);
    if !report.generic {
        return Err(Error::NotGeneric(format!("margin {:e} below {DEFAULT_GENERICITY_MARGIN:e}", report.margin)));
    }
    generate_over(kind, Some(seed), rng)
}

fn generate_over<R: Rng + ?Sized>(kind: StateKind, fixed: Option<SeedParams<f64>>, rng: &mut R) -> Result<GenericState<f64>> {
    let opts = ClassifyOptions::default();
    let mut last = String::new();
    for _ in 0..MAX_REJECTIONS {
        let perm = if kind == StateKind::Seed { [0, 1, 2] } else { random_perm(rng) };
        // odd relabelings swap b and c, so start from the swapped seed to land on `fixed`
        let seed = match fixed {
            Some(s) if is_odd(perm) => s.swapped(),
            Some(s) => s,
            None => random_generic_seed(rng)?,
        };
        let g = role_factors(kind, rng);
        let state = match GenericState::new(seed, g) {
            Ok(s) => s.permuted(perm),
            Err(e) => {
                last = e.to_string();
                continue;
            }
        };
        if satisfies_kind(&state, kind, &opts) {
            return Ok(state);
        }
        last = format!("classifier rejected a {} candidate", kind.name());
    }
    Err(Error::Generation { attempts: MAX_REJECTIONS, reason: last })
}

fn is_odd(perm: [usize; 3]) -> bool {
    ALL_PERMUTATIONS[3..].contains(&perm)
}

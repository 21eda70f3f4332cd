//! Separable-operation feasibility between two states of one SLOCC class.
//!
//! A transformation `g|ψ⟩ → h|ψ⟩` exists iff some probability vector `p` over the nine
//! symmetries satisfies `Σ_k p_k (S_k†)^{⊗3} H (S_k)^{⊗3} = G`. The engine solves this
//! linear system exactly on the 27×27 operators and describes the solution polytope.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{solve_real_square, Mat3, RealSvd};
use crate::pauli::{conj_phase, pauli, PauliCoords, PauliIndex};
use crate::scalar::{Real, C};
use crate::seed::SeedParams;
use crate::state::{lu_equivalent_grams, same_seed, GenericState, GramTriple};
use crate::tensor::{kron3, Op27};
use crate::tolerance::tolerance;

/// Residual (Frobenius norm on the 27×27 operators) above which the system is infeasible.
pub const FEASIBILITY_TOLERANCE: f64 = 1e-9;

/// Relative singular-value cutoff for rank decisions.
pub const RANK_TOLERANCE: f64 = 1e-9;

/// Slack allowed on `p_k ≥ 0` before a point is declared outside the simplex.
pub const SIMPLEX_SLACK: f64 = 1e-9;

/// Probabilities over the nine symmetries, in canonical index order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbabilityVector<T> {
    pub p: [T; 9],
}

impl<T: Real> ProbabilityVector<T> {
    /// Validates non-negativity and normalization (±1e-12).
    pub fn new(p: [T; 9]) -> Result<Self> {
        if p.iter().any(|x| !x.is_finite() || *x < T::zero()) {
            return Err(Error::InvalidProbability(format!("negative or non-finite entry in {p:?}")));
        }
        let s: T = p.iter().copied().sum();
        if (s - T::one()).abs() > T::tol(1e-12) {
            return Err(Error::InvalidProbability(format!("entries sum to {s}")));
        }
        Ok(ProbabilityVector { p })
    }

    pub fn uniform() -> Self {
        ProbabilityVector { p: [T::one() / T::lit(9.0); 9] }
    }

    /// All weight on one symmetry.
    pub fn delta(k: PauliIndex) -> Self {
        let mut p = [T::zero(); 9];
        p[k.pos()] = T::one();
        ProbabilityVector { p }
    }

    /// Uniform weight on `{0, w, −w}`.
    pub fn span_uniform(w: PauliIndex) -> Self {
        Self::span_weighted(w, T::one() / T::lit(3.0))
    }

    /// `p_0 = 1 − 2q`, `p_w = p_{−w} = q`.
    pub fn span_weighted(w: PauliIndex, q: T) -> Self {
        let mut p = [T::zero(); 9];
        p[0] = T::one() - q - q;
        p[w.pos()] = q;
        p[(-w).pos()] = q;
        ProbabilityVector { p }
    }

    pub fn get(&self, k: PauliIndex) -> T {
        self.p[k.pos()]
    }

    pub fn max_dist(&self, other: &Self) -> T {
        self.p.iter().zip(&other.p).map(|(a, b)| (*a - *b).abs()).fold(T::zero(), T::max)
    }
}

/// `η_l = Σ_k p_k e^{iφ_{lk}}`, indexed canonically.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EtaVector<T> {
    pub eta: [C<T>; 9],
}

impl<T: Real> EtaVector<T> {
    pub fn get(&self, k: PauliIndex) -> C<T> {
        self.eta[k.pos()]
    }
}

pub fn eta_from_p<T: Real>(p: &ProbabilityVector<T>) -> EtaVector<T> {
    EtaVector {
        eta: std::array::from_fn(|l| {
            let l = PauliIndex::from_pos(l);
            PauliIndex::ALL.iter().fold(C::zero(), |acc, k| acc + conj_phase::<T>(l, *k) * p.get(*k))
        }),
    }
}

/// `Σ_k p_k S_k† H_i S_k`.
pub fn depolarize<T: Real>(h: &Mat3<T>, p: &ProbabilityVector<T>) -> Mat3<T> {
    PauliIndex::ALL.iter().fold(Mat3::zeros(), |acc, k| {
        let pk = p.get(*k);
        if pk == T::zero() {
            return acc;
        }
        let s = pauli::<T>(*k);
        acc + (s.adjoint() * *h * s).scale(pk)
    })
}

/// The initial Gram triple forced by a witness: each `G_i` is the depolarized `H_i`.
pub fn induced_initial<T: Real>(h: &GramTriple<T>, p: &ProbabilityVector<T>) -> GramTriple<T> {
    GramTriple::from_grams(h.g.map(|m| depolarize(&m, p)))
}

#[derive(Clone, Debug, PartialEq)]
pub enum EtaViolation<T> {
    /// `η_l η_m η_n ≠ η_{l+m+n}` for a supported triple.
    Triple { l: PauliIndex, m: PauliIndex, n: PauliIndex, residual: T },
    /// `η_l η_m ≠ η_{l+m}` for supported entries of parties `i ≠ j`.
    Pair { parties: (usize, usize), l: PauliIndex, m: PauliIndex, residual: T },
}

#[derive(Clone, Debug, PartialEq)]
pub struct EtaCheck<T> {
    pub ok: bool,
    pub violations: Vec<EtaViolation<T>>,
}

/// Coordinate support (including the identity) above the relative tolerance.
fn support_with_zero<T: Real>(c: &PauliCoords<T>) -> Vec<PauliIndex> {
    let scale = c.c.iter().map(|z| z.norm()).fold(T::zero(), T::max);
    let thr = T::tol(tolerance()) * scale;
    PauliIndex::ALL.into_iter().filter(|k| k.is_zero() || c.get(*k).norm() > thr).collect()
}

/// Checks the multiplicative η-conditions on every supported index triple and pair.
pub fn check_eta_conditions<T: Real>(h: &[PauliCoords<T>; 3], eta: &EtaVector<T>) -> EtaCheck<T> {
    let tol = T::tol(1e-9);
    let supp: Vec<Vec<PauliIndex>> = h.iter().map(support_with_zero).collect();
    let mut violations = Vec::new();
    for &l in &supp[0] {
        for &m in &supp[1] {
            for &n in &supp[2] {
                let residual = (eta.get(l) * eta.get(m) * eta.get(n) - eta.get(l + m + n)).norm();
                if residual > tol {
                    violations.push(EtaViolation::Triple { l, m, n, residual });
                }
            }
        }
    }
    // pair form: ĥ^{(i)} (ĥ^{(j)})ᵀ ⊙ (N₁ − N₂) = 0 with N₁ = ηηᵀ, [N₂]_{lm} = η_{l+m}
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        for &l in &supp[i] {
            for &m in &supp[j] {
                let n1 = eta.get(l) * eta.get(m);
                let n2 = eta.get(l + m);
                let residual = (n1 - n2).norm();
                if residual > tol {
                    violations.push(EtaViolation::Pair { parties: (i + 1, j + 1), l, m, residual });
                }
            }
        }
    }
    EtaCheck { ok: violations.is_empty(), violations }
}

/// A pair of states over a common seed, analysed through their Gram triples.
#[derive(Clone, Debug)]
pub struct SepInstance<T> {
    pub seed: SeedParams<T>,
    /// Initial state Gram triple `G`.
    pub initial: GramTriple<T>,
    /// Final state Gram triple `H`.
    pub target: GramTriple<T>,
    pub initial_factors: Option<[Mat3<T>; 3]>,
    pub target_factors: Option<[Mat3<T>; 3]>,
}

impl<T: Real> SepInstance<T> {
    pub fn from_states(initial: &GenericState<T>, target: &GenericState<T>) -> Result<Self> {
        let seed = same_seed(&initial.seed, &target.seed)?;
        Ok(SepInstance {
            seed,
            initial: initial.gram(),
            target: target.gram(),
            initial_factors: Some(initial.g),
            target_factors: Some(target.g),
        })
    }

    pub fn from_grams(seed: SeedParams<T>, initial: GramTriple<T>, target: GramTriple<T>) -> Self {
        SepInstance { seed, initial, target, initial_factors: None, target_factors: None }
    }
}

#[derive(Clone, Debug)]
pub struct SepFeasibility<T> {
    pub feasible: bool,
    pub witness: Option<ProbabilityVector<T>>,
    /// Least-squares residual of the linear system (Frobenius norm on 27×27 operators).
    pub residual: T,
    /// Dimension of the affine solution set before intersecting with the simplex.
    pub affine_dim: usize,
    pub vertices: Vec<ProbabilityVector<T>>,
    pub unique: bool,
    /// Some witness induces an initial state that is not LU-equivalent to the target.
    pub nontrivial: bool,
    /// Per vertex: induced initial state LU-equivalent to the target.
    pub vertex_trivial: Vec<bool>,
    pub eta: Option<EtaVector<T>>,
    pub eta_check: Option<EtaCheck<T>>,
}

/// The nine operators `D_k = ⊗_i S_k† H_i S_k`.
pub fn conjugated_targets<T: Real>(h: &GramTriple<T>) -> Vec<Op27<T>> {
    PauliIndex::ALL
        .iter()
        .map(|k| {
            let s = pauli::<T>(*k);
            let c = |m: &Mat3<T>| s.adjoint() * *m * s;
            kron3(&c(&h.g[0]), &c(&h.g[1]), &c(&h.g[2]))
        })
        .collect()
}

/// Real coordinates of a hermitian 27×27 operator: diagonal, then `√2·Re`, `√2·Im` of the
/// strict upper triangle; the map is an isometry for the Frobenius norm.
pub fn hermitian_vectorize<T: Real>(m: &Op27<T>) -> Vec<T> {
    let r2 = T::lit(2.0).sqrt();
    let mut out = Vec::with_capacity(729);
    for i in 0..27 {
        out.push(m.get(i, i).re);
    }
    for i in 0..27 {
        for j in i + 1..27 {
            let z = (m.get(i, j) + m.get(j, i).conj()) * T::lit(0.5);
            out.push(z.re * r2);
            out.push(z.im * r2);
        }
    }
    out
}

pub fn sep_feasible<T: Real>(inst: &SepInstance<T>) -> Result<SepFeasibility<T>> {
    for t in [&inst.initial, &inst.target] {
        let min = t.min_eigenvalue();
        if !(min > T::zero()) {
            return Err(Error::NotPositive { min_eig: min.as_f64() });
        }
    }
    let g_op = kron3(&inst.initial.g[0], &inst.initial.g[1], &inst.initial.g[2]);
    let mut columns: Vec<Vec<T>> = conjugated_targets(&inst.target).iter().map(hermitian_vectorize).collect();
    let mut rhs = hermitian_vectorize(&g_op);
    // explicit normalization row, weighted like one operator entry
    let weight = g_op.frobenius();
    for col in columns.iter_mut() {
        col.push(weight);
    }
    rhs.push(weight);

    let svd = RealSvd::new(&columns);
    let rank_tol = T::tol(RANK_TOLERANCE);
    let p_star = svd.solve(&rhs, rank_tol);
    let residual = {
        let mut r = T::zero();
        for row in 0..rhs.len() {
            let ax: T = (0..9).map(|k| columns[k][row] * p_star[k]).sum();
            r = r + (ax - rhs[row]).powi(2);
        }
        r.sqrt()
    };
    let null = svd.null_space(rank_tol);
    let affine_dim = null.len();

    let infeasible = |residual: T, affine_dim: usize| SepFeasibility {
        feasible: false,
        witness: None,
        residual,
        affine_dim,
        vertices: Vec::new(),
        unique: false,
        nontrivial: false,
        vertex_trivial: Vec::new(),
        eta: None,
        eta_check: None,
    };
    if !(residual <= T::tol(FEASIBILITY_TOLERANCE)) {
        return Ok(infeasible(residual, affine_dim));
    }

    let vertices = simplex_vertices(&p_star, &null);
    if vertices.is_empty() {
        return Ok(infeasible(residual, affine_dim));
    }
    let vertex_trivial: Vec<bool> = vertices
        .iter()
        .map(|p| lu_equivalent_grams(&inst.seed, &induced_initial(&inst.target, p), &inst.target))
        .collect::<Result<_>>()?;
    let nontrivial = vertex_trivial.iter().any(|t| !t);
    let witness = vertices.iter().zip(&vertex_trivial).find(|(_, t)| !**t).map(|(p, _)| *p).unwrap_or(vertices[0]);
    let eta = eta_from_p(&witness);
    let eta_check = check_eta_conditions(&inst.target.coords, &eta);
    Ok(SepFeasibility {
        feasible: true,
        witness: Some(witness),
        residual,
        affine_dim,
        unique: vertices.len() == 1,
        vertices,
        nontrivial,
        vertex_trivial,
        eta: Some(eta),
        eta_check: Some(eta_check),
    })
}

/// Vertices of `{p* + N t} ∩ {p ≥ 0}` for a null-space basis `N` (columns in `null`).
///
/// Each vertex has `dim` linearly independent active constraints `p_k = 0`; all subsets
/// of that size are tried and the feasible solutions deduplicated.
pub fn simplex_vertices<T: Real>(p_star: &[T], null: &[Vec<T>]) -> Vec<ProbabilityVector<T>> {
    let d = null.len();
    let slack = T::tol(SIMPLEX_SLACK);
    let point = |t: &[T]| -> [T; 9] { std::array::from_fn(|k| p_star[k] + (0..d).map(|j| null[j][k] * t[j]).sum::<T>()) };
    let mut out: Vec<ProbabilityVector<T>> = Vec::new();
    let mut accept = |p: [T; 9]| {
        if p.iter().any(|x| *x < -slack) {
            return;
        }
        let mut q = p.map(|x| x.max(T::zero()));
        let s: T = q.iter().copied().sum();
        for x in q.iter_mut() {
            *x = *x / s;
        }
        let cand = ProbabilityVector { p: q };
        if !out.iter().any(|v| v.max_dist(&cand) <= T::tol(1e-9)) {
            out.push(cand);
        }
    };
    if d == 0 {
        accept(point(&[]));
        return out;
    }
    for mask in 0u32..(1 << 9) {
        if mask.count_ones() as usize != d {
            continue;
        }
        let zeros: Vec<usize> = (0..9).filter(|k| mask & (1 << k) != 0).collect();
        let a: Vec<Vec<T>> = zeros.iter().map(|&k| (0..d).map(|j| null[j][k]).collect()).collect();
        let b: Vec<T> = zeros.iter().map(|&k| -p_star[k]).collect();
        if let Some(t) = solve_real_square(&a, &b, T::tol(1e-10)) {
            accept(point(&t));
        }
    }
    out.sort_by(|x, y| {
        for k in 0..9 {
            match y.p[k].partial_cmp(&x.p[k]) {
                Some(std::cmp::Ordering::Equal) | None => {}
                Some(o) => return o,
            }
        }
        std::cmp::Ordering::Equal
    });
    out
}

/// Frobenius residual of `Σ p_k (S_k†)^{⊗3} H (S_k)^{⊗3} − G` on the 27×27 operators.
pub fn witness_residual<T: Real>(g: &GramTriple<T>, h: &GramTriple<T>, p: &ProbabilityVector<T>) -> T {
    let lhs = conjugated_targets(h).iter().zip(&p.p).fold(Op27::zeros(), |acc, (d, pk)| &acc + &d.scale(*pk));
    lhs.dist(&kron3(&g.g[0], &g.g[1], &g.g[2]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;
    use crate::state::{positive_factor, GenericState};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn s2() -> SeedParams<f64> {
        SeedParams::from_real(2.0, 3.0, 5.0).canonical().unwrap()
    }

    fn span_herm(pairs: &[(PauliIndex, C<f64>)]) -> Mat3<f64> {
        let mut m = Mat3::identity().scale(1.0 / 3.0);
        for (k, z) in pairs {
            let t = pauli::<f64>(*k).scale_c(*z);
            m = m + t + t.adjoint();
        }
        m
    }

    fn rand_dense(rng: &mut ChaCha8Rng) -> Mat3<f64> {
        let a = Mat3::from_fn(|_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        a.adjoint() * a + Mat3::identity().scale(0.2)
    }

    #[test]
    fn depolarize_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let h = rand_dense(&mut rng);
        let h = h.scale(1.0 / h.trace().re);
        assert!(depolarize(&h, &ProbabilityVector::uniform()).dist(&Mat3::identity().scale(1.0 / 3.0)) < 1e-14);
        assert!(depolarize(&h, &ProbabilityVector::delta(PauliIndex::ZERO)).dist(&h) < 1e-15);
        let w = PauliIndex::new(1, 1);
        let hw = span_herm(&[(w, c(0.05, -0.07))]);
        assert!(depolarize(&hw, &ProbabilityVector::span_uniform(w)).dist(&hw) < 1e-14);
    }

    #[test]
    fn eta_examples() {
        let e = eta_from_p(&ProbabilityVector::<f64>::uniform());
        assert!((e.eta[0] - c(1.0, 0.0)).norm() < 1e-15);
        assert!(e.eta[1..].iter().all(|z| z.norm() < 1e-15));
        let e = eta_from_p(&ProbabilityVector::<f64>::delta(PauliIndex::ZERO));
        assert!(e.eta.iter().all(|z| (z - c(1.0, 0.0)).norm() < 1e-15));
        let w = PauliIndex::new(0, 1);
        let e = eta_from_p(&ProbabilityVector::<f64>::span_uniform(w));
        for k in PauliIndex::ALL {
            if k.is_zero() || k == w || k == -w {
                assert!((e.get(k) - c(1.0, 0.0)).norm() < 1e-14);
            } else {
                assert!(e.get(k).norm() < 1.0 - 1e-6);
            }
        }
    }

    #[test]
    fn induced_coordinates_scale_by_eta() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let h = GramTriple::from_grams([rand_dense(&mut rng), rand_dense(&mut rng), rand_dense(&mut rng)]);
        let p = ProbabilityVector::new([0.3, 0.05, 0.1, 0.2, 0.0, 0.15, 0.1, 0.05, 0.05]).unwrap();
        let eta = eta_from_p(&p);
        let g = induced_initial(&h, &p);
        for i in 0..3 {
            for k in PauliIndex::ALL {
                assert!((g.coords[i].get(k) - eta.get(k) * h.coords[i].get(k)).norm() < 1e-14);
            }
        }
        let g = induced_initial(&h, &ProbabilityVector::uniform());
        assert!(g.dist(&GramTriple::seed()) < 1e-14);
        let g = induced_initial(&h, &ProbabilityVector::delta(PauliIndex::ZERO));
        assert!(g.dist(&h) < 1e-15);
    }

    #[test]
    fn eta_condition_examples() {
        let h = GramTriple::from_grams([
            span_herm(&[(PauliIndex::new(1, 0), c(0.05, 0.02))]),
            span_herm(&[(PauliIndex::new(0, 1), c(0.03, -0.04))]),
            Mat3::identity(),
        ]);
        assert!(check_eta_conditions(&h.coords, &eta_from_p(&ProbabilityVector::uniform())).ok);
        assert!(check_eta_conditions(&h.coords, &eta_from_p(&ProbabilityVector::delta(PauliIndex::ZERO))).ok);
        let k = PauliIndex::new(1, 0);
        let shared = GramTriple::from_grams([span_herm(&[(k, c(0.05, 0.0))]), span_herm(&[(k, c(0.04, 0.01))]), Mat3::identity()]);
        let check = check_eta_conditions(&shared.coords, &eta_from_p(&ProbabilityVector::uniform()));
        assert!(!check.ok);
        assert!(check.violations.iter().any(|v| matches!(v, EtaViolation::Pair { l, m, .. } if *l == k && *m == -k)));
    }

    #[test]
    fn identical_states_are_trivially_feasible() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = GramTriple::from_grams([rand_dense(&mut rng), rand_dense(&mut rng), rand_dense(&mut rng)]);
        let f = sep_feasible(&SepInstance::from_grams(s2(), h, h)).unwrap();
        assert!(f.feasible);
        assert!(!f.nontrivial);
        assert!(f.unique);
        let p = f.witness.unwrap();
        assert!((p.p[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn sep_only_family_has_unique_uniform_witness() {
        let (u1, w1, u2, w2) = (PauliIndex::new(1, 0), PauliIndex::new(0, 1), PauliIndex::new(1, 1), PauliIndex::new(2, 1));
        let h = GramTriple::from_grams([
            span_herm(&[(u1, c(0.04, 0.03)), (w1, c(-0.05, 0.02))]),
            span_herm(&[(u2, c(0.03, -0.06)), (w2, c(0.02, 0.05))]),
            Mat3::identity(),
        ]);
        let f = sep_feasible(&SepInstance::from_grams(s2(), GramTriple::seed(), h)).unwrap();
        assert!(f.feasible && f.unique && f.nontrivial, "{f:?}");
        assert!(f.witness.unwrap().max_dist(&ProbabilityVector::uniform()) < 1e-8);
        assert!(f.eta_check.unwrap().ok);
    }

    #[test]
    fn dense_from_seed_is_infeasible() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let h = GramTriple::from_grams([rand_dense(&mut rng), rand_dense(&mut rng), rand_dense(&mut rng)]);
        let f = sep_feasible(&SepInstance::from_grams(s2(), GramTriple::seed(), h)).unwrap();
        assert!(!f.feasible);
        assert!(f.residual > 1e-6);
    }

    #[test]
    fn case_i_covering_all_pairs_forces_uniform() {
        let h = GramTriple::from_grams([
            span_herm(&[(PauliIndex::new(1, 0), c(0.05, 0.02))]),
            span_herm(&[(PauliIndex::new(0, 1), c(0.03, -0.04))]),
            Mat3::identity(),
        ]);
        let f = sep_feasible(&SepInstance::from_grams(s2(), GramTriple::seed(), h)).unwrap();
        assert!(f.feasible && f.nontrivial && f.unique);
        assert!(f.witness.unwrap().max_dist(&ProbabilityVector::uniform()) < 1e-9);
    }

    #[test]
    fn single_party_support_has_polytope() {
        let h = GramTriple::from_grams([span_herm(&[(PauliIndex::new(1, 0), c(0.05, 0.02))]), Mat3::identity(), Mat3::identity()]);
        let f = sep_feasible(&SepInstance::from_grams(s2(), GramTriple::seed(), h)).unwrap();
        assert!(f.feasible && f.nontrivial);
        assert!(f.affine_dim > 0);
        assert!(!f.unique);
        for v in &f.vertices {
            assert!(witness_residual(&GramTriple::seed(), &h, v) <= 1e-9);
            let eta = eta_from_p(v);
            assert!(eta.get(PauliIndex::new(1, 0)).norm() < 1e-9);
        }
    }

    #[test]
    fn case_ii_constructed_initial() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let w = PauliIndex::new(1, 0);
        let h = GramTriple::from_grams([rand_dense(&mut rng), span_herm(&[(w, c(0.05, 0.03))]), span_herm(&[(w, c(-0.02, 0.06))])]);
        let g = induced_initial(&h, &ProbabilityVector::span_uniform(w));
        let f = sep_feasible(&SepInstance::from_grams(s2(), g, h)).unwrap();
        assert!(f.feasible && f.nontrivial, "{f:?}");
        assert!(witness_residual(&g, &h, &f.witness.unwrap()) <= 1e-9);
    }

    #[test]
    fn seed_mismatch_rejected() {
        let a = GenericState::seed_state(s2());
        let b = GenericState::seed_state(SeedParams::from_real(1.0, 3.0, 5.0));
        assert!(matches!(SepInstance::from_states(&a, &b), Err(Error::SeedMismatch(_))));
    }

    #[test]
    fn non_positive_rejected() {
        let bad = GramTriple::from_grams([Mat3::diag_real([1.0, 1.0, -0.5]), Mat3::identity(), Mat3::identity()]);
        assert!(sep_feasible(&SepInstance::from_grams(s2(), GramTriple::seed(), bad)).is_err());
    }

    #[test]
    fn vectorize_is_isometry() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let a = rand_dense(&mut rng);
        let b = rand_dense(&mut rng);
        let op = kron3(&a, &b, &positive_factor(&a).unwrap());
        let v = hermitian_vectorize(&op);
        let n: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((n - op.frobenius()).abs() < 1e-12 * n);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn eta_invariants(raw in proptest::array::uniform9(0.0f64..1.0)) {
            let s: f64 = raw.iter().sum::<f64>() + 1e-9;
            let p = ProbabilityVector { p: raw.map(|x| (x + 1e-9 / 9.0) / s) };
            let e = eta_from_p(&p);
            prop_assert!((e.eta[0] - c(1.0, 0.0)).norm() < 1e-12);
            for k in PauliIndex::ALL {
                prop_assert!((e.get(k).conj() - e.get(-k)).norm() < 1e-12);
                prop_assert!(e.get(k).norm() <= 1.0 + 1e-12);
            }
        }

        #[test]
        fn induced_marginals_scale_by_eta(raw in proptest::array::uniform9(0.0f64..1.0), seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s: f64 = raw.iter().sum::<f64>() + 1e-9;
            let p = ProbabilityVector { p: raw.map(|x| (x + 1e-9 / 9.0) / s) };
            let h = GramTriple::from_grams([rand_dense(&mut rng), rand_dense(&mut rng), rand_dense(&mut rng)]);
            let g = induced_initial(&h, &p);
            let eta = eta_from_p(&p);
            for i in 0..3 {
                for k in PauliIndex::ALL {
                    prop_assert!((g.coords[i].get(k) - eta.get(k) * h.coords[i].get(k)).norm() < 1e-13);
                }
            }
        }
    }
}

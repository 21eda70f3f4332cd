//! Exhaustive symmetry audit over the finite candidate sets for the second local factor.
//!
//! Candidates are the generalized permutation matrices with cube-root-of-unity entries
//! (monomial family) and the 162 dense matrices
//! `[[1, ω^i, ω^j], [ω^k, ω^{k+i+m}, ω^{k+j+2m}], [ω^l, ω^{l+i+2m}, ω^{l+j+m}]]`.
//! Every pair `(B, C)` is tested with the φ-projection; survivors are completed to a full
//! triple by solving for `A` and matched against the Pauli group.

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::Mat3;
use crate::pauli::{pauli, PauliIndex};
use crate::scalar::{omega_pow, Real, C};
use crate::seed::{build_seed, check_generic, projection_residual, symmetry_residual, SeedParams, DEFAULT_GENERICITY_MARGIN};
use crate::tensor::{apply3, idx, Ket27};

/// Residual below which a candidate pair survives the projection test.
pub const SURVIVOR_THRESHOLD: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CandidateKind {
    Monomial,
    Dense,
}

#[derive(Clone, Debug)]
pub struct AuditCandidate<T> {
    pub kind: CandidateKind,
    /// Normalized so that the first nonzero entry of the first row is 1.
    pub b: Mat3<T>,
    /// Column permutation (row `r` is nonzero in column `perm[r]`) for monomial candidates.
    pub perm: Option<[usize; 3]>,
    /// Phase exponents for monomial candidates.
    pub phases: Option<[u8; 3]>,
    /// `(i, j, k, l, m)` for dense candidates.
    pub params: Option<[u8; 5]>,
}

const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// All monomial candidates, projectively deduplicated (6 supports × 9 phase classes).
///
/// The raw family has 6 × 27 members; the global factor ω identifies them in triples.
pub fn monomial_candidates<T: Real>() -> Vec<AuditCandidate<T>> {
    let mut out: Vec<AuditCandidate<T>> = Vec::new();
    for perm in PERMS {
        for code in 0..27u8 {
            let phases = [code % 3, (code / 3) % 3, code / 9];
            let b = Mat3::from_fn(|r, s| if perm[r] == s { omega_pow(phases[r] as i64) } else { C::zero() });
            let b = projective_normalize(&b);
            if out.iter().any(|c| c.b.dist(&b) < T::tol(1e-12)) {
                continue;
            }
            out.push(AuditCandidate { kind: CandidateKind::Monomial, b, perm: Some(perm), phases: Some(phases), params: None });
        }
    }
    out
}

/// The 162 dense candidates, in `(i, j, k, l, m)` lexicographic order.
pub fn dense_candidates<T: Real>() -> Vec<AuditCandidate<T>> {
    let mut out = Vec::with_capacity(162);
    for i in 0..3i64 {
        for j in 0..3i64 {
            for k in 0..3i64 {
                for l in 0..3i64 {
                    for m in 1..3i64 {
                        let w = |e: i64| omega_pow::<T>(e);
                        let b = Mat3::from_rows([
                            [C::one(), w(i), w(j)],
                            [w(k), w(k + i + m), w(k + j + 2 * m)],
                            [w(l), w(l + i + 2 * m), w(l + j + m)],
                        ]);
                        out.push(AuditCandidate {
                            kind: CandidateKind::Dense,
                            b,
                            perm: None,
                            phases: None,
                            params: Some([i as u8, j as u8, k as u8, l as u8, m as u8]),
                        });
                    }
                }
            }
        }
    }
    out
}

/// Scales `m` so that its first nonzero entry (row-major) equals 1.
pub fn projective_normalize<T: Real>(m: &Mat3<T>) -> Mat3<T> {
    let scale = m.max_abs();
    let pivot = m.m.iter().flatten().find(|z| z.norm() > scale * T::lit(1e-6)).copied().unwrap_or_else(C::one);
    let one: C<T> = C::one();
    m.scale_c(one / pivot)
}

/// Distance between the rays of `x` and `y`: both scaled to unit Frobenius norm, best
/// global phase removed.
pub fn projective_dist<T: Real>(x: &Mat3<T>, y: &Mat3<T>) -> T {
    let (nx, ny) = (x.frobenius(), y.frobenius());
    if nx == T::zero() || ny == T::zero() {
        return T::one();
    }
    let ov = y.inner(x);
    let phase = if ov.norm() > T::zero() { ov / ov.norm() } else { C::one() };
    (x.scale(T::one() / nx) - y.scale_c(phase / ny)).frobenius()
}

/// The Pauli index whose ray `m` lies on, if any.
pub fn match_pauli<T: Real>(m: &Mat3<T>, tol: T) -> Option<PauliIndex> {
    PauliIndex::ALL.into_iter().find(|k| projective_dist(m, &pauli::<T>(*k)) <= tol)
}

/// Least-squares completion `A = Ψ Ψ'† (Ψ' Ψ'†)⁻¹` of a pair `(B, C)`, where `Ψ` and `Ψ'`
/// are the party-1 × (2,3) reshapes of `|ψ⟩` and `(I ⊗ B ⊗ C)|ψ⟩`.
pub fn complete_first_factor<T: Real>(b: &Mat3<T>, c: &Mat3<T>, p: &SeedParams<T>) -> Option<Mat3<T>> {
    let psi = build_seed(p);
    let moved = apply3(&Mat3::identity(), b, c, &psi);
    let cross = |u: &Ket27<T>, v: &Ket27<T>| {
        Mat3::from_fn(|x, y| {
            let mut acc = C::zero();
            for j in 0..3 {
                for k in 0..3 {
                    acc = acc + u.v[idx(x, j, k)] * v.v[idx(y, j, k)].conj();
                }
            }
            acc
        })
    };
    let gram = cross(&moved, &moved);
    Some(cross(&psi, &moved) * gram.inverse()?)
}

#[derive(Clone, Debug)]
pub struct AuditSurvivor<T> {
    pub b_index: usize,
    pub c_index: usize,
    pub b_kind: CandidateKind,
    pub c_kind: CandidateKind,
    pub projection_residual: T,
    /// The completed first factor, if the pair admits one.
    pub a: Option<Mat3<T>>,
    /// `‖(A⊗B⊗C)ψ − ψ‖/‖ψ‖` for the completed triple.
    pub full_residual: Option<T>,
    /// Pauli index shared by `A`, `B` and `C`, if they all lie on the same Pauli ray.
    pub pauli: Option<PauliIndex>,
}

#[derive(Clone, Debug)]
pub struct AuditReport<T> {
    pub monomial_count: usize,
    pub dense_count: usize,
    pub pairs_tested: usize,
    pub survivors: Vec<AuditSurvivor<T>>,
    /// Survivors that are not Pauli triples.
    pub surplus: Vec<AuditSurvivor<T>>,
    /// Pauli indices covered by the survivors.
    pub matched: Vec<PauliIndex>,
    /// Exactly nine survivors, one per Pauli index, each a full symmetry.
    pub passed: bool,
    /// Smallest projection residual among non-survivors.
    pub min_rejected_residual: T,
}

/// Runs the candidate audit for a generic seed.
pub fn symmetry_audit<T: Real>(p: &SeedParams<T>) -> Result<AuditReport<T>> {
    let report = check_generic(p, DEFAULT_GENERICITY_MARGIN);
    if !report.generic {
        let names: Vec<&str> = report.violations.iter().map(|v| v.name).collect();
        return Err(Error::NotGeneric(names.join(", ")));
    }
    let mut candidates = monomial_candidates::<T>();
    let monomial_count = candidates.len();
    candidates.extend(dense_candidates::<T>());
    let dense_count = candidates.len() - monomial_count;
    let n = candidates.len();
    let threshold = T::tol(SURVIVOR_THRESHOLD);

    // Frobenius norm √3 (that of a unitary) so residuals are comparable between families
    let root3 = T::lit(3.0).sqrt();
    let scaled: Vec<Mat3<T>> = candidates.iter().map(|c| c.b.scale(root3 / c.b.frobenius())).collect();

    let results: Vec<(usize, usize, T)> = (0..n * n)
        .into_par_iter()
        .map(|t| {
            let (bi, ci) = (t / n, t % n);
            (bi, ci, projection_residual(&scaled[bi], &scaled[ci], p))
        })
        .collect();

    let mut survivors = Vec::new();
    let mut min_rejected = T::infinity();
    for (bi, ci, r) in results {
        if r <= threshold {
            let (b, c) = (&scaled[bi], &scaled[ci]);
            let a = complete_first_factor(b, c, p);
            let full_residual = a.map(|a| symmetry_residual(p, &a, b, c));
            let tol = T::tol(1e-9);
            let pauli = match (a, full_residual) {
                (Some(a), Some(res)) if res <= T::tol(1e-9) => {
                    let kb = match_pauli(b, tol);
                    if kb.is_some() && kb == match_pauli(c, tol) && kb == match_pauli(&a, tol) {
                        kb
                    } else {
                        None
                    }
                }
                _ => None,
            };
            survivors.push(AuditSurvivor {
                b_index: bi,
                c_index: ci,
                b_kind: candidates[bi].kind,
                c_kind: candidates[ci].kind,
                projection_residual: r,
                a,
                full_residual,
                pauli,
            });
        } else {
            min_rejected = min_rejected.min(r);
        }
    }
    let surplus: Vec<AuditSurvivor<T>> = survivors.iter().filter(|s| s.pauli.is_none()).cloned().collect();
    let mut matched: Vec<PauliIndex> = survivors.iter().filter_map(|s| s.pauli).collect();
    matched.sort();
    matched.dedup();
    let passed = survivors.len() == 9 && surplus.is_empty() && matched.len() == 9;
    Ok(AuditReport {
        monomial_count,
        dense_count,
        pairs_tested: n * n,
        survivors,
        surplus,
        matched,
        passed,
        min_rejected_residual: min_rejected,
    })
}

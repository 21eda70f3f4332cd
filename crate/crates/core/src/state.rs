//! States `(g1 ⊗ g2 ⊗ g3)|ψ⟩`, their Gram factors, the standard form and LU-equivalence.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::linalg::Mat3;
use crate::pauli::{conj_phase, pauli, PauliCoords, PauliIndex};
use crate::scalar::{omega_pow, Real, C};
use crate::seed::{build_seed, check_generic, SeedParams, DEFAULT_GENERICITY_MARGIN};
use crate::tensor::{apply3, Ket27};
use crate::tolerance::tolerance;

/// Absolute tolerance for comparing standard-form coordinates.
pub const LU_TOLERANCE: f64 = 1e-9;

/// Coordinates smaller than this are never used to fix the phase gauge.
pub const GAUGE_PIVOT_THRESHOLD: f64 = 1e-6;

/// Offset of the phase window `[−δ, 2π/3 − δ)` used by the standard form.
pub const GAUGE_WINDOW_OFFSET: f64 = 1e-7;

/// A state `(g1 ⊗ g2 ⊗ g3)|ψ(a,b,c)⟩` with invertible local factors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenericState<T> {
    pub seed: SeedParams<T>,
    pub g: [Mat3<T>; 3],
}

impl<T: Real> GenericState<T> {
    /// Validates genericity of the seed and invertibility of each factor.
    pub fn new(seed: SeedParams<T>, g: [Mat3<T>; 3]) -> Result<Self> {
        let report = check_generic(&seed, DEFAULT_GENERICITY_MARGIN);
        if !report.generic {
            let names: Vec<&str> = report.violations.iter().map(|v| v.name).collect();
            return Err(Error::NotGeneric(names.join(", ")));
        }
        Self::with_factors(seed, g)
    }

    /// Validates invertibility only; the seed may be non-generic.
    pub fn with_factors(seed: SeedParams<T>, g: [Mat3<T>; 3]) -> Result<Self> {
        if !(seed.norm() > T::zero()) {
            return Err(Error::ZeroSeed);
        }
        for (party, m) in g.iter().enumerate() {
            if !m.is_finite() {
                return Err(Error::Input(format!("factor {} has non-finite entries", party + 1)));
            }
            let det = m.det().norm();
            let scale = m.frobenius().powi(3);
            if !(det > T::tol(tolerance()) * scale) {
                return Err(Error::Singular { party: party + 1, det: det.as_f64() });
            }
        }
        Ok(GenericState { seed, g })
    }

    /// The seed itself, `g = (I, I, I)`.
    pub fn seed_state(seed: SeedParams<T>) -> Self {
        GenericState { seed, g: [Mat3::identity(); 3] }
    }

    /// `(g1 ⊗ g2 ⊗ g3)|ψ⟩`, unnormalized.
    pub fn assemble(&self) -> Ket27<T> {
        apply3(&self.g[0], &self.g[1], &self.g[2], &build_seed(&self.seed))
    }

    pub fn gram(&self) -> GramTriple<T> {
        gram(self)
    }

    /// Relabels parties: new party `q` is old party `perm[q]`. Odd permutations map the
    /// seed `(a, b, c)` to `(a, c, b)`.
    pub fn permuted(&self, perm: [usize; 3]) -> Self {
        let seed = if is_odd(perm) { self.seed.swapped() } else { self.seed };
        GenericState { seed, g: [self.g[perm[0]], self.g[perm[1]], self.g[perm[2]]] }
    }

    pub fn cast<U: Real>(&self) -> GenericState<U> {
        GenericState { seed: self.seed.cast(), g: self.g.map(|m| m.cast()) }
    }
}

pub(crate) fn is_odd(perm: [usize; 3]) -> bool {
    let mut inversions = 0;
    for i in 0..3 {
        for j in i + 1..3 {
            if perm[i] > perm[j] {
                inversions += 1;
            }
        }
    }
    inversions % 2 == 1
}

/// Trace-normalized Gram factors `G_i = g_i†g_i / tr(g_i†g_i)` with their coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GramTriple<T> {
    pub g: [Mat3<T>; 3],
    pub coords: [PauliCoords<T>; 3],
}

impl<T: Real> GramTriple<T> {
    /// Normalizes three hermitian matrices to unit trace.
    pub fn from_grams(g: [Mat3<T>; 3]) -> Self {
        let g = g.map(|m| {
            let m = m.hermitian_part();
            m.scale(T::one() / m.trace().re)
        });
        GramTriple { g, coords: g.map(|m| PauliCoords::of(&m)) }
    }

    /// Builds the triple from coordinate vectors; the identity coefficient is set to 1/3.
    pub fn from_coords(coords: [PauliCoords<T>; 3]) -> Self {
        let third = C::new(T::one() / T::lit(3.0), T::zero());
        let coords = coords.map(|mut c| {
            c.c[0] = third;
            c
        });
        let g = coords.map(|c| c.to_matrix().hermitian_part());
        GramTriple { g, coords }
    }

    /// The seed Gram triple: all three factors `I/3`.
    pub fn seed() -> Self {
        Self::from_grams([Mat3::identity(); 3])
    }

    pub fn min_eigenvalue(&self) -> T {
        self.g.iter().map(|m| m.min_eigenvalue()).fold(T::infinity(), T::min)
    }

    pub fn is_positive(&self) -> bool {
        self.min_eigenvalue() > T::zero()
    }

    /// Positive factors `g_i = √G_i` (unit trace of `g_i†g_i`).
    pub fn positive_factors(&self) -> Result<[Mat3<T>; 3]> {
        Ok([positive_factor(&self.g[0])?, positive_factor(&self.g[1])?, positive_factor(&self.g[2])?])
    }

    pub fn permuted(&self, perm: [usize; 3]) -> Self {
        GramTriple { g: [self.g[perm[0]], self.g[perm[1]], self.g[perm[2]]], coords: [self.coords[perm[0]], self.coords[perm[1]], self.coords[perm[2]]] }
    }

    /// Largest distance between corresponding factors.
    pub fn dist(&self, other: &Self) -> T {
        (0..3).map(|i| self.g[i].dist(&other.g[i])).fold(T::zero(), T::max)
    }
}

pub fn gram<T: Real>(s: &GenericState<T>) -> GramTriple<T> {
    GramTriple::from_grams(s.g.map(|m| m.adjoint() * m))
}

fn check_positive<T: Real>(g: &Mat3<T>) -> Result<([T; 3], Mat3<T>)> {
    let scale = g.frobenius();
    if !g.is_finite() || !g.is_hermitian(T::tol(tolerance()) * scale.max(T::one())) {
        return Err(Error::NotPositive { min_eig: f64::NAN });
    }
    let (vals, vecs) = g.hermitian_part().hermitian_eigen();
    if !(vals[0] > T::zero()) {
        return Err(Error::NotPositive { min_eig: vals[0].as_f64() });
    }
    Ok((vals, vecs))
}

/// The positive square root `g > 0` with `g†g = G`.
pub fn positive_factor<T: Real>(g: &Mat3<T>) -> Result<Mat3<T>> {
    let (vals, vecs) = check_positive(g)?;
    let d = Mat3::diag_real(vals.map(|v| v.sqrt()));
    Ok((vecs * d * vecs.adjoint()).hermitian_part())
}

/// Eigenvectors of `S_w` (columns), obtained from the spectral projectors
/// `P_λ = (1/3) Σ_j (S_w/λ)^j`.
pub fn pauli_eigenbasis<T: Real>(w: PauliIndex) -> Mat3<T> {
    let s = pauli::<T>(w);
    let cube = s.powi(3).m[0][0];
    let root = C::from_polar(T::one(), cube.arg() / T::lit(3.0));
    let mut u = Mat3::zeros();
    for j in 0..3usize {
        let lam = root * omega_pow::<T>(j as i64);
        let t = s.scale_c(lam.inv());
        let p = (Mat3::identity() + t + t * t).scale(T::one() / T::lit(3.0));
        let col = (0..3)
            .map(|c| [p.m[0][c], p.m[1][c], p.m[2][c]])
            .max_by(|x, y| norm3(x).partial_cmp(&norm3(y)).unwrap_or(Ordering::Equal))
            .expect("three columns");
        let n = norm3(&col);
        for r in 0..3 {
            u.m[r][j] = col[r] / n;
        }
    }
    u
}

fn norm3<T: Real>(v: &[C<T>; 3]) -> T {
    v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
}

/// Largest coordinate magnitude of `m` outside `{0, ±w}`.
pub fn off_span_residual<T: Real>(m: &Mat3<T>, w: PauliIndex) -> T {
    let coords = PauliCoords::of(m);
    PauliIndex::nonzero().filter(|k| *k != w && *k != -w).map(|k| coords.get(k).norm()).fold(T::zero(), T::max)
}

/// `m` with `m†m = M` and `m ∈ span{I, S_w, S_{−w}}`, via the common eigenbasis of that span.
pub fn span_factor<T: Real>(m: &Mat3<T>, w: PauliIndex) -> Result<Mat3<T>> {
    if w.is_zero() {
        return Err(Error::Structure("span factor requires w != 0".into()));
    }
    let scale = m.frobenius();
    let off = off_span_residual(m, w);
    if off > T::tol(tolerance()) * scale.max(T::one()) {
        return Err(Error::SpanViolation { w: w.to_string(), residual: off.as_f64() });
    }
    check_positive(m)?;
    let u = pauli_eigenbasis::<T>(w);
    let d = u.adjoint() * *m * u;
    let roots = [d.m[0][0].re, d.m[1][1].re, d.m[2][2].re];
    if roots.iter().any(|x| !(*x > T::zero())) {
        return Err(Error::NotPositive { min_eig: roots.iter().fold(f64::INFINITY, |a, x| a.min(x.as_f64())) });
    }
    Ok(u * Mat3::diag_real(roots.map(|x| x.sqrt())) * u.adjoint())
}

/// Gauge-fixed representation of a state: canonical seed and coordinates after choosing
/// one of the nine symmetry conjugations.
#[derive(Clone, Debug, PartialEq)]
pub struct StandardForm<T> {
    pub seed: SeedParams<T>,
    /// Non-identity coordinates per party in coordinate-vector order.
    pub coords: [[C<T>; 8]; 3],
    /// The symmetry `l` with `(S_l†)^{⊗3} G (S_l)^{⊗3}` giving the chosen coordinates.
    pub gauge: PauliIndex,
    /// The (party, index) entries whose phases fixed the gauge.
    pub pivots: Vec<(usize, PauliIndex)>,
}

impl<T: Real> StandardForm<T> {
    /// Largest entrywise coordinate difference.
    pub fn dist(&self, other: &Self) -> T {
        let mut worst = T::zero();
        for i in 0..3 {
            for k in 0..8 {
                worst = worst.max((self.coords[i][k] - other.coords[i][k]).norm());
            }
        }
        worst
    }

    /// A state with positive factors realizing this form.
    pub fn to_state(&self) -> Result<GenericState<T>> {
        let triple = GramTriple::from_coords(self.coords.map(|v| {
            let mut c = PauliCoords::zero();
            c.c[1..].copy_from_slice(&v);
            c
        }));
        GenericState::with_factors(self.seed, triple.positive_factors()?)
    }
}

/// Coordinates of `(S_l†)^{⊗3} G (S_l)^{⊗3}`: each `g_k` picks up `e^{iφ_{kl}}`.
pub fn conjugate_coords<T: Real>(coords: &[PauliCoords<T>; 3], l: PauliIndex) -> [PauliCoords<T>; 3] {
    coords.map(|c| {
        let mut out = c;
        for k in PauliIndex::ALL {
            out.set(k, c.get(k) * conj_phase::<T>(k, l));
        }
        out
    })
}

fn in_window<T: Real>(z: C<T>) -> bool {
    let delta = T::lit(GAUGE_WINDOW_OFFSET);
    let two_pi_3 = T::lit(2.0 * std::f64::consts::PI / 3.0);
    let mut arg = z.arg();
    if arg < -delta {
        arg = arg + T::lit(2.0 * std::f64::consts::PI);
    }
    arg >= -delta && arg < two_pi_3 - delta
}

/// Lexicographic order on (Re, Im) of all coordinates; differences below the comparison
/// tolerance count as equal so that rounding noise never decides a tie.
fn lex_cmp<T: Real>(x: &[PauliCoords<T>; 3], y: &[PauliCoords<T>; 3]) -> Ordering {
    let tol = T::tol(LU_TOLERANCE * 1e-3);
    let cmp = |a: T, b: T| if (a - b).abs() <= tol { Ordering::Equal } else { a.partial_cmp(&b).unwrap_or(Ordering::Equal) };
    for i in 0..3 {
        for k in 1..9 {
            let (a, b) = (x[i].c[k], y[i].c[k]);
            match cmp(a.re, b.re).then(cmp(a.im, b.im)) {
                Ordering::Equal => {}
                o => return o,
            }
        }
    }
    Ordering::Equal
}

/// Pivot entries for the phase gauge: the first entry above the pivot threshold in the
/// scan (party 1, 2, 3; coordinate-vector order), then the next one whose index is
/// independent of the first.
pub fn gauge_pivots<T: Real>(coords: &[PauliCoords<T>; 3]) -> Vec<(usize, PauliIndex)> {
    let thr = T::lit(GAUGE_PIVOT_THRESHOLD);
    let mut pivots: Vec<(usize, PauliIndex)> = Vec::new();
    for (party, c) in coords.iter().enumerate() {
        for k in PauliIndex::nonzero() {
            if c.get(k).norm() <= thr {
                continue;
            }
            match pivots.first() {
                None => pivots.push((party, k)),
                Some((_, k0)) if k != *k0 && k != -*k0 => {
                    pivots.push((party, k));
                    return pivots;
                }
                _ => {}
            }
        }
    }
    pivots
}

/// Standard form of a Gram triple over a given seed.
pub fn standard_form_of_gram<T: Real>(seed: &SeedParams<T>, triple: &GramTriple<T>) -> Result<StandardForm<T>> {
    let seed = seed.canonical()?;
    let pivots = gauge_pivots(&triple.coords);
    let mut best: Option<(PauliIndex, [PauliCoords<T>; 3])> = None;
    for l in PauliIndex::ALL {
        let c = conjugate_coords(&triple.coords, l);
        if !pivots.iter().all(|(party, k)| in_window(c[*party].get(*k))) {
            continue;
        }
        let better = match &best {
            None => true,
            Some((_, bc)) => lex_cmp(&c, bc) == Ordering::Less,
        };
        if better {
            best = Some((l, c));
        }
    }
    let (gauge, c) = best.ok_or_else(|| Error::Structure("no gauge satisfies the phase window".into()))?;
    Ok(StandardForm { seed, coords: c.map(|x| x.vector()), gauge, pivots })
}

pub fn standard_form<T: Real>(s: &GenericState<T>) -> Result<StandardForm<T>> {
    standard_form_of_gram(&s.seed, &gram(s))
}

/// Compares canonical seeds; errors if they differ.
pub fn same_seed<T: Real>(a: &SeedParams<T>, b: &SeedParams<T>) -> Result<SeedParams<T>> {
    let (ca, cb) = (a.canonical()?, b.canonical()?);
    if ca.dist(&cb) > T::tol(LU_TOLERANCE) {
        let show = |p: &SeedParams<T>| {
            let [a, b, c] = p.as_array().map(|z| format!("{:.6}{:+.6}i", z.re.as_f64(), z.im.as_f64()));
            format!("(a, b, c) = ({a}, {b}, {c})")
        };
        return Err(Error::SeedMismatch(format!("{} vs {}", show(&ca), show(&cb))));
    }
    Ok(ca)
}

/// Whether two states over the same seed are related by local unitaries.
pub fn lu_equivalent<T: Real>(s1: &GenericState<T>, s2: &GenericState<T>) -> Result<bool> {
    same_seed(&s1.seed, &s2.seed)?;
    Ok(standard_form(s1)?.dist(&standard_form(s2)?) <= T::tol(LU_TOLERANCE))
}

/// Same decision for two Gram triples over a common seed.
pub fn lu_equivalent_grams<T: Real>(seed: &SeedParams<T>, a: &GramTriple<T>, b: &GramTriple<T>) -> Result<bool> {
    Ok(standard_form_of_gram(seed, a)?.dist(&standard_form_of_gram(seed, b)?) <= T::tol(LU_TOLERANCE))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn s2() -> SeedParams<f64> {
        SeedParams::from_real(2.0, 3.0, 5.0).canonical().unwrap()
    }

    fn rand_mat(rng: &mut ChaCha8Rng) -> Mat3<f64> {
        Mat3::from_fn(|_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }

    fn rand_unitary(rng: &mut ChaCha8Rng) -> Mat3<f64> {
        let h = rand_mat(rng);
        let h = (h + h.adjoint()).scale(0.5);
        let (vals, vecs) = h.hermitian_eigen();
        let d = Mat3::diag(vals.map(|v| C::from_polar(1.0, v * 3.0)));
        vecs * d * vecs.adjoint()
    }

    fn rand_state(rng: &mut ChaCha8Rng) -> GenericState<f64> {
        GenericState::new(s2(), [rand_mat(rng), rand_mat(rng), rand_mat(rng)]).unwrap()
    }

    #[test]
    fn assemble_examples() {
        let p = s2();
        let s = GenericState::seed_state(p);
        assert_eq!(s.assemble(), build_seed(&p));
        let x = pauli::<f64>(PauliIndex::new(1, 0));
        let s = GenericState::new(p, [x, x, x]).unwrap();
        assert!(s.assemble().dist(&build_seed(&p)) < 1e-14);
        let d = Mat3::diag_real([1.0, 2.0, 3.0]);
        let s = GenericState::new(p, [d, Mat3::identity(), Mat3::identity()]).unwrap();
        let v = s.assemble();
        let psi = build_seed(&p);
        for i in 0..27 {
            assert!((v.v[i] - psi.v[i] * (1 + i / 9) as f64).norm() < 1e-15);
        }
    }

    #[test]
    fn singular_factor_rejected() {
        let z = Mat3::<f64>::diag_real([1.0, 1.0, 0.0]);
        assert!(matches!(GenericState::new(s2(), [z, Mat3::identity(), Mat3::identity()]), Err(Error::Singular { party: 1, .. })));
        assert!(matches!(GenericState::new(SeedParams::<f64>::from_real(1.0, 1.0, 1.0), [Mat3::identity(); 3]), Err(Error::NotGeneric(_))));
    }

    #[test]
    fn gram_examples() {
        let p = s2();
        let t = gram(&GenericState::seed_state(p));
        for i in 0..3 {
            assert!(t.g[i].dist(&Mat3::identity().scale(1.0 / 3.0)) < 1e-15);
            assert!(t.coords[i].vector().iter().all(|z| z.norm() < 1e-15));
            assert!((t.coords[i].g0() - c(1.0 / 3.0, 0.0)).norm() < 1e-15);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = rand_unitary(&mut rng);
        let t = gram(&GenericState::new(p, [u, u, Mat3::identity()]).unwrap());
        assert!(t.g[0].dist(&Mat3::identity().scale(1.0 / 3.0)) < 1e-13);
        let g1 = Mat3::diag_real([1.0, 1.0, 2f64.sqrt()]);
        let t = gram(&GenericState::new(p, [g1, Mat3::identity(), Mat3::identity()]).unwrap());
        assert!(t.g[0].dist(&Mat3::diag_real([0.25, 0.25, 0.5])) < 1e-15);
    }

    #[test]
    fn positive_factor_examples() {
        let g = positive_factor(&Mat3::<f64>::identity().scale(1.0 / 3.0)).unwrap();
        assert!(g.dist(&Mat3::identity().scale(1.0 / 3f64.sqrt())) < 1e-15);
        let g = positive_factor(&Mat3::<f64>::diag_real([0.25, 0.25, 0.5])).unwrap();
        assert!(g.dist(&Mat3::diag_real([0.5, 0.5, 0.5f64.sqrt()])) < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let a = rand_mat(&mut rng);
            let big = a.adjoint() * a + Mat3::identity().scale(0.01);
            let g = positive_factor(&big).unwrap();
            assert!((g.adjoint() * g).dist(&big) <= 1e-12 * big.frobenius());
            assert!(g.is_hermitian(1e-14));
            assert!(g.min_eigenvalue() > 0.0);
            assert!((g * big).dist(&(big * g)) <= 1e-12 * big.frobenius() * g.frobenius());
        }
        assert!(positive_factor(&Mat3::<f64>::diag_real([1.0, -1.0, 1.0])).is_err());
    }

    #[test]
    fn span_factor_examples() {
        let third = Mat3::<f64>::identity().scale(1.0 / 3.0);
        let w = PauliIndex::new(1, 0);
        assert!(span_factor(&third, w).unwrap().dist(&Mat3::identity().scale(1.0 / 3f64.sqrt())) < 1e-14);
        let x = pauli::<f64>(w);
        let m = third + (x + x * x).scale(0.1);
        let f = span_factor(&m, w).unwrap();
        assert!((f.adjoint() * f).dist(&m) < 1e-12);
        assert!(off_span_residual(&f, w) < 1e-14);
        let z = pauli::<f64>(PauliIndex::new(0, 1));
        let m = third + z.scale_c(c(0.05, 0.08)) + z.scale_c(c(0.05, 0.08)).adjoint();
        let f = span_factor(&m, PauliIndex::new(0, 1)).unwrap();
        for r in 0..3 {
            for s in 0..3 {
                if r != s {
                    assert!(f.m[r][s].norm() < 1e-14);
                }
            }
        }
        assert!(matches!(span_factor(&m, w), Err(Error::SpanViolation { .. })));
    }

    #[test]
    fn span_factor_equals_positive_root() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for w in PauliIndex::nonzero() {
            let s = pauli::<f64>(w);
            let coef = c(rng.random_range(-0.1..0.1), rng.random_range(-0.1..0.1));
            let m = Mat3::identity().scale(1.0 / 3.0) + s.scale_c(coef) + s.scale_c(coef).adjoint();
            let f = span_factor(&m, w).unwrap();
            assert!(f.dist(&positive_factor(&m).unwrap()) < 1e-12, "{w}");
            assert!(off_span_residual(&f, w) < 1e-13);
        }
    }

    #[test]
    fn eigenbasis_diagonalizes_pauli() {
        for w in PauliIndex::nonzero() {
            let u = pauli_eigenbasis::<f64>(w);
            assert!(u.is_unitary(1e-12));
            let d = u.adjoint() * pauli::<f64>(w) * u;
            for r in 0..3 {
                for s in 0..3 {
                    if r != s {
                        assert!(d.m[r][s].norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn standard_form_of_seed() {
        let sf = standard_form(&GenericState::seed_state(s2())).unwrap();
        assert!(sf.coords.iter().flatten().all(|z| z.norm() < 1e-15));
        assert_eq!(sf.gauge, PauliIndex::ZERO);
    }

    #[test]
    fn standard_form_invariances() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..30 {
            let s = rand_state(&mut rng);
            let sf = standard_form(&s).unwrap();
            let dressed = GenericState::new(s.seed, [rand_unitary(&mut rng) * s.g[0], rand_unitary(&mut rng) * s.g[1], rand_unitary(&mut rng) * s.g[2]]).unwrap();
            assert!(standard_form(&dressed).unwrap().dist(&sf) < 1e-12);
            for l in PauliIndex::ALL {
                let sl = pauli::<f64>(l);
                let conj = GenericState::new(s.seed, s.g.map(|g| g * sl)).unwrap();
                assert!(standard_form(&conj).unwrap().dist(&sf) < 1e-12, "{l}");
            }
            let scaled = GenericState::new(s.seed, [s.g[0].scale(3.0), s.g[1].scale_c(c(0.0, 0.5)), s.g[2]]).unwrap();
            assert!(standard_form(&scaled).unwrap().dist(&sf) < 1e-12);
            let again = standard_form(&sf.to_state().unwrap()).unwrap();
            assert!(again.dist(&sf) < 1e-12);
            assert!(lu_equivalent(&s, &dressed).unwrap());
        }
    }

    #[test]
    fn standard_form_window() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = rand_state(&mut rng);
        let sf = standard_form(&s).unwrap();
        assert_eq!(sf.pivots.len(), 2);
        for (party, k) in &sf.pivots {
            let z = sf.coords[*party][k.pos() - 1];
            assert!(in_window(z));
        }
    }

    #[test]
    fn lu_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let s = rand_state(&mut rng);
        assert!(lu_equivalent(&s, &s).unwrap());
        let d = Mat3::diag_real([1.0, 1.0, 2.0]);
        let t = GenericState::new(s.seed, [d * s.g[0], s.g[1], s.g[2]]).unwrap();
        assert!(!lu_equivalent(&s, &t).unwrap());
        let other = GenericState::new(SeedParams::from_real(2.0, 3.0, 7.0), s.g).unwrap();
        assert!(matches!(lu_equivalent(&s, &other), Err(Error::SeedMismatch(_))));
    }

    #[test]
    fn permutation_swaps_seed_for_transpositions() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s = rand_state(&mut rng);
        for perm in [[1, 0, 2], [0, 2, 1], [2, 1, 0], [1, 2, 0], [2, 0, 1]] {
            let t = s.permuted(perm);
            let lhs = crate::tensor::permute_parties(&s.assemble(), perm);
            assert!(lhs.dist(&t.assemble()) < 1e-12, "{perm:?}");
        }
    }
}

//! Seed states `a(|000⟩+|111⟩+|222⟩) + b(|012⟩+|201⟩+|120⟩) + c(|021⟩+|210⟩+|102⟩)`,
//! genericity screening and the symmetry checks built on them.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::Mat3;
use crate::pauli::{pauli, PauliIndex};
use crate::scalar::{cast_c, omega_pow, Real, C};
use crate::tensor::{apply3, idx, Ket27};

/// Default genericity margin.
pub const DEFAULT_GENERICITY_MARGIN: f64 = 1e-6;

/// The complex triple `(a, b, c)` labelling a seed state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeedParams<T> {
    pub a: C<T>,
    pub b: C<T>,
    pub c: C<T>,
}

impl<T: Real> SeedParams<T> {
    pub fn new(a: C<T>, b: C<T>, c: C<T>) -> Self {
        SeedParams { a, b, c }
    }

    pub fn from_real(a: f64, b: f64, c: f64) -> Self {
        let r = |x: f64| C::new(T::lit(x), T::zero());
        SeedParams { a: r(a), b: r(b), c: r(c) }
    }

    pub fn as_array(&self) -> [C<T>; 3] {
        [self.a, self.b, self.c]
    }

    pub fn norm(&self) -> T {
        (self.a.norm_sqr() + self.b.norm_sqr() + self.c.norm_sqr()).sqrt()
    }

    /// Unit norm with the first non-vanishing entry real and positive.
    pub fn canonical(&self) -> Result<Self> {
        let n = self.norm();
        if !(n > T::zero()) || !n.is_finite() {
            return Err(Error::ZeroSeed);
        }
        let first = self.as_array().into_iter().find(|z| z.norm() > n * T::epsilon()).ok_or(Error::ZeroSeed)?;
        let phase = first.conj() / first.norm();
        let f = |z: C<T>| z * phase / n;
        let mut out = SeedParams { a: f(self.a), b: f(self.b), c: f(self.c) };
        // the pivot is real by construction; drop rounding residue
        for z in [&mut out.a, &mut out.b, &mut out.c] {
            if z.norm() > n * T::epsilon() {
                *z = C::new(z.norm(), T::zero());
                break;
            }
        }
        Ok(out)
    }

    pub fn is_canonical(&self, tol: T) -> bool {
        match self.canonical() {
            Ok(c) => {
                let d = (c.a - self.a).norm() + (c.b - self.b).norm() + (c.c - self.c).norm();
                d <= tol
            }
            Err(_) => false,
        }
    }

    /// Parameters of the seed after exchanging two parties: any transposition of parties
    /// maps the seed with `(a, b, c)` to the seed with `(a, c, b)`.
    pub fn swapped(&self) -> Self {
        SeedParams { a: self.a, b: self.c, c: self.b }
    }

    pub fn cast<U: Real>(&self) -> SeedParams<U> {
        SeedParams { a: cast_c(self.a), b: cast_c(self.b), c: cast_c(self.c) }
    }

    /// Entrywise distance.
    pub fn dist(&self, other: &Self) -> T {
        (self.a - other.a).norm().max((self.b - other.b).norm()).max((self.c - other.c).norm())
    }
}

/// The seed vector; its squared norm is `3(|a|²+|b|²+|c|²)`.
pub fn build_seed<T: Real>(p: &SeedParams<T>) -> Ket27<T> {
    let mut v = Ket27::zeros();
    for (i, j, k) in [(0, 0, 0), (1, 1, 1), (2, 2, 2)] {
        v.v[idx(i, j, k)] = p.a;
    }
    for (i, j, k) in [(0, 1, 2), (2, 0, 1), (1, 2, 0)] {
        v.v[idx(i, j, k)] = p.b;
    }
    for (i, j, k) in [(0, 2, 1), (2, 1, 0), (1, 0, 2)] {
        v.v[idx(i, j, k)] = p.c;
    }
    v
}

/// One evaluated exclusion polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct GenericityCondition {
    pub name: &'static str,
    /// `|polynomial| / ‖(a,b,c)‖^degree`.
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenericityReport {
    pub generic: bool,
    pub delta: f64,
    /// All 22 conditions, in the order they are listed.
    pub conditions: Vec<GenericityCondition>,
    /// The conditions whose scaled value is below `delta`.
    pub violations: Vec<GenericityCondition>,
    /// Smallest scaled value over all conditions.
    pub margin: f64,
}

/// Evaluates the 22 exclusion polynomials, each scaled to be gauge independent.
pub fn check_generic<T: Real>(p: &SeedParams<T>, delta: f64) -> GenericityReport {
    let s: SeedParams<f64> = p.cast();
    let n = s.norm();
    let (a, b, c) = if n > 0.0 { (s.a / n, s.b / n, s.c / n) } else { (s.a, s.b, s.c) };
    let w = omega_pow::<f64>(1);
    let w2 = omega_pow::<f64>(2);
    let cube = |z: C<f64>| z * z * z;
    let ninth = |z: C<f64>| cube(cube(z));
    let s3 = cube(a) + cube(b) + cube(c);
    let t = C::new(3.0, 0.0) * a * b * c;
    let values: [(&'static str, C<f64>); 22] = [
        ("a = 0", a),
        ("b = 0", b),
        ("c = 0", c),
        ("a^3 + b^3 + c^3 = 0", s3),
        ("(a^3 + b^3 + c^3)^3 = (3abc)^3", cube(s3) - cube(t)),
        ("a^9 = b^9", ninth(a) - ninth(b)),
        ("a^9 = c^9", ninth(a) - ninth(c)),
        ("b^9 = c^9", ninth(b) - ninth(c)),
        ("a + b + c = 0", a + b + c),
        ("a + wb + c = 0", a + w * b + c),
        ("a + w^2 b + c = 0", a + w2 * b + c),
        ("a + b + wc = 0", a + b + w * c),
        ("a + b + w^2 c = 0", a + b + w2 * c),
        ("a + wb + w^2 c = 0", a + w * b + w2 * c),
        ("a + w^2 b + wc = 0", a + w2 * b + w * c),
        ("ab + bc + ca = 0", a * b + b * c + c * a),
        ("ab + wbc + ca = 0", a * b + w * b * c + c * a),
        ("ab + w^2 bc + ca = 0", a * b + w2 * b * c + c * a),
        ("ab + bc + wca = 0", a * b + b * c + w * c * a),
        ("ab + bc + w^2 ca = 0", a * b + b * c + w2 * c * a),
        ("ab + wbc + w^2 ca = 0", a * b + w * b * c + w2 * c * a),
        ("ab + w^2 bc + wca = 0", a * b + w2 * b * c + w * c * a),
    ];
    let conditions: Vec<GenericityCondition> =
        values.iter().map(|(name, v)| GenericityCondition { name, value: if n > 0.0 { v.norm() } else { 0.0 } }).collect();
    let violations: Vec<GenericityCondition> = conditions.iter().filter(|c| !(c.value >= delta)).cloned().collect();
    let margin = conditions.iter().map(|c| c.value).fold(f64::INFINITY, f64::min);
    GenericityReport { generic: violations.is_empty(), delta, conditions, violations, margin }
}

/// Convenience wrapper: `check_generic` at the default margin.
pub fn is_generic<T: Real>(p: &SeedParams<T>) -> bool {
    check_generic(p, DEFAULT_GENERICITY_MARGIN).generic
}

/// `‖(A ⊗ B ⊗ C)|ψ⟩ − |ψ⟩‖ / ‖ψ‖`.
pub fn symmetry_residual<T: Real>(p: &SeedParams<T>, a: &Mat3<T>, b: &Mat3<T>, c: &Mat3<T>) -> T {
    let psi = build_seed(p);
    apply3(a, b, c, &psi).dist(&psi) / psi.norm()
}

/// Largest residual of the nine triples `S_k ⊗ S_k ⊗ S_k` acting on the seed.
pub fn verify_symmetries<T: Real>(p: &SeedParams<T>) -> Result<T> {
    let worst = PauliIndex::ALL
        .iter()
        .map(|k| {
            let s = pauli::<T>(*k);
            symmetry_residual(p, &s, &s, &s)
        })
        .fold(T::zero(), T::max);
    if !(worst <= T::tol(1e-8)) {
        return Err(Error::SymmetryResidual(worst.as_f64()));
    }
    Ok(worst)
}

/// The nine two-party vectors orthogonal to the seed, each stored with index `3j + k`.
pub fn phi_states<T: Real>(p: &SeedParams<T>) -> [[C<T>; 9]; 9] {
    let (a, b, c) = (p.a.conj(), p.b.conj(), p.c.conj());
    let mut out = [[C::zero(); 9]; 9];
    let mut put = |n: usize, plus: (C<T>, usize, usize), minus: (C<T>, usize, usize)| {
        out[n][3 * plus.1 + plus.2] = plus.0;
        out[n][3 * minus.1 + minus.2] = -minus.0;
    };
    put(0, (c, 1, 2), (b, 2, 1));
    put(1, (c, 2, 0), (b, 0, 2));
    put(2, (c, 0, 1), (b, 1, 0));
    put(3, (a, 1, 2), (b, 0, 0));
    put(4, (a, 2, 0), (b, 1, 1));
    put(5, (a, 0, 1), (b, 2, 2));
    put(6, (a, 2, 1), (c, 0, 0));
    put(7, (a, 0, 2), (c, 1, 1));
    put(8, (a, 1, 0), (c, 2, 2));
    out
}

/// Contracts `⟨φ|` over parties 2 and 3 of `v`, leaving a party-1 vector.
pub fn contract_phi<T: Real>(phi: &[C<T>; 9], v: &Ket27<T>) -> [C<T>; 3] {
    std::array::from_fn(|i| {
        let mut acc = C::zero();
        for j in 0..3 {
            for k in 0..3 {
                acc = acc + phi[3 * j + k].conj() * v.v[idx(i, j, k)];
            }
        }
        acc
    })
}

/// Largest norm of the φ-contractions of `(I ⊗ B ⊗ C)|ψ⟩`; vanishes for every symmetry.
pub fn projection_residual<T: Real>(b: &Mat3<T>, c: &Mat3<T>, p: &SeedParams<T>) -> T {
    let moved = apply3(&Mat3::identity(), b, c, &build_seed(p));
    phi_states(p)
        .iter()
        .map(|phi| contract_phi(phi, &moved).iter().map(|z| z.norm_sqr()).sum::<T>().sqrt())
        .fold(T::zero(), T::max)
}

/// The three matrices `M_i = [[a,c,b],[b,a,c],[c,b,a]] ⊙ [[B_i0,B_i2,B_i1],[B_i2,B_i1,B_i0],[B_i1,B_i0,B_i2]]`.
pub fn build_projection_operators<T: Real>(b: &Mat3<T>, p: &SeedParams<T>) -> [Mat3<T>; 3] {
    let tmpl = Mat3::from_rows([[p.a, p.c, p.b], [p.b, p.a, p.c], [p.c, p.b, p.a]]);
    let pattern = [[0usize, 2, 1], [2, 1, 0], [1, 0, 2]];
    std::array::from_fn(|i| Mat3::from_fn(|r, s| tmpl.m[r][s] * b.m[i][pattern[r][s]]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;
    use crate::tensor::partial_gram;

    fn s2() -> SeedParams<f64> {
        SeedParams::from_real(2.0, 3.0, 5.0).canonical().unwrap()
    }

    #[test]
    fn seed_substitutions() {
        let v = build_seed(&SeedParams::<f64>::from_real(1.0, 0.0, 0.0));
        let expect = Ket27::basis(0, 0, 0) + Ket27::basis(1, 1, 1) + Ket27::basis(2, 2, 2);
        assert_eq!(v, expect);
        let v = build_seed(&SeedParams::<f64>::from_real(0.0, 1.0, 0.0));
        let expect = Ket27::basis(0, 1, 2) + Ket27::basis(2, 0, 1) + Ket27::basis(1, 2, 0);
        assert_eq!(v, expect);
        let v = build_seed(&s2());
        assert_eq!(v.v.iter().filter(|z| z.norm() > 0.0).count(), 9);
        assert!((v.norm_sqr() - 3.0).abs() < 1e-14);
        let p = s2();
        assert!((p.a.re - 2.0 / 38f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn canonical_gauge() {
        let p = SeedParams::<f64>::new(c(0.0, 2.0), c(1.0, 1.0), c(-3.0, 0.5));
        let q = p.canonical().unwrap();
        assert!((q.norm() - 1.0).abs() < 1e-14);
        assert_eq!(q.a.im, 0.0);
        assert!(q.a.re > 0.0);
        assert!(q.is_canonical(1e-14));
        let z = SeedParams::<f64>::new(c(0.0, 0.0), c(0.0, -1.0), c(1.0, 0.0)).canonical().unwrap();
        assert_eq!(z.a, c(0.0, 0.0));
        assert!(z.b.re > 0.0 && z.b.im == 0.0);
        assert!(SeedParams::<f64>::from_real(0.0, 0.0, 0.0).canonical().is_err());
    }

    #[test]
    fn genericity_examples() {
        let r = check_generic(&SeedParams::<f64>::from_real(1.0, 1.0, 1.0).canonical().unwrap(), 1e-6);
        assert!(!r.generic);
        assert!(r.violations.iter().any(|v| v.name == "a^9 = b^9"));
        let r = check_generic(&SeedParams::<f64>::from_real(1.0, 0.0, 0.0), 1e-6);
        assert!(!r.generic);
        assert!(r.violations.iter().any(|v| v.name == "b = 0"));
        let r = check_generic(&s2(), 1e-6);
        assert!(r.generic, "{:?}", r.violations);
        assert_eq!(r.conditions.len(), 22);
        assert!(r.margin > 1e-3);
    }

    #[test]
    fn genericity_is_gauge_independent() {
        let p = s2();
        let q = SeedParams::new(p.a * c(0.0, 7.0), p.b * c(0.0, 7.0), p.c * c(0.0, 7.0));
        let (r1, r2) = (check_generic(&p, 1e-6), check_generic(&q, 1e-6));
        for (x, y) in r1.conditions.iter().zip(&r2.conditions) {
            assert!((x.value - y.value).abs() < 1e-12);
        }
    }

    #[test]
    fn each_linear_condition_is_detected() {
        // a + w b + w^2 c = 0 with b, c chosen freely
        let w = omega_pow::<f64>(1);
        let (b, cc) = (c(0.3, 0.1), c(-0.2, 0.7));
        let a = -(w * b + w * w * cc);
        let r = check_generic(&SeedParams::new(a, b, cc), 1e-6);
        assert!(r.violations.iter().any(|v| v.name == "a + wb + w^2 c = 0"));
        // ab + bc + w ca = 0  =>  a = -bc / (b + w c)
        let a = -(b * cc) / (b + w * cc);
        let r = check_generic(&SeedParams::new(a, b, cc), 1e-6);
        assert!(r.violations.iter().any(|v| v.name == "ab + bc + wca = 0"));
    }

    #[test]
    fn symmetries_of_generic_seed() {
        let p = s2();
        let r = verify_symmetries(&p).unwrap();
        assert!(r <= 1e-10);
        let id = Mat3::identity();
        assert_eq!(symmetry_residual(&p, &id, &id, &id), 0.0);
        let x = pauli::<f64>(PauliIndex::new(1, 0));
        assert!(symmetry_residual(&p, &x, &id, &id) > 0.1);
    }

    #[test]
    fn phi_states_orthogonal_to_seed() {
        let p = SeedParams::<f64>::new(c(0.3, -0.2), c(0.1, 0.9), c(-0.5, 0.4));
        let psi = build_seed(&p);
        for phi in phi_states(&p) {
            let v = contract_phi(&phi, &psi);
            assert!(v.iter().all(|z| z.norm() < 1e-15));
        }
        let phi = phi_states(&p)[0];
        assert_eq!(phi[5], p.c.conj());
        assert_eq!(phi[7], -p.b.conj());
        let q = SeedParams::<f64>::from_real(0.5, 0.7, 0.7);
        let phi = phi_states(&q)[0];
        assert_eq!(phi[5], -phi[7]);
    }

    #[test]
    fn projection_residual_examples() {
        let p = s2();
        let id = Mat3::identity();
        assert_eq!(projection_residual(&id, &id, &p), 0.0);
        let x = pauli::<f64>(PauliIndex::new(1, 0));
        assert!(projection_residual(&x, &x, &p) <= 1e-12);
        let b = Mat3::from_fn(|i, j| c(0.3 + i as f64 * 0.2, j as f64 * 0.4 - 0.1));
        let cc = Mat3::from_fn(|i, j| c(j as f64 * 0.5 - 0.7, 0.2 + i as f64 * 0.1));
        assert!(projection_residual(&b, &cc, &p) > 1e-2);
    }

    /// Rows of the direct contraction of `⟨φ_n|` with `(I ⊗ B ⊗ C)|ψ⟩` equal the
    /// block rows of the `M_i` products, checked against an explicit sum.
    #[test]
    fn mi_matches_direct_contraction() {
        let p = SeedParams::<f64>::new(c(0.3, -0.2), c(0.1, 0.9), c(-0.5, 0.4));
        let b = Mat3::from_fn(|i, j| c(0.3 + i as f64 * 0.2 - j as f64 * 0.15, j as f64 * 0.4 - 0.1));
        let cc = Mat3::from_fn(|i, j| c(j as f64 * 0.5 - 0.7 + i as f64 * 0.05, 0.2 + i as f64 * 0.1));
        let m = build_projection_operators(&b, &p);
        let (a, bb, ccc) = (p.a, p.b, p.c);
        let col = |r: usize| [cc.m[r][0], cc.m[r][1], cc.m[r][2]];
        let (c0, c1, c2) = (col(0), col(1), col(2));
        let mv = |i: usize, v: [C<f64>; 3]| m[i].mul_vec(&v);
        let add = |x: [C<f64>; 3], y: [C<f64>; 3], z: [C<f64>; 3]| -> [C<f64>; 3] { std::array::from_fn(|t| x[t] + y[t] + z[t]) };
        let sc = |s: C<f64>, v: [C<f64>; 3]| v.map(|z| z * s);
        let zero = [C::zero(); 3];
        // block rows in the order of the φ list
        let blocks = [
            add(zero, sc(-bb, mv(2, c1)), sc(ccc, mv(1, c2))),
            add(sc(ccc, mv(2, c0)), zero, sc(-bb, mv(0, c2))),
            add(sc(-bb, mv(1, c0)), sc(ccc, mv(0, c1)), zero),
            add(sc(-bb, mv(0, c0)), zero, sc(a, mv(1, c2))),
            add(sc(a, mv(2, c0)), sc(-bb, mv(1, c1)), zero),
            add(zero, sc(a, mv(0, c1)), sc(-bb, mv(2, c2))),
            add(sc(-ccc, mv(0, c0)), sc(a, mv(2, c1)), zero),
            add(zero, sc(-ccc, mv(1, c1)), sc(a, mv(0, c2))),
            add(sc(a, mv(1, c0)), zero, sc(-ccc, mv(2, c2))),
        ];
        let moved = apply3(&Mat3::identity(), &b, &cc, &build_seed(&p));
        for (n, phi) in phi_states(&p).iter().enumerate() {
            let direct = contract_phi(phi, &moved);
            let d: f64 = direct.iter().zip(&blocks[n]).map(|(x, y)| (*x - *y).norm()).sum();
            assert!(d < 1e-12, "block {n}: {direct:?} vs {:?}", blocks[n]);
        }
    }

    #[test]
    fn mi_examples() {
        let p = s2();
        let m = build_projection_operators(&Mat3::identity(), &p);
        assert_eq!(m[0].m[0][0], p.a);
        assert_eq!(m[0].m[1][2], p.c);
        assert_eq!(m[0].m[2][1], p.b);
        assert_eq!(m[0].m[0][1], C::zero());
        let x = pauli::<f64>(PauliIndex::new(1, 0));
        for mi in build_projection_operators(&x, &p) {
            assert_eq!(mi.m.iter().flatten().filter(|z| z.norm() > 0.0).count(), 3);
            assert!(mi.inverse().is_some());
        }
    }

    #[test]
    fn mi_ratio_has_cube_root_spectrum_for_symmetries() {
        let p = s2();
        for k in PauliIndex::ALL {
            let m = build_projection_operators(&pauli::<f64>(k), &p);
            let r = m[0].inverse().unwrap() * m[1];
            // characteristic polynomial λ³ − tr λ² + e2 λ − det must be λ³ − 1
            let tr = r.trace();
            let e2 = (tr * tr - (r * r).trace()) * 0.5;
            assert!(tr.norm() < 1e-10 && e2.norm() < 1e-10, "{k}");
            assert!((r.det() - C::new(1.0, 0.0)).norm() < 1e-10, "{k}");
        }
    }

    #[test]
    fn reduced_state_of_seed() {
        let p = s2();
        let psi = build_seed(&p);
        for party in 0..3 {
            let rho = partial_gram(&psi, party);
            assert!(rho.dist(&Mat3::identity()) < 1e-14);
        }
    }

    #[test]
    fn f32_seed_symmetries() {
        let p = SeedParams::<f32>::from_real(2.0, 3.0, 5.0).canonical().unwrap();
        let r = verify_symmetries(&p).unwrap();
        assert!(r < 1e-5);
    }
}

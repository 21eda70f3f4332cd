//! Generalized Pauli operators `S_k = X^{k1} Z^{k2}` on a qutrit and their phase tables.
//!
//! The nine operators are indexed by [`PauliIndex`] (an element of Z₃²) and always
//! enumerated in the fixed order of [`PauliIndex::ALL`]:
//! `(0,0),(1,0),(2,0),(0,1),(0,2),(1,1),(2,2),(2,1),(1,2)`.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::linalg::Mat3;
use crate::scalar::{omega_pow, Real, C};

/// Element of Z₃², written `(k1, k2)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PauliIndex {
    pub k1: u8,
    pub k2: u8,
}

impl PauliIndex {
    pub const ZERO: PauliIndex = PauliIndex { k1: 0, k2: 0 };

    /// Canonical enumeration; position 0 is the identity, positions 1..9 follow the
    /// coordinate-vector order.
    pub const ALL: [PauliIndex; 9] = [
        PauliIndex { k1: 0, k2: 0 },
        PauliIndex { k1: 1, k2: 0 },
        PauliIndex { k1: 2, k2: 0 },
        PauliIndex { k1: 0, k2: 1 },
        PauliIndex { k1: 0, k2: 2 },
        PauliIndex { k1: 1, k2: 1 },
        PauliIndex { k1: 2, k2: 2 },
        PauliIndex { k1: 2, k2: 1 },
        PauliIndex { k1: 1, k2: 2 },
    ];

    /// The eight non-zero indices in coordinate-vector order.
    pub fn nonzero() -> impl Iterator<Item = PauliIndex> {
        Self::ALL.into_iter().skip(1)
    }

    /// The four pair representatives `{±k}`, one per pair, in canonical order.
    pub const PAIRS: [PauliIndex; 4] = [
        PauliIndex { k1: 1, k2: 0 },
        PauliIndex { k1: 0, k2: 1 },
        PauliIndex { k1: 1, k2: 1 },
        PauliIndex { k1: 2, k2: 1 },
    ];

    pub fn new(k1: i64, k2: i64) -> Self {
        PauliIndex { k1: k1.rem_euclid(3) as u8, k2: k2.rem_euclid(3) as u8 }
    }

    /// Position in [`PauliIndex::ALL`].
    pub fn pos(self) -> usize {
        Self::ALL.iter().position(|k| *k == self).expect("indices are reduced mod 3")
    }

    pub fn from_pos(pos: usize) -> Self {
        Self::ALL[pos]
    }

    pub fn is_zero(self) -> bool {
        self == Self::ZERO
    }

    /// Position (0..4) of the pair `{±k}` in [`PauliIndex::PAIRS`]; `None` for zero.
    pub fn pair(self) -> Option<usize> {
        if self.is_zero() {
            return None;
        }
        Self::PAIRS.iter().position(|p| *p == self || *p == -self)
    }

    /// Whether `S_self` and `S_other` commute (symplectic product zero).
    pub fn commutes_with(self, other: PauliIndex) -> bool {
        (self.k1 as i64 * other.k2 as i64 - self.k2 as i64 * other.k1 as i64).rem_euclid(3) == 0
    }
}

impl fmt::Debug for PauliIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.k1, self.k2)
    }
}

impl fmt::Display for PauliIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.k1, self.k2)
    }
}

impl Add for PauliIndex {
    type Output = PauliIndex;
    fn add(self, rhs: PauliIndex) -> PauliIndex {
        PauliIndex::new(self.k1 as i64 + rhs.k1 as i64, self.k2 as i64 + rhs.k2 as i64)
    }
}

impl Neg for PauliIndex {
    type Output = PauliIndex;
    fn neg(self) -> PauliIndex {
        PauliIndex::new(-(self.k1 as i64), -(self.k2 as i64))
    }
}

impl Sub for PauliIndex {
    type Output = PauliIndex;
    fn sub(self, rhs: PauliIndex) -> PauliIndex {
        self + (-rhs)
    }
}

/// The shift matrix `X` (rows `(0,1,0),(0,0,1),(1,0,0)`).
pub fn shift_x<T: Real>() -> Mat3<T> {
    let (o, l) = (C::zero(), C::one());
    Mat3::from_rows([[o, l, o], [o, o, l], [l, o, o]])
}

/// The clock matrix `Z = diag(1, ω, ω²)`.
pub fn clock_z<T: Real>() -> Mat3<T> {
    Mat3::diag([omega_pow(0), omega_pow(1), omega_pow(2)])
}

/// `X^{k1} Z^{k2}`, computed by matrix powers.
pub fn make_pauli<T: Real>(k: PauliIndex) -> Mat3<T> {
    shift_x::<T>().powi(k.k1 as u32) * clock_z::<T>().powi(k.k2 as u32)
}

/// The nine Pauli matrices together with every phase the rest of the crate needs.
///
/// All phases are obtained from explicit matrix products when the basis is built; the
/// defining identities are asserted at that point.
#[derive(Clone, Debug)]
pub struct PauliBasis<T> {
    pub mats: [Mat3<T>; 9],
    /// `phi[k][l] = e^{iφ_{kl}}` with `S_l† S_k S_l = e^{iφ_{kl}} S_k`.
    pub phi: [[C<T>; 9]; 9],
    /// `nu[k] = e^{iν_k}` with `S_k† = e^{iν_k} S_{−k}`.
    pub nu: [C<T>; 9],
    /// `compose[l][m] = c` with `S_l S_m = c S_{l+m}`.
    pub compose: [[C<T>; 9]; 9],
}

impl<T: Real> PauliBasis<T> {
    pub fn build() -> Self {
        let mats: [Mat3<T>; 9] = std::array::from_fn(|p| make_pauli(PauliIndex::from_pos(p)));
        let three = T::lit(3.0);
        let coef = |s: &Mat3<T>, m: &Mat3<T>| s.inner(m) / three;

        let mut phi = [[C::zero(); 9]; 9];
        let mut compose = [[C::zero(); 9]; 9];
        let mut nu = [C::zero(); 9];
        for (pk, k) in PauliIndex::ALL.iter().enumerate() {
            nu[pk] = coef(&mats[(-*k).pos()], &mats[pk].adjoint());
            for (pl, l) in PauliIndex::ALL.iter().enumerate() {
                let conj = mats[pl].adjoint() * mats[pk] * mats[pl];
                phi[pk][pl] = coef(&mats[pk], &conj);
                compose[pk][pl] = coef(&mats[(*k + *l).pos()], &(mats[pk] * mats[pl]));
            }
        }
        let basis = PauliBasis { mats, phi, nu, compose };
        basis.assert_identities();
        basis
    }

    fn assert_identities(&self) {
        let tol = T::tol(1e-12);
        let unit = |z: C<T>| (z.norm() - T::one()).abs() <= tol;
        let cube_root = |z: C<T>| (0..3).any(|j| (z - omega_pow::<T>(j)).norm() <= tol);
        for (pk, k) in PauliIndex::ALL.iter().enumerate() {
            let adj = self.mats[pk].adjoint();
            assert!(adj.dist(&self.mats[(-*k).pos()].scale_c(self.nu[pk])) <= tol, "nu table");
            for (pl, l) in PauliIndex::ALL.iter().enumerate() {
                let trace = self.mats[pk].inner(&self.mats[pl]);
                let expect = if pk == pl { T::lit(3.0) } else { T::zero() };
                assert!((trace - Complex::new(expect, T::zero())).norm() <= tol, "orthogonality");
                assert!(cube_root(self.phi[pk][pl]), "phi is a cube root of unity");
                let conj = self.mats[pl].adjoint() * self.mats[pk] * self.mats[pl];
                assert!(conj.dist(&self.mats[pk].scale_c(self.phi[pk][pl])) <= tol, "phi table");
                assert!(unit(self.compose[pk][pl]), "compose phase");
                let prod = self.mats[pk] * self.mats[pl];
                assert!(prod.dist(&self.mats[(*k + *l).pos()].scale_c(self.compose[pk][pl])) <= tol, "composition");
                for (pm, m) in PauliIndex::ALL.iter().enumerate() {
                    let lhs = self.phi[pl][pk] * self.phi[pm][pk];
                    let rhs = self.phi[(*l + *m).pos()][pk];
                    assert!((lhs - rhs).norm() <= tol, "phase additivity");
                    let _ = pm;
                }
            }
            assert!((self.phi[pk][0] - C::one()).norm() <= tol);
        }
    }

    pub fn get(&self, k: PauliIndex) -> &Mat3<T> {
        &self.mats[k.pos()]
    }
}

/// `S_k`, taken from the shared basis.
pub fn pauli<T: Real>(k: PauliIndex) -> Mat3<T> {
    T::pauli_basis().mats[k.pos()]
}

/// `e^{iφ_{kl}}` with `S_l† S_k S_l = e^{iφ_{kl}} S_k`.
pub fn conj_phase<T: Real>(k: PauliIndex, l: PauliIndex) -> C<T> {
    T::pauli_basis().phi[k.pos()][l.pos()]
}

/// `e^{iν_k}` with `S_k† = e^{iν_k} S_{−k}`.
pub fn nu_phase<T: Real>(k: PauliIndex) -> C<T> {
    T::pauli_basis().nu[k.pos()]
}

/// `(l + m, c)` with `S_l S_m = c S_{l+m}`.
pub fn group_compose<T: Real>(l: PauliIndex, m: PauliIndex) -> (PauliIndex, C<T>) {
    (l + m, T::pauli_basis().compose[l.pos()][m.pos()])
}

/// Coordinates of a 3×3 matrix in the Pauli basis: `M = Σ_k c_k S_k` with
/// `c_k = tr(S_k† M)/3`, stored in canonical order (identity coefficient first).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PauliCoords<T> {
    pub c: [C<T>; 9],
}

impl<T: Real> PauliCoords<T> {
    pub fn of(m: &Mat3<T>) -> Self {
        let basis = T::pauli_basis();
        let three = T::lit(3.0);
        PauliCoords { c: std::array::from_fn(|p| basis.mats[p].inner(m) / three) }
    }

    pub fn zero() -> Self {
        PauliCoords { c: [C::zero(); 9] }
    }

    pub fn to_matrix(&self) -> Mat3<T> {
        let basis = T::pauli_basis();
        self.c.iter().zip(&basis.mats).fold(Mat3::zeros(), |acc, (z, s)| acc + s.scale_c(*z))
    }

    pub fn get(&self, k: PauliIndex) -> C<T> {
        self.c[k.pos()]
    }

    pub fn set(&mut self, k: PauliIndex, v: C<T>) {
        self.c[k.pos()] = v;
    }

    /// The identity coefficient.
    pub fn g0(&self) -> C<T> {
        self.c[0]
    }

    /// The eight non-identity coordinates in coordinate-vector order.
    pub fn vector(&self) -> [C<T>; 8] {
        std::array::from_fn(|i| self.c[i + 1])
    }

    pub fn scale(&self, s: T) -> Self {
        PauliCoords { c: self.c.map(|z| z * s) }
    }

    pub fn max_abs_nonzero(&self) -> T {
        self.c[1..].iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }
}

/// Convenience wrapper returning `(g0, 8-vector)`.
pub fn pauli_coords<T: Real>(m: &Mat3<T>) -> (C<T>, [C<T>; 8]) {
    let coords = PauliCoords::of(m);
    (coords.g0(), coords.vector())
}

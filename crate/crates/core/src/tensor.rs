//! Three-qutrit vectors and operators in the index order `|i j k⟩ ↦ 9i + 3j + k`.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_traits::{One, Zero};

use crate::linalg::Mat3;
use crate::scalar::{Real, C};

/// Amplitudes of a three-qutrit vector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ket27<T> {
    pub v: [C<T>; 27],
}

#[inline]
pub fn idx(i: usize, j: usize, k: usize) -> usize {
    9 * i + 3 * j + k
}

impl<T: Real> Ket27<T> {
    pub fn zeros() -> Self {
        Ket27 { v: [C::zero(); 27] }
    }

    pub fn basis(i: usize, j: usize, k: usize) -> Self {
        let mut out = Self::zeros();
        out.v[idx(i, j, k)] = C::one();
        out
    }

    pub fn norm_sqr(&self) -> T {
        self.v.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> C<T> {
        self.v.iter().zip(&other.v).fold(C::zero(), |acc, (a, b)| acc + a.conj() * b)
    }

    pub fn scale(&self, s: T) -> Self {
        Ket27 { v: self.v.map(|z| z * s) }
    }

    pub fn scale_c(&self, s: C<T>) -> Self {
        Ket27 { v: self.v.map(|z| z * s) }
    }

    pub fn normalized(&self) -> Self {
        self.scale(T::one() / self.norm())
    }

    pub fn dist(&self, other: &Self) -> T {
        (*self - *other).norm()
    }

    /// Distance between the unit vectors of `self` and `other` after the best global
    /// phase alignment: `min_θ ‖ŝ − e^{iθ} ô‖`.
    pub fn phase_dist(&self, other: &Self) -> T {
        let (na, nb) = (self.norm(), other.norm());
        if na == T::zero() || nb == T::zero() {
            return if na == nb { T::zero() } else { T::one() };
        }
        let a = self.scale(T::one() / na);
        let b = other.scale(T::one() / nb);
        let ov = b.inner(&a);
        let phase = if ov.norm() > T::zero() { ov / ov.norm() } else { C::one() };
        a.dist(&b.scale_c(phase))
    }

    pub fn is_finite(&self) -> bool {
        self.v.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn cast<U: Real>(&self) -> Ket27<U> {
        Ket27 { v: self.v.map(crate::scalar::cast_c) }
    }
}

impl<T: Real> Add for Ket27<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Ket27 { v: std::array::from_fn(|i| self.v[i] + rhs.v[i]) }
    }
}

impl<T: Real> Sub for Ket27<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Ket27 { v: std::array::from_fn(|i| self.v[i] - rhs.v[i]) }
    }
}

impl<T> Index<usize> for Ket27<T> {
    type Output = C<T>;
    fn index(&self, i: usize) -> &C<T> {
        &self.v[i]
    }
}

impl<T> IndexMut<usize> for Ket27<T> {
    fn index_mut(&mut self, i: usize) -> &mut C<T> {
        &mut self.v[i]
    }
}

/// Dense 27×27 operator, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Op27<T> {
    pub m: Vec<C<T>>,
}

impl<T: Real> Op27<T> {
    pub fn zeros() -> Self {
        Op27 { m: vec![C::zero(); 729] }
    }

    pub fn identity() -> Self {
        let mut out = Self::zeros();
        for i in 0..27 {
            out.m[i * 27 + i] = C::one();
        }
        out
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> C<T> {
        self.m[r * 27 + c]
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros();
        for r in 0..27 {
            for c in 0..27 {
                out.m[c * 27 + r] = self.m[r * 27 + c].conj();
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let mut out = Self::zeros();
        for r in 0..27 {
            for k in 0..27 {
                let a = self.m[r * 27 + k];
                if a == C::zero() {
                    continue;
                }
                for c in 0..27 {
                    out.m[r * 27 + c] = out.m[r * 27 + c] + a * other.m[k * 27 + c];
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &Ket27<T>) -> Ket27<T> {
        Ket27 {
            v: std::array::from_fn(|r| (0..27).fold(C::zero(), |acc, c| acc + self.m[r * 27 + c] * v.v[c])),
        }
    }

    pub fn scale(&self, s: T) -> Self {
        Op27 { m: self.m.iter().map(|z| *z * s).collect() }
    }

    pub fn frobenius(&self) -> T {
        self.m.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn dist(&self, other: &Self) -> T {
        self.m.iter().zip(&other.m).map(|(a, b)| (*a - *b).norm_sqr()).sum::<T>().sqrt()
    }

    /// `Re tr(A†B)`.
    pub fn inner_re(&self, other: &Self) -> T {
        self.m.iter().zip(&other.m).map(|(a, b)| (a.conj() * *b).re).sum()
    }
}

impl<T: Real> Add for &Op27<T> {
    type Output = Op27<T>;
    fn add(self, rhs: Self) -> Op27<T> {
        Op27 { m: self.m.iter().zip(&rhs.m).map(|(a, b)| *a + *b).collect() }
    }
}

impl<T: Real> Mul for &Op27<T> {
    type Output = Op27<T>;
    fn mul(self, rhs: Self) -> Op27<T> {
        self.matmul(rhs)
    }
}

/// `A ⊗ B ⊗ C`.
pub fn kron3<T: Real>(a: &Mat3<T>, b: &Mat3<T>, c: &Mat3<T>) -> Op27<T> {
    let mut out = Op27::zeros();
    for i in 0..3 {
        for ip in 0..3 {
            for j in 0..3 {
                for jp in 0..3 {
                    let ab = a.m[i][ip] * b.m[j][jp];
                    for k in 0..3 {
                        for kp in 0..3 {
                            out.m[idx(i, j, k) * 27 + idx(ip, jp, kp)] = ab * c.m[k][kp];
                        }
                    }
                }
            }
        }
    }
    out
}

/// `(A ⊗ B ⊗ C) v`, computed factor by factor.
pub fn apply3<T: Real>(a: &Mat3<T>, b: &Mat3<T>, c: &Mat3<T>, v: &Ket27<T>) -> Ket27<T> {
    let v = apply_local(a, 0, v);
    let v = apply_local(b, 1, &v);
    apply_local(c, 2, &v)
}

/// Applies `m` on one party (0, 1 or 2) and the identity elsewhere.
pub fn apply_local<T: Real>(m: &Mat3<T>, party: usize, v: &Ket27<T>) -> Ket27<T> {
    let mut out = Ket27::zeros();
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                let mut acc = C::zero();
                for x in 0..3 {
                    let (src, coef) = match party {
                        0 => (idx(x, j, k), m.m[i][x]),
                        1 => (idx(i, x, k), m.m[j][x]),
                        _ => (idx(i, j, x), m.m[k][x]),
                    };
                    acc = acc + coef * v.v[src];
                }
                out.v[idx(i, j, k)] = acc;
            }
        }
    }
    out
}

/// Reduced operator of `|v⟩⟨v|` on one party: `ρ[x][y] = Σ v_{x..} conj(v_{y..})`.
pub fn partial_gram<T: Real>(v: &Ket27<T>, party: usize) -> Mat3<T> {
    let pick = |x: usize, r: usize, s: usize| match party {
        0 => idx(x, r, s),
        1 => idx(r, x, s),
        _ => idx(r, s, x),
    };
    Mat3::from_fn(|x, y| {
        let mut acc = C::zero();
        for r in 0..3 {
            for s in 0..3 {
                acc = acc + v.v[pick(x, r, s)] * v.v[pick(y, r, s)].conj();
            }
        }
        acc
    })
}

/// Permutes tensor factors: output party `q` holds input party `perm[q]`.
pub fn permute_parties<T: Real>(v: &Ket27<T>, perm: [usize; 3]) -> Ket27<T> {
    let mut out = Ket27::zeros();
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                let digits = [i, j, k];
                let mut src = [0usize; 3];
                for q in 0..3 {
                    src[perm[q]] = digits[q];
                }
                out.v[idx(i, j, k)] = v.v[idx(src[0], src[1], src[2])];
            }
        }
    }
    out
}

//! Dense 3×3 complex matrices and a small real SVD.
//!
//! Everything here is fixed-size and allocation-free except [`RealSvd`], which works on
//! tall real matrices stored as columns.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::scalar::{cast_c, cre, Real, C};

/// 3×3 complex matrix, row-major.
#[derive(Clone, Copy, PartialEq)]
pub struct Mat3<T> {
    pub m: [[C<T>; 3]; 3],
}

impl<T: fmt::Debug> fmt::Debug for Mat3<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.m.iter()).finish()
    }
}

impl<T: Real> Default for Mat3<T> {
    fn default() -> Self {
        Self::zeros()
    }
}

impl<T: Real> Mat3<T> {
    pub fn zeros() -> Self {
        Mat3 { m: [[C::zero(); 3]; 3] }
    }

    pub fn identity() -> Self {
        Self::diag([C::one(); 3])
    }

    pub fn diag(d: [C<T>; 3]) -> Self {
        let mut out = Self::zeros();
        for (i, z) in d.into_iter().enumerate() {
            out.m[i][i] = z;
        }
        out
    }

    pub fn diag_real(d: [T; 3]) -> Self {
        Self::diag(d.map(cre))
    }

    pub fn from_rows(m: [[C<T>; 3]; 3]) -> Self {
        Mat3 { m }
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut out = Self::zeros();
        for i in 0..3 {
            for j in 0..3 {
                out.m[i][j] = f(i, j);
            }
        }
        out
    }

    /// Row-major flattening.
    pub fn to_flat(&self) -> [C<T>; 9] {
        let mut out = [C::zero(); 9];
        for i in 0..3 {
            for j in 0..3 {
                out[3 * i + j] = self.m[i][j];
            }
        }
        out
    }

    pub fn from_flat(v: &[C<T>; 9]) -> Self {
        Self::from_fn(|i, j| v[3 * i + j])
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_c(&self, s: C<T>) -> Self {
        self.map(|z| z * s)
    }

    pub fn map(&self, f: impl Fn(C<T>) -> C<T>) -> Self {
        Mat3 { m: self.m.map(|row| row.map(&f)) }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(|i, j| self.m[j][i].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(|i, j| self.m[j][i])
    }

    pub fn trace(&self) -> C<T> {
        self.m[0][0] + self.m[1][1] + self.m[2][2]
    }

    pub fn det(&self) -> C<T> {
        let m = &self.m;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Classical adjugate (transpose of the cofactor matrix); `adj(M)·M = det(M)·I`.
    pub fn adjugate(&self) -> Self {
        let m = &self.m;
        let cof = |r0: usize, r1: usize, c0: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
        Mat3::from_rows([
            [cof(1, 2, 1, 2), -cof(0, 2, 1, 2), cof(0, 1, 1, 2)],
            [-cof(1, 2, 0, 2), cof(0, 2, 0, 2), -cof(0, 1, 0, 2)],
            [cof(1, 2, 0, 1), -cof(0, 2, 0, 1), cof(0, 1, 0, 1)],
        ])
    }

    /// Inverse, or `None` when `|det|` is below `tol · ‖M‖_F³`.
    pub fn inverse_tol(&self, tol: T) -> Option<Self> {
        let d = self.det();
        let scale = self.frobenius().powi(3);
        if d.norm() <= tol * scale || scale == T::zero() {
            return None;
        }
        Some(self.adjugate().scale_c(d.inv()))
    }

    pub fn inverse(&self) -> Option<Self> {
        self.inverse_tol(T::tol(1e-12))
    }

    pub fn frobenius(&self) -> T {
        self.m.iter().flatten().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.m.iter().flatten().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    /// Frobenius inner product `tr(A† B)`.
    pub fn inner(&self, other: &Self) -> C<T> {
        let mut acc = C::zero();
        for i in 0..3 {
            for j in 0..3 {
                acc = acc + self.m[i][j].conj() * other.m[i][j];
            }
        }
        acc
    }

    pub fn dist(&self, other: &Self) -> T {
        (*self - *other).frobenius()
    }

    pub fn mul_vec(&self, v: &[C<T>; 3]) -> [C<T>; 3] {
        let mut out = [C::zero(); 3];
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.m[i][0] * v[0] + self.m[i][1] * v[1] + self.m[i][2] * v[2];
        }
        out
    }

    pub fn powi(&self, n: u32) -> Self {
        (0..n).fold(Self::identity(), |acc, _| acc * *self)
    }

    /// `‖M − M†‖_F ≤ tol · ‖M‖_F`.
    pub fn is_hermitian(&self, tol: T) -> bool {
        self.dist(&self.adjoint()) <= tol * self.frobenius().max(T::min_positive_value())
    }

    pub fn hermitian_part(&self) -> Self {
        (*self + self.adjoint()).scale(T::lit(0.5))
    }

    /// `‖M†M − I‖_F ≤ tol`.
    pub fn is_unitary(&self, tol: T) -> bool {
        (self.adjoint() * *self).dist(&Self::identity()) <= tol
    }

    /// Eigen-decomposition of the Hermitian part by cyclic complex Jacobi rotations.
    ///
    /// Returns eigenvalues in ascending order and the unitary whose columns are the
    /// matching eigenvectors.
    pub fn hermitian_eigen(&self) -> ([T; 3], Mat3<T>) {
        let mut a = self.hermitian_part();
        let mut v = Mat3::identity();
        let scale = a.frobenius();
        if scale == T::zero() {
            return ([T::zero(); 3], v);
        }
        let eps = T::epsilon();
        for _ in 0..64 {
            let off = a.m[0][1].norm_sqr() + a.m[0][2].norm_sqr() + a.m[1][2].norm_sqr();
            if off.sqrt() <= eps * scale {
                break;
            }
            for (p, q) in [(0, 1), (0, 2), (1, 2)] {
                let apq = a.m[p][q];
                let r = apq.norm();
                if r <= eps * eps * scale {
                    continue;
                }
                let phase = apq / r;
                let theta = (a.m[q][q].re - a.m[p][p].re) / (T::lit(2.0) * r);
                let t = if theta >= T::zero() {
                    T::one() / (theta + (theta * theta + T::one()).sqrt())
                } else {
                    -T::one() / (-theta + (theta * theta + T::one()).sqrt())
                };
                let cth = T::one() / (T::one() + t * t).sqrt();
                let sth = t * cth;
                let mut j = Mat3::identity();
                j.m[p][p] = cre(cth);
                j.m[p][q] = cre(sth);
                j.m[q][p] = phase.conj() * (-sth);
                j.m[q][q] = phase.conj() * cth;
                a = j.adjoint() * a * j;
                a = a.hermitian_part();
                v = v * j;
            }
        }
        let mut pairs: Vec<(T, usize)> = (0..3).map(|i| (a.m[i][i].re, i)).collect();
        pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(std::cmp::Ordering::Equal));
        let evals = [pairs[0].0, pairs[1].0, pairs[2].0];
        let vecs = Mat3::from_fn(|i, j| v.m[i][pairs[j].1]);
        (evals, vecs)
    }

    pub fn min_eigenvalue(&self) -> T {
        self.hermitian_eigen().0[0]
    }

    /// `V f(Λ) V†` for the Hermitian part.
    pub fn hermitian_fn(&self, f: impl Fn(T) -> T) -> Self {
        let (evals, v) = self.hermitian_eigen();
        v * Mat3::diag_real(evals.map(f)) * v.adjoint()
    }

    pub fn cast<U: Real>(&self) -> Mat3<U> {
        Mat3 { m: self.m.map(|row| row.map(cast_c)) }
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl<T: Real> Index<(usize, usize)> for Mat3<T> {
    type Output = C<T>;
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.m[i][j]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for Mat3<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        &mut self.m[i][j]
    }
}

impl<T: Real> Add for Mat3<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.m[i][j] + rhs.m[i][j])
    }
}

impl<T: Real> Sub for Mat3<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.m[i][j] - rhs.m[i][j])
    }
}

impl<T: Real> Neg for Mat3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self.map(|z| -z)
    }
}

impl<T: Real> Mul for Mat3<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.m[i][0] * rhs.m[0][j] + self.m[i][1] * rhs.m[1][j] + self.m[i][2] * rhs.m[2][j])
    }
}

impl<T: Real> Mul<C<T>> for Mat3<T> {
    type Output = Self;
    fn mul(self, rhs: C<T>) -> Self {
        self.scale_c(rhs)
    }
}

/// Singular value decomposition of a real `m × n` matrix (`m ≥ n`) given by columns,
/// computed with one-sided Jacobi rotations.
#[derive(Clone, Debug)]
pub struct RealSvd<T> {
    /// Singular values, unsorted, one per input column.
    pub sigma: Vec<T>,
    /// Left singular vectors (columns, length `m`); zero for vanishing singular values.
    pub u: Vec<Vec<T>>,
    /// Right singular vectors (columns, length `n`).
    pub v: Vec<Vec<T>>,
}

impl<T: Real> RealSvd<T> {
    pub fn new(columns: &[Vec<T>]) -> Self {
        let n = columns.len();
        let mut a: Vec<Vec<T>> = columns.to_vec();
        let mut v: Vec<Vec<T>> = (0..n).map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect()).collect();
        let eps = T::epsilon();
        for _sweep in 0..80 {
            let mut rotated = false;
            for i in 0..n {
                for j in (i + 1)..n {
                    let alpha: T = a[i].iter().map(|x| *x * *x).sum();
                    let beta: T = a[j].iter().map(|x| *x * *x).sum();
                    let gamma: T = a[i].iter().zip(&a[j]).map(|(x, y)| *x * *y).sum();
                    if gamma.abs() <= eps * (alpha * beta).sqrt() || gamma == T::zero() {
                        continue;
                    }
                    rotated = true;
                    let zeta = (beta - alpha) / (T::lit(2.0) * gamma);
                    let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                    let cs = T::one() / (T::one() + t * t).sqrt();
                    let sn = cs * t;
                    rotate_pair(&mut a, i, j, cs, sn);
                    rotate_pair(&mut v, i, j, cs, sn);
                }
            }
            if !rotated {
                break;
            }
        }
        let sigma: Vec<T> = a.iter().map(|col| col.iter().map(|x| *x * *x).sum::<T>().sqrt()).collect();
        let u = a
            .into_iter()
            .zip(&sigma)
            .map(|(col, s)| if *s > T::zero() { col.into_iter().map(|x| x / *s).collect() } else { col })
            .collect();
        RealSvd { sigma, u, v }
    }

    pub fn sigma_max(&self) -> T {
        self.sigma.iter().copied().fold(T::zero(), T::max)
    }

    /// Number of singular values above `rel_tol · σ_max`.
    pub fn rank(&self, rel_tol: T) -> usize {
        let cut = rel_tol * self.sigma_max();
        self.sigma.iter().filter(|s| **s > cut).count()
    }

    /// Minimum-norm least-squares solution of `A x = b`, dropping singular values at or
    /// below `rel_tol · σ_max`.
    pub fn solve(&self, b: &[T], rel_tol: T) -> Vec<T> {
        let n = self.sigma.len();
        let cut = rel_tol * self.sigma_max();
        let mut x = vec![T::zero(); n];
        for k in 0..n {
            let s = self.sigma[k];
            if s <= cut {
                continue;
            }
            let coef: T = self.u[k].iter().zip(b).map(|(u, b)| *u * *b).sum::<T>() / s;
            for (xi, vi) in x.iter_mut().zip(&self.v[k]) {
                *xi = *xi + coef * *vi;
            }
        }
        x
    }

    /// Orthonormal basis of the (numerical) null space.
    pub fn null_space(&self, rel_tol: T) -> Vec<Vec<T>> {
        let cut = rel_tol * self.sigma_max();
        self.sigma
            .iter()
            .zip(&self.v)
            .filter(|(s, _)| **s <= cut)
            .map(|(_, v)| v.clone())
            .collect()
    }
}

fn rotate_pair<T: Real>(cols: &mut [Vec<T>], i: usize, j: usize, cs: T, sn: T) {
    let (left, right) = cols.split_at_mut(j);
    let ci = &mut left[i];
    let cj = &mut right[0];
    for (x, y) in ci.iter_mut().zip(cj.iter_mut()) {
        let xi = *x;
        let yj = *y;
        *x = cs * xi - sn * yj;
        *y = sn * xi + cs * yj;
    }
}

/// Solves the small dense real system `A x = b` by Gaussian elimination with partial
/// pivoting. Returns `None` when a pivot falls below `tol · max|A|`.
pub fn solve_real_square<T: Real>(a: &[Vec<T>], b: &[T], tol: T) -> Option<Vec<T>> {
    let n = b.len();
    let mut m: Vec<Vec<T>> = a.iter().zip(b).map(|(row, bi)| row.iter().copied().chain([*bi]).collect()).collect();
    let scale = a.iter().flatten().map(|x| x.abs()).fold(T::zero(), T::max);
    if scale == T::zero() {
        return if n == 0 { Some(vec![]) } else { None };
    }
    for col in 0..n {
        let piv = (col..n).max_by(|&r1, &r2| m[r1][col].abs().partial_cmp(&m[r2][col].abs()).unwrap())?;
        if m[piv][col].abs() <= tol * scale {
            return None;
        }
        m.swap(col, piv);
        for r in (col + 1)..n {
            let f = m[r][col] / m[col][col];
            if f != T::zero() {
                for c2 in col..=n {
                    let v = m[col][c2];
                    m[r][c2] = m[r][c2] - f * v;
                }
            }
        }
    }
    let mut x = vec![T::zero(); n];
    for r in (0..n).rev() {
        let mut acc = m[r][n];
        for c2 in (r + 1)..n {
            acc = acc - m[r][c2] * x[c2];
        }
        x[r] = acc / m[r][r];
    }
    Some(x)
}

/// Builds a complex number with the given polar form, generic over precision.
pub fn polar<T: Real>(r: T, theta: T) -> C<T> {
    Complex::from_polar(r, theta)
}

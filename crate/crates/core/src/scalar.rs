//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::sync::OnceLock;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

use crate::pauli::PauliBasis;

/// Complex number over the scalar `T`.
pub type C<T> = Complex<T>;

/// Real floating-point scalar (`f32` or `f64`) that the linear algebra is generic over.
///
/// Each implementation owns a lazily built [`PauliBasis`] so that the phase tables are
/// computed once per precision and then shared read-only.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    fn pauli_basis() -> &'static PauliBasis<Self>;

    /// Converts an `f64` literal. Panics only on non-representable input, which never
    /// happens for the finite constants used in this crate.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    /// Smallest tolerance that is meaningful at this precision.
    fn tol_floor() -> Self {
        Self::epsilon() * Self::lit(1e4)
    }

    /// `x` clamped from below by [`Real::tol_floor`].
    fn tol(x: f64) -> Self {
        Self::lit(x).max(Self::tol_floor())
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    fn pauli_basis() -> &'static PauliBasis<f64> {
        static BASIS: OnceLock<PauliBasis<f64>> = OnceLock::new();
        BASIS.get_or_init(PauliBasis::build)
    }
}

impl Real for f32 {
    fn pauli_basis() -> &'static PauliBasis<f32> {
        static BASIS: OnceLock<PauliBasis<f32>> = OnceLock::new();
        BASIS.get_or_init(PauliBasis::build)
    }
}

pub(crate) fn c<T: Real>(re: f64, im: f64) -> C<T> {
    Complex::new(T::lit(re), T::lit(im))
}

pub(crate) fn cre<T: Real>(re: T) -> C<T> {
    Complex::new(re, T::zero())
}

/// `e^{i 2π j / 3}`.
pub fn omega_pow<T: Real>(j: i64) -> C<T> {
    let j = j.rem_euclid(3) as f64;
    let angle = T::lit(2.0 * std::f64::consts::PI * j / 3.0);
    Complex::from_polar(T::one(), angle)
}

/// Converts a complex value between precisions.
pub fn cast_c<T: Real, U: Real>(z: C<T>) -> C<U> {
    Complex::new(U::lit(z.re.as_f64()), U::lit(z.im.as_f64()))
}

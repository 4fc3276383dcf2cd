//! Working-precision abstraction.
//!
//! Every numerical routine is generic over [`Real`], implemented for `f64`
//! and for the double-double type [`Dd`](crate::dd::Dd). Complex values are
//! `num_complex::Complex<T>`; the transcendental helpers for them live here
//! because `num_complex` only provides them for `num_traits::Float` types.

use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::OnceLock;

use num_complex::Complex;
use num_traits::Num;

use crate::quad::{GaussLegendre, Precision, TanhSinhTable};

pub trait Real:
    Num
    + Copy
    + Send
    + Sync
    + 'static
    + PartialOrd
    + fmt::Debug
    + fmt::Display
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    /// Unit roundoff of the working precision.
    const EPSILON: f64;
    const PRECISION: Precision;
    /// Real part above which Stirling's series is used for log-gamma.
    const LGAMMA_SHIFT: f64;
    /// Number of Stirling correction terms.
    const LGAMMA_TERMS: usize;

    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn pi() -> Self;
    /// ln(2π)/2
    fn ln_sqrt_2pi() -> Self;

    fn abs(self) -> Self;
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn exp_m1(self) -> Self;
    fn ln(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn sin_cos(self) -> (Self, Self);
    fn sinh(self) -> Self;
    fn cosh(self) -> Self;
    fn atan2(self, x: Self) -> Self;
    fn floor(self) -> Self;
    fn is_finite(self) -> bool;
    /// Scaled complementary error function e^{x²}·erfc(x).
    fn erfcx(self) -> Self;

    fn tanh_sinh_table() -> &'static TanhSinhTable<Self>;
    fn gauss_legendre() -> &'static GaussLegendre<Self>;

    fn from_usize(n: usize) -> Self {
        Self::from_f64(n as f64)
    }

    fn powf(self, y: Self) -> Self {
        (y * self.ln()).exp()
    }

    fn powi(self, n: i32) -> Self {
        let mut base = if n < 0 { Self::one() / self } else { self };
        let mut k = n.unsigned_abs();
        let mut acc = Self::one();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            k >>= 1;
        }
        acc
    }

    fn round(self) -> Self {
        (self + 0.5).floor()
    }

    fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    fn hypot(self, other: Self) -> Self {
        let a = self.abs();
        let b = other.abs();
        let (big, small) = if a >= b { (a, b) } else { (b, a) };
        if big == Self::zero() {
            return big;
        }
        let r = small / big;
        big * (r * r + 1.0).sqrt()
    }
}

impl Real for f64 {
    const EPSILON: f64 = f64::EPSILON / 2.0;
    const PRECISION: Precision = Precision::Double;
    const LGAMMA_SHIFT: f64 = 10.0;
    const LGAMMA_TERMS: usize = 10;

    #[inline]
    fn from_f64(x: f64) -> Self {
        x
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
    #[inline]
    fn pi() -> Self {
        std::f64::consts::PI
    }
    #[inline]
    fn ln_sqrt_2pi() -> Self {
        0.918_938_533_204_672_8
    }
    #[inline]
    fn abs(self) -> Self {
        f64::abs(self)
    }
    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    #[inline]
    fn exp(self) -> Self {
        f64::exp(self)
    }
    #[inline]
    fn exp_m1(self) -> Self {
        f64::exp_m1(self)
    }
    #[inline]
    fn ln(self) -> Self {
        f64::ln(self)
    }
    #[inline]
    fn sin(self) -> Self {
        f64::sin(self)
    }
    #[inline]
    fn cos(self) -> Self {
        f64::cos(self)
    }
    #[inline]
    fn sin_cos(self) -> (Self, Self) {
        f64::sin_cos(self)
    }
    #[inline]
    fn sinh(self) -> Self {
        f64::sinh(self)
    }
    #[inline]
    fn cosh(self) -> Self {
        f64::cosh(self)
    }
    #[inline]
    fn atan2(self, x: Self) -> Self {
        f64::atan2(self, x)
    }
    #[inline]
    fn floor(self) -> Self {
        f64::floor(self)
    }
    #[inline]
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    #[inline]
    fn powf(self, y: Self) -> Self {
        f64::powf(self, y)
    }
    #[inline]
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
    #[inline]
    fn hypot(self, other: Self) -> Self {
        f64::hypot(self, other)
    }
    fn erfcx(self) -> Self {
        crate::specfun::erf::erfcx_f64(self)
    }
    fn tanh_sinh_table() -> &'static TanhSinhTable<Self> {
        static TABLE: OnceLock<TanhSinhTable<f64>> = OnceLock::new();
        TABLE.get_or_init(TanhSinhTable::build)
    }
    fn gauss_legendre() -> &'static GaussLegendre<Self> {
        static RULE: OnceLock<GaussLegendre<f64>> = OnceLock::new();
        RULE.get_or_init(GaussLegendre::build)
    }
}

/// Complex helpers for generic working precision.
pub mod cx {
    use super::*;

    #[inline]
    pub fn real<T: Real>(re: T) -> Complex<T> {
        Complex::new(re, T::zero())
    }

    #[inline]
    pub fn abs<T: Real>(z: Complex<T>) -> T {
        z.re.hypot(z.im)
    }

    pub fn exp<T: Real>(z: Complex<T>) -> Complex<T> {
        let m = z.re.exp();
        let (s, c) = z.im.sin_cos();
        Complex::new(m * c, m * s)
    }

    /// Principal logarithm.
    pub fn ln<T: Real>(z: Complex<T>) -> Complex<T> {
        Complex::new(abs(z).ln(), z.im.atan2(z.re))
    }

    /// x^s for real x > 0 and complex s.
    pub fn real_pow<T: Real>(x: T, s: Complex<T>) -> Complex<T> {
        exp(s * x.ln())
    }

    pub fn cosh<T: Real>(z: Complex<T>) -> Complex<T> {
        let (s, c) = z.im.sin_cos();
        Complex::new(z.re.cosh() * c, z.re.sinh() * s)
    }

    pub fn cos<T: Real>(z: Complex<T>) -> Complex<T> {
        let (s, c) = z.re.sin_cos();
        Complex::new(c * z.im.cosh(), -(s * z.im.sinh()))
    }

    pub fn to_f64<T: Real>(z: Complex<T>) -> Complex<f64> {
        Complex::new(z.re.to_f64(), z.im.to_f64())
    }

    pub fn from_f64<T: Real>(z: Complex<f64>) -> Complex<T> {
        Complex::new(T::from_f64(z.re), T::from_f64(z.im))
    }
}

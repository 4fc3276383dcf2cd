//! Numerical integration: tanh-sinh on finite intervals, adaptive
//! Gauss-Legendre for smooth oscillatory ranges, truncated semi-infinite
//! integrals and vertical-line contour integrals.
//!
//! Every routine is generic over the working precision `T` and over the
//! integrand value type (`T` or `Complex<T>`).

mod contour;
mod gauss_legendre;
mod tanh_sinh;

use std::ops::{Add, Sub};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::{cx, Real};

pub use contour::{integrate_vertical_line, MellinBarnesSpec};
pub use gauss_legendre::{integrate_adaptive, GaussLegendre};
pub use tanh_sinh::{integrate_finite, TanhSinhTable};

/// Working precision requested for a computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    /// IEEE binary64, about 16 significant digits.
    Double,
    /// Double-double, about 31 significant digits.
    Extended,
}

impl Precision {
    pub fn name(self) -> &'static str {
        match self {
            Precision::Double => "double",
            Precision::Extended => "extended",
        }
    }
}

/// Tolerances and budgets for a quadrature call.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_refinements: u32,
    pub max_evals: usize,
    pub precision: Precision,
}

impl Default for QuadSpec {
    fn default() -> Self {
        QuadSpec {
            abs_tol: 1e-14,
            rel_tol: 1e-12,
            max_refinements: 12,
            max_evals: 2_000_000,
            precision: Precision::Double,
        }
    }
}

impl QuadSpec {
    /// Defaults for the double-double working precision.
    pub fn extended() -> Self {
        QuadSpec {
            abs_tol: 1e-30,
            rel_tol: 1e-28,
            precision: Precision::Extended,
            ..QuadSpec::default()
        }
    }

    pub fn for_precision(precision: Precision) -> Self {
        match precision {
            Precision::Double => QuadSpec::default(),
            Precision::Extended => QuadSpec::extended(),
        }
    }

    pub fn with_tolerances(self, abs_tol: f64, rel_tol: f64) -> Self {
        QuadSpec {
            abs_tol,
            rel_tol,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.abs_tol) || !positive(self.rel_tol) {
            return Err(Error::InvalidInput(format!(
                "tolerances must be positive (abs_tol = {}, rel_tol = {})",
                self.abs_tol, self.rel_tol
            )));
        }
        if self.max_refinements < 1 || self.max_evals < 1 {
            return Err(Error::InvalidInput(
                "max_refinements and max_evals must be at least 1".into(),
            ));
        }
        Ok(())
    }

    /// Unit roundoff of the selected precision.
    pub fn unit_roundoff(&self) -> f64 {
        match self.precision {
            Precision::Double => <f64 as Real>::EPSILON,
            Precision::Extended => <crate::dd::Dd as Real>::EPSILON,
        }
    }

    /// Target error for a result of magnitude `value`.
    pub fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value)
    }
}

/// Outcome of a quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralResult<V> {
    pub value: V,
    pub error_estimate: f64,
    /// Integral of the absolute integrand, the scale for roundoff.
    pub magnitude: f64,
    pub evaluations: usize,
    pub converged: bool,
    /// The error estimate has reached the roundoff floor of the sum.
    pub noise_limited: bool,
    /// Truncation point of an infinite range, when one was chosen.
    pub truncation: Option<f64>,
}

impl<V: Copy> IntegralResult<V> {
    /// Turns a non-converged result into an error.
    pub fn require(self, spec: &QuadSpec) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NonConvergence {
                estimate: self.error_estimate,
                tolerance: spec.abs_tol,
                evaluations: self.evaluations,
            })
        }
    }

    /// Accepts results that either converged or stalled at roundoff level.
    pub fn require_or_noise(self, spec: &QuadSpec) -> Result<Self> {
        if self.converged || self.noise_limited {
            Ok(self)
        } else {
            self.require(spec)
        }
    }

    pub fn map<W>(self, f: impl FnOnce(V) -> W) -> IntegralResult<W> {
        IntegralResult {
            value: f(self.value),
            error_estimate: self.error_estimate,
            magnitude: self.magnitude,
            evaluations: self.evaluations,
            converged: self.converged,
            noise_limited: self.noise_limited,
            truncation: self.truncation,
        }
    }
}

/// Values an integrand may return.
pub trait QuadValue<T: Real>: Copy + Send + Sync + Add<Output = Self> + Sub<Output = Self> {
    fn zero() -> Self;
    fn scale(self, w: T) -> Self;
    fn norm(self) -> f64;
    fn is_finite(self) -> bool;
}

impl<T: Real> QuadValue<T> for T {
    #[inline]
    fn zero() -> Self {
        T::zero()
    }
    #[inline]
    fn scale(self, w: T) -> Self {
        self * w
    }
    #[inline]
    fn norm(self) -> f64 {
        self.abs().to_f64()
    }
    #[inline]
    fn is_finite(self) -> bool {
        Real::is_finite(self)
    }
}

impl<T: Real> QuadValue<T> for Complex<T> {
    #[inline]
    fn zero() -> Self {
        Complex::new(T::zero(), T::zero())
    }
    #[inline]
    fn scale(self, w: T) -> Self {
        Complex::new(self.re * w, self.im * w)
    }
    #[inline]
    fn norm(self) -> f64 {
        cx::abs(self).to_f64()
    }
    #[inline]
    fn is_finite(self) -> bool {
        Real::is_finite(self.re) && Real::is_finite(self.im)
    }
}

/// Smallest probe point `t ≥ start` beyond which `|f|` stays below
/// `threshold`, searched geometrically and capped at `limit`.
///
/// The test looks at a few points past each candidate so that isolated
/// zeros of an oscillating integrand do not end the search early.
pub fn decay_cutoff<T: Real, V: QuadValue<T>>(
    f: &impl Fn(T) -> V,
    start: f64,
    threshold: f64,
    limit: f64,
) -> f64 {
    let mut t = start.max(f64::MIN_POSITIVE);
    loop {
        let quiet = (0..4).all(|k| {
            let v = f(T::from_f64(t * (1.0 + 0.07 * k as f64)));
            v.is_finite() && v.norm() <= threshold
        });
        if quiet || t >= limit {
            return t.min(limit);
        }
        t *= 1.25;
    }
}

/// `∫_0^∞ f` for an integrand bounded by `C·e^{−t/decay_scale}` far out.
pub fn integrate_semi_infinite<T: Real, V: QuadValue<T>>(
    f: impl Fn(T) -> V,
    decay_scale: f64,
    spec: &QuadSpec,
) -> Result<IntegralResult<V>> {
    integrate_semi_infinite_from(f, 0.0, decay_scale, spec)
}

/// `∫_a^∞ f` with the same decay requirement as [`integrate_semi_infinite`].
///
/// The range is truncated at the first probe point past which `|f|` times
/// the decay scale stays below `abs_tol/10`; the point is reported in
/// [`IntegralResult::truncation`].
pub fn integrate_semi_infinite_from<T: Real, V: QuadValue<T>>(
    f: impl Fn(T) -> V,
    a: f64,
    decay_scale: f64,
    spec: &QuadSpec,
) -> Result<IntegralResult<V>> {
    if !(decay_scale > 0.0 && decay_scale.is_finite()) {
        return Err(Error::InvalidDecayScale(decay_scale));
    }
    let threshold = spec.abs_tol / 10.0 / decay_scale;
    let cut = decay_cutoff(&f, a + decay_scale, threshold, a + 1e4 * decay_scale);
    let mut result = integrate_finite(&f, T::from_f64(a), T::from_f64(cut), spec)?;
    result.evaluations += 4;
    result.truncation = Some(cut);
    Ok(result)
}

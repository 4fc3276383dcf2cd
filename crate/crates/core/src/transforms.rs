//! The discrete index Whittaker transforms and their inversions.
//!
//! * forward series f(x) = e^{−x/2} Σ a_n W_{μ,in}(x) and its inversion
//!   a_n = 2^{1/2+μ}/π²·Γ(1−2μ)·n sinh(2πn)·∫_0^∞ Φ^μ_n(t) f(t) t^{−3/2} dt;
//! * coefficient transform a_n = ∫_0^∞ e^{−x/2} W_{μ,in/2}(x) f(x) x^{μ−2} dx
//!   and its synthesis f(x) = (x/2)^{1−μ}/π²·Γ(2−2μ)·Σ sinh(πn) Ψ^μ_n(x) a_n.
//!
//! Sequences are 1-based: `values[0]` is a_1.

use std::cell::Cell;
use std::f64::consts::PI;
use std::ops::{Add, Sub};

use num_complex::{Complex, Complex64};
use serde::{Deserialize, Serialize};

use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::kernels::{check_index_cap, derated_spec, phi0_kernel_generic, phi_kernel_scaled};
use crate::quad::{
    integrate_finite, integrate_semi_infinite, integrate_semi_infinite_from, IntegralResult,
    Precision, QuadSpec, QuadValue,
};
use crate::real::{cx, Real};
use crate::specfun::{gamma_abs_sq, gamma_real, laplace_moment, scaled_whittaker_w};

/// The parameters μ and δ of the transform pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransformParams {
    pub mu: f64,
    #[serde(default)]
    pub delta: f64,
}

impl TransformParams {
    pub fn new(mu: f64, delta: f64) -> Self {
        TransformParams { mu, delta }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.mu.is_finite() {
            return Err(Error::InvalidInput(format!("μ must be finite, got {}", self.mu)));
        }
        if !(0.0..PI / 2.0).contains(&self.delta) {
            return Err(Error::InvalidInput(format!("δ must lie in [0, π/2), got {}", self.delta)));
        }
        Ok(())
    }

    /// The inversion theorems need μ < 1/2.
    pub fn require_inversion(&self) -> Result<()> {
        self.validate()?;
        check_mu(self.mu)
    }
}

fn check_mu(mu: f64) -> Result<()> {
    if mu < 0.5 {
        Ok(())
    } else {
        Err(Error::Domain(format!("the inversion formulas need μ < 1/2, got {mu}")))
    }
}

fn check_x(x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("x must be positive, got {x}")))
    }
}

fn check_n(n: u32) -> Result<()> {
    if n >= 1 {
        Ok(())
    } else {
        Err(Error::Domain("coefficient indices start at 1".into()))
    }
}

/// A finite coefficient sequence a_1..a_N.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSeq {
    values: Vec<Complex64>,
}

impl CoefficientSeq {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidInput("coefficients must be finite".into()));
        }
        Ok(CoefficientSeq { values })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// a_n for 1-based `n`, zero past the end.
    pub fn get(&self, n: u32) -> Complex64 {
        n.checked_sub(1)
            .and_then(|i| self.values.get(i as usize))
            .copied()
            .unwrap_or_default()
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        CoefficientSeq {
            values: self.values.iter().map(|&v| v * factor).collect(),
        }
    }

    /// Termwise sum, padding the shorter sequence with zeros.
    pub fn plus(&self, other: &Self) -> Self {
        let len = self.len().max(other.len());
        CoefficientSeq {
            values: (1..=len as u32).map(|n| self.get(n) + other.get(n)).collect(),
        }
    }
}

/// ψ(u) = Σ_k c_k cos(ku) + Σ_k b_k sin(ku), a 2π-periodic Lipschitz function.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PsiSpec {
    /// b_1, b_2, …
    #[serde(default)]
    pub sine_coeffs: Vec<f64>,
    /// c_0, c_1, …
    #[serde(default)]
    pub cosine_coeffs: Vec<f64>,
}

impl PsiSpec {
    pub fn sine(k: u32, amplitude: f64) -> Self {
        let mut sine_coeffs = vec![0.0; k as usize];
        if k >= 1 {
            sine_coeffs[k as usize - 1] = amplitude;
        }
        PsiSpec {
            sine_coeffs,
            cosine_coeffs: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sine_coeffs.iter().chain(&self.cosine_coeffs).all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::InvalidInput("ψ coefficients must be finite".into()))
        }
    }

    /// Highest harmonic present.
    pub fn degree(&self) -> usize {
        self.sine_coeffs.len().max(self.cosine_coeffs.len().saturating_sub(1))
    }

    /// Lipschitz constant Σ k(|b_k| + |c_k|).
    pub fn lipschitz_constant(&self) -> f64 {
        let s: f64 = self.sine_coeffs.iter().enumerate().map(|(i, b)| (i + 1) as f64 * b.abs()).sum();
        let c: f64 = self.cosine_coeffs.iter().enumerate().map(|(k, c)| k as f64 * c.abs()).sum();
        s + c
    }

    pub fn eval<T: Real>(&self, u: T) -> T {
        self.odd_part(u) + self.even_part(u)
    }

    fn odd_part<T: Real>(&self, u: T) -> T {
        self.sine_coeffs
            .iter()
            .enumerate()
            .fold(T::zero(), |acc, (i, &b)| acc + (u * (i + 1) as f64).sin() * b)
    }

    fn even_part<T: Real>(&self, u: T) -> T {
        self.cosine_coeffs
            .iter()
            .enumerate()
            .fold(T::zero(), |acc, (k, &c)| acc + (u * k as f64).cos() * c)
    }
}

/// A function sampled on a grid, interpolated by monotone piecewise cubics
/// and taken as zero outside the grid.
///
/// Round-trip guarantees only cover the analytic handles; sampled data are
/// integrated as given.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    x: Vec<f64>,
    y: Vec<f64>,
    slopes: Vec<f64>,
}

impl SampledFunction {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() || x.len() < 2 {
            return Err(Error::InvalidInput("a sampled function needs at least two (x, f) pairs".into()));
        }
        if !x.iter().all(|&v| v > 0.0 && v.is_finite()) || !x.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidInput("sample points must be positive and strictly increasing".into()));
        }
        if !y.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidInput("sampled values must be finite".into()));
        }
        let slopes = pchip_slopes(&x, &y);
        Ok(SampledFunction { x, y, slopes })
    }

    pub fn points(&self) -> (&[f64], &[f64]) {
        (&self.x, &self.y)
    }

    pub fn range(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    pub fn eval(&self, t: f64) -> f64 {
        let (lo, hi) = self.range();
        if !(t >= lo && t <= hi) {
            return 0.0;
        }
        let i = match self.x.partition_point(|&v| v <= t) {
            0 => 0,
            k => (k - 1).min(self.x.len() - 2),
        };
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.y[i] + h10 * h * self.slopes[i] + h01 * self.y[i + 1] + h11 * h * self.slopes[i + 1]
    }
}

/// Fritsch-Carlson derivative estimates.
fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let d: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
    if n == 2 {
        return vec![d[0], d[0]];
    }
    let mut m = vec![0.0; n];
    for i in 1..n - 1 {
        if d[i - 1] * d[i] > 0.0 {
            let w1 = 2.0 * h[i] + h[i - 1];
            let w2 = h[i] + 2.0 * h[i - 1];
            m[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
        }
    }
    let end = |h0: f64, h1: f64, d0: f64, d1: f64| {
        let m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if m * d0 <= 0.0 {
            0.0
        } else if d0 * d1 <= 0.0 && m.abs() > 3.0 * d0.abs() {
            3.0 * d0
        } else {
            m
        }
    };
    m[0] = end(h[0], h[1], d[0], d[1]);
    m[n - 1] = end(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
    m
}

/// The function a transform acts on.
#[derive(Debug, Clone, PartialEq)]
pub enum FunctionHandle {
    /// e^{−x/2} Σ a_n W_{μ,in}(x).
    Forward { seq: CoefficientSeq, mu: f64 },
    /// The integral representation built from ψ.
    FromPsi { psi: PsiSpec, mu: f64 },
    Sampled(SampledFunction),
    Zero,
}

impl FunctionHandle {
    pub fn forward(values: &[f64], mu: f64) -> Result<Self> {
        Ok(FunctionHandle::Forward {
            seq: CoefficientSeq::from_real(values)?,
            mu,
        })
    }

    /// Whether every evaluation is identically zero.
    pub fn is_zero(&self) -> bool {
        match self {
            FunctionHandle::Zero => true,
            FunctionHandle::Forward { seq, .. } => seq.values().iter().all(|v| *v == Complex64::default()),
            FunctionHandle::FromPsi { psi, .. } => psi.sine_coeffs.iter().all(|&b| b == 0.0),
            FunctionHandle::Sampled(s) => s.y.iter().all(|&v| v == 0.0),
        }
    }

    /// f(x) in double precision.
    pub fn eval(&self, x: f64, quad: &QuadSpec) -> Result<Complex64> {
        match quad.precision {
            Precision::Double => self.eval_generic(x, quad),
            Precision::Extended => Ok(cx::to_f64(self.eval_generic(Dd::from_f64(x), quad)?)),
        }
    }

    /// f(x) in the working precision `T`.
    pub fn eval_generic<T: Real>(&self, x: T, quad: &QuadSpec) -> Result<Complex<T>> {
        check_x(x.to_f64())?;
        match self {
            FunctionHandle::Forward { seq, mu } => forward_generic(seq, T::from_f64(*mu), x, quad),
            FunctionHandle::FromPsi { psi, mu } => {
                Ok(cx::real(f_from_psi_folded(psi, T::from_f64(*mu), x, quad)?))
            }
            FunctionHandle::Sampled(s) => Ok(cx::real(T::from_f64(s.eval(x.to_f64())))),
            FunctionHandle::Zero => Ok(cx::real(T::zero())),
        }
    }
}

/// Σ |a_m| e^{−2δm}/|Γ(1/2 + im − μ)|², the summability condition of the
/// inversion theorem. Finite sequences always satisfy it; the value is a
/// diagnostic.
pub fn check_condition_2_1(seq: &CoefficientSeq, params: &TransformParams) -> Result<f64> {
    params.validate()?;
    let mut sum = 0.0;
    for (i, a) in seq.values().iter().enumerate() {
        if a.norm() == 0.0 {
            continue;
        }
        let m = (i + 1) as f64;
        sum += a.norm() * (-2.0 * params.delta * m).exp() / gamma_abs_sq(0.5 - params.mu, m)?;
    }
    Ok(sum)
}

fn forward_generic<T: Real>(seq: &CoefficientSeq, mu: T, x: T, quad: &QuadSpec) -> Result<Complex<T>> {
    let mut total = cx::real(T::zero());
    for (i, a) in seq.values().iter().enumerate() {
        if a.norm() == 0.0 {
            continue;
        }
        let rho = Complex::new(T::zero(), T::from_f64((i + 1) as f64));
        let w = scaled_whittaker_w(mu, rho, x, quad)?;
        total = total + cx::from_f64::<T>(*a).scale(w);
    }
    Ok(total)
}

/// f(x) = e^{−x/2} Σ_{n=1}^{N} a_n W_{μ,in}(x).
pub fn forward_whittaker(seq: &CoefficientSeq, mu: f64, x: f64) -> Result<Complex64> {
    check_x(x)?;
    forward_generic(seq, mu, x, &QuadSpec::default())
}

/// An inverted coefficient with its propagated error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inversion {
    pub value: Complex64,
    /// Amplification factor times the propagated quadrature error.
    pub error_bound: f64,
    /// The factor multiplying the t-integral.
    pub amplification: f64,
    pub evaluations: usize,
}

/// An integrand value paired with a non-negative density whose integral
/// bounds the error carried in from inner quadratures. Convergence is
/// judged on the value alone.
#[derive(Debug, Clone, Copy)]
struct Tracked<T> {
    value: Complex<T>,
    spread: f64,
}

impl<T: Real> Add for Tracked<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Tracked {
            value: self.value + o.value,
            spread: self.spread + o.spread,
        }
    }
}

impl<T: Real> Sub for Tracked<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Tracked {
            value: self.value - o.value,
            spread: self.spread - o.spread,
        }
    }
}

impl<T: Real> QuadValue<T> for Tracked<T> {
    fn zero() -> Self {
        Tracked {
            value: cx::real(T::zero()),
            spread: 0.0,
        }
    }
    fn scale(self, w: T) -> Self {
        Tracked {
            value: QuadValue::scale(self.value, w),
            spread: self.spread * w.to_f64(),
        }
    }
    fn norm(self) -> f64 {
        QuadValue::<T>::norm(self.value)
    }
    fn is_finite(self) -> bool {
        QuadValue::<T>::is_finite(self.value) && self.spread.is_finite()
    }
}

/// ∫_0^∞ g(t) dt split at t = 1; the piece on (0, 1] is taken in the
/// variable w = −ln t, where it decays like e^{−w/2}.
fn outer_integral<T: Real>(
    g: impl Fn(T) -> Result<Tracked<T>>,
    spec: &QuadSpec,
) -> Result<(IntegralResult<Tracked<T>>, IntegralResult<Tracked<T>>)> {
    let failure = Cell::new(None);
    let guarded = |t: T| match g(t) {
        Ok(v) => v,
        Err(e) => {
            failure.set(Some(e));
            Tracked {
                value: cx::real(T::from_f64(f64::NAN)),
                spread: f64::NAN,
            }
        }
    };
    let near = integrate_semi_infinite(
        |w: T| {
            let t = (-w).exp();
            QuadValue::scale(guarded(t), t)
        },
        2.0,
        spec,
    )?;
    let far = integrate_semi_infinite_from(guarded, 1.0, 1.0, spec)?;
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok((near.require_or_noise(spec)?, far.require_or_noise(spec)?))
}

fn combine<T: Real>(
    parts: (IntegralResult<Tracked<T>>, IntegralResult<Tracked<T>>),
    amplification: f64,
    spec: &QuadSpec,
) -> Inversion {
    let (near, far) = parts;
    let value = cx::to_f64(near.value.value + far.value.value) * amplification;
    let quadrature = near.error_estimate + far.error_estimate;
    let inner = near.value.spread.abs() + far.value.spread.abs();
    let roundoff = spec.unit_roundoff() * (near.magnitude + far.magnitude);
    Inversion {
        value,
        error_bound: amplification * (quadrature + inner + roundoff),
        amplification,
        evaluations: near.evaluations + far.evaluations,
    }
}

/// Tolerances for the function values entering an inversion: relative
/// accuracy at the roundoff level of the working precision.
fn function_spec(spec: &QuadSpec) -> QuadSpec {
    spec.with_tolerances(f64::MIN_POSITIVE, spec.rel_tol.min(10.0 * spec.unit_roundoff()))
}

fn invert_theorem1_generic<T: Real>(
    f: &FunctionHandle,
    mu: f64,
    n: u32,
    spec: &QuadSpec,
) -> Result<Inversion> {
    let nf = f64::from(n);
    let amplification = 2f64.powf(0.5 + mu) / (PI * PI) * nf * (2.0 * PI * nf).sinh();
    let kernel_spec = derated_spec(spec, n);
    let fspec = function_spec(spec);
    let mu_t = T::from_f64(mu);
    let nu = cx::real(T::from_f64(nf));
    let parts = outer_integral(
        |t: T| {
            let fv = f.eval_generic(t, &fspec)?;
            let k = phi_kernel_scaled(mu_t, nu, t, &kernel_spec)?;
            let w = t.powf(T::from_f64(-1.5));
            Ok(Tracked {
                value: (k.value * fv).scale(w),
                spread: k.error_estimate * QuadValue::<T>::norm(fv) * w.to_f64(),
            })
        },
        &kernel_spec,
    )?;
    Ok(combine(parts, amplification, spec))
}

/// a_n from f by the inversion formula of the forward series.
///
/// The result carries an error bound: the quadrature error of the
/// t-integral and of the kernel, multiplied by 2^{1/2+μ}/π²·n sinh(2πn).
pub fn invert_theorem1(
    f: &FunctionHandle,
    params: &TransformParams,
    n: u32,
    quad: &QuadSpec,
) -> Result<Inversion> {
    params.require_inversion()?;
    quad.validate()?;
    check_n(n)?;
    check_index_cap(n, quad.precision)?;
    if f.is_zero() {
        return Ok(zero_inversion());
    }
    match quad.precision {
        Precision::Double => invert_theorem1_generic::<f64>(f, params.mu, n, quad),
        Precision::Extended => invert_theorem1_generic::<Dd>(f, params.mu, n, quad),
    }
}

fn zero_inversion() -> Inversion {
    Inversion {
        value: Complex64::default(),
        error_bound: 0.0,
        amplification: 0.0,
        evaluations: 0,
    }
}

fn kl_invert_generic<T: Real>(f: &FunctionHandle, n: u32, spec: &QuadSpec) -> Result<Inversion> {
    let nf = f64::from(n);
    let amplification = nf * (2.0 * PI * nf).sinh() / (PI * PI.sqrt());
    let kernel_spec = derated_spec(spec, n);
    let fspec = function_spec(spec);
    let parts = outer_integral(
        |t: T| {
            let fv = f.eval_generic(t, &fspec)?;
            let k = phi0_kernel_generic(n, t, &kernel_spec)?;
            let w = t.powf(T::from_f64(-1.5));
            Ok(Tracked {
                value: fv.scale(k.value * w),
                spread: k.error_estimate * QuadValue::<T>::norm(fv) * w.to_f64(),
            })
        },
        &kernel_spec,
    )?;
    Ok(combine(parts, amplification, spec))
}

/// a_n from f by the μ = 0 (Kontorovich-Lebedev) inversion formula with
/// the kernel Φ⁰_n.
pub fn kl_invert(f: &FunctionHandle, n: u32, quad: &QuadSpec) -> Result<Inversion> {
    quad.validate()?;
    check_n(n)?;
    check_index_cap(n, quad.precision)?;
    if f.is_zero() {
        return Ok(zero_inversion());
    }
    match quad.precision {
        Precision::Double => kl_invert_generic::<f64>(f, n, quad),
        Precision::Extended => kl_invert_generic::<Dd>(f, n, quad),
    }
}

/// Below this point the log-substituted integrand of the coefficient
/// transform must have decayed.
const INTEGRABILITY_PROBE: f64 = 1e-30;

fn coefficient_generic<T: Real>(
    f: &FunctionHandle,
    mu: f64,
    n: u32,
    spec: &QuadSpec,
) -> Result<IntegralResult<Complex<T>>> {
    let mu_t = T::from_f64(mu);
    let rho = Complex::new(T::zero(), T::from_f64(f64::from(n) / 2.0));
    let g = |x: T| -> Result<Complex<T>> {
        let w = scaled_whittaker_w(mu_t, rho, x, spec)?;
        let fv = f.eval_generic(x, spec)?;
        Ok(fv.scale(w * x.powf(mu_t - 2.0)))
    };
    // x·g(x) must vanish as x → 0 for the integral to exist
    let probe = |x: f64| -> Result<f64> {
        let v = g(T::from_f64(x))?;
        Ok(QuadValue::<T>::norm(v) * x)
    };
    let (small, smaller) = (probe(INTEGRABILITY_PROBE.sqrt())?, probe(INTEGRABILITY_PROBE)?);
    if !(smaller <= small.max(f64::MIN_POSITIVE) * 1e-3) {
        return Err(Error::Integrability(format!(
            "|x·integrand| is {smaller:e} at x = {INTEGRABILITY_PROBE:e} against {small:e} at x = {:e}",
            INTEGRABILITY_PROBE.sqrt()
        )));
    }
    let failure = Cell::new(None);
    let guarded = |x: T| match g(x) {
        Ok(v) => v,
        Err(e) => {
            failure.set(Some(e));
            cx::real(T::from_f64(f64::NAN))
        }
    };
    let near = integrate_semi_infinite(
        |w: T| {
            let x = (-w).exp();
            QuadValue::scale(guarded(x), x)
        },
        2.0,
        spec,
    )?;
    let far = integrate_semi_infinite_from(guarded, 1.0, 1.0, spec)?;
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let near = near.require_or_noise(spec)?;
    let far = far.require_or_noise(spec)?;
    Ok(IntegralResult {
        value: near.value + far.value,
        error_estimate: near.error_estimate + far.error_estimate,
        magnitude: near.magnitude + far.magnitude,
        evaluations: near.evaluations + far.evaluations,
        converged: near.converged && far.converged,
        noise_limited: near.noise_limited || far.noise_limited,
        truncation: far.truncation,
    })
}

/// a_n = ∫_0^∞ e^{−x/2} W_{μ,in/2}(x) f(x) x^{μ−2} dx.
///
/// Fails with [`Error::Integrability`] when the integrand does not decay
/// at the origin.
pub fn coefficient_transform(
    f: &FunctionHandle,
    mu: f64,
    n: u32,
    quad: &QuadSpec,
) -> Result<IntegralResult<Complex64>> {
    quad.validate()?;
    check_n(n)?;
    if f.is_zero() {
        return Ok(IntegralResult {
            value: Complex64::default(),
            error_estimate: 0.0,
            magnitude: 0.0,
            evaluations: 0,
            converged: true,
            noise_limited: false,
            truncation: None,
        });
    }
    match quad.precision {
        Precision::Double => coefficient_generic::<f64>(f, mu, n, quad),
        Precision::Extended => Ok(coefficient_generic::<Dd>(f, mu, n, quad)?.map(cx::to_f64)),
    }
}

/// (2x)^{1−μ}·∫ M(1−2μ, √(2x) cosh u)·ψ(u) sinh u du over [lower, π],
/// with ψ replaced by `part`.
fn psi_integral<T: Real>(
    part: impl Fn(T) -> T,
    mu: T,
    x: T,
    lower: T,
    spec: &QuadSpec,
) -> Result<T> {
    let alpha = T::one() - mu * 2.0;
    let root = (x * 2.0).sqrt();
    let failure = Cell::new(None);
    let r = integrate_finite(
        |u: T| {
            let p = part(u);
            if p == T::zero() {
                return T::zero();
            }
            match laplace_moment(alpha, root * u.cosh(), spec).and_then(|m| m.require_or_noise(spec)) {
                Ok(m) => m.value * p * u.sinh(),
                Err(e) => {
                    failure.set(Some(e));
                    T::from_f64(f64::NAN)
                }
            }
        },
        lower,
        T::pi(),
        spec,
    )?;
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let r = r.require_or_noise(spec)?;
    // Γ(2−2μ) of the representation cancels against 1/Γ(2−2μ) of D
    Ok((x * 2.0).powf(T::one() - mu) * r.value)
}

fn f_from_psi_folded<T: Real>(psi: &PsiSpec, mu: T, x: T, spec: &QuadSpec) -> Result<T> {
    check_mu(mu.to_f64())?;
    check_x(x.to_f64())?;
    // only the odd part of ψ survives: ψ(u) sinh u is then even
    Ok(psi_integral(|u| psi.odd_part(u), mu, x, T::zero(), spec)? * 2.0)
}

/// f(x) = Γ(2−2μ)(2x)^{1−μ}∫_{−π}^{π} e^{x cosh²u/2} D_{2(μ−1)}(√(2x) cosh u) ψ(u) sinh u du,
/// integrated over the whole range.
pub fn build_f_from_psi(psi: &PsiSpec, mu: f64, x: f64, quad: &QuadSpec) -> Result<f64> {
    psi.validate()?;
    check_mu(mu)?;
    check_x(x)?;
    psi_integral(|u: f64| psi.eval(u), mu, x, -PI, quad)
}

/// [`build_f_from_psi`] using the symmetry of the integrand: twice the
/// integral of the odd part of ψ over [0, π].
pub fn build_f_from_psi_folded(psi: &PsiSpec, mu: f64, x: f64, quad: &QuadSpec) -> Result<f64> {
    psi.validate()?;
    match quad.precision {
        Precision::Double => f_from_psi_folded(psi, mu, x, quad),
        Precision::Extended => Ok(f_from_psi_folded(psi, Dd::from_f64(mu), Dd::from_f64(x), quad)?.to_f64()),
    }
}

/// a_n = 4^{1−μ}π/sinh(πn)·∫_{−π}^{π} ψ(u) sin(nu) du = 4^{1−μ}π² b_n/sinh(πn).
pub fn fourier_closed_form_coeffs(psi: &PsiSpec, mu: f64, n: u32) -> Result<f64> {
    psi.validate()?;
    check_n(n)?;
    let b = psi.sine_coeffs.get(n as usize - 1).copied().unwrap_or(0.0);
    let nf = f64::from(n);
    Ok(4f64.powf(1.0 - mu) * PI * PI * b / (PI * nf).sinh())
}

/// The closed-form coefficients a_1..a_N of ψ.
pub fn closed_form_sequence(psi: &PsiSpec, mu: f64, count: u32) -> Result<CoefficientSeq> {
    let values = (1..=count)
        .map(|n| fourier_closed_form_coeffs(psi, mu, n))
        .collect::<Result<Vec<f64>>>()?;
    CoefficientSeq::from_real(&values)
}

/// A partial sum of the synthesis series with its terms.
#[derive(Debug, Clone, PartialEq)]
pub struct Synthesis {
    pub value: Complex64,
    /// The n-th entry is the n-th term of the sum.
    pub terms: Vec<Complex64>,
}

fn synthesize_generic<T: Real>(seq: &CoefficientSeq, mu: f64, x: T, spec: &QuadSpec) -> Result<Synthesis> {
    let mu_t = T::from_f64(mu);
    let prefactor = (x * 0.5).powf(T::one() - mu_t) / (PI * PI) * gamma_real(T::one() * 2.0 - mu_t * 2.0)?;
    let mut terms = Vec::with_capacity(seq.len());
    let mut value = Complex64::default();
    for (i, a) in seq.values().iter().enumerate() {
        let n = (i + 1) as u32;
        let term = if a.norm() == 0.0 {
            Complex64::default()
        } else {
            let psi = crate::kernels::psi_kernel_generic(mu_t, n, x, spec)?.value;
            let scale = (prefactor * psi * (PI * f64::from(n)).sinh()).to_f64();
            *a * scale
        };
        value += term;
        terms.push(term);
    }
    Ok(Synthesis { value, terms })
}

/// f(x) = (x/2)^{1−μ}/π²·Γ(2−2μ)·Σ_{n=1}^{N} sinh(πn) Ψ^μ_n(x) a_n.
pub fn synthesize_theorem2(seq: &CoefficientSeq, mu: f64, x: f64, quad: &QuadSpec) -> Result<Synthesis> {
    check_mu(mu)?;
    check_x(x)?;
    quad.validate()?;
    match quad.precision {
        Precision::Double => synthesize_generic(seq, mu, x, quad),
        Precision::Extended => synthesize_generic(seq, mu, Dd::from_f64(x), quad),
    }
}

//! Inversion kernels Φ^μ_ν, Φ⁰_n and Ψ^μ_n, and tables of their values.
//!
//! The products e^{x cosh²u/2}·D_ν(√(2x) cosh u) inside the kernels are never
//! formed directly. With D_ν(z) = e^{−z²/4}/Γ(−ν)·∫_0^∞ s^{−ν−1}e^{−s²/2−zs} ds
//! the exponentials cancel exactly, leaving the bounded moment
//! M(−ν−1, z) = ∫_0^∞ s^{−ν−1}e^{−s²/2−zs} ds divided by Γ(−ν).

use std::cell::Cell;

use num_complex::{Complex, Complex64};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::quad::{integrate_finite, Precision, QuadSpec};
use crate::real::{cx, Real};
use crate::specfun::erf::erfcx_m1_generic;
use crate::specfun::{gamma_real, laplace_moment, laplace_moment_shifted, ComplexIndex};

/// Largest transform index supported in double precision.
pub const DOUBLE_INDEX_CAP: u32 = 8;
/// Largest transform index supported in extended precision.
pub const EXTENDED_INDEX_CAP: u32 = 16;

/// Index cap of a precision mode.
pub fn index_cap(precision: Precision) -> u32 {
    match precision {
        Precision::Double => DOUBLE_INDEX_CAP,
        Precision::Extended => EXTENDED_INDEX_CAP,
    }
}

/// Fails with [`Error::PrecisionBudgetExceeded`] when `n` is above the cap.
pub fn check_index_cap(n: u32, precision: Precision) -> Result<()> {
    let cap = index_cap(precision);
    if n > cap {
        return Err(Error::PrecisionBudgetExceeded {
            n,
            cap,
            mode: precision.name().to_string(),
        });
    }
    Ok(())
}

/// Tolerances for a kernel whose value is later multiplied by n·sinh(2πn).
///
/// The achievable accuracy is bounded by roundoff in the kernel
/// quadrature; below that floor the integrators stop on noise instead.
pub fn derated_spec(spec: &QuadSpec, n: u32) -> QuadSpec {
    let factor = (-2.0 * std::f64::consts::PI * f64::from(n)).exp() / 10.0;
    let floor = f64::MIN_POSITIVE;
    spec.with_tolerances((spec.abs_tol * factor).max(floor), (spec.rel_tol * factor).max(floor))
}

/// A kernel value with its quadrature error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue<V> {
    pub value: V,
    pub error_estimate: f64,
}

fn check_mu(mu: f64) -> Result<()> {
    if mu < 0.5 && mu.is_finite() {
        Ok(())
    } else {
        Err(Error::Order(2.0 * mu - 1.0))
    }
}

fn check_x(x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("kernel argument must be positive, got {x}")))
    }
}

fn check_n(n: u32) -> Result<()> {
    if n >= 1 {
        Ok(())
    } else {
        Err(Error::Domain("kernel index must be at least 1".into()))
    }
}

/// Tolerances for the inner moment integrals: tight enough that their
/// error stays at roundoff relative to the moment itself.
fn inner_spec(spec: &QuadSpec) -> QuadSpec {
    spec.with_tolerances(f64::MIN_POSITIVE, spec.rel_tol.min(1e3 * spec.unit_roundoff()))
}

/// Γ(1−2μ)·Φ^μ_ν(x) = ∫_0^π cos(2νu)·M(−2μ, √(2x) cosh u) du.
///
/// For a positive integer ν the constant M(−2μ, 0) integrates to zero and
/// is removed from the integrand beforehand.
pub fn phi_kernel_scaled<T: Real>(
    mu: T,
    nu: Complex<T>,
    x: T,
    spec: &QuadSpec,
) -> Result<KernelValue<Complex<T>>> {
    check_mu(mu.to_f64())?;
    check_x(x.to_f64())?;
    let alpha = -(mu * 2.0);
    let root = (x * 2.0).sqrt();
    let integer = ComplexIndex::new(nu.re.to_f64(), nu.im.to_f64())
        .as_integer()
        .filter(|&n| n >= 1)
        .is_some();
    let inner = inner_spec(spec);
    let inner_error = Cell::new(0.0f64);
    let failure = Cell::new(None);
    let result = integrate_finite(
        |u: T| {
            let z = root * u.cosh();
            let moment = if integer {
                laplace_moment_shifted(alpha, z, &inner)
            } else {
                laplace_moment(alpha, z, &inner)
            };
            let weight = cx::cos(Complex::new(nu.re * u * 2.0, nu.im * u * 2.0));
            match moment.and_then(|m| m.require_or_noise(&inner)) {
                Ok(m) => {
                    let w = cx::abs(weight).to_f64();
                    inner_error.set(inner_error.get().max(m.error_estimate * w));
                    weight.scale(m.value)
                }
                Err(e) => {
                    failure.set(Some(e));
                    Complex::new(T::from_f64(f64::NAN), T::zero())
                }
            }
        },
        T::zero(),
        T::pi(),
        spec,
    )?;
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let result = result.require_or_noise(spec)?;
    Ok(KernelValue {
        value: result.value,
        error_estimate: result.error_estimate + std::f64::consts::PI * inner_error.get(),
    })
}

/// Φ^μ_ν(x) = ∫_0^π e^{x cosh²u/2} D_{2μ−1}(√(2x) cosh u) cos(2νu) du in the
/// working precision `T`.
pub fn phi_kernel_generic<T: Real>(
    mu: T,
    nu: Complex<T>,
    x: T,
    spec: &QuadSpec,
) -> Result<KernelValue<Complex<T>>> {
    let scaled = phi_kernel_scaled(mu, nu, x, spec)?;
    let g = gamma_real(T::one() - mu * 2.0)?;
    Ok(KernelValue {
        value: scaled.value.unscale(g),
        error_estimate: scaled.error_estimate / g.abs().to_f64(),
    })
}

/// Φ^μ_ν(x) for a possibly complex index ν, evaluated in the precision
/// selected by `quad`.
pub fn phi_kernel(mu: f64, nu: ComplexIndex, x: f64, quad: &QuadSpec) -> Result<Complex64> {
    Ok(phi_kernel_value(mu, nu, x, quad)?.value)
}

/// [`phi_kernel`] together with its error estimate.
pub fn phi_kernel_value(
    mu: f64,
    nu: ComplexIndex,
    x: f64,
    quad: &QuadSpec,
) -> Result<KernelValue<Complex64>> {
    match quad.precision {
        Precision::Double => phi_kernel_generic(mu, nu.to_complex(), x, quad),
        Precision::Extended => {
            let v = phi_kernel_generic(
                Dd::from_f64(mu),
                cx::from_f64(nu.to_complex()),
                Dd::from_f64(x),
                quad,
            )?;
            Ok(KernelValue {
                value: cx::to_f64(v.value),
                error_estimate: v.error_estimate,
            })
        }
    }
}

/// Φ⁰_n(x) = ∫_0^π e^{x cosh²u} erfc(√x cosh u) cos(2nu) du, with the
/// product evaluated as the scaled function erfcx.
pub fn phi0_kernel_generic<T: Real>(n: u32, x: T, spec: &QuadSpec) -> Result<KernelValue<T>> {
    check_n(n)?;
    check_x(x.to_f64())?;
    let root = x.sqrt();
    let freq = T::from_f64(2.0 * f64::from(n));
    // the constant part of erfcx integrates to zero against cos(2nu)
    let result = integrate_finite(
        |u: T| erfcx_m1_generic(root * u.cosh()) * (freq * u).cos(),
        T::zero(),
        T::pi(),
        spec,
    )?
    .require_or_noise(spec)?;
    Ok(KernelValue {
        value: result.value,
        error_estimate: result.error_estimate,
    })
}

/// Φ⁰_n(x) in the precision selected by `quad`.
pub fn phi0_kernel(n: u32, x: f64, quad: &QuadSpec) -> Result<f64> {
    Ok(phi0_kernel_value(n, x, quad)?.value)
}

/// [`phi0_kernel`] together with its error estimate.
pub fn phi0_kernel_value(n: u32, x: f64, quad: &QuadSpec) -> Result<KernelValue<f64>> {
    match quad.precision {
        Precision::Double => phi0_kernel_generic(n, x, quad),
        Precision::Extended => {
            let v = phi0_kernel_generic(n, Dd::from_f64(x), quad)?;
            Ok(KernelValue {
                value: v.value.to_f64(),
                error_estimate: v.error_estimate,
            })
        }
    }
}

/// Integrand of Ψ without the 1/Γ(2−2μ) factor, at a single `u`.
fn psi_integrand<T: Real>(alpha: T, root: T, n: u32, u: T, inner: &QuadSpec) -> Result<(T, f64)> {
    let m = laplace_moment(alpha, root * u.cosh(), inner)?.require_or_noise(inner)?;
    let w = u.sinh() * (u * f64::from(n)).sin();
    Ok((m.value * w, m.error_estimate * w.abs().to_f64()))
}

fn psi_over<T: Real>(
    mu: T,
    n: u32,
    x: T,
    lower: T,
    spec: &QuadSpec,
) -> Result<KernelValue<T>> {
    check_mu(mu.to_f64())?;
    check_n(n)?;
    check_x(x.to_f64())?;
    let alpha = T::one() - mu * 2.0;
    let root = (x * 2.0).sqrt();
    let inner = inner_spec(spec);
    let inner_error = Cell::new(0.0f64);
    let failure = Cell::new(None);
    let result = integrate_finite(
        |u: T| match psi_integrand(alpha, root, n, u, &inner) {
            Ok((v, e)) => {
                inner_error.set(inner_error.get().max(e));
                v
            }
            Err(e) => {
                failure.set(Some(e));
                T::from_f64(f64::NAN)
            }
        },
        lower,
        T::pi(),
        spec,
    )?;
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let result = result.require_or_noise(spec)?;
    let g = gamma_real(T::one() * 2.0 - mu * 2.0)?;
    let width = (T::pi() - lower).to_f64();
    Ok(KernelValue {
        value: result.value / g,
        error_estimate: (result.error_estimate + width * inner_error.get()) / g.abs().to_f64(),
    })
}

/// Ψ^μ_n(x) = ∫_{−π}^{π} e^{x cosh²u/2} D_{2(μ−1)}(√(2x) cosh u) sinh u sin(nu) du,
/// computed as twice the integral over [0, π] (the integrand is even).
pub fn psi_kernel_generic<T: Real>(mu: T, n: u32, x: T, spec: &QuadSpec) -> Result<KernelValue<T>> {
    let half = psi_over(mu, n, x, T::zero(), spec)?;
    Ok(KernelValue {
        value: half.value * 2.0,
        error_estimate: 2.0 * half.error_estimate,
    })
}

/// Ψ^μ_n(x) integrated over the whole range [−π, π] without folding.
pub fn psi_kernel_full_generic<T: Real>(
    mu: T,
    n: u32,
    x: T,
    spec: &QuadSpec,
) -> Result<KernelValue<T>> {
    psi_over(mu, n, x, -T::pi(), spec)
}

/// Ψ^μ_n(x) in the precision selected by `quad`.
pub fn psi_kernel(mu: f64, n: u32, x: f64, quad: &QuadSpec) -> Result<f64> {
    Ok(psi_kernel_value(mu, n, x, quad)?.value)
}

/// [`psi_kernel`] together with its error estimate.
pub fn psi_kernel_value(mu: f64, n: u32, x: f64, quad: &QuadSpec) -> Result<KernelValue<f64>> {
    match quad.precision {
        Precision::Double => psi_kernel_generic(mu, n, x, quad),
        Precision::Extended => {
            let v = psi_kernel_generic(Dd::from_f64(mu), n, Dd::from_f64(x), quad)?;
            Ok(KernelValue {
                value: v.value.to_f64(),
                error_estimate: v.error_estimate,
            })
        }
    }
}

/// Ψ^μ_n(x) over [−π, π] without folding, in double precision.
pub fn psi_kernel_full(mu: f64, n: u32, x: f64, quad: &QuadSpec) -> Result<f64> {
    Ok(psi_kernel_full_generic(mu, n, x, quad)?.value)
}

/// Which kernel a query or table refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    Phi,
    Phi0,
    Psi,
}

impl KernelKind {
    pub fn name(self) -> &'static str {
        match self {
            KernelKind::Phi => "phi",
            KernelKind::Phi0 => "phi0",
            KernelKind::Psi => "psi",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "phi" => Some(KernelKind::Phi),
            "phi0" => Some(KernelKind::Phi0),
            "psi" => Some(KernelKind::Psi),
            _ => None,
        }
    }
}

/// A single kernel evaluation request.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelQuery {
    pub kind: KernelKind,
    /// Ignored for [`KernelKind::Phi0`].
    pub mu: f64,
    pub index: ComplexIndex,
    pub x: f64,
    pub quad: QuadSpec,
}

fn integer_index(index: ComplexIndex) -> Result<u32> {
    index
        .as_integer()
        .filter(|&n| n >= 1)
        .ok_or_else(|| Error::Domain(format!("kernel index {} must be a positive integer", index.re)))
}

/// Evaluates one query.
pub fn evaluate_kernel(query: &KernelQuery) -> Result<KernelValue<Complex64>> {
    let real = |v: KernelValue<f64>| KernelValue {
        value: Complex64::new(v.value, 0.0),
        error_estimate: v.error_estimate,
    };
    match query.kind {
        KernelKind::Phi => phi_kernel_value(query.mu, query.index, query.x, &query.quad),
        KernelKind::Phi0 => {
            phi0_kernel_value(integer_index(query.index)?, query.x, &query.quad).map(real)
        }
        KernelKind::Psi => {
            psi_kernel_value(query.mu, integer_index(query.index)?, query.x, &query.quad).map(real)
        }
    }
}

/// Layout of a kernel table: one entry per (index, x) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelTableSpec {
    pub kind: KernelKind,
    #[serde(default)]
    pub mu: f64,
    pub indices: Vec<ComplexIndex>,
    pub grid: Vec<f64>,
    #[serde(default)]
    pub quad: QuadSpec,
}

impl KernelTableSpec {
    pub fn validate(&self) -> Result<()> {
        self.quad.validate()?;
        if self.grid.is_empty() || self.indices.is_empty() {
            return Err(Error::InvalidInput("kernel table needs indices and grid points".into()));
        }
        if !self.grid.iter().all(|&x| x > 0.0 && x.is_finite()) {
            return Err(Error::InvalidInput("grid points must be positive and finite".into()));
        }
        if !self.grid.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidInput("grid must be strictly increasing".into()));
        }
        if !self.indices.iter().all(|i| i.re.is_finite() && i.im.is_finite()) {
            return Err(Error::InvalidInput("indices must be finite".into()));
        }
        if self.kind != KernelKind::Phi0 && !(self.mu < 0.5) {
            return Err(Error::Order(2.0 * self.mu - 1.0));
        }
        Ok(())
    }
}

/// One table cell; a failed evaluation keeps its message instead of a value.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelEntry {
    pub index: ComplexIndex,
    pub x: f64,
    pub value: Option<Complex64>,
    pub error_estimate: Option<f64>,
    pub failure: Option<String>,
}

/// Kernel values on a grid, index-major.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelTable {
    pub spec: KernelTableSpec,
    pub entries: Vec<KernelEntry>,
    pub version: String,
}

impl KernelTable {
    pub fn failed(&self) -> usize {
        self.entries.iter().filter(|e| e.failure.is_some()).count()
    }

    pub fn get(&self, index: usize, x: usize) -> &KernelEntry {
        &self.entries[index * self.spec.grid.len() + x]
    }
}

/// Evaluates every (index, x) pair of `spec` in parallel.
///
/// Entries that fail are recorded as failed; the rest of the table is
/// still filled.
pub fn build_kernel_table(spec: &KernelTableSpec) -> Result<KernelTable> {
    spec.validate()?;
    let pairs: Vec<(ComplexIndex, f64)> = spec
        .indices
        .iter()
        .flat_map(|&i| spec.grid.iter().map(move |&x| (i, x)))
        .collect();
    let entries = pairs
        .par_iter()
        .map(|&(index, x)| {
            let query = KernelQuery {
                kind: spec.kind,
                mu: spec.mu,
                index,
                x,
                quad: spec.quad,
            };
            match evaluate_kernel(&query) {
                Ok(v) => KernelEntry {
                    index,
                    x,
                    value: Some(v.value),
                    error_estimate: Some(v.error_estimate),
                    failure: None,
                },
                Err(e) => KernelEntry {
                    index,
                    x,
                    value: None,
                    error_estimate: None,
                    failure: Some(e.to_string()),
                },
            }
        })
        .collect();
    Ok(KernelTable {
        spec: spec.clone(),
        entries,
        version: env!("CARGO_PKG_VERSION").to_string(),
    })
}

use crate::error::{Error, Result};
use crate::quad::{integrate_finite, IntegralResult, QuadSpec};
use crate::real::Real;

use super::gamma::gamma_real;

/// Point past which s^α e^{−s²/2 − z s} stays below `eps` times its value
/// at a reference point near the bulk of the integrand.
fn upper_limit(alpha: f64, z: f64, eps: f64) -> f64 {
    let log_f = |s: f64| alpha * s.ln() - 0.5 * s * s - z * s;
    let disc = z * z + 4.0 * alpha;
    let peak = if disc > 0.0 { 0.5 * (-z + disc.sqrt()) } else { 0.0 };
    let reference = if peak > 0.0 { peak } else { 1.0 / (1.0 + z.abs()) };
    let level = log_f(reference) + eps.ln();
    let mut lo = reference;
    let mut hi = reference + 1.0;
    while log_f(hi) > level {
        lo = hi;
        hi = 2.0 * hi + 1.0;
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if log_f(mid) > level {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > -1.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("∫ s^α e^(−s²/2 − zs) ds needs α > −1, got {alpha}")))
    }
}

/// M(α, z) = ∫_0^∞ s^α e^{−s²/2 − z s} ds for α > −1 and real z.
pub fn laplace_moment<T: Real>(alpha: T, z: T, spec: &QuadSpec) -> Result<IntegralResult<T>> {
    let af = alpha.to_f64();
    check_alpha(af)?;
    let upper = upper_limit(af, z.to_f64(), T::EPSILON * 1e-3);
    integrate_finite(
        |s: T| (alpha * s.ln() - s * s * 0.5 - z * s).exp(),
        T::zero(),
        T::from_f64(upper),
        spec,
    )
}

/// M(α, z) − M(α, 0) = ∫_0^∞ s^α e^{−s²/2}(e^{−zs} − 1) ds, without the
/// cancellation of the difference for small z.
pub fn laplace_moment_shifted<T: Real>(alpha: T, z: T, spec: &QuadSpec) -> Result<IntegralResult<T>> {
    let af = alpha.to_f64();
    check_alpha(af)?;
    let eps = T::EPSILON * 1e-3;
    let upper = upper_limit(af, z.to_f64(), eps).max(upper_limit(af, 0.0, eps));
    integrate_finite(
        |s: T| (alpha * s.ln() - s * s * 0.5).exp() * (-(z * s)).exp_m1(),
        T::zero(),
        T::from_f64(upper),
        spec,
    )
}

/// Parabolic cylinder function D_ν(z) for ν < 0 and real z.
pub fn parabolic_cylinder_d(nu: f64, z: f64) -> Result<f64> {
    parabolic_cylinder_d_generic(nu, z, &QuadSpec::default())
}

/// Working-precision version of [`parabolic_cylinder_d`], from
/// D_ν(z) = e^{−z²/4}/Γ(−ν)·∫_0^∞ s^{−ν−1} e^{−s²/2 − zs} ds.
pub fn parabolic_cylinder_d_generic<T: Real>(nu: T, z: T, spec: &QuadSpec) -> Result<T> {
    let nf = nu.to_f64();
    if !(nf < 0.0) {
        return Err(Error::Order(nf));
    }
    let m = laplace_moment(-nu - 1.0, z, spec)?.require_or_noise(spec)?;
    Ok((-(z * z) * 0.25).exp() * m.value / gamma_real(-nu)?)
}

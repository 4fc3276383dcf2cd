use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::{integrate_adaptive, IntegralResult, QuadSpec, QuadValue};
use crate::error::{Error, Result};
use crate::real::Real;

/// A truncated vertical contour `γ + it`, `|t| ≤ T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MellinBarnesSpec {
    pub gamma_abscissa: f64,
    pub tail_cutoff: f64,
    pub quad: QuadSpec,
}

impl MellinBarnesSpec {
    pub const DEFAULT_CUTOFF: f64 = 60.0;

    pub fn new(gamma_abscissa: f64, quad: QuadSpec) -> Self {
        MellinBarnesSpec {
            gamma_abscissa,
            tail_cutoff: Self::DEFAULT_CUTOFF,
            quad,
        }
    }

    pub fn with_cutoff(self, tail_cutoff: f64) -> Self {
        MellinBarnesSpec {
            tail_cutoff,
            ..self
        }
    }

    /// Checks the abscissa against a lower bound required by the integrand.
    pub fn check_abscissa(&self, lower_bound: f64) -> Result<()> {
        if self.gamma_abscissa > lower_bound {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!(
                "contour abscissa {} must exceed {}",
                self.gamma_abscissa, lower_bound
            )))
        }
    }
}

/// `(1/2πi) ∫_{γ−iT}^{γ+iT} g(s) ds = (1/2π) ∫_{−T}^{T} g(γ + it) dt`.
///
/// Fails with [`Error::TailNotNegligible`] when the integrand at the ends
/// of the truncated line is not small against the tolerance. The imaginary
/// part of the value is returned untouched.
pub fn integrate_vertical_line<T: Real>(
    g: impl Fn(Complex<T>) -> Complex<T>,
    spec: &MellinBarnesSpec,
) -> Result<IntegralResult<Complex<T>>> {
    let cutoff = spec.tail_cutoff;
    if !(cutoff > 0.0 && cutoff.is_finite()) {
        return Err(Error::InvalidInput(format!("tail cutoff {cutoff} must be positive")));
    }
    let gamma = T::from_f64(spec.gamma_abscissa);
    let at = |t: T| g(Complex::new(gamma, t));
    let panels = cutoff.ceil() as usize;
    let t_max = T::from_f64(cutoff);
    let result = integrate_adaptive(at, -t_max, t_max, panels, &spec.quad)?;
    let scale = T::one() / (T::pi() * 2.0);
    let result = result.map(|v| v.scale(scale));
    let result = IntegralResult {
        error_estimate: result.error_estimate * scale.to_f64(),
        magnitude: result.magnitude * scale.to_f64(),
        truncation: Some(cutoff),
        ..result
    };

    // a gamma-ratio integrand decays like e^{−π|t|/2}; the discarded part is
    // then about |g(γ ± iT)|·(2/π) on each side
    let tail = g(Complex::new(gamma, t_max))
        .norm()
        .max(g(Complex::new(gamma, -t_max)).norm());
    let discarded = 2.0 * tail * (2.0 / std::f64::consts::PI) * scale.to_f64();
    if !tail.is_finite() || discarded > spec.quad.target(result.value.norm()) / 10.0 {
        return Err(Error::TailNotNegligible { cutoff, tail });
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::cx;
    use crate::specfun::log_gamma_generic;

    fn cahen_mellin(x: f64, gamma: f64) -> f64 {
        let spec = MellinBarnesSpec::new(gamma, QuadSpec::default());
        let r = integrate_vertical_line(
            |s: Complex<f64>| cx::exp(log_gamma_generic(s).unwrap() - s * x.ln()),
            &spec,
        )
        .unwrap();
        assert!(r.value.im.abs() < 1e-14);
        r.value.re
    }

    #[test]
    fn cahen_mellin_identity() {
        for &x in &[1.0, 2.0] {
            let v = cahen_mellin(x, 1.0);
            assert!((v - (-x).exp()).abs() < 1e-12 * (-x).exp(), "x = {x}: {v}");
        }
    }

    #[test]
    fn cahen_mellin_contour_independence() {
        for &x in &[0.5, 1.0, 2.0] {
            for &gamma in &[0.5, 1.0, 2.0] {
                let v = cahen_mellin(x, gamma);
                let exact = (-x as f64).exp();
                assert!((v - exact).abs() <= 10.0 * 1e-14 + 1e-12 * exact, "x {x} γ {gamma}");
            }
        }
    }

    #[test]
    fn too_short_contour_is_reported() {
        let spec = MellinBarnesSpec::new(1.0, QuadSpec::default()).with_cutoff(3.0);
        let err = integrate_vertical_line(
            |s: Complex<f64>| cx::exp(log_gamma_generic(s).unwrap()),
            &spec,
        )
        .unwrap_err();
        assert!(matches!(err, Error::TailNotNegligible { .. }));
    }
}

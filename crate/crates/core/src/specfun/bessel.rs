use num_complex::{Complex, Complex64};

use crate::error::{Error, Result};
use crate::quad::{integrate_finite, QuadSpec};
use crate::real::{cx, Real};

/// Upper limit s* with x(cosh s* − 1) − a·s* ≥ ln(1/ε) + ln(1 + 1/x), so
/// the integrand e^{−x cosh s}·e^{a s} beyond s* is below ε·e^{−x}.
fn truncation(x: f64, growth: f64, eps: f64) -> f64 {
    let budget = (1.0 / eps).ln() + (1.0 + 1.0 / x).ln();
    let mut s = (1.0 + budget / x).acosh();
    while x * (s.cosh() - 1.0) - growth * s < budget {
        s += 0.25;
    }
    s
}

/// Trapezoid rule on [0, s*] with step halving. The integrand is even and
/// analytic, so the rule converges geometrically in the number of nodes.
fn trapezoid<T: Real, V>(f: impl Fn(T) -> V, upper: f64, zero: V, norm: impl Fn(&V) -> f64) -> V
where
    V: Copy + std::ops::Add<Output = V> + std::ops::Sub<Output = V> + std::ops::Mul<T, Output = V>,
{
    let eps = T::EPSILON;
    let mut n = (upper / 0.5).ceil().max(4.0) as usize;
    let upper_t = T::from_f64(upper);
    let mut h = upper_t / n as f64;
    let mut sum = f(T::zero()) * T::from_f64(0.5) + f(upper_t) * T::from_f64(0.5);
    let mut abs_sum = 0.0;
    for k in 1..n {
        let v = f(h * k as f64);
        abs_sum += norm(&v);
        sum = sum + v;
    }
    let mut estimate = sum * h;
    for _ in 0..14 {
        let mut extra = zero;
        for k in 0..n {
            let v = f(h * (k as f64 + 0.5));
            abs_sum += norm(&v);
            extra = extra + v;
        }
        sum = sum + extra;
        n *= 2;
        h = h * 0.5;
        let refined = sum * h;
        let change = norm(&(refined - estimate));
        estimate = refined;
        if change <= 64.0 * eps * (abs_sum * h.to_f64()).max(f64::MIN_POSITIVE) {
            break;
        }
    }
    estimate
}

/// K_{iτ}(x) = ∫_0^∞ e^{−x cosh s} cos(τ s) ds in any working precision.
pub fn bessel_k_imag_generic<T: Real>(tau: T, x: T) -> Result<T> {
    let xf = x.to_f64();
    if !(xf > 0.0) || !xf.is_finite() {
        return Err(Error::Domain(format!("K_{{iτ}}(x) needs x > 0, got {xf}")));
    }
    let tau = tau.abs();
    let upper = truncation(xf, 0.0, T::EPSILON * 0.1);
    Ok(trapezoid(
        |s: T| (-(x * s.cosh())).exp() * (tau * s).cos(),
        upper,
        T::zero(),
        |v: &T| v.abs().to_f64(),
    ))
}

/// Modified Bessel function of imaginary order, K_{iτ}(x), for x > 0.
///
/// Even in τ by construction.
pub fn bessel_k_imag(tau: f64, x: f64) -> Result<f64> {
    bessel_k_imag_generic(tau, x)
}

/// K_0(x) for x > 0.
pub fn bessel_k0(x: f64) -> Result<f64> {
    bessel_k_imag(0.0, x)
}

/// K_ν(x) = ∫_0^∞ e^{−x cosh s} cosh(ν s) ds for complex order ν and x > 0.
pub fn bessel_k(nu: Complex64, x: f64) -> Result<Complex64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("K_ν(x) needs x > 0, got {x}")));
    }
    if nu.re == 0.0 {
        return Ok(Complex64::new(bessel_k_imag(nu.im, x)?, 0.0));
    }
    // K_ν = K_{−ν}; work with Re ν ≥ 0 so the growth bound below is tight
    let nu = if nu.re < 0.0 { -nu } else { nu };
    let upper = truncation(x, nu.re, f64::EPSILON * 0.05);
    Ok(trapezoid(
        |s: f64| cx::cosh(nu * s) * (-x * s.cosh()).exp(),
        upper,
        Complex::new(0.0, 0.0),
        |v: &Complex64| v.norm(),
    ))
}

/// Incomplete modified Bessel function J(x, in, π) = ∫_0^π e^{−x cosh u} cos(nu) du.
pub fn incomplete_bessel_j(x: f64, n: u32) -> Result<f64> {
    incomplete_bessel_j_generic(x, n, &QuadSpec::default())
}

/// Working-precision version of [`incomplete_bessel_j`].
///
/// For x < 1 the constant part of the exponential is removed first
/// (∫_0^π cos(nu) du = 0), which keeps full relative accuracy as x → 0.
pub fn incomplete_bessel_j_generic<T: Real>(x: T, n: u32, spec: &QuadSpec) -> Result<T> {
    check_j_args(x.to_f64(), n)?;
    let nf = f64::from(n);
    let pi = T::pi();
    let result = if x.to_f64() < 1.0 {
        integrate_finite(
            |u: T| (-(x * u.cosh())).exp_m1() * (u * nf).cos(),
            T::zero(),
            pi,
            spec,
        )?
    } else {
        integrate_finite(
            |u: T| (-(x * u.cosh())).exp() * (u * nf).cos(),
            T::zero(),
            pi,
            spec,
        )?
    };
    Ok(result.require_or_noise(spec)?.value)
}

/// The integrated-by-parts form (x/n)∫_0^π e^{−x cosh u} sinh u sin(nu) du.
pub fn incomplete_bessel_j_by_parts(x: f64, n: u32) -> Result<f64> {
    check_j_args(x, n)?;
    let spec = QuadSpec::default();
    let nf = f64::from(n);
    let r = integrate_finite(
        |u: f64| (-x * u.cosh()).exp() * u.sinh() * (nf * u).sin(),
        0.0,
        std::f64::consts::PI,
        &spec,
    )?;
    Ok(x / nf * r.require_or_noise(&spec)?.value)
}

fn check_j_args(x: f64, n: u32) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("J(x, in, π) needs x > 0, got {x}")));
    }
    if n == 0 {
        return Err(Error::Domain("J(x, in, π) needs n ≥ 1".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dd::Dd;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn k0_reference_values() {
        // K_0(1) = 0.42102443824070833334, K_0(2) = 0.11389387274953343566
        assert!((bessel_k0(1.0).unwrap() - 0.421_024_438_240_708_3).abs() < 1e-15);
        assert!((bessel_k0(2.0).unwrap() - 0.113_893_872_749_533_44).abs() < 1e-15);
    }

    #[test]
    fn k0_is_tau_zero() {
        assert_eq!(bessel_k0(1.0).unwrap(), bessel_k_imag(0.0, 1.0).unwrap());
    }

    #[test]
    fn k0_decreasing() {
        let (a, b) = (bessel_k0(1.0).unwrap(), bessel_k0(2.0).unwrap());
        assert!(a > b && b > 0.0);
    }

    #[test]
    fn evenness_is_exact() {
        assert_eq!(bessel_k_imag(2.0, 1.0).unwrap(), bessel_k_imag(-2.0, 1.0).unwrap());
    }

    #[test]
    fn imaginary_order_bound() {
        let k = bessel_k_imag(1.0, 1.0).unwrap();
        for delta in [0.0f64, 0.3, 1.2] {
            let bound = (-delta).exp() * bessel_k0(delta.cos()).unwrap();
            assert!(k.abs() <= bound + 1e-12, "δ = {delta}");
        }
    }

    #[test]
    fn half_order_closed_form() {
        // K_{1/2}(x) = √(π/(2x)) e^{−x}
        for x in [0.3, 1.0, 4.0] {
            let v = bessel_k(Complex64::new(0.5, 0.0), x).unwrap();
            let exact = (PI / (2.0 * x)).sqrt() * (-x).exp();
            assert!((v.re - exact).abs() < 1e-14 * exact && v.im == 0.0);
        }
    }

    #[test]
    fn extended_k0() {
        // K_0(1) = 0.42102443824070833333562737921260904...
        let exact: Dd = num_traits::Num::from_str_radix("0.42102443824070833333562737921260904", 10).unwrap();
        let v = bessel_k_imag_generic(Dd::ZERO, Dd::ONE).unwrap();
        assert!((v - exact).abs().to_f64() < 1e-27);
    }

    #[test]
    fn incomplete_j_forms_agree() {
        for (x, n) in [(1.0, 1), (0.01, 3), (3.0, 2)] {
            let a = incomplete_bessel_j(x, n).unwrap();
            let b = incomplete_bessel_j_by_parts(x, n).unwrap();
            assert!((a - b).abs() < 1e-12 * a.abs().max(1e-3), "x {x} n {n}: {a} {b}");
        }
    }

    #[test]
    fn incomplete_j_envelope() {
        for (x, n) in [(0.5, 2), (10.0, 1)] {
            let j = incomplete_bessel_j(x, n).unwrap();
            assert!(j.abs() <= PI * (-x as f64).exp());
        }
    }

    #[test]
    fn incomplete_j_rejects_bad_input() {
        assert!(matches!(incomplete_bessel_j(0.0, 1), Err(Error::Domain(_))));
        assert!(matches!(incomplete_bessel_j(1.0, 0), Err(Error::Domain(_))));
    }

    proptest! {
        #[test]
        fn k_imag_even(tau in -15.0f64..15.0, x in 0.05f64..20.0) {
            prop_assert_eq!(bessel_k_imag(tau, x).unwrap(), bessel_k_imag(-tau, x).unwrap());
        }
    }
}

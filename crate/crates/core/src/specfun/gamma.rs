use num_complex::{Complex, Complex64};

use crate::error::{Error, Result};
use crate::real::{cx, Real};

/// B_{2k} for k = 1..15 as (numerator, denominator).
const BERNOULLI: [(f64, f64); 15] = [
    (1.0, 6.0),
    (-1.0, 30.0),
    (1.0, 42.0),
    (-1.0, 30.0),
    (5.0, 66.0),
    (-691.0, 2730.0),
    (7.0, 6.0),
    (-3617.0, 510.0),
    (43867.0, 798.0),
    (-174611.0, 330.0),
    (854513.0, 138.0),
    (-236364091.0, 2730.0),
    (8553103.0, 6.0),
    (-23749461029.0, 870.0),
    (8615841276005.0, 14322.0),
];

/// log Γ(z) for complex `z`.
///
/// `exp` of the result is Γ(z). The imaginary part is an argument of Γ(z)
/// but not necessarily the principal one: it may differ from it by a
/// multiple of 2π.
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    log_gamma_generic(z)
}

/// Working-precision version of [`log_gamma`].
pub fn log_gamma_generic<T: Real>(z: Complex<T>) -> Result<Complex<T>> {
    let re = z.re.to_f64();
    let im = z.im.to_f64();
    if !re.is_finite() || !im.is_finite() {
        return Err(Error::Domain(format!("log_gamma of non-finite argument {re} + {im}i")));
    }
    if z.im == T::zero() && re <= 0.0 && z.re == z.re.floor() {
        return Err(Error::Pole(re));
    }
    let r0 = T::LGAMMA_SHIFT;
    let shift = if im.abs() < 2.0 * r0 {
        (r0 - re).ceil().max(0.0)
    } else {
        (-re).ceil().max(0.0)
    } as usize;

    // the recurrence factors are multiplied in short runs so that only one
    // complex logarithm is taken per run
    let mut correction = Complex::new(T::zero(), T::zero());
    let mut w = z;
    let mut remaining = shift;
    while remaining > 0 {
        let run = remaining.min(8);
        let mut product = Complex::new(T::one(), T::zero());
        for _ in 0..run {
            product = product * w;
            w.re += T::one();
        }
        correction = correction + cx::ln(product);
        remaining -= run;
    }
    Ok(stirling(w) - correction)
}

/// Stirling series, valid for |w| ≥ LGAMMA_SHIFT with Re w > 0.
fn stirling<T: Real>(w: Complex<T>) -> Complex<T> {
    let one = T::one();
    let ln_w = cx::ln(w);
    let half = Complex::new(one * 0.5, T::zero());
    let mut result = (w - half) * ln_w - w + cx::real(T::ln_sqrt_2pi());
    let inv = Complex::new(one, T::zero()) / w;
    let inv2 = inv * inv;
    let mut power = inv;
    for (k, &(num, den)) in BERNOULLI.iter().take(T::LGAMMA_TERMS).enumerate() {
        let k = (k + 1) as f64;
        let coeff = T::from_f64(num) / (den * 2.0 * k * (2.0 * k - 1.0));
        result = result + power * coeff;
        power = power * inv2;
    }
    result
}

/// ln|Γ(x)| for real `x`.
pub fn ln_gamma_real<T: Real>(x: T) -> Result<T> {
    Ok(log_gamma_generic(cx::real(x))?.re)
}

/// Γ(x) for real `x`, including its sign for negative arguments.
pub fn gamma_real<T: Real>(x: T) -> Result<T> {
    let lg = log_gamma_generic(cx::real(x))?;
    // the imaginary part is a multiple of π; odd multiples flip the sign
    let turns = (lg.im.to_f64() / std::f64::consts::PI).round() as i64;
    let magnitude = lg.re.exp();
    Ok(if turns.rem_euclid(2) == 1 { -magnitude } else { magnitude })
}

/// |Γ(a + iτ)|² = exp(2 Re log Γ(a + iτ)).
pub fn gamma_abs_sq<T: Real>(a: T, tau: T) -> Result<T> {
    Ok((log_gamma_generic(Complex::new(a, tau))?.re * 2.0).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dd::Dd;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn half_integer_and_integer_values() {
        let v = log_gamma(Complex64::new(0.5, 0.0)).unwrap();
        assert!((v.re - PI.sqrt().ln()).abs() < 4e-15);
        assert!(v.im.abs() < 1e-15);
        let v = log_gamma(Complex64::new(5.0, 0.0)).unwrap();
        assert!((v.re - 24f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn reflection_on_the_critical_line() {
        let v = log_gamma(Complex64::new(0.5, 1.0)).unwrap();
        let abs_sq = (2.0 * v.re).exp();
        let exact = PI / PI.cosh();
        assert!((abs_sq - exact).abs() < 1e-14 * exact);
    }

    #[test]
    fn poles_are_rejected() {
        for z in [0.0, -1.0, -7.0] {
            assert_eq!(log_gamma(Complex64::new(z, 0.0)).unwrap_err(), Error::Pole(z));
        }
    }

    #[test]
    fn negative_real_sign() {
        // Γ(−1/2) = −2√π, Γ(−3/2) = 4√π/3
        assert!((gamma_real(-0.5f64).unwrap() + 2.0 * PI.sqrt()).abs() < 1e-13);
        assert!((gamma_real(-1.5f64).unwrap() - 4.0 * PI.sqrt() / 3.0).abs() < 1e-13);
    }

    #[test]
    fn extended_precision_values() {
        // ln Γ(1/2) = ln √π = 0.5723649429247000870717136756012478...
        let v = log_gamma_generic(cx::real(Dd::from_f64(0.5))).unwrap().re;
        let exact = (Dd::PI).ln() * 0.5;
        assert!((v - exact).abs().to_f64() < 1e-29, "{v}");
        // Γ(11) = 10!
        let v = log_gamma_generic(cx::real(Dd::from_f64(11.0))).unwrap().re;
        assert!((v - Dd::from_f64(3628800.0).ln()).abs().to_f64() < 1e-28);
    }

    proptest! {
        #[test]
        fn recurrence_holds(re in -20.0f64..30.0, im in -40.0f64..40.0) {
            prop_assume!(im.abs() > 1e-3 || (re - re.round()).abs() > 1e-3);
            let z = Complex64::new(re, im);
            let a = log_gamma(z + 1.0).unwrap();
            let b = log_gamma(z).unwrap() + z.ln();
            // compare Γ values, not branches
            let d = (a - b).exp() - 1.0;
            prop_assert!(d.norm() < 1e-12, "z = {z}: {d}");
        }

        #[test]
        fn conjugate_symmetry(re in 0.1f64..20.0, im in 0.0f64..50.0) {
            let z = Complex64::new(re, im);
            let a = log_gamma(z).unwrap();
            let b = log_gamma(z.conj()).unwrap();
            prop_assert!((a.conj() - b).norm() <= 1e-13 * a.norm().max(1.0));
        }
    }

    #[test]
    fn thirteen_digits_up_to_fifty() {
        // Γ(n) = (n−1)! for integers, Γ(n+1/2) from the duplication recurrence
        let mut fact = 1.0f64;
        for n in 1..=50 {
            let v = log_gamma(Complex64::new(n as f64, 0.0)).unwrap().re.exp();
            assert!((v - fact).abs() <= 1e-13 * fact, "n = {n}");
            fact *= n as f64;
        }
        let mut g = PI.sqrt();
        for k in 0..49 {
            let x = k as f64 + 0.5;
            let v = log_gamma(Complex64::new(x, 0.0)).unwrap().re.exp();
            assert!((v - g).abs() <= 1e-13 * g, "x = {x}");
            g *= x;
        }
    }
}

use num_complex::{Complex, Complex64};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{
    integrate_adaptive, integrate_semi_infinite_from, integrate_vertical_line, MellinBarnesSpec,
    QuadSpec, QuadValue,
};
use crate::real::{cx, Real};

use super::bessel::bessel_k_imag;
use super::gamma::{gamma_abs_sq, log_gamma, log_gamma_generic};

/// Indices of W_{μ,iτ}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WhittakerOrder {
    pub mu: f64,
    pub tau: f64,
}

impl WhittakerOrder {
    pub fn new(mu: f64, tau: f64) -> Self {
        WhittakerOrder { mu, tau }
    }
}

/// A complex discrete index `re + i·im`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexIndex {
    pub re: f64,
    pub im: f64,
}

impl ComplexIndex {
    pub fn real(re: f64) -> Self {
        ComplexIndex { re, im: 0.0 }
    }

    pub fn new(re: f64, im: f64) -> Self {
        ComplexIndex { re, im }
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    /// The index as a non-negative integer, when it is one.
    pub fn as_integer(self) -> Option<u32> {
        (self.im == 0.0 && self.re >= 0.0 && self.re == self.re.round() && self.re < 1e9)
            .then_some(self.re as u32)
    }
}

/// Arguments at or below this use the residue expansion instead of the
/// contour integral.
const SERIES_LIMIT: f64 = 0.75;
/// Minimum distance of 2ρ from the integers for the residue expansion.
const SERIES_SEPARATION: f64 = 0.2;

fn check_args(rho: Complex64, x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("W_{{μ,ρ}}(x) needs x > 0, got {x}")));
    }
    if rho.re != 0.0 && rho.im != 0.0 {
        return Err(Error::Domain(format!(
            "second index {rho} must be real or purely imaginary"
        )));
    }
    Ok(())
}

/// Lower bound for admissible contour abscissas.
pub fn abscissa_lower_bound(mu: f64, rho: Complex64) -> f64 {
    (rho.re.abs() - 0.5).max(mu - 1.0)
}

/// log|integrand| of the contour integral at `s`, in double precision.
fn log_magnitude(mu: f64, rho: Complex64, x: f64, s: Complex64) -> f64 {
    let half = Complex64::new(0.5, 0.0);
    let a = log_gamma(half + rho + s);
    let b = log_gamma(half - rho + s);
    let c = log_gamma(Complex64::new(1.0 - mu, 0.0) + s);
    match (a, b, c) {
        (Ok(a), Ok(b), Ok(c)) => (a + b - c).re - s.re * x.ln(),
        (Ok(_), Ok(_), Err(_)) => f64::NEG_INFINITY,
        _ => f64::INFINITY,
    }
}

/// Abscissa minimising the integrand on the real axis, where the contour
/// passes through the saddle and cancellation along the line is smallest.
pub fn saddle_abscissa(mu: f64, rho: Complex64, x: f64) -> f64 {
    let lo = abscissa_lower_bound(mu, rho) + 0.25;
    let hi = (x + 5.0).max(lo + 2.0);
    let h = |sigma: f64| log_magnitude(mu, rho, x, Complex64::new(sigma, 0.0));
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut hc, mut hd) = (h(c), h(d));
    for _ in 0..80 {
        if hc < hd {
            b = d;
            d = c;
            hd = hc;
            c = b - ratio * (b - a);
            hc = h(c);
        } else {
            a = c;
            c = d;
            hc = hd;
            d = a + ratio * (b - a);
            hd = h(d);
        }
        if b - a < 1e-6 * (1.0 + b.abs()) {
            break;
        }
    }
    0.5 * (a + b)
}

/// Half-length of the contour beyond which the integrand stays below a
/// roundoff-level fraction of its largest value on the line.
fn contour_cutoff(mu: f64, rho: Complex64, x: f64, gamma: f64, eps: f64) -> f64 {
    let at = |t: f64| log_magnitude(mu, rho, x, Complex64::new(gamma, t));
    let level = (eps * 1e-2).ln();
    let mut peak = at(0.0);
    let mut t = 0.0;
    loop {
        t += 2.0;
        let v = at(t).max(at(-t));
        peak = peak.max(v);
        if (t >= 10.0 && v < peak + level) || t >= 480.0 {
            return t;
        }
    }
}

/// e^{−x/2}·W_{μ,ρ}(x) for real μ and real or purely imaginary ρ.
///
/// Uses the Mellin-Barnes integral on a vertical line through the saddle
/// point, or for small x the sum of its residues to the left of the line.
pub fn scaled_whittaker_w<T: Real>(mu: T, rho: Complex<T>, x: T, quad: &QuadSpec) -> Result<T> {
    let rho_f = cx::to_f64(rho);
    let (mu_f, x_f) = (mu.to_f64(), x.to_f64());
    check_args(rho_f, x_f)?;
    let two_rho = rho_f * 2.0;
    let separation = Complex64::new(two_rho.re - two_rho.re.round(), two_rho.im).norm();
    if x_f <= SERIES_LIMIT && separation >= SERIES_SEPARATION {
        return residue_series(mu, rho, x);
    }
    let gamma = saddle_abscissa(mu_f, rho_f, x_f);
    let cutoff = contour_cutoff(mu_f, rho_f, x_f, gamma, T::EPSILON);
    scaled_whittaker_w_on_line(mu, rho, x, &MellinBarnesSpec {
        gamma_abscissa: gamma,
        tail_cutoff: cutoff,
        quad: *quad,
    })
}

/// e^{−x/2}·W_{μ,ρ}(x) on an explicitly chosen contour.
///
/// The cutoff in `spec` is doubled until the discarded tail is negligible.
pub fn scaled_whittaker_w_on_line<T: Real>(
    mu: T,
    rho: Complex<T>,
    x: T,
    spec: &MellinBarnesSpec,
) -> Result<T> {
    let rho_f = cx::to_f64(rho);
    check_args(rho_f, x.to_f64())?;
    spec.check_abscissa(abscissa_lower_bound(mu.to_f64(), rho_f))?;
    let half = T::one() * 0.5;
    let ln_x = x.ln();
    let denominator_shift = T::one() - mu;
    let g = |s: Complex<T>| -> Complex<T> {
        let a = log_gamma_generic(Complex::new(half + rho.re + s.re, rho.im + s.im));
        let b = log_gamma_generic(Complex::new(half - rho.re + s.re, s.im - rho.im));
        let c = log_gamma_generic(Complex::new(denominator_shift + s.re, s.im));
        match (a, b, c) {
            (Ok(a), Ok(b), Ok(c)) => cx::exp(a + b - c - s.scale(ln_x)),
            // 1/Γ vanishes at its poles
            (Ok(_), Ok(_), Err(_)) => Complex::new(T::zero(), T::zero()),
            _ => Complex::new(T::from_f64(f64::NAN), T::zero()),
        }
    };
    // relative accuracy only: the value may be far below any fixed abs_tol
    let quad = QuadSpec {
        abs_tol: f64::MIN_POSITIVE,
        ..spec.quad
    };
    let mut line = MellinBarnesSpec { quad, ..*spec };
    let result = loop {
        match integrate_vertical_line(&g, &line) {
            Err(Error::TailNotNegligible { .. }) if line.tail_cutoff < 480.0 => {
                line.tail_cutoff *= 2.0;
            }
            other => break other?,
        }
    };
    let result = result.require_or_noise(&quad)?;
    let (re, im) = (result.value.re.to_f64(), result.value.im.to_f64());
    let noise = 1e3 * T::EPSILON * result.magnitude;
    if im.abs() > 1e-8 * re.abs() && im.abs() > noise {
        return Err(Error::RealnessViolation { re, im });
    }
    Ok(result.value.re)
}

/// Sum of the residues at s = −1/2 ∓ ρ − k, k ≥ 0.
fn residue_series<T: Real>(mu: T, rho: Complex<T>, x: T) -> Result<T> {
    let mut total = Complex::new(T::zero(), T::zero());
    for sign in [T::one(), -T::one()] {
        let r = rho.scale(sign);
        let half = T::one() * 0.5;
        let num = log_gamma_generic(r.scale(-T::one() * 2.0))?;
        let den = log_gamma_generic(Complex::new(half - mu - r.re, -r.im));
        let lead = match den {
            Ok(den) => cx::exp(num - den + Complex::new(half + r.re, r.im).scale(x.ln())),
            Err(Error::Pole(_)) => continue,
            Err(e) => return Err(e),
        };
        let mut term = lead;
        let mut sum = term;
        for k in 0..500 {
            let kf = T::from_usize(k);
            let numer = Complex::new(kf + half + mu + r.re, r.im);
            let denom = Complex::new((kf + 1.0) * (kf + 1.0 + r.re * 2.0), (kf + 1.0) * r.im * 2.0);
            term = term * numer / denom;
            term = term.scale(-x);
            sum = sum + term;
            if term.norm() <= T::EPSILON * 1e-2 * sum.norm() {
                break;
            }
        }
        total = total + sum;
    }
    Ok(total.re)
}

/// W_{μ,iτ}(x) by the Mellin-Barnes route, valid for every real μ.
pub fn whittaker_w_mb(order: WhittakerOrder, x: f64) -> Result<f64> {
    let rho = Complex64::new(0.0, order.tau);
    Ok((0.5 * x).exp() * scaled_whittaker_w(order.mu, rho, x, &QuadSpec::default())?)
}

/// W_{μ,iτ}(x) by the Mellin-Barnes route on a given contour abscissa.
pub fn whittaker_w_mb_on_line(order: WhittakerOrder, x: f64, gamma_abscissa: f64) -> Result<f64> {
    let rho = Complex64::new(0.0, order.tau);
    let spec = MellinBarnesSpec::new(gamma_abscissa, QuadSpec::default());
    Ok((0.5 * x).exp() * scaled_whittaker_w_on_line(order.mu, rho, x, &spec)?)
}

/// Lower end of the Bessel-route integral, replaced by the leading
/// small-argument term of K.
const BESSEL_T0: f64 = 1e-8;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// W_{μ,iτ}(x) = 2(4x)^μ e^{−x/2}/|Γ(1/2−μ+iτ)|² ∫_0^∞ t^{−2μ} e^{−t²/(4x)} K_{2iτ}(t) dt,
/// for μ < 1/2.
pub fn whittaker_w_bessel(order: WhittakerOrder, x: f64) -> Result<f64> {
    let WhittakerOrder { mu, tau } = order;
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("W_{{μ,iτ}}(x) needs x > 0, got {x}")));
    }
    if !(mu < 0.5) {
        return Err(Error::Domain(format!("the Bessel route needs μ < 1/2, got {mu}")));
    }
    let nu = 2.0 * tau.abs();
    let a = 1.0 - 2.0 * mu;
    let quad = QuadSpec::default().with_tolerances(1e-15, 1e-12);
    let weight = |t: f64| (-2.0 * mu * t.ln() - t * t / (4.0 * x)).exp();

    // (0, t0): K_{iν}(t) ≈ Re[Γ(iν)(t/2)^{−iν}], K_0(t) ≈ ln(2/t) − γ_E
    let t0 = BESSEL_T0;
    let head = if nu == 0.0 {
        t0.powf(a) / a * (std::f64::consts::LN_2 - EULER_GAMMA - t0.ln() + 1.0 / a)
    } else {
        let i_nu = Complex64::new(0.0, nu);
        let coeff = log_gamma(i_nu)?.exp() * (i_nu * std::f64::consts::LN_2).exp();
        let power = ((a - i_nu) * t0.ln()).exp();
        (coeff * power / (a - i_nu)).re
    };

    // [t0, 1] in the logarithmic variable, where K oscillates in ln t
    let body = integrate_adaptive(
        |y: f64| {
            let t = y.exp();
            t * weight(t) * bessel_k_imag(nu, t).unwrap_or(f64::NAN)
        },
        t0.ln(),
        0.0,
        ((nu * 19.0 / 3.0).ceil() as usize).max(4),
        &quad,
    )?
    .require_or_noise(&quad)?;

    let tail = integrate_semi_infinite_from(
        |t: f64| weight(t) * bessel_k_imag(nu, t).unwrap_or(f64::NAN),
        1.0,
        1.0,
        &quad,
    )?
    .require_or_noise(&quad)?;

    let integral = head + body.value + tail.value;
    let norm = gamma_abs_sq(0.5 - mu, tau)?;
    Ok(2.0 * (4.0 * x).powf(mu) * (-0.5 * x).exp() / norm * integral)
}

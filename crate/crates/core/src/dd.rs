//! Double-double arithmetic: an unevaluated sum `hi + lo` of two `f64`
//! carrying about 106 bits (31-32 decimal digits) of significand.
//!
//! Basic operations follow the error-free transformations of Dekker and
//! Knuth as popularised by the QD library. Elementary functions use argument
//! reduction plus Taylor series, with a single Newton step for `ln` and
//! `atan2`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, Sub, SubAssign};
use std::sync::OnceLock;

use num_traits::{Num, One, Zero};

use crate::quad::{GaussLegendre, Precision, TanhSinhTable};
use crate::real::Real;

#[derive(Clone, Copy, Default)]
pub struct Dd {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };
    pub const PI: Dd = Dd {
        hi: 3.141_592_653_589_793e0,
        lo: 1.224_646_799_147_353_2e-16,
    };
    pub const TWO_PI: Dd = Dd {
        hi: 6.283_185_307_179_586e0,
        lo: 2.449_293_598_294_706_4e-16,
    };
    pub const FRAC_PI_2: Dd = Dd {
        hi: 1.570_796_326_794_896_6e0,
        lo: 6.123_233_995_736_766e-17,
    };
    pub const LN_2: Dd = Dd {
        hi: 6.931_471_805_599_453e-1,
        lo: 2.319_046_813_846_299_6e-17,
    };

    #[inline]
    pub const fn new(hi: f64, lo: f64) -> Self {
        Dd { hi, lo }
    }

    #[inline]
    pub fn from_sum(a: f64, b: f64) -> Self {
        let (hi, lo) = two_sum(a, b);
        Dd { hi, lo }
    }

    #[inline]
    pub fn hi(self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn lo(self) -> f64 {
        self.lo
    }

    #[inline]
    fn non_finite(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    fn sqr(self) -> Self {
        let (p1, mut p2) = two_prod(self.hi, self.hi);
        p2 += 2.0 * self.hi * self.lo;
        p2 += self.lo * self.lo;
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }

    /// Multiplication by an exact power of two.
    #[inline]
    fn ldexp(self, k: i32) -> Self {
        // two steps keep 2^k representable for |k| up to ~2000
        let half = k / 2;
        let s1 = 2f64.powi(half);
        let s2 = 2f64.powi(k - half);
        Dd {
            hi: self.hi * s1 * s2,
            lo: self.lo * s1 * s2,
        }
    }

    fn expm1_reduced(r: Dd) -> Dd {
        // r is small (|r| <= ln2/2); scale down by 2^10, sum Taylor, then
        // undo the scaling with e^{2x} - 1 = (e^x - 1)(e^x - 1 + 2).
        const SQUARINGS: i32 = 10;
        let r = r.ldexp(-SQUARINGS);
        let mut term = r;
        let mut sum = r;
        for i in 2..=12 {
            term = term * r / i as f64;
            sum += term;
            if term.hi.abs() < 1e-36 * sum.hi.abs() {
                break;
            }
        }
        for _ in 0..SQUARINGS {
            sum = sum * (sum + 2.0);
        }
        sum
    }

    fn exp_impl(self) -> Dd {
        if self.hi > 709.78 {
            return Dd::non_finite(f64::INFINITY);
        }
        if self.hi < -745.2 {
            return Dd::ZERO;
        }
        if !self.hi.is_finite() {
            return Dd::non_finite(self.hi.exp());
        }
        let k = (self.hi / Dd::LN_2.hi).round();
        let r = self - Dd::LN_2 * k;
        (Dd::expm1_reduced(r) + 1.0).ldexp(k as i32)
    }

    fn expm1_impl(self) -> Dd {
        if self.hi.abs() < 0.34 {
            Dd::expm1_reduced(self)
        } else {
            self.exp_impl() - 1.0
        }
    }

    fn ln_impl(self) -> Dd {
        if self.hi <= 0.0 {
            return Dd::non_finite(if self.hi == 0.0 { f64::NEG_INFINITY } else { f64::NAN });
        }
        if !self.hi.is_finite() {
            return Dd::non_finite(self.hi);
        }
        let x = Dd::new(self.hi.ln(), 0.0);
        x + self * (-x).exp_impl() - 1.0
    }

    /// sin and cos of |t| <= π/4 by Taylor series.
    fn sin_cos_taylor(t: Dd) -> (Dd, Dd) {
        let t2 = t.sqr();
        let mut s = t;
        let mut term = t;
        let mut k = 1.0;
        loop {
            term = -(term * t2) / ((k + 1.0) * (k + 2.0));
            s += term;
            k += 2.0;
            if term.hi.abs() < 1e-34 || k > 60.0 {
                break;
            }
        }
        let mut c = Dd::ONE;
        let mut term = Dd::ONE;
        let mut k = 0.0;
        loop {
            term = -(term * t2) / ((k + 1.0) * (k + 2.0));
            c += term;
            k += 2.0;
            if term.hi.abs() < 1e-34 || k > 60.0 {
                break;
            }
        }
        (s, c)
    }

    fn sin_cos_impl(self) -> (Dd, Dd) {
        if !self.hi.is_finite() {
            return (Dd::non_finite(f64::NAN), Dd::non_finite(f64::NAN));
        }
        let z = (self.hi / Dd::TWO_PI.hi).round();
        let r = self - Dd::TWO_PI * z;
        let j = (r.hi / Dd::FRAC_PI_2.hi).round();
        let t = r - Dd::FRAC_PI_2 * j;
        let (s, c) = Dd::sin_cos_taylor(t);
        match (j as i64).rem_euclid(4) {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }

    fn floor_impl(self) -> Dd {
        let hi = self.hi.floor();
        if hi == self.hi {
            let (h, l) = quick_two_sum(hi, self.lo.floor());
            Dd { hi: h, lo: l }
        } else {
            Dd { hi, lo: 0.0 }
        }
    }

    fn parse_decimal(s: &str) -> Option<Dd> {
        let s = s.trim();
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s.strip_prefix('+').unwrap_or(s)),
        };
        let (mantissa, exponent) = match body.find(['e', 'E']) {
            Some(i) => (&body[..i], body[i + 1..].parse::<i32>().ok()?),
            None => (body, 0),
        };
        let mut value = Dd::ZERO;
        let mut scale = exponent;
        let mut seen_point = false;
        let mut digits = 0;
        for ch in mantissa.chars() {
            match ch {
                '.' if !seen_point => seen_point = true,
                '0'..='9' => {
                    value = value * 10.0 + f64::from(ch as u8 - b'0');
                    digits += 1;
                    if seen_point {
                        scale -= 1;
                    }
                }
                _ => return None,
            }
        }
        if digits == 0 {
            return None;
        }
        let value = value * Dd::from_f64(10.0).powi(scale);
        Some(if neg { -value } else { value })
    }
}

impl Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, b: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, b.hi);
        if !s1.is_finite() {
            return Dd::non_finite(s1);
        }
        let (t1, t2) = two_sum(self.lo, b.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (hi, lo) = quick_two_sum(s1, s2 + t2);
        Dd { hi, lo }
    }
}

impl Add<f64> for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, b: f64) -> Dd {
        let (s1, s2) = two_sum(self.hi, b);
        if !s1.is_finite() {
            return Dd::non_finite(s1);
        }
        let (hi, lo) = quick_two_sum(s1, s2 + self.lo);
        Dd { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Sub<f64> for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, b: f64) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, b: Dd) -> Dd {
        let (p1, p2) = two_prod(self.hi, b.hi);
        if !p1.is_finite() {
            return Dd::non_finite(p1);
        }
        let p2 = p2 + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }
}

impl Mul<f64> for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, b: f64) -> Dd {
        let (p1, p2) = two_prod(self.hi, b);
        if !p1.is_finite() {
            return Dd::non_finite(p1);
        }
        let (hi, lo) = quick_two_sum(p1, p2 + self.lo * b);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    #[inline]
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        if !q1.is_finite() || q1 == 0.0 {
            return Dd::non_finite(q1);
        }
        let r = self - b * q1;
        let q2 = r.hi / b.hi;
        let r = r - b * q2;
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + q3
    }
}

impl Div<f64> for Dd {
    type Output = Dd;
    #[inline]
    fn div(self, b: f64) -> Dd {
        self / Dd::new(b, 0.0)
    }
}

impl Rem for Dd {
    type Output = Dd;
    fn rem(self, b: Dd) -> Dd {
        let q = self / b;
        let t = if q.hi < 0.0 { -(-q).floor_impl() } else { q.floor_impl() };
        self - b * t
    }
}

impl Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl AddAssign for Dd {
    #[inline]
    fn add_assign(&mut self, b: Dd) {
        *self = *self + b;
    }
}

impl SubAssign for Dd {
    #[inline]
    fn sub_assign(&mut self, b: Dd) {
        *self = *self - b;
    }
}

impl MulAssign for Dd {
    #[inline]
    fn mul_assign(&mut self, b: Dd) {
        *self = *self * b;
    }
}

impl DivAssign for Dd {
    #[inline]
    fn div_assign(&mut self, b: Dd) {
        *self = *self / b;
    }
}

impl PartialEq for Dd {
    fn eq(&self, other: &Dd) -> bool {
        self.hi == other.hi && self.lo == other.lo
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Dd) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi)? {
            Ordering::Equal => self.lo.partial_cmp(&other.lo),
            ord => Some(ord),
        }
    }
}

impl Zero for Dd {
    fn zero() -> Dd {
        Dd::ZERO
    }
    fn is_zero(&self) -> bool {
        self.hi == 0.0
    }
}

impl One for Dd {
    fn one() -> Dd {
        Dd::ONE
    }
}

impl Num for Dd {
    type FromStrRadixErr = String;

    fn from_str_radix(s: &str, radix: u32) -> Result<Dd, String> {
        if radix != 10 {
            return Err(format!("radix {radix} is not supported"));
        }
        Dd::parse_decimal(s).ok_or_else(|| format!("cannot parse `{s}`"))
    }
}

impl fmt::Debug for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dd({:e}, {:e})", self.hi, self.lo)
    }
}

impl fmt::Display for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}{:+e}", self.hi, self.lo)
    }
}

impl Real for Dd {
    const EPSILON: f64 = 4.93e-32;
    const PRECISION: Precision = Precision::Extended;
    const LGAMMA_SHIFT: f64 = 25.0;
    const LGAMMA_TERMS: usize = 15;

    #[inline]
    fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
    fn pi() -> Self {
        Dd::PI
    }
    fn ln_sqrt_2pi() -> Self {
        static VALUE: OnceLock<Dd> = OnceLock::new();
        *VALUE.get_or_init(|| Dd::TWO_PI.ln_impl() * 0.5)
    }
    #[inline]
    fn abs(self) -> Self {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }
    fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return Dd::non_finite(if self.hi == 0.0 { 0.0 } else { f64::NAN });
        }
        if !self.hi.is_finite() {
            return Dd::non_finite(self.hi);
        }
        let x = 1.0 / self.hi.sqrt();
        let ax = self.hi * x;
        let (p1, p2) = two_prod(ax, ax);
        let diff = (self - Dd { hi: p1, lo: p2 }).hi;
        Dd::from_sum(ax, diff * (x * 0.5))
    }
    fn exp(self) -> Self {
        self.exp_impl()
    }
    fn exp_m1(self) -> Self {
        self.expm1_impl()
    }
    fn ln(self) -> Self {
        self.ln_impl()
    }
    fn sin(self) -> Self {
        self.sin_cos_impl().0
    }
    fn cos(self) -> Self {
        self.sin_cos_impl().1
    }
    fn sin_cos(self) -> (Self, Self) {
        self.sin_cos_impl()
    }
    fn sinh(self) -> Self {
        if self.hi.abs() < 0.5 {
            let em = self.expm1_impl();
            (em + em / (em + 1.0)) * 0.5
        } else {
            let e = self.exp_impl();
            (e - Dd::ONE / e) * 0.5
        }
    }
    fn cosh(self) -> Self {
        let e = self.abs().exp_impl();
        (e + Dd::ONE / e) * 0.5
    }
    fn atan2(self, x: Self) -> Self {
        let y = self;
        if x.hi == 0.0 && y.hi == 0.0 {
            return Dd::ZERO;
        }
        let z = Dd::from_f64(y.hi.atan2(x.hi));
        let (s, c) = z.sin_cos_impl();
        z + (y * c - x * s) / (x * c + y * s)
    }
    fn floor(self) -> Self {
        self.floor_impl()
    }
    fn is_finite(self) -> bool {
        self.hi.is_finite()
    }
    fn erfcx(self) -> Self {
        crate::specfun::erf::erfcx_generic(self)
    }
    fn tanh_sinh_table() -> &'static TanhSinhTable<Self> {
        static TABLE: OnceLock<TanhSinhTable<Dd>> = OnceLock::new();
        TABLE.get_or_init(TanhSinhTable::build)
    }
    fn gauss_legendre() -> &'static GaussLegendre<Self> {
        static RULE: OnceLock<GaussLegendre<Dd>> = OnceLock::new();
        RULE.get_or_init(GaussLegendre::build)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Dd, b: Dd, rel: f64) -> bool {
        ((a - b).abs() / b.abs()).to_f64() <= rel
    }

    #[test]
    fn arithmetic_carries_extra_digits() {
        let third = Dd::ONE / Dd::from_f64(3.0);
        let back = third * 3.0;
        assert!((back - Dd::ONE).abs().to_f64() < 1e-31);
        // 1 + 2^-80 survives in double-double but not in f64
        let tiny = 2f64.powi(-80);
        let s = Dd::ONE + tiny;
        assert_eq!((s - Dd::ONE).to_f64(), tiny);
    }

    #[test]
    fn sqrt_squares_back() {
        let two = Dd::from_f64(2.0);
        let r = two.sqrt();
        assert!(((r * r) - two).abs().to_f64() < 1e-31);
    }

    #[test]
    fn exp_ln_inverse() {
        for &x in &[-30.5, -1.0, -1e-3, 0.25, 1.0, 7.0, 100.0] {
            let v = Dd::from_f64(x);
            let back = v.exp().ln();
            assert!((back - v).abs().to_f64() < 1e-30 * x.abs().max(1.0), "x = {x}");
        }
    }

    #[test]
    fn exp_one_matches_e() {
        // e = 2.718281828459045235360287471352662497757...
        let e = Dd::parse_decimal("2.718281828459045235360287471352662").unwrap();
        assert!(close(Dd::ONE.exp(), e, 1e-30));
    }

    #[test]
    fn trig_identities() {
        for &x in &[0.1, 0.7853, 2.0, -3.3, 40.0, 300.5] {
            let v = Dd::from_f64(x);
            let (s, c) = v.sin_cos();
            assert!((s * s + c * c - Dd::ONE).abs().to_f64() < 1e-30, "x = {x}");
            assert!((s.to_f64() - x.sin()).abs() < 1e-14);
        }
        // sin(π/6) = 1/2
        let s = (Dd::PI / 6.0).sin();
        assert!((s - Dd::from_f64(0.5)).abs().to_f64() < 1e-31);
    }

    #[test]
    fn atan2_recovers_angle() {
        let a = Dd::from_f64(0.3) + Dd::from_f64(1e-20);
        let (s, c) = a.sin_cos();
        let back = s.atan2(c);
        assert!((back - a).abs().to_f64() < 1e-31);
    }

    #[test]
    fn expm1_small_argument() {
        let x = Dd::from_f64(1e-20);
        let em = x.exp_m1();
        // e^x - 1 = x + x²/2 + ...
        assert!(close(em, x + x * x * 0.5, 1e-30));
    }

    #[test]
    fn decimal_parsing() {
        let v: Dd = Num::from_str_radix("0.1", 10).unwrap();
        assert!(((v * 10.0) - Dd::ONE).abs().to_f64() < 1e-31);
        assert!(<Dd as Num>::from_str_radix("abc", 10).is_err());
    }
}

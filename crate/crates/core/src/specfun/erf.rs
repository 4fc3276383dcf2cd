//! Complementary error function and its scaled form e^{x²}·erfc(x).
//!
//! Double precision uses W. J. Cody's rational approximations; other
//! working precisions use the Maclaurin series of erfcx for moderate
//! arguments and the Laplace continued fraction beyond.

use crate::real::Real;

const A: [f64; 5] = [
    3.161_123_743_870_565_6,
    113.864_154_151_050_16,
    377.485_237_685_302_0,
    3_209.377_589_138_469_5,
    0.185_777_706_184_603_15,
];
const B: [f64; 4] = [
    23.601_290_952_344_12,
    244.024_637_934_444_17,
    1_282.616_526_077_372_3,
    2_844.236_833_439_170_6,
];
const C: [f64; 9] = [
    0.564_188_496_988_670_1,
    8.883_149_794_388_376,
    66.119_190_637_141_63,
    298.635_138_197_400_1,
    881.952_221_241_769_1,
    1_712.047_612_634_070_6,
    2_051.078_377_826_071_5,
    1_230.339_354_797_997_2,
    2.153_115_354_744_038_5e-8,
];
const D: [f64; 8] = [
    15.744_926_110_709_835,
    117.693_950_891_312_5,
    537.181_101_862_009_9,
    1_621.389_574_566_690_2,
    3_290.799_235_733_459_6,
    4_362.619_090_143_247,
    3_439.367_674_143_721_6,
    1_230.339_354_803_749_4,
];
const P: [f64; 6] = [
    0.305_326_634_961_232_36,
    0.360_344_899_949_804_45,
    0.125_781_726_111_229_26,
    0.016_083_785_148_742_275,
    6.587_491_615_298_378e-4,
    0.016_315_387_137_302_097,
];
const Q: [f64; 5] = [
    2.568_520_192_289_822,
    1.872_952_849_923_460_4,
    0.527_905_102_951_428_4,
    0.060_518_341_312_441_32,
    0.002_335_204_976_268_691_8,
];

const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;
const THRESHOLD: f64 = 0.468_75;
const XBIG: f64 = 26.543;

fn small(z: f64) -> f64 {
    ((((A[4] * z + A[0]) * z + A[1]) * z + A[2]) * z + A[3])
        / ((((z + B[0]) * z + B[1]) * z + B[2]) * z + B[3])
}

fn middle(y: f64) -> f64 {
    let num = C[..8].iter().fold(C[8], |acc, &c| acc * y + c);
    let den = D.iter().fold(1.0, |acc, &d| acc * y + d);
    num / den
}

fn large(y: f64) -> f64 {
    let z = 1.0 / (y * y);
    let num = P[..5].iter().fold(P[5], |acc, &p| acc * z + p);
    let den = Q.iter().fold(1.0, |acc, &q| acc * z + q);
    (FRAC_1_SQRT_PI - z * num / den) / y
}

/// e^{−y²} split as e^{−ỹ²}·e^{−(y−ỹ)(y+ỹ)} with ỹ = y rounded down to 1/16,
/// which keeps the exponent exact for large y.
fn exp_neg_square(y: f64) -> f64 {
    let t = (y * 16.0).trunc() / 16.0;
    (-t * t).exp() * (-(y - t) * (y + t)).exp()
}

fn exp_square(y: f64) -> f64 {
    let t = (y * 16.0).trunc() / 16.0;
    (t * t).exp() * ((y - t) * (y + t)).exp()
}

/// erfcx(|x|) for |x| above the series threshold.
fn erfcx_tail(y: f64) -> f64 {
    if y <= 4.0 {
        middle(y)
    } else {
        large(y)
    }
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return x;
    }
    let y = x.abs();
    if y <= THRESHOLD {
        return 1.0 - x * small(y * y);
    }
    let upper = if y >= XBIG {
        0.0
    } else {
        erfcx_tail(y) * exp_neg_square(y)
    };
    if x < 0.0 {
        2.0 - upper
    } else {
        upper
    }
}

/// Scaled complementary error function e^{x²}·erfc(x), finite for all
/// x ≥ −26.6 and decaying like 1/(x√π) for large x.
pub fn erfcx_f64(x: f64) -> f64 {
    if x.is_nan() {
        return x;
    }
    let y = x.abs();
    if y <= THRESHOLD {
        let z = y * y;
        return z.exp() * (1.0 - x * small(z));
    }
    let upper = erfcx_tail(y);
    if x < 0.0 {
        2.0 * exp_square(y) - upper
    } else {
        upper
    }
}

/// e^{x²}·erfc(x).
pub fn erfcx(x: f64) -> f64 {
    erfcx_f64(x)
}

/// erfcx in any working precision.
pub fn erfcx_generic<T: Real>(x: T) -> T {
    if x < T::zero() {
        let y = -x;
        return (y * y).exp() * 2.0 - erfcx_generic(y);
    }
    if x.to_f64() < 2.0 {
        series(x, 0)
    } else {
        continued_fraction(x)
    }
}

/// erfcx(x) − 1, accurate for small x.
pub fn erfcx_m1_generic<T: Real>(x: T) -> T {
    if x.abs().to_f64() < 0.5 {
        series(x, 1)
    } else {
        erfcx_generic(x) - 1.0
    }
}

/// Σ_{k≥first} (−x)^k / Γ(k/2 + 1), the Maclaurin series of erfcx.
fn series<T: Real>(x: T, first: usize) -> T {
    let one = T::one();
    // 1/Γ(k/2 + 1) for even and odd k
    let mut c_even = one;
    let mut c_odd = one * 2.0 / T::pi().sqrt();
    let mut power = one;
    let mut sum = T::zero();
    let mut k = 0usize;
    loop {
        let c = if k % 2 == 0 { c_even } else { c_odd };
        let term = power * c;
        if k >= first {
            sum += term;
        }
        if k > 4 && term.abs().to_f64() <= T::EPSILON * 1e-2 * sum.abs().to_f64().max(1e-300) {
            break;
        }
        if k % 2 == 0 {
            c_even = c_even / (k as f64 / 2.0 + 1.0);
        } else {
            c_odd = c_odd / (k as f64 / 2.0 + 1.0);
        }
        power = -(power * x);
        k += 1;
        if k > 400 {
            break;
        }
    }
    sum
}

/// erfcx(x) = (1/√π)·1/(x + (1/2)/(x + 1/(x + (3/2)/(x + …)))) by
/// modified Lentz iteration.
fn continued_fraction<T: Real>(x: T) -> T {
    let tiny = T::from_f64(1e-300);
    let mut f = x;
    let mut c = x;
    let mut d = T::zero();
    for k in 1..5000 {
        let a = T::from_f64(k as f64 * 0.5);
        d = x + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = x + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = T::one() / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs().to_f64() <= T::EPSILON {
            break;
        }
    }
    T::one() / (f * T::pi().sqrt())
}

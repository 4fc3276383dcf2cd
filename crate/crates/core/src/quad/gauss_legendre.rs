use super::{IntegralResult, QuadSpec, QuadValue};
use crate::error::{Error, Result};
use crate::real::Real;

const POINTS: usize = 20;

/// Nodes and weights of the 20-point Gauss-Legendre rule on [-1, 1],
/// positive half only (the rule is symmetric).
pub struct GaussLegendre<T> {
    nodes: [T; POINTS / 2],
    weights: [T; POINTS / 2],
}

impl<T: Real> GaussLegendre<T> {
    /// Newton iteration on P_20 carried out in the working precision.
    pub fn build() -> Self {
        let mut nodes = [T::zero(); POINTS / 2];
        let mut weights = [T::zero(); POINTS / 2];
        let n = POINTS as f64;
        for i in 0..POINTS / 2 {
            let guess = (std::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5)).cos();
            let mut x = T::from_f64(guess);
            let mut derivative = T::one();
            for _ in 0..100 {
                let (p, dp) = legendre(POINTS, x);
                derivative = dp;
                let dx = p / dp;
                x -= dx;
                if dx.abs().to_f64() <= T::EPSILON * 0.5 {
                    break;
                }
            }
            let (_, dp) = legendre(POINTS, x);
            if dp != T::zero() {
                derivative = dp;
            }
            nodes[i] = x;
            weights[i] = T::one() * 2.0 / ((T::one() - x * x) * derivative * derivative);
        }
        GaussLegendre { nodes, weights }
    }

    fn apply<V: QuadValue<T>>(&self, f: &impl Fn(T) -> V, a: T, b: T) -> (V, f64, bool) {
        let half = (b - a) * 0.5;
        let centre = (a + b) * 0.5;
        let mut sum = V::zero();
        let mut abs_sum = 0.0;
        let mut finite = true;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            let dx = half * x;
            for v in [f(centre - dx), f(centre + dx)] {
                finite &= v.is_finite();
                sum = sum + v.scale(w);
                abs_sum += v.norm() * w.to_f64();
            }
        }
        (sum.scale(half), abs_sum * half.abs().to_f64(), finite)
    }
}

/// P_n(x) and P_n'(x) by the three-term recurrence.
fn legendre<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = (x * p1 * (2.0 * kf - 1.0) - p0 * (kf - 1.0)) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = (x * p1 - p0) * n as f64 / (x * x - 1.0);
    (p1, dp)
}

struct Panel<T, V> {
    a: T,
    b: T,
    left: V,
    right: V,
    left_abs: f64,
    right_abs: f64,
    error: f64,
}

/// `∫_a^b f` by globally adaptive bisection with a 20-point Gauss-Legendre
/// rule, starting from `initial_panels` equal panels.
///
/// Each panel carries the rule applied to its two halves; the difference
/// against the rule on the whole panel is its error estimate. The panel with
/// the largest estimate is split until the total meets the tolerance.
pub fn integrate_adaptive<T: Real, V: QuadValue<T>>(
    f: impl Fn(T) -> V,
    a: T,
    b: T,
    initial_panels: usize,
    spec: &QuadSpec,
) -> Result<IntegralResult<V>> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidInterval {
            a: a.to_f64(),
            b: b.to_f64(),
        });
    }
    let rule = T::gauss_legendre();
    let per_rule = POINTS;
    let mut evaluations = 0usize;
    let mut finite = true;
    let mut panels: Vec<Panel<T, V>> = Vec::new();

    let make = |pa: T, pb: T, whole: V, evaluations: &mut usize, finite: &mut bool| {
        let mid = (pa + pb) * 0.5;
        let (left, left_abs, fl) = rule.apply(&f, pa, mid);
        let (right, right_abs, fr) = rule.apply(&f, mid, pb);
        *evaluations += 2 * per_rule;
        *finite &= fl && fr;
        let error = (left + right - whole).norm();
        Panel {
            a: pa,
            b: pb,
            left,
            right,
            left_abs,
            right_abs,
            error,
        }
    };

    let count = initial_panels.max(1);
    let width = (b - a) / count as f64;
    for i in 0..count {
        let pa = a + width * i as f64;
        let pb = if i + 1 == count { b } else { a + width * (i + 1) as f64 };
        let (whole, _, fw) = rule.apply(&f, pa, pb);
        evaluations += per_rule;
        finite &= fw;
        let panel = make(pa, pb, whole, &mut evaluations, &mut finite);
        panels.push(panel);
    }

    let eps = T::EPSILON;
    let max_panels = 1usize << (spec.max_refinements + 4).min(24);
    loop {
        let total = panels
            .iter()
            .fold(V::zero(), |acc, p| acc + p.left + p.right);
        let error: f64 = panels.iter().map(|p| p.error).sum();
        let magnitude: f64 = panels.iter().map(|p| p.left_abs + p.right_abs).sum();
        let noise_limited = error <= 64.0 * eps * magnitude.max(f64::MIN_POSITIVE);
        let converged = finite && error <= spec.target(total.norm());
        if converged
            || noise_limited
            || !finite
            || evaluations >= spec.max_evals
            || panels.len() >= max_panels
        {
            return Ok(IntegralResult {
                value: total,
                error_estimate: error,
                magnitude,
                evaluations,
                converged,
                noise_limited: noise_limited && finite,
                truncation: None,
            });
        }
        // first panel with the largest error, for deterministic ties
        let worst = panels
            .iter()
            .enumerate()
            .fold(0, |best, (i, p)| if p.error > panels[best].error { i } else { best });
        let p = panels.swap_remove(worst);
        let mid = (p.a + p.b) * 0.5;
        let left = make(p.a, mid, p.left, &mut evaluations, &mut finite);
        let right = make(mid, p.b, p.right, &mut evaluations, &mut finite);
        panels.push(left);
        panels.push(right);
        // keep summation order independent of the split history
        panels.sort_by(|x, y| x.a.partial_cmp(&y.a).unwrap_or(std::cmp::Ordering::Equal));
    }
}

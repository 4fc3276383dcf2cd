//! Structural properties of the transforms: linearity, the μ = 0
//! specialisation and its Bessel form.

use std::f64::consts::PI;

use diwt::quad::QuadSpec;
use diwt::specfun::bessel_k_imag;
use diwt::transforms::{
    coefficient_transform, forward_whittaker, invert_theorem1, kl_invert, CoefficientSeq, FunctionHandle, PsiSpec,
    TransformParams,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn seq(values: &[f64]) -> CoefficientSeq {
    CoefficientSeq::from_real(values).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn forward_is_linear(
        a in prop::collection::vec(-1.0f64..1.0, 3),
        b in prop::collection::vec(-1.0f64..1.0, 3),
        alpha in -2.0f64..2.0, beta in -2.0f64..2.0,
        mu in -0.5f64..0.45, x in 0.2f64..6.0,
    ) {
        let (sa, sb) = (seq(&a), seq(&b));
        let combined = sa.scaled(alpha.into()).plus(&sb.scaled(beta.into()));
        let lhs = forward_whittaker(&combined, mu, x).unwrap();
        let fa = forward_whittaker(&sa, mu, x).unwrap();
        let fb = forward_whittaker(&sb, mu, x).unwrap();
        let rhs = fa * alpha + fb * beta;
        let scale = fa.norm() * alpha.abs() + fb.norm() * beta.abs();
        prop_assert!((lhs - rhs).norm() <= 1e-13 * scale.max(1e-300), "{lhs} vs {rhs}");
    }

    #[test]
    fn forward_at_zero_order_is_bessel_series(
        a in prop::collection::vec(-1.0f64..1.0, 1..4),
        x in 0.1f64..8.0,
    ) {
        let f = forward_whittaker(&seq(&a), 0.0, x).unwrap().re;
        let sum: f64 = a
            .iter()
            .enumerate()
            .map(|(i, &am)| am * bessel_k_imag((i + 1) as f64, x / 2.0).unwrap())
            .sum();
        let expected = (-x / 2.0).exp() * (x / PI).sqrt() * sum;
        let scale: f64 = a
            .iter()
            .enumerate()
            .map(|(i, &am)| (am * bessel_k_imag((i + 1) as f64, x / 2.0).unwrap()).abs())
            .sum::<f64>()
            * (-x / 2.0).exp()
            * (x / PI).sqrt();
        prop_assert!((f - expected).abs() <= 1e-10 * scale.max(1e-300), "{f} vs {expected}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn coefficient_transform_is_linear(
        b in prop::collection::vec(-1.0f64..1.0, 2),
        c in prop::collection::vec(-1.0f64..1.0, 2),
        alpha in -2.0f64..2.0, beta in -2.0f64..2.0,
        n in 1u32..4,
    ) {
        let q = QuadSpec::default();
        let mu = 0.1;
        let psi = |s: &[f64]| PsiSpec { sine_coeffs: s.to_vec(), cosine_coeffs: vec![] };
        let mixed: Vec<f64> = b.iter().zip(&c).map(|(x, y)| alpha * x + beta * y).collect();
        let run = |s: &[f64]| {
            coefficient_transform(&FunctionHandle::FromPsi { psi: psi(s), mu }, mu, n, &q).unwrap()
        };
        let (rb, rc, rm) = (run(&b), run(&c), run(&mixed));
        let rhs = rb.value * alpha + rc.value * beta;
        let tol = 10.0 * (rb.error_estimate * alpha.abs() + rc.error_estimate * beta.abs() + rm.error_estimate)
            + 1e-13 * (rb.value.norm() * alpha.abs() + rc.value.norm() * beta.abs());
        prop_assert!((rm.value - rhs).norm() <= tol, "{} vs {rhs}", rm.value);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2))]

    #[test]
    fn inversion_is_linear(
        a in -1.0f64..1.0, b in -1.0f64..1.0,
        alpha in -2.0f64..2.0, beta in -2.0f64..2.0,
    ) {
        let q = QuadSpec::default();
        let mu = 0.2;
        let p = TransformParams::new(mu, 0.0);
        let run = |s: &[f64]| invert_theorem1(&FunctionHandle::forward(s, mu).unwrap(), &p, 1, &q).unwrap();
        let (ra, rb) = (run(&[a, 0.5]), run(&[b, -0.25]));
        let rm = run(&[alpha * a + beta * b, 0.5 * alpha - 0.25 * beta]);
        let rhs = ra.value * alpha + rb.value * beta;
        let tol = 10.0 * (ra.error_bound * alpha.abs() + rb.error_bound * beta.abs() + rm.error_bound);
        prop_assert!((rm.value - rhs).norm() <= tol, "{} vs {rhs}", rm.value);
    }
}

#[test]
fn zero_order_inversions_agree() {
    let q = QuadSpec::default();
    let f = FunctionHandle::forward(&[1.0, -0.5], 0.0).unwrap();
    for n in 1..=2 {
        let general = invert_theorem1(&f, &TransformParams::new(0.0, 0.0), n, &q).unwrap();
        let kl = kl_invert(&f, n, &q).unwrap();
        let diff = (general.value - kl.value).norm();
        assert!(diff <= general.error_bound + kl.error_bound, "n = {n}: {diff:e}");
        let expected = Complex64::new([1.0, -0.5][n as usize - 1], 0.0);
        assert!((kl.value - expected).norm() <= 1e-3f64.max(kl.error_bound));
    }
}

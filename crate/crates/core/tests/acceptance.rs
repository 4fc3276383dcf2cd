//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines always reach the terminal.

use std::time::Instant;

use diwt::oracles::{
    run_suite, SuiteMode, BESSEL_LAPLACE, BOUND_1_8, BOUND_1_9, EQ_1_12, EQ_2_5, EQ_2_9, KL_REDUCTION,
    REMARK_2,
};
use diwt::quad::{integrate_vertical_line, MellinBarnesSpec, QuadSpec};
use diwt::specfun::{log_gamma, whittaker_w_bessel, whittaker_w_mb, WhittakerOrder};
use diwt::transforms::{
    build_f_from_psi, closed_form_sequence, coefficient_transform, fourier_closed_form_coeffs, invert_theorem1,
    synthesize_theorem2, FunctionHandle, PsiSpec, TransformParams,
};
use num_complex::Complex64;
use rayon::prelude::*;

/// Seed of the random bound draws.
const BOUND_SEED: u64 = 20_240_611;

struct Verdict {
    pass: bool,
    detail: String,
}

fn inversion_round_trip() -> Verdict {
    let seq = [1.0, 0.5, -0.25];
    let cases: Vec<(f64, u32)> = [-0.25, 0.0, 0.25]
        .iter()
        .flat_map(|&mu| (1..=3).map(move |n| (mu, n)))
        .collect();
    let results: Vec<_> = cases
        .par_iter()
        .map(|&(mu, n)| {
            let f = FunctionHandle::forward(&seq, mu).unwrap();
            let r = invert_theorem1(&f, &TransformParams::new(mu, 0.0), n, &QuadSpec::default());
            (mu, n, r)
        })
        .collect();
    let mut pass = true;
    let mut worst = 0.0f64;
    let mut notes = Vec::new();
    for (mu, n, r) in results {
        match r {
            Ok(inv) => {
                let err = (inv.value.re - seq[n as usize - 1]).abs() + inv.value.im.abs();
                let tol = 1e-3f64.max(inv.error_bound);
                worst = worst.max(err);
                if !(err <= tol) {
                    pass = false;
                    notes.push(format!("mu={mu} n={n} err={err:.2e} tol={tol:.2e}"));
                }
            }
            Err(e) => {
                pass = false;
                notes.push(format!("mu={mu} n={n}: {e}"));
            }
        }
    }
    Verdict {
        pass,
        detail: format!("9 inversions, worst abs error {worst:.2e} {}", notes.join("; ")),
    }
}

fn fourier_round_trip() -> Verdict {
    let quad = QuadSpec::default();
    let cases: Vec<(u32, f64)> = [1u32, 2].iter().flat_map(|&k| [0.0, 0.25].map(move |mu| (k, mu))).collect();
    let results: Vec<(bool, f64, f64, String)> = cases
        .par_iter()
        .map(|&(k, mu)| {
            let psi = PsiSpec::sine(k, 1.0);
            let f = FunctionHandle::FromPsi { psi: psi.clone(), mu };
            let mut ok = true;
            let mut notes = Vec::new();
            let closed: Vec<f64> = (1..=4).map(|n| fourier_closed_form_coeffs(&psi, mu, n).unwrap()).collect();
            let peak = closed.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let mut worst_coeff = 0.0f64;
            for n in 1..=4u32 {
                let want = closed[n as usize - 1];
                match coefficient_transform(&f, mu, n, &quad) {
                    Ok(r) => {
                        let got = r.value.re;
                        let (err, tol) = if n == k {
                            ((got - want).abs() / want.abs(), 1e-6)
                        } else {
                            ((got - want).abs() / peak, 1e-6)
                        };
                        worst_coeff = worst_coeff.max(err);
                        if !(err <= tol) {
                            ok = false;
                            notes.push(format!("k={k} mu={mu} n={n} coeff err {err:.2e}"));
                        }
                    }
                    Err(e) => {
                        ok = false;
                        notes.push(format!("k={k} mu={mu} n={n}: {e}"));
                    }
                }
            }
            let seq = closed_form_sequence(&psi, mu, k).unwrap();
            let mut worst_value = 0.0f64;
            for x in [0.5, 1.0, 2.0, 5.0, 10.0] {
                let want = build_f_from_psi(&psi, mu, x, &quad);
                let got = synthesize_theorem2(&seq, mu, x, &quad);
                match (want, got) {
                    (Ok(want), Ok(got)) => {
                        let rel = (got.value.re - want).abs() / want.abs();
                        worst_value = worst_value.max(rel);
                        if !(rel <= 1e-4) {
                            ok = false;
                            notes.push(format!("k={k} mu={mu} x={x} synthesis rel {rel:.2e}"));
                        }
                    }
                    (w, g) => {
                        ok = false;
                        notes.push(format!("k={k} mu={mu} x={x}: {:?} {:?}", w.err(), g.err()));
                    }
                }
            }
            (ok, worst_coeff, worst_value, notes.join("; "))
        })
        .collect();
    let pass = results.iter().all(|r| r.0);
    let worst_coeff = results.iter().fold(0.0f64, |m, r| m.max(r.1));
    let worst_value = results.iter().fold(0.0f64, |m, r| m.max(r.2));
    let notes: Vec<&str> = results.iter().map(|r| r.3.as_str()).filter(|s| !s.is_empty()).collect();
    Verdict {
        pass,
        detail: format!(
            "worst coefficient error {worst_coeff:.2e}, worst synthesis rel error {worst_value:.2e} {}",
            notes.join("; ")
        ),
    }
}

fn whittaker_cross_route() -> Verdict {
    let mut points = Vec::new();
    for mu in [-1.0, -0.25, 0.0, 0.25, 0.45] {
        for tau in [0.5, 1.0, 2.0, 4.0] {
            for x in [0.1, 1.0, 5.0, 20.0] {
                points.push((WhittakerOrder::new(mu, tau), x));
            }
        }
    }
    let results: Vec<_> = points
        .par_iter()
        .map(|&(order, x)| {
            let r = whittaker_w_mb(order, x).and_then(|a| whittaker_w_bessel(order, x).map(|b| (a, b)));
            (order, x, r)
        })
        .collect();
    let mut pass = true;
    let mut worst = 0.0f64;
    let mut notes = Vec::new();
    for (order, x, r) in results {
        match r {
            Ok((a, b)) => {
                let rel = (a - b).abs() / a.abs();
                worst = worst.max(rel);
                if !(rel <= 1e-7) {
                    pass = false;
                    notes.push(format!("mu={} tau={} x={x} rel {rel:.2e}", order.mu, order.tau));
                }
            }
            Err(e) => {
                pass = false;
                notes.push(format!("mu={} tau={} x={x}: {e}", order.mu, order.tau));
            }
        }
    }
    Verdict {
        pass,
        detail: format!("{} points, worst rel difference {worst:.2e} {}", points.len(), notes.join("; ")),
    }
}

fn identity_suite() -> Verdict {
    let expected = [
        (EQ_1_12, 9),
        (EQ_2_9, 5),
        (BESSEL_LAPLACE, 6),
        (REMARK_2, 9),
        (KL_REDUCTION, 6),
        (EQ_2_5, 2),
    ];
    let ids: Vec<&str> = expected.iter().map(|e| e.0).collect();
    let reports = run_suite(&ids, SuiteMode::Canonical).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for (id, count) in expected {
        let mine: Vec<_> = reports.iter().filter(|r| r.check_id == id).collect();
        let passed = mine.iter().filter(|r| r.pass).count();
        let worst = mine.iter().fold(0.0f64, |m, r| m.max(r.rel_err.min(r.abs_err)));
        pass &= mine.len() == count && passed == count;
        parts.push(format!("{id} {passed}/{count} (worst {worst:.1e})"));
        for r in mine.iter().filter(|r| !r.pass) {
            parts.push(format!("failed {:?}", r.parameters));
        }
    }
    Verdict {
        pass,
        detail: parts.join(", "),
    }
}

fn bound_suite() -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for id in [BOUND_1_8, BOUND_1_9] {
        let reports = run_suite(&[id], SuiteMode::Random { trials: 100, seed: BOUND_SEED }).unwrap();
        let violations = reports.iter().filter(|r| !r.pass).count();
        pass &= reports.len() == 100 && violations == 0;
        parts.push(format!("{id}: {violations} violations in {} draws", reports.len()));
    }
    Verdict {
        pass,
        detail: parts.join(", "),
    }
}

fn contour_sanity() -> Verdict {
    let mut pass = true;
    let mut worst = 0.0f64;
    let mut notes = Vec::new();
    for x in [0.5f64, 1.0, 2.0] {
        for gamma in [0.5, 1.0, 2.0] {
            let g = |s: Complex64| (log_gamma(s).unwrap() - s * x.ln()).exp();
            let spec = MellinBarnesSpec::new(gamma, QuadSpec::default());
            match integrate_vertical_line(g, &spec) {
                Ok(r) => {
                    let rel = (r.value - (-x).exp()).norm() / (-x).exp();
                    worst = worst.max(rel);
                    if !(rel <= 1e-10) {
                        pass = false;
                        notes.push(format!("x={x} gamma={gamma} rel {rel:.2e}"));
                    }
                }
                Err(e) => {
                    pass = false;
                    notes.push(format!("x={x} gamma={gamma}: {e}"));
                }
            }
        }
    }
    Verdict {
        pass,
        detail: format!("9 contours, worst rel error {worst:.2e} {}", notes.join("; ")),
    }
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 6] = [
        ("1 inversion round trip", inversion_round_trip),
        ("2 coefficient transform and synthesis", fourier_round_trip),
        ("3 Whittaker cross-route agreement", whittaker_cross_route),
        ("4 identity suite", identity_suite),
        ("5 bound suite", bound_suite),
        ("6 contour quadrature", contour_sanity),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let v = run();
        let label = if v.pass { "PASS" } else { "FAIL" };
        println!(
            "{label} criterion {name}: {} [{:.1} s]",
            v.detail.trim_end(),
            start.elapsed().as_secs_f64()
        );
        failed += usize::from(!v.pass);
    }
    println!("criterion 7 (CLI reproducibility and exit codes) runs in the diwt-cli integration tests");
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}

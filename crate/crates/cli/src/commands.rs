//! Command implementations. Each turns a resolved [`JobConfig`] into the
//! bytes of its output document.

use std::path::PathBuf;

use diwt::dd::Dd;
use diwt::kernels::{build_kernel_table, check_index_cap, KernelTableSpec};
use diwt::oracles::{run_suite, SuiteMode, ALL_CHECKS};
use diwt::quad::QuadSpec;
use diwt::real::Real;
use diwt::specfun::{
    abscissa_lower_bound, bessel_k0, bessel_k_imag, erf::erfcx_generic, erfc, incomplete_bessel_j,
    incomplete_bessel_j_by_parts, parabolic_cylinder_d, parabolic_cylinder_d_generic, whittaker_w_bessel,
    whittaker_w_mb, whittaker_w_mb_on_line, WhittakerOrder,
};
use diwt::transforms::{
    build_f_from_psi, closed_form_sequence, coefficient_transform, fourier_closed_form_coeffs, invert_theorem1,
    synthesize_theorem2, CoefficientSeq, FunctionHandle, PsiSpec, SampledFunction, TransformParams,
};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::JobConfig;
use crate::failure::Failure;
use crate::output::{fmt_f64, json_bytes, Csv};
use crate::table;

/// Commands that produce a reproducible output document.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Eval,
    Forward,
    Invert,
    Coeff,
    Synthesize,
    Roundtrip,
    Identity,
    KernelTableBuild,
}

/// The output of a command, possibly partial.
pub struct Outcome {
    pub bytes: Vec<u8>,
    /// Where the output goes when no path is given.
    pub default_path: Option<PathBuf>,
    /// Set when the command produced output but did not fully succeed.
    pub failure: Option<Failure>,
}

impl Outcome {
    fn new(bytes: Vec<u8>, failure: Option<Failure>) -> Self {
        Outcome {
            bytes,
            default_path: None,
            failure,
        }
    }
}

pub fn run(command: Command, config: &JobConfig) -> Result<Outcome, Failure> {
    let quad = config.quad();
    quad.validate().map_err(Failure::from_input)?;
    match command {
        Command::Eval => eval(config),
        Command::Forward => forward(config, &quad),
        Command::Invert => invert(config, &quad),
        Command::Coeff => coeff(config, &quad),
        Command::Synthesize => synthesize(config, &quad),
        Command::Roundtrip => roundtrip(config, &quad),
        Command::Identity => identity(config),
        Command::KernelTableBuild => kernel_table_build(config, &quad),
    }
}

/// A table row: the formatted fields, or the failure message.
type Row = (Vec<String>, Option<String>);

/// Evaluates rows in parallel and assembles them in input order. Failed
/// rows carry NaN values and their message in the status column.
fn tabulate<P: Sync>(
    header: &[&str],
    points: &[P],
    width: usize,
    f: impl Fn(&P) -> Row + Sync + Send,
) -> Outcome {
    let rows: Vec<Row> = points.par_iter().map(f).collect();
    let mut csv = Csv::new(header);
    let mut failed = 0;
    for (mut fields, failure) in rows {
        fields.resize(width, fmt_f64(f64::NAN));
        let status = match failure {
            Some(msg) => {
                failed += 1;
                format!("failed: {msg}")
            }
            None => "ok".into(),
        };
        fields.push(status);
        csv.row(fields);
    }
    let failure = (failed > 0).then(|| Failure::Numerical(format!("{failed} of {} rows failed", points.len())));
    Outcome::new(csv.into_bytes(), failure)
}

fn required(value: Option<f64>, name: &str, function: &str) -> Result<f64, Failure> {
    value.ok_or_else(|| Failure::Usage(format!("{function} needs {name}")))
}

/// Special functions by name. The error estimate is the distance to an
/// independent second evaluation.
fn eval(config: &JobConfig) -> Result<Outcome, Failure> {
    let name = config
        .function
        .as_deref()
        .ok_or_else(|| Failure::Usage("eval needs a function name".into()))?;
    let points = config.require_x_grid()?;
    let mu = config.mu.map(|v| v.0);
    let tau = config.tau.map(|v| v.0);
    let nu = config.nu.map(|v| v.0);
    let estimate = |value: f64, alt: diwt::Result<f64>| alt.map_or(f64::NAN, |a| (value - a).abs());
    let pair = |lead: Vec<f64>, value: diwt::Result<f64>, alt: &dyn Fn(f64) -> diwt::Result<f64>| -> Row {
        let mut fields: Vec<String> = lead.into_iter().map(fmt_f64).collect();
        match value {
            Ok(v) => {
                fields.push(fmt_f64(v));
                fields.push(fmt_f64(estimate(v, alt(v))));
                (fields, None)
            }
            Err(e) => (fields, Some(e.to_string())),
        }
    };
    let outcome = match name {
        "W" => {
            let mu = required(mu, "mu", "W")?;
            let tau = required(tau, "tau", "W")?;
            let order = WhittakerOrder::new(mu, tau);
            tabulate(&["mu", "tau", "x", "value", "error_estimate", "status"], &points, 5, |&x| {
                let alt = |_| {
                    if mu < 0.5 {
                        whittaker_w_bessel(order, x)
                    } else {
                        let gamma = abscissa_lower_bound(mu, Complex64::new(0.0, tau)) + 1.0;
                        whittaker_w_mb_on_line(order, x, gamma)
                    }
                };
                pair(vec![mu, tau, x], whittaker_w_mb(order, x), &alt)
            })
        }
        "K" => {
            let tau = required(tau, "tau", "K")?;
            tabulate(&["tau", "x", "value", "error_estimate", "status"], &points, 4, |&x| {
                let alt = |_| k_from_whittaker(tau, x);
                pair(vec![tau, x], bessel_k_imag(tau, x), &alt)
            })
        }
        "K0" => tabulate(&["x", "value", "error_estimate", "status"], &points, 3, |&x| {
            let alt = |_| k_from_whittaker(0.0, x);
            pair(vec![x], bessel_k0(x), &alt)
        }),
        "D" => {
            let nu = required(nu, "nu", "D")?;
            tabulate(&["nu", "z", "value", "error_estimate", "status"], &points, 4, |&z| {
                let alt = |_| {
                    parabolic_cylinder_d_generic(Dd::from_f64(nu), Dd::from_f64(z), &QuadSpec::extended())
                        .map(Dd::to_f64)
                };
                pair(vec![nu, z], parabolic_cylinder_d(nu, z), &alt)
            })
        }
        "erfc" => tabulate(&["x", "value", "error_estimate", "status"], &points, 3, |&x| {
            let alt = |_| {
                let xd = Dd::from_f64(x);
                Ok((erfcx_generic(xd) * (-(xd * xd)).exp()).to_f64())
            };
            pair(vec![x], Ok(erfc(x)), &alt)
        }),
        "J" => {
            let n = config.n.ok_or_else(|| Failure::Usage("J needs n".into()))?;
            tabulate(&["n", "x", "value", "error_estimate", "status"], &points, 4, |&x| {
                let alt = |_| incomplete_bessel_j_by_parts(x, n);
                pair(vec![f64::from(n), x], incomplete_bessel_j(x, n), &alt)
            })
        }
        other => {
            return Err(Failure::Usage(format!(
                "unknown function {other:?}; expected one of W, K, K0, D, erfc, J"
            )))
        }
    };
    Ok(outcome)
}

/// K_{iτ}(x) = √(π/(2x))·W_{0,iτ}(2x).
fn k_from_whittaker(tau: f64, x: f64) -> diwt::Result<f64> {
    Ok((std::f64::consts::PI / (2.0 * x)).sqrt() * whittaker_w_mb(WhittakerOrder::new(0.0, tau), 2.0 * x)?)
}

fn sequence(config: &JobConfig) -> Result<CoefficientSeq, Failure> {
    let values = config
        .sequence()
        .ok_or_else(|| Failure::Usage("config needs sequence".into()))?;
    CoefficientSeq::from_real(&values).map_err(Failure::from_input)
}

/// The input function: exactly one of sequence, psi or samples.
fn function(config: &JobConfig) -> Result<FunctionHandle, Failure> {
    let mu = config.mu();
    match (&config.sequence, &config.psi, config.samples()) {
        (Some(_), None, None) => Ok(FunctionHandle::Forward {
            seq: sequence(config)?,
            mu,
        }),
        (None, Some(psi), None) => {
            psi.validate().map_err(Failure::from_input)?;
            Ok(FunctionHandle::FromPsi { psi: psi.clone(), mu })
        }
        (None, None, Some((x, f))) => Ok(FunctionHandle::Sampled(
            SampledFunction::new(x, f).map_err(Failure::from_input)?,
        )),
        _ => Err(Failure::Usage(
            "config needs exactly one of sequence, psi or samples".into(),
        )),
    }
}

fn forward(config: &JobConfig, quad: &QuadSpec) -> Result<Outcome, Failure> {
    let f = FunctionHandle::Forward {
        seq: sequence(config)?,
        mu: config.mu(),
    };
    let grid = config.require_x_grid()?;
    Ok(tabulate(&["x", "f", "status"], &grid, 2, |&x| match f.eval(x, quad) {
        Ok(v) => (vec![fmt_f64(x), fmt_f64(v.re)], None),
        Err(e) => (vec![fmt_f64(x)], Some(e.to_string())),
    }))
}

fn transform_params(config: &JobConfig) -> Result<TransformParams, Failure> {
    let params = TransformParams::new(config.mu(), config.delta());
    params.require_inversion().map_err(Failure::from_input)?;
    Ok(params)
}

/// Indices to invert: `n_range`, else every index of the sequence.
fn inversion_indices(config: &JobConfig, quad: &QuadSpec) -> Result<Vec<u32>, Failure> {
    let default_last = config.sequence.as_ref().map_or(0, |s| s.len() as u32);
    let indices = config.indices(default_last)?;
    for &n in &indices {
        check_index_cap(n, quad.precision).map_err(Failure::from_input)?;
    }
    Ok(indices)
}

fn invert(config: &JobConfig, quad: &QuadSpec) -> Result<Outcome, Failure> {
    let params = transform_params(config)?;
    let f = function(config)?;
    let indices = inversion_indices(config, quad)?;
    Ok(tabulate(&["n", "a_n", "error_bound", "status"], &indices, 3, |&n| {
        let lead = fmt_f64(f64::from(n));
        match invert_theorem1(&f, &params, n, quad) {
            Ok(r) => (vec![lead, fmt_f64(r.value.re), fmt_f64(r.error_bound)], None),
            Err(e) => (vec![lead], Some(e.to_string())),
        }
    }))
}

fn coeff(config: &JobConfig, quad: &QuadSpec) -> Result<Outcome, Failure> {
    let f = function(config)?;
    let mu = config.mu();
    let indices = config.indices(4)?;
    Ok(tabulate(&["n", "a_n", "error_estimate", "status"], &indices, 3, |&n| {
        let lead = fmt_f64(f64::from(n));
        match coefficient_transform(&f, mu, n, quad) {
            Ok(r) => (vec![lead, fmt_f64(r.value.re), fmt_f64(r.error_estimate)], None),
            Err(e) => (vec![lead], Some(e.to_string())),
        }
    }))
}

/// The synthesis sequence: `sequence`, else the closed-form coefficients
/// of `psi` up to `terms` (default: its degree).
fn synthesis_sequence(config: &JobConfig, psi: Option<&PsiSpec>) -> Result<CoefficientSeq, Failure> {
    match (config.sequence.is_some(), psi) {
        (true, None) => sequence(config),
        (false, Some(psi)) => {
            psi.validate().map_err(Failure::from_input)?;
            let terms = config.terms.unwrap_or(psi.degree() as u32);
            closed_form_sequence(psi, config.mu(), terms).map_err(Failure::from_input)
        }
        _ => Err(Failure::Usage("config needs exactly one of sequence or psi".into())),
    }
}

fn synthesize(config: &JobConfig, quad: &QuadSpec) -> Result<Outcome, Failure> {
    let seq = synthesis_sequence(config, config.psi.as_ref())?;
    let mu = config.mu();
    TransformParams::new(mu, 0.0).require_inversion().map_err(Failure::from_input)?;
    let grid = config.require_x_grid()?;
    Ok(tabulate(&["x", "f", "terms", "status"], &grid, 3, |&x| {
        match synthesize_theorem2(&seq, mu, x, quad) {
            Ok(s) => (vec![fmt_f64(x), fmt_f64(s.value.re), s.terms.len().to_string()], None),
            Err(e) => (vec![fmt_f64(x)], Some(e.to_string())),
        }
    }))
}

/// One compared quantity of a round trip.
#[derive(Debug, Clone, Serialize)]
struct RoundtripRow {
    /// n for coefficients, x for function values.
    at: f64,
    input: f64,
    output: f64,
    error: f64,
    bound: f64,
    pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    failure: Option<String>,
}

impl RoundtripRow {
    fn new(at: f64, input: f64, result: diwt::Result<(f64, f64)>) -> Self {
        match result {
            Ok((output, bound)) => {
                let error = (output - input).abs();
                RoundtripRow {
                    at,
                    input,
                    output,
                    error,
                    bound,
                    pass: error.is_finite() && error <= bound,
                    failure: None,
                }
            }
            Err(e) => RoundtripRow {
                at,
                input,
                output: f64::NAN,
                error: f64::NAN,
                bound: f64::NAN,
                pass: false,
                failure: Some(e.to_string()),
            },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
struct RoundtripReport {
    theorem: u8,
    mu: f64,
    /// Recovered coefficients, per n.
    coefficients: Vec<RoundtripRow>,
    /// Reconstructed function values, per x.
    values: Vec<RoundtripRow>,
    pass: bool,
}

/// Absolute tolerance of a recovered coefficient, unless its own error
/// bound is larger.
const THEOREM1_TOL: f64 = 1e-3;
/// Relative tolerance of closed-form coefficients.
const COEFF_TOL: f64 = 1e-6;
/// Relative tolerance of synthesized function values.
const SYNTHESIS_TOL: f64 = 1e-4;
const DEFAULT_SYNTHESIS_GRID: [f64; 5] = [0.5, 1.0, 2.0, 5.0, 10.0];

fn roundtrip(config: &JobConfig, quad: &QuadSpec) -> Result<Outcome, Failure> {
    let mu = config.mu();
    let report = match config.theorem.unwrap_or(1) {
        1 => {
            let params = transform_params(config)?;
            let seq = sequence(config)?;
            let f = FunctionHandle::Forward { seq: seq.clone(), mu };
            let indices = inversion_indices(config, quad)?;
            let coefficients = indices
                .par_iter()
                .map(|&n| {
                    let r = invert_theorem1(&f, &params, n, quad)
                        .map(|r| (r.value.re, THEOREM1_TOL.max(r.error_bound)));
                    RoundtripRow::new(f64::from(n), seq.get(n).re, r)
                })
                .collect();
            RoundtripReport {
                theorem: 1,
                mu,
                coefficients,
                values: Vec::new(),
                pass: false,
            }
        }
        2 => {
            TransformParams::new(mu, 0.0).require_inversion().map_err(Failure::from_input)?;
            let psi = config
                .psi
                .clone()
                .ok_or_else(|| Failure::Usage("theorem 2 round trip needs psi".into()))?;
            psi.validate().map_err(Failure::from_input)?;
            let f = FunctionHandle::FromPsi { psi: psi.clone(), mu };
            let last = config.terms.unwrap_or((psi.degree() as u32).max(4));
            let indices = config.indices(last)?;
            let expected: Vec<f64> = indices
                .iter()
                .map(|&n| fourier_closed_form_coeffs(&psi, mu, n))
                .collect::<diwt::Result<_>>()
                .map_err(Failure::from_input)?;
            let peak = expected.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let coefficients = indices
                .par_iter()
                .zip(&expected)
                .map(|(&n, &want)| {
                    let bound = if want != 0.0 { COEFF_TOL * want.abs() } else { COEFF_TOL * peak };
                    let r = coefficient_transform(&f, mu, n, quad).map(|r| (r.value.re, bound));
                    RoundtripRow::new(f64::from(n), want, r)
                })
                .collect();
            let seq = synthesis_sequence(config, Some(&psi))?;
            let grid = config.x_grid().unwrap_or_else(|| DEFAULT_SYNTHESIS_GRID.to_vec());
            let values = grid
                .par_iter()
                .map(|&x| match build_f_from_psi(&psi, mu, x, quad) {
                    Ok(want) => {
                        let r = synthesize_theorem2(&seq, mu, x, quad)
                            .map(|s| (s.value.re, SYNTHESIS_TOL * want.abs()));
                        RoundtripRow::new(x, want, r)
                    }
                    Err(e) => RoundtripRow::new(x, f64::NAN, Err(e)),
                })
                .collect();
            RoundtripReport {
                theorem: 2,
                mu,
                coefficients,
                values,
                pass: false,
            }
        }
        other => return Err(Failure::Usage(format!("theorem must be 1 or 2, got {other}"))),
    };
    let pass = report.coefficients.iter().chain(&report.values).all(|r| r.pass);
    let report = RoundtripReport { pass, ..report };
    let failure = (!pass).then(|| Failure::Numerical("round trip failed".into()));
    Ok(Outcome::new(json_bytes(&report), failure))
}

fn identity(config: &JobConfig) -> Result<Outcome, Failure> {
    let selection: Vec<&str> = config
        .checks
        .as_deref()
        .unwrap_or_default()
        .iter()
        .map(String::as_str)
        .collect();
    let mode = match config.trials {
        Some(trials) => SuiteMode::Random {
            trials,
            seed: config.seed.unwrap_or(0),
        },
        None => SuiteMode::Canonical,
    };
    let reports = run_suite(&selection, mode).map_err(Failure::from_compute)?;
    let failed = reports.iter().filter(|r| !r.pass).count();
    let failure = (failed > 0).then(|| Failure::Numerical(format!("{failed} of {} checks failed", reports.len())));
    Ok(Outcome::new(json_bytes(&reports), failure))
}

/// Expands `--all` into the full list of check ids.
pub fn all_checks() -> Vec<String> {
    ALL_CHECKS.iter().map(|s| s.to_string()).collect()
}

pub fn kernel_spec(config: &JobConfig, quad: &QuadSpec) -> Result<KernelTableSpec, Failure> {
    let k = config
        .kernel
        .as_ref()
        .ok_or_else(|| Failure::Usage("config needs kernel".into()))?;
    let spec = KernelTableSpec {
        kind: k.kind,
        mu: k.mu(),
        indices: k.indices(),
        grid: k.grid(),
        quad: *quad,
    };
    spec.validate().map_err(Failure::from_input)?;
    Ok(spec)
}

fn kernel_table_build(config: &JobConfig, quad: &QuadSpec) -> Result<Outcome, Failure> {
    let spec = kernel_spec(config, quad)?;
    let built = build_kernel_table(&spec).map_err(Failure::from_compute)?;
    let failed = built.failed();
    let failure = (failed > 0).then(|| {
        Failure::Numerical(format!("{failed} of {} kernel values failed", built.entries.len()))
    });
    Ok(Outcome {
        bytes: table::encode(&built),
        default_path: Some(table::cache_path(&spec)),
        failure,
    })
}

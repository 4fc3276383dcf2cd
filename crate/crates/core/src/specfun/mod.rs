//! Special functions: complex log-gamma, erfc, modified Bessel functions of
//! imaginary order, parabolic cylinder functions of negative order,
//! Whittaker W of imaginary second index, and the incomplete Bessel
//! function J(x, in, π).

mod bessel;
pub mod erf;
mod gamma;
mod pcf;
mod whittaker;

pub use bessel::{
    bessel_k, bessel_k0, bessel_k_imag, bessel_k_imag_generic, incomplete_bessel_j,
    incomplete_bessel_j_by_parts, incomplete_bessel_j_generic,
};
pub use erf::{erfc, erfcx};
pub use gamma::{gamma_abs_sq, gamma_real, ln_gamma_real, log_gamma, log_gamma_generic};
pub use pcf::{laplace_moment, laplace_moment_shifted, parabolic_cylinder_d, parabolic_cylinder_d_generic};
pub use whittaker::{
    abscissa_lower_bound, saddle_abscissa, scaled_whittaker_w, scaled_whittaker_w_on_line,
    whittaker_w_bessel, whittaker_w_mb, whittaker_w_mb_on_line, ComplexIndex, WhittakerOrder,
};

//! Discrete index Whittaker transforms.
//!
//! The forward series f(x) = e^{−x/2} Σ a_n W_{μ,in}(x) and its inversion,
//! the coefficient transform a_n = ∫ e^{−x/2} W_{μ,in/2}(x) f(x) x^{μ−2} dx
//! and its synthesis, the kernels they need, the special functions behind
//! those kernels, and an audit suite of closed-form identities.

pub mod dd;
pub mod error;
pub mod kernels;
pub mod oracles;
pub mod quad;
pub mod real;
pub mod specfun;
pub mod transforms;

pub use error::{Error, Result};

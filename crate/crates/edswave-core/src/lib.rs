//! Numerical machinery for the semilinear damped wave equation
//!
//! ```text
//! u_tt - t^{-2k} Δu + (μ/t) u_t = |u_t|^p,   x ∈ R^N, t ≥ 1,
//! u(x,1) = ε f(x),  u_t(x,1) = ε g(x),
//! ```
//!
//! with time-dependent propagation speed `t^{-k}` (k ∈ [0,1)) and
//! scale-invariant damping of strength μ ≥ 0. The crate provides
//!
//! * [`special`] — the multiplier functions K_ν, ρ(t), φ(x), ψ(x,t) and the
//!   cone radius φ_k(t), with log-scale evaluation paths for large arguments;
//! * [`exponents`] — every critical-exponent and lifespan formula for this
//!   equation family, plus the relations among them;
//! * [`solver`] — an explicit finite-difference Cauchy solver (1D and radial)
//!   with blow-up detection and the φ_k rescaling-equivalence check;
//! * [`functionals`] — the weighted averages 𝒰(t), 𝒱(t), the data constant
//!   C(f,g), weak-form residuals and the functional lower-bound checks;
//! * [`certificate`] — the constructive blow-up certificate: the constants
//!   α, T₀, T₁, T̃₂, T̃₃, C₂, the auxiliary functional H(t), and the Kato-type
//!   ODE whose finite-time blow-up drives the lifespan bounds.
//!
//! The crate is `no_std`-compatible (`default-features = false,
//! features = ["libm"]`); heap allocation is required.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("edswave-core needs either the `std` or the `libm` feature for float math");

extern crate alloc;

use alloc::string::String;
use core::fmt;

pub mod certificate;
pub mod exponents;
pub mod functionals;
mod math;
pub mod model;
mod quad;
pub mod solver;
pub mod special;

/// Errors shared by all modules of the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    Domain(String),
    /// A quadrature or root search stopped before reaching the requested
    /// accuracy; `estimate` is the best value obtained.
    Accuracy {
        estimate: f64,
        requested_rel_tol: f64,
        achieved_rel_err: f64,
    },
    /// A parameter search (T₀, T̃₂, T̃₃, ...) exhausted its range.
    Search(String),
    /// Inconsistent model / grid configuration.
    Config(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Accuracy {
                estimate,
                requested_rel_tol,
                achieved_rel_err,
            } => write!(
                f,
                "accuracy error: best estimate {estimate:e} reached relative error \
                 {achieved_rel_err:e} (requested {requested_rel_tol:e})"
            ),
            Error::Search(msg) => write!(f, "search error: {msg}"),
            Error::Config(msg) => write!(f, "configuration error: {msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;

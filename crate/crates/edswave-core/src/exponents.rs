//! Critical exponents and lifespan formulas for the damped wave equation
//! with speed t^{-k} and damping μ/t.
//!
//! All thresholds are upper bounds for the blow-up range; no optimality is
//! claimed. Degenerate denominators yield [`Exponent::Unbounded`] rather than
//! a floating-point infinity so callers must branch explicitly.

use crate::{Error, Result};
use alloc::format;
use core::fmt;

/// A critical power; `Unbounded` marks a degenerate (zero) denominator,
/// e.g. the Glassey exponent at N = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Exponent {
    Finite(f64),
    Unbounded,
}

impl Exponent {
    pub fn finite(self) -> Option<f64> {
        match self {
            Exponent::Finite(v) => Some(v),
            Exponent::Unbounded => None,
        }
    }

    /// Value with `Unbounded` mapped to +∞, for ordering comparisons only.
    pub fn as_f64(self) -> f64 {
        match self {
            Exponent::Finite(v) => v,
            Exponent::Unbounded => f64::INFINITY,
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(v) => write!(f, "{v}"),
            Exponent::Unbounded => write!(f, "inf"),
        }
    }
}

/// Parameters every exponent formula depends on.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExponentQuery {
    n: u32,
    k: f64,
    mu: f64,
}

impl ExponentQuery {
    pub fn new(n: u32, k: f64, mu: f64) -> Result<Self> {
        if n < 1 {
            return Err(Error::Domain("dimension N must be >= 1".into()));
        }
        if !(0.0..1.0).contains(&k) {
            return Err(Error::Domain(format!("k must lie in [0,1), got {k}")));
        }
        if !mu.is_finite() || mu < 0.0 {
            return Err(Error::Domain(format!("mu must be finite and >= 0, got {mu}")));
        }
        Ok(Self { n, k, mu })
    }

    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn k(&self) -> f64 {
        self.k
    }
    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Effective dimension N + μ/(1-k): the shift the damping produces.
    pub fn shifted_dimension(&self) -> f64 {
        self.n as f64 + self.mu / (1.0 - self.k)
    }
}

fn reciprocal_threshold(denominator: f64) -> Exponent {
    if denominator.abs() < 1e-300 {
        Exponent::Unbounded
    } else {
        Exponent::Finite(1.0 + 2.0 / denominator)
    }
}

/// Glassey exponent p_G(N) = 1 + 2/(N-1); unbounded at N = 1.
pub fn glassey(n: u32) -> Result<Exponent> {
    if n < 1 {
        return Err(Error::Domain("dimension N must be >= 1".into()));
    }
    Ok(reciprocal_threshold(n as f64 - 1.0))
}

/// Tricomi-type exponent p_T(N,k) = 1 + 2/((1-k)(N-1)+k); the μ = 0 case.
pub fn p_tricomi(q: &ExponentQuery) -> Exponent {
    reciprocal_threshold((1.0 - q.k) * (q.n as f64 - 1.0) + q.k)
}

/// Blow-up threshold p_E(N,k,μ) = 1 + 2/((1-k)(N-1)+k+μ) at real dimension.
///
/// Real `n` supports the dimensional-shift identity
/// p_E(N,k,μ) = p_E(N+μ/(1-k),k,0).
pub fn p_eds_real(n: f64, k: f64, mu: f64) -> Exponent {
    reciprocal_threshold((1.0 - k) * (n - 1.0) + k + mu)
}

/// Blow-up threshold p_E(N,k,μ); reduces to p_T at μ = 0 and p_G at k = μ = 0.
pub fn p_eds(q: &ExponentQuery) -> Exponent {
    p_eds_real(q.n as f64, q.k, q.mu)
}

/// Positive root of ((1-k)n - 1) q² - ((1-k)n + 1 + 2k) q - 2(1-k) = 0.
///
/// `n` is a real (possibly shifted) dimension. When the leading coefficient
/// vanishes the equation is solved as linear. Errors when no positive root
/// exists, reporting both roots.
pub fn q0(n: f64, k: f64) -> Result<f64> {
    if !(k < 1.0) {
        return Err(Error::Domain(format!("k must be < 1, got {k}")));
    }
    if !(n > 0.0) {
        return Err(Error::Domain(format!("dimension must be positive, got {n}")));
    }
    let a = (1.0 - k) * n - 1.0;
    let b = -((1.0 - k) * n + 1.0 + 2.0 * k);
    let c = -2.0 * (1.0 - k);
    if a.abs() < 1e-14 {
        // Linear: b q + c = 0; b < 0 and c < 0, so q = -c/b < 0. Kept as a
        // documented degenerate answer rather than an error.
        let root = -c / b;
        if root > 0.0 {
            return Ok(root);
        }
        return Err(Error::Domain(format!(
            "degenerate quadratic has no positive root (linear root {root})"
        )));
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Err(Error::Domain("quadratic has no real roots".into()));
    }
    let sq = crate::math::sqrt(disc);
    // Stable quadratic formula.
    let q1 = (-b + sq) / (2.0 * a);
    let q2 = (2.0 * c) / (-b + sq);
    let hi = f64::max(q1, q2);
    if hi > 0.0 {
        Ok(hi)
    } else {
        Err(Error::Domain(format!(
            "no positive root: roots are {q1} and {q2}"
        )))
    }
}

/// q₁(N,k) = 1 + 2/(N(1-k)); the Fujita-type companion exponent.
pub fn q1(q: &ExponentQuery) -> f64 {
    1.0 + 2.0 / (q.n as f64 * (1.0 - q.k))
}

/// Improved small-p bound 1 + 1/((1-k)n + μ), valid only in the window
/// (n+1)/(n+2) < k < 1 and 0 ≤ μ < (n+2)k - (n+1); `None` outside it.
pub fn tsutaya_bound(n: f64, k: f64, mu: f64) -> Option<f64> {
    if !(n > 0.0) || !(k < 1.0) || mu < 0.0 {
        return None;
    }
    let window = k > (n + 1.0) / (n + 2.0) && mu < (n + 2.0) * k - (n + 1.0);
    if window {
        Some(1.0 + 1.0 / ((1.0 - k) * n + mu))
    } else {
        None
    }
}

/// Tolerance for p = p_E equality; p is user input, the trichotomy is total.
pub const CRITICAL_EQ_TOL: f64 = 1e-12;

/// Lifespan upper-bound shape from the main blow-up theorem.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum LifespanBound {
    /// T_ε ≤ C ε^{eps_exponent} with eps_exponent = -2(p-1)/(2-D(p-1)) < 0,
    /// where D = (1-k)(N-1)+k+μ.
    Subcritical { eps_exponent: f64 },
    /// T_ε ≤ exp(C ε^{eps_exponent}) with eps_exponent = -(p-1).
    Critical { eps_exponent: f64 },
    /// p above the threshold: no bound is claimed by the theory.
    Supercritical,
}

impl LifespanBound {
    pub fn regime(&self) -> &'static str {
        match self {
            LifespanBound::Subcritical { .. } => "subcritical",
            LifespanBound::Critical { .. } => "critical",
            LifespanBound::Supercritical => "supercritical",
        }
    }

    pub fn form(&self) -> &'static str {
        match self {
            LifespanBound::Subcritical { .. } => "power",
            LifespanBound::Critical { .. } => "exponential",
            LifespanBound::Supercritical => "none",
        }
    }

    /// Power of ε (inside the exponential in the critical case).
    pub fn eps_exponent(&self) -> Option<f64> {
        match self {
            LifespanBound::Subcritical { eps_exponent }
            | LifespanBound::Critical { eps_exponent } => Some(*eps_exponent),
            LifespanBound::Supercritical => None,
        }
    }
}

/// Time-weight exponent a = ((N-1)(1-k)+k+μ)(p-1)/2 of the Kato inequality
/// H' ≥ C H^p t^{-a}; a < 1 subcritical, a = 1 critical.
pub fn kato_time_exponent(q: &ExponentQuery, p: f64) -> f64 {
    ((q.n as f64 - 1.0) * (1.0 - q.k) + q.k + q.mu) * (p - 1.0) / 2.0
}

/// Classify p against p_E and produce the lifespan bound of the theorem.
pub fn lifespan_bound(q: &ExponentQuery, p: f64) -> Result<LifespanBound> {
    if !(p > 1.0) {
        return Err(Error::Domain(format!("p must be > 1, got {p}")));
    }
    let threshold = p_eds(q);
    match threshold {
        Exponent::Finite(pe) if (p - pe).abs() <= CRITICAL_EQ_TOL => Ok(LifespanBound::Critical {
            eps_exponent: -(p - 1.0),
        }),
        Exponent::Finite(pe) if p > pe => Ok(LifespanBound::Supercritical),
        _ => {
            let d = (1.0 - q.k) * (q.n as f64 - 1.0) + q.k + q.mu;
            let denom = 2.0 - d * (p - 1.0);
            Ok(LifespanBound::Subcritical {
                eps_exponent: -2.0 * (p - 1.0) / denom,
            })
        }
    }
}

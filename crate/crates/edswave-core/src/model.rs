//! Problem instances: data profiles, model parameters, spatial grid and
//! stopping policy shared by the solver, the functionals and the certificate.

use crate::exponents::ExponentQuery;
use crate::special::SpacetimeParams;
use crate::{Error, Result};
use alloc::format;
use alloc::string::String;

/// Named nonnegative radial data profile supported in |x| ≤ R.
///
/// `Bump { power: q }` is (1 - |x|²/R²)^q inside the support; q = 3 (the
/// default) is a C² cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Profile {
    Zero,
    Bump { power: u32 },
}

impl Profile {
    pub const DEFAULT_BUMP: Profile = Profile::Bump { power: 3 };

    /// Profile value at radius r (unscaled by ε).
    pub fn eval(&self, r: f64, support_radius: f64) -> f64 {
        match self {
            Profile::Zero => 0.0,
            Profile::Bump { power } => {
                let s = r / support_radius;
                let base = 1.0 - s * s;
                if base <= 0.0 {
                    0.0
                } else {
                    crate::math::powi(base, *power as i32)
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Profile::Zero)
    }

    /// Parse "zero" or "bumpQ" (Q ≥ 2 keeps the data C¹).
    pub fn parse(name: &str) -> Result<Self> {
        if name == "zero" {
            return Ok(Profile::Zero);
        }
        if let Some(rest) = name.strip_prefix("bump") {
            if let Ok(power) = rest.parse::<u32>() {
                if (2..=12).contains(&power) {
                    return Ok(Profile::Bump { power });
                }
            }
        }
        Err(Error::Config(format!(
            "unknown profile {name:?}; expected \"zero\" or \"bumpQ\" with Q in 2..=12"
        )))
    }

    pub fn name(&self) -> String {
        match self {
            Profile::Zero => "zero".into(),
            Profile::Bump { power } => format!("bump{power}"),
        }
    }
}

/// A full Cauchy problem instance for
/// u_tt - t^{-2k} Δu + (μ/t) u_t = |u_t|^p with data (ε f, ε g) at t = 1.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ModelParams {
    pub n: u32,
    pub k: f64,
    pub mu: f64,
    pub p: f64,
    pub eps: f64,
    pub support_radius: f64,
    pub f_profile: Profile,
    pub g_profile: Profile,
    pub nonlinearity_on: bool,
}

impl ModelParams {
    pub fn new(n: u32, k: f64, mu: f64, p: f64, eps: f64, support_radius: f64) -> Result<Self> {
        if n < 1 {
            return Err(Error::Config("dimension N must be >= 1".into()));
        }
        if !k.is_finite() || k >= 1.0 {
            return Err(Error::Config(format!("k must lie below 1, got {k}")));
        }
        if !mu.is_finite() || mu < 0.0 {
            return Err(Error::Config(format!("mu must be >= 0, got {mu}")));
        }
        if !(p > 1.0) {
            return Err(Error::Config(format!("p must be > 1, got {p}")));
        }
        if !(eps >= 0.0) || !eps.is_finite() {
            return Err(Error::Config(format!("eps must be >= 0, got {eps}")));
        }
        if !(support_radius > 0.0) {
            return Err(Error::Config(format!("R must be > 0, got {support_radius}")));
        }
        Ok(Self {
            n,
            k,
            mu,
            p,
            eps,
            support_radius,
            f_profile: Profile::DEFAULT_BUMP,
            g_profile: Profile::DEFAULT_BUMP,
            nonlinearity_on: true,
        })
    }

    pub fn with_profiles(mut self, f: Profile, g: Profile) -> Self {
        self.f_profile = f;
        self.g_profile = g;
        self
    }

    pub fn with_nonlinearity(mut self, on: bool) -> Self {
        self.nonlinearity_on = on;
        self
    }

    pub fn spacetime(&self) -> SpacetimeParams {
        SpacetimeParams::new(self.k, self.mu).expect("ModelParams validated k and mu")
    }

    /// Query for the exponent formulas; k < 0 configurations have none.
    pub fn exponent_query(&self) -> Result<ExponentQuery> {
        ExponentQuery::new(self.n, self.k, self.mu)
    }

    pub fn f_at(&self, r: f64) -> f64 {
        self.f_profile.eval(r, self.support_radius)
    }

    pub fn g_at(&self, r: f64) -> f64 {
        self.g_profile.eval(r, self.support_radius)
    }

    /// Compact identifier used to tag series and run records.
    pub fn ident(&self) -> String {
        format!(
            "N{}_k{}_mu{}_p{}_eps{}_R{}_{}_{}_{}",
            self.n,
            self.k,
            self.mu,
            self.p,
            self.eps,
            self.support_radius,
            self.f_profile.name(),
            self.g_profile.name(),
            if self.nonlinearity_on { "nl" } else { "lin" }
        )
    }
}

/// Boundary handling; the domain is always truncated far enough that the
/// support cone never reaches it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Boundary {
    TruncatedWithMargin,
}

/// Uniform spatial grid. 1D solves use the symmetric interval
/// [-r_max, r_max]; radial solves (N ≥ 2) use [0, r_max].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Grid {
    pub r_max: f64,
    pub dx: f64,
    pub boundary: Boundary,
    pub cfl_safety: f64,
}

impl Grid {
    pub fn new(r_max: f64, dx: f64, cfl_safety: f64) -> Result<Self> {
        if !(dx > 0.0) {
            return Err(Error::Config(format!("dx must be > 0, got {dx}")));
        }
        if !(r_max > dx) {
            return Err(Error::Config(format!(
                "r_max must exceed dx, got r_max={r_max}, dx={dx}"
            )));
        }
        if !(cfl_safety > 0.0 && cfl_safety < 1.0) {
            return Err(Error::Config(format!(
                "cfl_safety must lie in (0,1), got {cfl_safety}"
            )));
        }
        Ok(Self {
            r_max,
            dx,
            boundary: Boundary::TruncatedWithMargin,
            cfl_safety,
        })
    }

    /// Grid sized so the support cone |x| ≤ φ_k(t) + R stays clear of the
    /// boundary up to `t_max`, with the default dx = R/64 and CFL 0.4.
    pub fn for_horizon(mp: &ModelParams, t_max: f64) -> Result<Self> {
        Self::for_horizon_with(mp, t_max, mp.support_radius / 64.0, 0.4)
    }

    pub fn for_horizon_with(mp: &ModelParams, t_max: f64, dx: f64, cfl_safety: f64) -> Result<Self> {
        if !(t_max >= 1.0) {
            return Err(Error::Config(format!("t_max must be >= 1, got {t_max}")));
        }
        let cone = crate::special::phi_k(t_max, &mp.spacetime())? + mp.support_radius;
        let margin = f64::max(1.0, 32.0 * dx);
        Self::new(cone + margin, dx, cfl_safety)
    }

    /// Number of nodes across the data support radius.
    pub fn nodes_per_support(&self, mp: &ModelParams) -> usize {
        (mp.support_radius / self.dx) as usize
    }
}

/// When a run stops: horizon, blow-up detection thresholds, sampling cadence.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StoppingPolicy {
    /// Survive horizon: report `Survived` at t ≥ t_max.
    pub t_max: f64,
    /// Blow-up requires max|u_t| ≥ blowup_factor · (initial max|u_t| + 1) ...
    pub blowup_factor: f64,
    /// ... together with the stable step dropping below dt_min.
    pub dt_min: f64,
    /// Spacing of recorded functional samples.
    pub sample_interval: f64,
}

impl StoppingPolicy {
    pub fn new(t_max: f64, sample_interval: f64) -> Result<Self> {
        if !(t_max > 1.0) {
            return Err(Error::Config(format!("t_max must be > 1, got {t_max}")));
        }
        if !(sample_interval > 0.0) {
            return Err(Error::Config(format!(
                "sample_interval must be > 0, got {sample_interval}"
            )));
        }
        Ok(Self {
            t_max,
            blowup_factor: 1e8,
            dt_min: 1e-12,
            sample_interval,
        })
    }
}

impl Default for StoppingPolicy {
    fn default() -> Self {
        Self {
            t_max: 50.0,
            blowup_factor: 1e8,
            dt_min: 1e-12,
            sample_interval: 0.1,
        }
    }
}

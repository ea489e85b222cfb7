//! Test-function functionals along numerical solutions.
//!
//! With ψ(x,t) = φ(x)ρ(t) the positive adjoint multiplier, the run is
//! summarized by
//!
//! ```text
//! 𝒰(t) = ∫ u(x,t) ψ(x,t) dx,     𝒱(t) = ∫ u_t(x,t) ψ(x,t) dx,
//! ```
//!
//! the data constant C(f,g), the residual of the weak (energy) formulation,
//! and the constructive lower bounds 𝒰(t) ≥ C_𝒰 ε t^k (t ≥ T₀) and
//! 𝒱(t) ≥ C_𝒱 ε (t ≥ T₁ = 2T₀).
//!
//! Spatial quadrature is the trapezoid rule on the solver grid, matching the
//! scheme's order; ψ is evaluated through its logarithm so the deep-tail
//! regime φ_k(t) > 700 cannot underflow the weighted sums.

use crate::math::{abs, exp, ln, powf};
use crate::model::{Grid, ModelParams};
use crate::quad;
use crate::solver::{FieldState, Mesh, Solver};
use crate::special::{
    self, ln_bessel_k_scaled, ln_phi_spatial, phi_spatial_dr_scaled, phi_spatial_scaled,
    EvalControls, SpacetimeParams,
};
use crate::{Error, Result};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

/// Relative slack granted to the continuum lemma bounds when they are
/// checked against discretized runs; fixed by the measured discretization
/// error of the coarsest accepted grid.
pub const LEMMA_SLACK: f64 = 0.05;

/// One recorded time level.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FunctionalSample {
    pub t: f64,
    /// 𝒰(t) = ∫ u ψ dx.
    pub u_psi: f64,
    /// 𝒱(t) = ∫ u_t ψ dx (u_t collocated at t).
    pub ut_psi: f64,
    /// Signed defect of the weak formulation, relative to its largest term.
    pub weak_residual: f64,
    /// ∫₁ᵗ ∫ |u_t|^p ψ dx ds, the nonlinear history integral.
    pub nonlin_cum: f64,
    pub max_abs_u: f64,
    pub max_abs_ut: f64,
}

/// Time-ordered functional record of one run.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FunctionalSeries {
    pub samples: Vec<FunctionalSample>,
    /// Identifier of the generating problem instance.
    pub params_ref: String,
}

impl FunctionalSeries {
    /// Linear interpolation of the nonlinear history integral.
    pub fn nonlin_cum_at(&self, t: f64) -> Option<f64> {
        let s = &self.samples;
        if s.is_empty() || t < s[0].t || t > s[s.len() - 1].t {
            return None;
        }
        let idx = s.partition_point(|smp| smp.t < t);
        if idx == 0 {
            return Some(s[0].nonlin_cum);
        }
        if idx >= s.len() {
            return Some(s[s.len() - 1].nonlin_cum);
        }
        let (a, b) = (&s[idx - 1], &s[idx]);
        if b.t == a.t {
            return Some(b.nonlin_cum);
        }
        let w = (t - a.t) / (b.t - a.t);
        Some(a.nonlin_cum + w * (b.nonlin_cum - a.nonlin_cum))
    }

    /// Weak-form residual at time t (interpolated between samples).
    pub fn weak_residual_at(&self, t: f64) -> Option<f64> {
        let s = &self.samples;
        if s.is_empty() || t < s[0].t || t > s[s.len() - 1].t {
            return None;
        }
        let idx = s.partition_point(|smp| smp.t < t);
        if idx == 0 {
            return Some(s[0].weak_residual);
        }
        if idx >= s.len() {
            return Some(s[s.len() - 1].weak_residual);
        }
        let (a, b) = (&s[idx - 1], &s[idx]);
        if b.t == a.t {
            return Some(b.weak_residual);
        }
        let w = (t - a.t) / (b.t - a.t);
        Some(a.weak_residual + w * (b.weak_residual - a.weak_residual))
    }
}

/// sign(s) · exp(m + ln|s|): the product s·e^m computed so that neither the
/// exponential nor the sum can spuriously under/overflow.
fn scaled_mul(m: f64, s: f64) -> f64 {
    if s == 0.0 {
        return 0.0;
    }
    let v = exp(m + ln(abs(s)));
    if s < 0.0 {
        -v
    } else {
        v
    }
}

/// ln ρ(t) and ρ'(t)/ρ(t) from one pair of Bessel evaluations.
#[derive(Debug, Clone, Copy)]
pub(crate) struct RhoCache {
    pub ln_rho: f64,
    pub log_deriv: f64,
}

/// ψ-weighted quadrature bound to one problem instance and grid.
pub struct FunctionalEvaluator {
    st: SpacetimeParams,
    k: f64,
    mu: f64,
    p: f64,
    nonlin: bool,
    xs: Vec<f64>,
    /// Geometric trapezoid weight per node (includes sphere area and dx).
    w: Vec<f64>,
    /// φ(|x_i|) when the direct path is safe (grid edge below ~500).
    phi: Vec<f64>,
    /// signed dφ/dx at x_i (radial derivative for N ≥ 2).
    dphi: Vec<f64>,
    /// ln φ(|x_i|) and (ln|φ'|, sign) for the deep-grid log path.
    ln_phi: Vec<f64>,
    ln_dphi_abs: Vec<f64>,
    dphi_sign: Vec<f64>,
    log_path: bool,
    dx: f64,
    ctl: EvalControls,
}

impl FunctionalEvaluator {
    pub fn new(mp: &ModelParams, grid: &Grid) -> Result<Self> {
        let mesh = Mesh::build(mp.n, grid);
        Self::from_mesh(mp, &mesh)
    }

    pub(crate) fn for_solver(solver: &Solver) -> Result<Self> {
        Self::from_mesh(solver.params(), solver.mesh())
    }

    fn from_mesh(mp: &ModelParams, mesh: &Mesh) -> Result<Self> {
        let ctl = EvalControls::default();
        let st = mp.spacetime();
        let m = mesh.len();
        let mut w = vec![0.0; m];
        let area = special::unit_sphere_area(mp.n.saturating_sub(1));
        for (j, &x) in mesh.xs.iter().enumerate() {
            let end = j == 0 || j == m - 1;
            let trap = if end { 0.5 } else { 1.0 };
            w[j] = if mp.n == 1 {
                trap * mesh.dx
            } else {
                trap * area * crate::math::powi(x, (mp.n - 1) as i32) * mesh.dx
            };
        }
        let log_path = mesh.r_edge() > 500.0;
        let mut phi = vec![0.0; m];
        let mut dphi = vec![0.0; m];
        let mut ln_phi = vec![0.0; m];
        let mut ln_dphi_abs = vec![0.0; m];
        let mut dphi_sign = vec![0.0; m];
        for (j, &x) in mesh.xs.iter().enumerate() {
            let r = abs(x);
            let scaled = phi_spatial_scaled(r, mp.n, &ctl)?;
            let dscaled = phi_spatial_dr_scaled(r, mp.n, &ctl)?;
            let sign = if x < 0.0 { -1.0 } else { 1.0 };
            ln_phi[j] = r + ln(scaled);
            if dscaled > 0.0 {
                ln_dphi_abs[j] = r + ln(dscaled);
                dphi_sign[j] = sign;
            } else {
                ln_dphi_abs[j] = f64::NEG_INFINITY;
                dphi_sign[j] = 0.0;
            }
            if !log_path {
                phi[j] = exp(ln_phi[j]);
                dphi[j] = sign * exp(r) * dscaled;
            }
        }
        Ok(Self {
            st,
            k: mp.k,
            mu: mp.mu,
            p: mp.p,
            nonlin: mp.nonlinearity_on,
            xs: mesh.xs.clone(),
            w,
            phi,
            dphi,
            ln_phi,
            ln_dphi_abs,
            dphi_sign,
            log_path,
            dx: mesh.dx,
            ctl,
        })
    }

    pub(crate) fn rho_cache(&self, t: f64) -> Result<RhoCache> {
        let z = special::phi_k(t, &self.st)?;
        let nu = self.st.bessel_order();
        let ln_k0 = ln_bessel_k_scaled(nu, z, &self.ctl)?;
        let ln_k1 = ln_bessel_k_scaled(
            special::BesselOrder::new(nu.nu() + 1.0)?,
            z,
            &self.ctl,
        )?;
        Ok(RhoCache {
            ln_rho: 0.5 * (1.0 + self.mu) * ln(t) + ln_k0 - z,
            log_deriv: self.mu / t - powf(t, -self.k) * exp(ln_k1 - ln_k0),
        })
    }

    /// ∫ vals · ψ(·, t) dx for node values `vals`.
    pub(crate) fn integral_vals_psi(&self, rho: &RhoCache, vals: &[f64]) -> f64 {
        if self.log_path {
            let mut acc = 0.0;
            for j in 0..vals.len() {
                if vals[j] != 0.0 {
                    acc += self.w[j] * vals[j] * exp(f64::min(self.ln_phi[j] + rho.ln_rho, 700.0));
                }
            }
            acc
        } else {
            let mut s = 0.0;
            for j in 0..vals.len() {
                s += self.w[j] * vals[j] * self.phi[j];
            }
            scaled_mul(rho.ln_rho, s)
        }
    }

    /// ∫ grad · ∂_r ψ(·, t) dx for a node field `grad` (the radial/1D
    /// derivative of u).
    pub(crate) fn integral_grad_psi(&self, rho: &RhoCache, grad: &[f64]) -> f64 {
        if self.log_path {
            let mut acc = 0.0;
            for j in 0..grad.len() {
                if grad[j] != 0.0 && self.dphi_sign[j] != 0.0 {
                    acc += self.w[j]
                        * grad[j]
                        * self.dphi_sign[j]
                        * exp(f64::min(self.ln_dphi_abs[j] + rho.ln_rho, 700.0));
                }
            }
            acc
        } else {
            let mut s = 0.0;
            for j in 0..grad.len() {
                s += self.w[j] * grad[j] * self.dphi[j];
            }
            scaled_mul(rho.ln_rho, s)
        }
    }

    /// ∫ |v|^p ψ(·, t) dx ≥ 0.
    pub(crate) fn integral_pow_psi(&self, rho: &RhoCache, v: &[f64]) -> f64 {
        if self.log_path {
            let mut acc = 0.0;
            for j in 0..v.len() {
                if v[j] != 0.0 {
                    acc += self.w[j]
                        * powf(abs(v[j]), self.p)
                        * exp(f64::min(self.ln_phi[j] + rho.ln_rho, 700.0));
                }
            }
            acc
        } else {
            let mut s = 0.0;
            for j in 0..v.len() {
                if v[j] != 0.0 {
                    s += self.w[j] * powf(abs(v[j]), self.p) * self.phi[j];
                }
            }
            scaled_mul(rho.ln_rho, s)
        }
    }

    /// 𝒰(t) for a state whose u is collocated at `state.t`.
    pub fn compute_u(&self, state: &FieldState) -> Result<f64> {
        let rho = self.rho_cache(state.t)?;
        Ok(self.integral_vals_psi(&rho, &state.u))
    }

    /// 𝒱(t), treating `state.v` as collocated at `state.t` (exact at the
    /// initial time; during a run the solver passes collocated values).
    pub fn compute_v(&self, state: &FieldState) -> Result<f64> {
        let rho = self.rho_cache(state.t)?;
        Ok(self.integral_vals_psi(&rho, &state.v))
    }

    fn centered_gradient(&self, u: &[f64], out: &mut [f64]) {
        let m = u.len();
        out[0] = 0.0;
        out[m - 1] = 0.0;
        for j in 1..m - 1 {
            out[j] = (u[j + 1] - u[j - 1]) / (2.0 * self.dx);
        }
    }
}

/// 𝒰(t) by a one-off evaluator; build a [`FunctionalEvaluator`] to amortize.
pub fn compute_u(state: &FieldState, mp: &ModelParams, grid: &Grid) -> Result<f64> {
    FunctionalEvaluator::new(mp, grid)?.compute_u(state)
}

/// 𝒱(t) by a one-off evaluator (v taken as collocated).
pub fn compute_v(state: &FieldState, mp: &ModelParams, grid: &Grid) -> Result<f64> {
    FunctionalEvaluator::new(mp, grid)?.compute_v(state)
}

// ---------------------------------------------------------------------------
// Online accumulation during a run
// ---------------------------------------------------------------------------

/// Accumulates the weak-form time integrals with the trapezoid rule at every
/// step and emits [`FunctionalSample`] rows at the sampling cadence.
pub(crate) struct RunAccumulator {
    ev: FunctionalEvaluator,
    prev_t: Option<f64>,
    /// Integrands at the previous level: [∫u_tψ_t, s^{-2k}∫∇u∇ψ, (μ/s)∫u_tψ, ∫|u_t|^pψ].
    prev_g: [f64; 4],
    /// Running integrals I1..I4 of those integrands from t0.
    cum: [f64; 4],
    /// 𝒱(t0) = ε ∫ g ψ(·,t0) dx, the data boundary term of the weak form.
    v_at_t0: f64,
    last: Option<(f64, f64, f64)>,
    grad_buf: Vec<f64>,
    samples: Vec<FunctionalSample>,
    params_ref: String,
}

impl RunAccumulator {
    pub(crate) fn new(solver: &Solver) -> Result<Self> {
        let ev = FunctionalEvaluator::for_solver(solver)?;
        let m = ev.xs.len();
        Ok(Self {
            ev,
            prev_t: None,
            prev_g: [0.0; 4],
            cum: [0.0; 4],
            v_at_t0: 0.0,
            last: None,
            grad_buf: vec![0.0; m],
            samples: Vec::new(),
            params_ref: solver.params().ident(),
        })
    }

    /// Advance the trapezoid integrals to time t; `v_col` must be u_t
    /// collocated at t.
    pub(crate) fn accumulate(&mut self, t: f64, u: &[f64], v_col: &[f64]) -> Result<()> {
        let rho = self.ev.rho_cache(t)?;
        let v_psi = self.ev.integral_vals_psi(&rho, v_col);
        let u_psi = self.ev.integral_vals_psi(&rho, u);
        self.ev.centered_gradient(u, &mut self.grad_buf);
        let c2 = {
            let c = powf(t, -self.ev.k);
            c * c
        };
        let g = [
            rho.log_deriv * v_psi,
            c2 * self.ev.integral_grad_psi(&rho, &self.grad_buf),
            (self.ev.mu / t) * v_psi,
            if self.ev.nonlin {
                self.ev.integral_pow_psi(&rho, v_col)
            } else {
                0.0
            },
        ];
        match self.prev_t {
            None => {
                self.v_at_t0 = v_psi;
            }
            Some(tp) => {
                let h = t - tp;
                for i in 0..4 {
                    self.cum[i] += 0.5 * h * (self.prev_g[i] + g[i]);
                }
            }
        }
        self.prev_t = Some(t);
        self.prev_g = g;
        self.last = Some((t, u_psi, v_psi));
        Ok(())
    }

    /// Record a sample row at time t (must follow `accumulate` at the same t).
    pub(crate) fn record_sample(&mut self, t: f64, u: &[f64], v_col: &[f64]) -> Result<()> {
        let (lt, u_psi, v_psi) = match self.last {
            Some(triple) if triple.0 == t => triple,
            _ => {
                self.accumulate(t, u, v_col)?;
                self.last.expect("accumulate sets last")
            }
        };
        debug_assert_eq!(lt, t);
        let [i1, i2, i3, i4] = self.cum;
        let defect = v_psi - self.v_at_t0 - i1 + i2 + i3 - i4;
        let scale = abs(v_psi)
            .max(abs(self.v_at_t0))
            .max(abs(i1))
            .max(abs(i2))
            .max(abs(i3))
            .max(abs(i4));
        let weak_residual = if scale > 0.0 { defect / scale } else { 0.0 };
        let max_abs_u = u.iter().fold(0.0f64, |m, &x| m.max(abs(x)));
        let max_abs_ut = v_col.iter().fold(0.0f64, |m, &x| m.max(abs(x)));
        self.samples.push(FunctionalSample {
            t,
            u_psi,
            ut_psi: v_psi,
            weak_residual,
            nonlin_cum: i4,
            max_abs_u,
            max_abs_ut,
        });
        Ok(())
    }

    pub(crate) fn into_series(self) -> FunctionalSeries {
        FunctionalSeries {
            samples: self.samples,
            params_ref: self.params_ref,
        }
    }
}

// ---------------------------------------------------------------------------
// Data constant C(f,g)
// ---------------------------------------------------------------------------

/// The positive constant multiplying ε in the weak-form identity,
/// C(f,g) = ρ(1) ∫ [ (μ - ρ'(1)/ρ(1)) f + g ] φ dx.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DataConstant {
    pub value: f64,
}

/// C(f,g) by adaptive quadrature on the (closed-form) data profiles.
///
/// Errors if the data are nonnegative-trivial (both profiles zero) or the
/// result fails to come out positive.
pub fn compute_cfg(mp: &ModelParams, ctl: &EvalControls) -> Result<DataConstant> {
    if mp.f_profile.is_zero() && mp.g_profile.is_zero() {
        return Err(Error::Domain(
            "C(f,g) needs data that are not both identically zero".into(),
        ));
    }
    let st = mp.spacetime();
    let rho1 = special::rho(1.0, &st, ctl)?;
    let slope = mp.mu - special::rho_log_derivative(1.0, &st, ctl)?;
    let n = mp.n;
    let area = special::unit_sphere_area(n.saturating_sub(1));
    let integrand = |r: f64| -> f64 {
        let h = slope * mp.f_at(r) + mp.g_at(r);
        let phi = exp(r + ln(phi_spatial_scaled(r, n, ctl).unwrap_or(f64::NAN)));
        let geom = if n == 1 {
            1.0
        } else {
            powf(r, (n - 1) as f64)
        };
        h * phi * geom
    };
    let out = quad::integrate(
        &integrand,
        0.0,
        mp.support_radius,
        ctl.quad_rel_tol,
        ctl.quad_max_nodes,
    );
    let value = rho1 * area * out.value;
    if !out.converged {
        return Err(Error::Accuracy {
            estimate: value,
            requested_rel_tol: ctl.quad_rel_tol,
            achieved_rel_err: out.abs_err / f64::max(abs(out.value), f64::MIN_POSITIVE),
        });
    }
    if !(value > 0.0) || !value.is_finite() {
        return Err(Error::Domain(format!(
            "C(f,g) must be positive for admissible data, got {value}"
        )));
    }
    Ok(DataConstant { value })
}

// ---------------------------------------------------------------------------
// T₀ and the lemma lower bounds
// ---------------------------------------------------------------------------

/// Whether the two-sided envelope π/4 < φ_k(t) K_ν²(φ_k(t)) e^{2φ_k(t)} < π
/// holds at time t (the inequalities behind the T₀ threshold).
pub fn est_double_holds(t: f64, st: &SpacetimeParams, ctl: &EvalControls) -> Result<bool> {
    let z = special::phi_k(t, st)?;
    let lnk = ln_bessel_k_scaled(st.bessel_order(), z, ctl)?;
    let g = ln(z) + 2.0 * lnk;
    let lo = ln(core::f64::consts::PI / 4.0);
    let hi = ln(core::f64::consts::PI);
    Ok(g > lo && g < hi)
}

/// Largest φ_k needed before the K_ν asymptotics make the envelope
/// automatic; beyond it sampling can stop.
fn tail_cutoff_z(st: &SpacetimeParams) -> f64 {
    let nu = st.bessel_order().nu();
    f64::max(200.0, 8.0 * nu * nu + 10.0)
}

fn t_for_z(z: f64, st: &SpacetimeParams) -> f64 {
    powf((1.0 - st.k()) * z, 1.0 / (1.0 - st.k()))
}

/// Smallest T₀ > 2 (bisection to 1e-6) such that the envelope holds on a
/// dense geometric sample of [T₀/2, ∞).
pub fn find_t0(st: &SpacetimeParams, ctl: &EvalControls) -> Result<f64> {
    const GRID: usize = 300;
    let t_tail = f64::max(1e4, t_for_z(tail_cutoff_z(st), st));
    let all_ok = |t0: f64| -> Result<bool> {
        let lo = 0.5 * t0;
        let hi = f64::max(100.0 * t0, t_tail);
        let ratio = ln(hi / lo) / (GRID as f64 - 1.0);
        for i in 0..GRID {
            let t = lo * exp(ratio * i as f64);
            if !est_double_holds(t, st, ctl)? {
                return Ok(false);
            }
        }
        Ok(true)
    };

    let floor = 2.0 + 1e-6;
    if all_ok(floor)? {
        return Ok(floor);
    }
    let mut lo = floor;
    let mut hi = 2.0 * floor;
    while !all_ok(hi)? {
        lo = hi;
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::Search(format!(
                "no admissible T0 below 1e6 for k={}, mu={}",
                st.k(),
                st.mu()
            )));
        }
    }
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        if all_ok(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(f64::max(hi, floor))
}

/// κ = (1/8)(1 - exp(-(2 - 2^k) T₀^{1-k} / (1-k))); always < 1/8.
pub fn kappa(t0: f64, st: &SpacetimeParams) -> f64 {
    let k = st.k();
    0.125 * (1.0 - exp(-(2.0 - powf(2.0, k)) * powf(t0, 1.0 - k) / (1.0 - k)))
}

/// C_𝒰 = κ C(f,g): the lower-bound constant of 𝒰(t) ≥ C_𝒰 ε t^k.
pub fn c_u_constant(t0: f64, cfg: &DataConstant, st: &SpacetimeParams) -> f64 {
    kappa(t0, st) * cfg.value
}

/// C_𝒱 = C_𝒰 (1/2)^{μ/2+1} (1 - exp(-(1 - 2^{k-1})(2T₀)^{1-k}/(1-k))).
pub fn c_v_constant(t0: f64, c_u: f64, st: &SpacetimeParams) -> f64 {
    let k = st.k();
    let decay = 1.0 - exp(-(1.0 - powf(2.0, k - 1.0)) * powf(2.0 * t0, 1.0 - k) / (1.0 - k));
    c_u * powf(0.5, 0.5 * st.mu() + 1.0) * decay
}

/// Outcome of a functional lower-bound check along a recorded series.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LemmaReport {
    /// Time the bound activates (T₀ for 𝒰, T₁ = 2T₀ for 𝒱).
    pub threshold_t: f64,
    /// The constructive constant (C_𝒰 or C_𝒱).
    pub bound_constant: f64,
    /// min over recorded t ≥ threshold of the measured ratio
    /// (𝒰/(ε t^k) or 𝒱/ε).
    pub min_ratio: f64,
    /// Where the minimum was attained.
    pub at_t: f64,
    pub samples_checked: usize,
    /// min_ratio ≥ (1 - LEMMA_SLACK) · bound_constant.
    pub pass: bool,
}

fn min_ratio_past<F: Fn(&FunctionalSample) -> f64>(
    series: &FunctionalSeries,
    threshold: f64,
    ratio: F,
) -> (f64, f64, usize) {
    let mut min_ratio = f64::INFINITY;
    let mut at_t = f64::NAN;
    let mut n = 0;
    for s in series.samples.iter().filter(|s| s.t >= threshold) {
        let r = ratio(s);
        n += 1;
        if r < min_ratio {
            min_ratio = r;
            at_t = s.t;
        }
    }
    (min_ratio, at_t, n)
}

/// Check 𝒰(t) ≥ C_𝒰 ε t^k for t ≥ T₀ along a recorded run.
pub fn check_lemma33(
    series: &FunctionalSeries,
    mp: &ModelParams,
    ctl: &EvalControls,
) -> Result<LemmaReport> {
    if !(mp.eps > 0.0) {
        return Err(Error::Domain("lemma check needs eps > 0".into()));
    }
    let st = mp.spacetime();
    let t0 = find_t0(&st, ctl)?;
    let cfg = compute_cfg(mp, ctl)?;
    let c_u = c_u_constant(t0, &cfg, &st);
    let (min_ratio, at_t, n) = min_ratio_past(series, t0, |s| {
        s.u_psi / (mp.eps * powf(s.t, mp.k))
    });
    Ok(LemmaReport {
        threshold_t: t0,
        bound_constant: c_u,
        min_ratio,
        at_t,
        samples_checked: n,
        pass: n > 0 && min_ratio >= (1.0 - LEMMA_SLACK) * c_u,
    })
}

/// Check 𝒱(t) ≥ C_𝒱 ε for t ≥ T₁ = 2T₀ along a recorded run.
pub fn check_lemma34(
    series: &FunctionalSeries,
    mp: &ModelParams,
    ctl: &EvalControls,
) -> Result<LemmaReport> {
    if !(mp.eps > 0.0) {
        return Err(Error::Domain("lemma check needs eps > 0".into()));
    }
    let st = mp.spacetime();
    let t0 = find_t0(&st, ctl)?;
    let cfg = compute_cfg(mp, ctl)?;
    let c_u = c_u_constant(t0, &cfg, &st);
    let c_v = c_v_constant(t0, c_u, &st);
    let t1 = 2.0 * t0;
    let (min_ratio, at_t, n) = min_ratio_past(series, t1, |s| s.ut_psi / mp.eps);
    Ok(LemmaReport {
        threshold_t: t1,
        bound_constant: c_v,
        min_ratio,
        at_t,
        samples_checked: n,
        pass: n > 0 && min_ratio >= (1.0 - LEMMA_SLACK) * c_v,
    })
}

// ---------------------------------------------------------------------------
// ψ-norm envelope (the Hölder-step estimate)
// ---------------------------------------------------------------------------

/// (lhs, rhs_shape) of the ψ-norm estimate at exponent r ≥ 1:
/// lhs = ∫_{|x| ≤ φ_k(t)+R} ψ^r dx and
/// rhs_shape = ρ^r e^{rφ_k} (1+φ_k)^{(2-r)(N-1)/2}.
///
/// The estimate proper is for r > 1; r = 1 is the shape used by the
/// lifespan argument and is accepted here.
pub fn psi_norm_bound(
    t: f64,
    r: f64,
    mp: &ModelParams,
    ctl: &EvalControls,
) -> Result<(f64, f64)> {
    if !(r >= 1.0) {
        return Err(Error::Domain(format!("psi_norm_bound needs r >= 1, got {r}")));
    }
    let st = mp.spacetime();
    let z = special::phi_k(t, &st)?;
    let ln_rho_t = special::ln_rho(t, &st, ctl)?;
    let edge = z + mp.support_radius;
    let n = mp.n;
    let area = special::unit_sphere_area(n.saturating_sub(1));
    // Factor out the integrand's maximum (φ is increasing in |x|).
    let ln_peak = r * ln_phi_spatial(edge, n, ctl)?;
    let f = |s: f64| -> f64 {
        let lp = match ln_phi_spatial(s, n, ctl) {
            Ok(v) => v,
            Err(_) => return f64::NAN,
        };
        let geom = if n == 1 { 1.0 } else { powf(s, (n - 1) as f64) };
        exp(r * lp - ln_peak) * geom
    };
    let out = quad::integrate(&f, 0.0, edge, f64::max(ctl.quad_rel_tol, 1e-9), ctl.quad_max_nodes);
    if !out.converged {
        return Err(Error::Accuracy {
            estimate: out.value,
            requested_rel_tol: ctl.quad_rel_tol,
            achieved_rel_err: out.abs_err / f64::max(out.value, f64::MIN_POSITIVE),
        });
    }
    let lhs = exp(r * ln_rho_t + ln_peak + ln(area * out.value));
    let rhs_shape = exp(
        r * ln_rho_t + r * z + 0.5 * (2.0 - r) * (n as f64 - 1.0) * crate::math::ln_1p(z),
    );
    Ok((lhs, rhs_shape))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Profile, StoppingPolicy};

    fn ctl() -> EvalControls {
        EvalControls::default()
    }

    #[test]
    fn cfg_positive_and_linear() {
        let mp = ModelParams::new(1, 0.0, 1.0, 1.8, 0.3, 1.0).unwrap();
        let base = compute_cfg(&mp, &ctl()).unwrap().value;
        assert!(base > 0.0);

        // Jointly linear in (f,g): doubling both doubles C(f,g). The bump
        // profiles scale only through their amplitude, so compare f=0 / g=0
        // splits instead: Cfg(f,g) = Cfg(f,0) + Cfg(0,g).
        let only_f = compute_cfg(
            &mp.clone().with_profiles(Profile::DEFAULT_BUMP, Profile::Zero),
            &ctl(),
        )
        .unwrap()
        .value;
        let only_g = compute_cfg(
            &mp.clone().with_profiles(Profile::Zero, Profile::DEFAULT_BUMP),
            &ctl(),
        )
        .unwrap()
        .value;
        assert!(
            ((only_f + only_g - base) / base).abs() < 1e-12,
            "additivity: {only_f} + {only_g} vs {base}"
        );

        let both_zero = mp.with_profiles(Profile::Zero, Profile::Zero);
        assert!(compute_cfg(&both_zero, &ctl()).is_err());
    }

    #[test]
    fn cfg_zero_f_reduces_to_g_integral() {
        // f ≡ 0: C(f,g) = ρ(1) ∫ g φ dx.
        let mp = ModelParams::new(1, 0.0, 1.0, 2.0, 0.1, 1.0)
            .unwrap()
            .with_profiles(Profile::Zero, Profile::DEFAULT_BUMP);
        let got = compute_cfg(&mp, &ctl()).unwrap().value;
        let st = mp.spacetime();
        let rho1 = special::rho(1.0, &st, &ctl()).unwrap();
        // Trapezoid oracle at fine resolution.
        let m = 200_000;
        let mut acc = 0.0;
        for i in 0..=m {
            let x = -1.0 + 2.0 * i as f64 / m as f64;
            let w = if i == 0 || i == m { 0.5 } else { 1.0 };
            acc += w * mp.g_at(x.abs()) * 2.0 * x.cosh();
        }
        acc *= 2.0 / m as f64;
        let want = rho1 * acc;
        assert!(
            ((got - want) / want).abs() < 1e-8,
            "Cfg {got} vs oracle {want}"
        );
    }

    #[test]
    fn functional_zero_state_and_superposition() {
        let mp = ModelParams::new(1, 0.25, 1.0, 2.0, 0.5, 1.0).unwrap();
        let grid = Grid::for_horizon(&mp, 4.0).unwrap();
        let solver = Solver::new(mp.clone(), grid).unwrap();
        let ev = FunctionalEvaluator::new(&mp, &grid).unwrap();
        let mut state = solver.init_state();
        let u0 = ev.compute_u(&state).unwrap();
        let v0 = ev.compute_v(&state).unwrap();
        assert!(u0 > 0.0 && v0 > 0.0, "positive data give positive functionals");

        // Linearity: scaling the state scales the functionals.
        for x in state.u.iter_mut() {
            *x *= 3.0;
        }
        for x in state.v.iter_mut() {
            *x *= 3.0;
        }
        let u3 = ev.compute_u(&state).unwrap();
        let v3 = ev.compute_v(&state).unwrap();
        assert!(((u3 - 3.0 * u0) / u3).abs() < 1e-12);
        assert!(((v3 - 3.0 * v0) / v3).abs() < 1e-12);

        for x in state.u.iter_mut() {
            *x = 0.0;
        }
        for x in state.v.iter_mut() {
            *x = 0.0;
        }
        assert_eq!(ev.compute_u(&state).unwrap(), 0.0);
        assert_eq!(ev.compute_v(&state).unwrap(), 0.0);
    }

    #[test]
    fn u_at_initial_time_matches_quadrature_oracle() {
        // 𝒰(1) = ε ρ(1) ∫ (1-x²)³ (e^x + e^{-x}) dx on N=1, R=1, ε=1.
        let mp = ModelParams::new(1, 0.0, 1.0, 2.0, 1.0, 1.0).unwrap();
        let grid = Grid::for_horizon_with(&mp, 3.0, 1.0 / 512.0, 0.4).unwrap();
        let solver = Solver::new(mp.clone(), grid).unwrap();
        let ev = FunctionalEvaluator::for_solver(&solver).unwrap();
        let got = ev.compute_u(&solver.init_state()).unwrap();

        let st = mp.spacetime();
        let rho1 = special::rho(1.0, &st, &ctl()).unwrap();
        let m = 400_000;
        let mut acc = 0.0;
        for i in 0..=m {
            let x: f64 = -1.0 + 2.0 * i as f64 / m as f64;
            let w = if i == 0 || i == m { 0.5 } else { 1.0 };
            acc += w * (1.0 - x * x).powi(3) * (x.exp() + (-x).exp());
        }
        acc *= 2.0 / m as f64;
        let want = rho1 * acc;
        assert!(
            ((got - want) / want).abs() < 1e-6,
            "U(1) {got} vs oracle {want}"
        );
    }

    #[test]
    fn t0_exists_and_envelope_holds_around_it() {
        for &(k, mu) in &[(0.0, 1.0), (0.25, 1.0), (0.5, 0.5), (0.0, 2.0)] {
            let st = SpacetimeParams::new(k, mu).unwrap();
            let t0 = find_t0(&st, &ctl()).unwrap();
            assert!(t0 > 2.0, "T0 must exceed 2, got {t0} at k={k}, mu={mu}");
            assert!(est_double_holds(0.5 * t0, &st, &ctl()).unwrap());
            assert!(est_double_holds(2.0 * t0, &st, &ctl()).unwrap());
            assert!(est_double_holds(10.0 * t0, &st, &ctl()).unwrap());
        }
    }

    #[test]
    fn kappa_below_eighth_and_cv_below_cu() {
        let st = SpacetimeParams::new(0.0, 1.0).unwrap();
        let t0 = find_t0(&st, &ctl()).unwrap();
        let kap = kappa(t0, &st);
        assert!(kap > 0.0 && kap < 0.125);
        let cfg = DataConstant { value: 1.0 };
        let c_u = c_u_constant(t0, &cfg, &st);
        let c_v = c_v_constant(t0, c_u, &st);
        assert!(c_v > 0.0 && c_v < c_u, "C_V {c_v} must sit below C_U {c_u}");
    }

    #[test]
    fn linear_run_v_scale_invariance() {
        // 𝒱/ε on the linear flow is ε-independent.
        let make = |eps: f64| {
            ModelParams::new(1, 0.0, 1.0, 2.0, eps, 1.0)
                .unwrap()
                .with_nonlinearity(false)
        };
        let stop = StoppingPolicy::new(3.0, 0.25).unwrap();
        let grid = Grid::for_horizon(&make(0.1), 3.0).unwrap();
        let (_, small) = Solver::new(make(0.1), grid).unwrap().run(&stop).unwrap();
        let (_, large) = Solver::new(make(0.2), grid).unwrap().run(&stop).unwrap();
        for (a, b) in small.samples.iter().zip(large.samples.iter()) {
            let ra = a.ut_psi / 0.1;
            let rb = b.ut_psi / 0.2;
            let scale = ra.abs().max(rb.abs()).max(1e-300);
            assert!(
                ((ra - rb) / scale).abs() < 1e-10,
                "t={}: {ra} vs {rb}",
                a.t
            );
        }
    }

    #[test]
    fn weak_residual_zero_at_t0_small_on_linear_run() {
        let mp = ModelParams::new(1, 0.25, 1.0, 2.0, 0.3, 1.0)
            .unwrap()
            .with_nonlinearity(false);
        let grid = Grid::for_horizon(&mp, 4.0).unwrap();
        let solver = Solver::new(mp, grid).unwrap();
        let stop = StoppingPolicy::new(4.0, 0.25).unwrap();
        let (out, series) = solver.run(&stop).unwrap();
        assert_eq!(out.status, crate::solver::RunStatus::Survived);
        assert_eq!(series.samples[0].weak_residual, 0.0, "defect vanishes at t0");
        let worst = series
            .samples
            .iter()
            .fold(0.0f64, |m, s| m.max(s.weak_residual.abs()));
        assert!(worst < 2e-3, "weak residual too large: {worst}");
    }

    #[test]
    fn psi_norm_ratio_bounded() {
        // N=3, r=2, k=0.5: lhs/rhs stays within a modest band over t ∈ [1,30].
        let mp = ModelParams::new(3, 0.5, 1.0, 2.0, 0.1, 1.0).unwrap();
        let mut ratios = alloc::vec::Vec::new();
        for i in 0..=29 {
            let t = 1.0 + i as f64;
            let (lhs, rhs) = psi_norm_bound(t, 2.0, &mp, &ctl()).unwrap();
            assert!(lhs > 0.0 && rhs > 0.0);
            ratios.push(lhs / rhs);
        }
        let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
        let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
        assert!(
            max / min < 10.0,
            "ratio band too wide: [{min}, {max}]"
        );
        // N=1: the (1+φ_k) exponent is zero; still bounded.
        let mp1 = ModelParams::new(1, 0.5, 1.0, 2.0, 0.1, 1.0).unwrap();
        let (lhs, rhs) = psi_norm_bound(1.0, 2.0, &mp1, &ctl()).unwrap();
        assert!(lhs > 0.0 && rhs > 0.0);
    }
}

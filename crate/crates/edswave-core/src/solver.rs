//! Explicit finite-difference Cauchy solver for
//!
//! ```text
//! u_tt - t^{-2k} Δu + (μ/t) u_t = |u_t|^p,   t ≥ 1,
//! ```
//!
//! in 1D and in radial symmetry for N ≥ 2, with blow-up detection, support
//! cone verification and the φ_k rescaling-equivalence check against the
//! constant-speed form of the equation.
//!
//! Scheme: staggered leapfrog. `u` lives on integer time levels, `u_t` on
//! half levels. The kick solves the damping term with a trapezoidal
//! (Crank–Nicolson) scalar relation, keeping the scheme second order in time
//! while remaining unconditionally stable for the stiff μ/t term near t = 1;
//! Laplacian and nonlinearity are explicit, the nonlinearity at the old
//! half level so that the failure mode of the scheme is growth.

use crate::functionals::{FunctionalSeries, RunAccumulator};
use crate::math::{abs, powf, sqrt};
use crate::model::{Grid, ModelParams, StoppingPolicy};
use crate::special::{self, SpacetimeParams};
use crate::{Error, Result};
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

/// Trapezoidal (Crank-Nicolson) damping kick over span `s`:
/// (v⁺ - v)/s + b (v⁺ + v)/2 = a solved exactly for v⁺; unconditionally
/// stable for b ≥ 0 and second-order centered.
#[inline]
fn kicked(v: f64, a: f64, s: f64, b: f64) -> f64 {
    let half_bs = 0.5 * b * s;
    ((1.0 - half_bs) * v + s * a) / (1.0 + half_bs)
}

/// Coefficients of the generalized equation
/// `u_tt - c²(t) Δu + b(t) u_t = w(t) |u_t|^p` starting at `t0`.
///
/// `Eds` is the Einstein–de Sitter form; `Rescaled` is its image under
/// τ = φ_k(t), a unit-speed wave equation with damping (μ-k)/((1-k)τ) and
/// nonlinearity weight C_{k,p} τ^{μ_k (p-2)}, μ_k = -k/(1-k).
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum CoefficientSet {
    Eds { k: f64, mu: f64 },
    Rescaled { k: f64, mu: f64, p: f64 },
}

impl CoefficientSet {
    fn t0(&self) -> f64 {
        match self {
            CoefficientSet::Eds { .. } => 1.0,
            CoefficientSet::Rescaled { k, .. } => 1.0 / (1.0 - k),
        }
    }

    fn speed(&self, t: f64) -> f64 {
        match self {
            CoefficientSet::Eds { k, .. } => powf(t, -k),
            CoefficientSet::Rescaled { .. } => 1.0,
        }
    }

    fn damping(&self, t: f64) -> f64 {
        match self {
            CoefficientSet::Eds { mu, .. } => mu / t,
            CoefficientSet::Rescaled { k, mu, .. } => (mu - k) / ((1.0 - k) * t),
        }
    }

    fn nonlin_weight(&self, t: f64) -> f64 {
        match self {
            CoefficientSet::Eds { .. } => 1.0,
            CoefficientSet::Rescaled { k, p, .. } => {
                let mu_k = -k / (1.0 - k);
                let e = mu_k * (p - 2.0);
                powf(1.0 - k, e) * powf(t, e)
            }
        }
    }
}

/// Node coordinates shared by the solver and the functional quadratures.
/// 1D grids span [-r_max, r_max]; radial grids span [0, r_max].
#[derive(Debug, Clone)]
pub(crate) struct Mesh {
    pub dx: f64,
    pub xs: Vec<f64>,
}

impl Mesh {
    pub(crate) fn build(n: u32, grid: &Grid) -> Mesh {
        let half = crate::math::ceil(grid.r_max / grid.dx) as i64;
        let xs: Vec<f64> = if n == 1 {
            (-half..=half).map(|i| i as f64 * grid.dx).collect()
        } else {
            (0..=half).map(|i| i as f64 * grid.dx).collect()
        };
        Mesh { dx: grid.dx, xs }
    }

    pub(crate) fn len(&self) -> usize {
        self.xs.len()
    }

    /// Outermost node coordinate (the truncation boundary).
    pub(crate) fn r_edge(&self) -> f64 {
        abs(*self.xs.last().expect("mesh is never empty"))
    }
}

/// Discretized (u, u_t) at one time level.
///
/// `v` approximates u_t staggered at `t - dt_prev/2`; right after
/// initialization (`dt_prev = 0`) it is collocated at `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub t: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub(crate) dt_prev: f64,
}

impl FieldState {
    pub fn max_abs_u(&self) -> f64 {
        self.u.iter().fold(0.0, |m, &x| f64::max(m, abs(x)))
    }

    pub fn max_abs_ut(&self) -> f64 {
        self.v.iter().fold(0.0, |m, &x| f64::max(m, abs(x)))
    }

    pub fn all_finite(&self) -> bool {
        self.u.iter().all(|x| x.is_finite()) && self.v.iter().all(|x| x.is_finite())
    }
}

/// Terminal classification of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum RunStatus {
    Blowup,
    Survived,
    Aborted,
}

/// What a run produced.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SolveOutcome {
    pub status: RunStatus,
    /// Detection time of the blow-up proxy; `None` unless status is Blowup.
    pub t_blow: Option<f64>,
    /// Largest max|u_t| seen over the whole run.
    pub max_ut: f64,
    pub step_count: u64,
    /// Violated invariant when status is Aborted.
    pub abort_reason: Option<String>,
    pub diagnostics: BTreeMap<String, f64>,
}

/// Finite-difference solver bound to one problem instance and grid.
pub struct Solver {
    mp: ModelParams,
    grid: Grid,
    st: SpacetimeParams,
    coeffs: CoefficientSet,
    mesh: Mesh,
    /// Conservative radial Laplacian flux factors (r_{j±1/2}/r_j)^{N-1}.
    lap_plus: Vec<f64>,
    lap_minus: Vec<f64>,
    /// Extra CFL headroom for the origin row of the radial Laplacian.
    radial_safety: f64,
}

impl Solver {
    pub fn new(mp: ModelParams, grid: Grid) -> Result<Self> {
        let coeffs = CoefficientSet::Eds { k: mp.k, mu: mp.mu };
        Self::with_coefficients(mp, grid, coeffs)
    }

    pub(crate) fn with_coefficients(
        mp: ModelParams,
        grid: Grid,
        coeffs: CoefficientSet,
    ) -> Result<Self> {
        if grid.nodes_per_support(&mp) < 32 {
            return Err(Error::Config(format!(
                "grid resolves the data support with {} nodes, need >= 32; \
                 shrink dx below R/32",
                grid.nodes_per_support(&mp)
            )));
        }
        let st = mp.spacetime();
        let mesh = Mesh::build(mp.n, &grid);
        let m = mesh.len();
        let (mut lap_plus, mut lap_minus) = (vec![0.0; m], vec![0.0; m]);
        if mp.n >= 2 {
            let e = (mp.n - 1) as i32;
            for j in 1..m - 1 {
                let r = mesh.xs[j];
                lap_plus[j] = crate::math::powi((r + 0.5 * mesh.dx) / r, e);
                lap_minus[j] = crate::math::powi((r - 0.5 * mesh.dx) / r, e);
            }
        }
        let radial_safety = if mp.n >= 2 { sqrt(mp.n as f64) } else { 1.0 };
        Ok(Self {
            mp,
            grid,
            st,
            coeffs,
            mesh,
            lap_plus,
            lap_minus,
            radial_safety,
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.mp
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub(crate) fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    /// Node coordinates of the spatial grid (x for 1D, r for radial).
    pub fn node_coords(&self) -> &[f64] {
        &self.mesh.xs
    }

    /// Initial state u = ε f, u_t = ε g sampled on the grid at t = t0.
    pub fn init_state(&self) -> FieldState {
        let eps = self.mp.eps;
        let u: Vec<f64> = self
            .mesh
            .xs
            .iter()
            .map(|&x| eps * self.mp.f_at(abs(x)))
            .collect();
        let v: Vec<f64> = self
            .mesh
            .xs
            .iter()
            .map(|&x| eps * self.mp.g_at(abs(x)))
            .collect();
        FieldState {
            t: self.coeffs.t0(),
            u,
            v,
            dt_prev: 0.0,
        }
    }

    /// Largest stable step at the current state: CFL for the speed c(t),
    /// capped by the damping scale and by the nonlinear growth scale.
    pub fn stable_dt(&self, state: &FieldState) -> f64 {
        let t = state.t;
        let c = self.coeffs.speed(t);
        let mut dt = self.grid.cfl_safety * self.mesh.dx / (c * self.radial_safety);
        let b = self.coeffs.damping(t);
        if b != 0.0 {
            dt = f64::min(dt, 1.0 / (10.0 * abs(b)));
        }
        if self.mp.nonlinearity_on {
            let vmax = state.max_abs_ut();
            if vmax > 0.0 {
                let w = self.coeffs.nonlin_weight(t);
                let cap = self.grid.cfl_safety / (self.mp.p * w * powf(vmax, self.mp.p - 1.0));
                if cap.is_finite() && cap < dt {
                    dt = cap;
                }
            }
        }
        dt
    }

    /// Discrete Laplacian (radial form r^{1-N} ∂_r(r^{N-1} ∂_r) for N ≥ 2,
    /// with even symmetry at r = 0 and the N·u_rr limit form there).
    fn laplacian(&self, u: &[f64], out: &mut [f64]) {
        let m = u.len();
        let inv_dx2 = 1.0 / (self.mesh.dx * self.mesh.dx);
        if self.mp.n == 1 {
            out[0] = 0.0;
            out[m - 1] = 0.0;
            for j in 1..m - 1 {
                out[j] = (u[j - 1] - 2.0 * u[j] + u[j + 1]) * inv_dx2;
            }
        } else {
            out[0] = 2.0 * self.mp.n as f64 * (u[1] - u[0]) * inv_dx2;
            out[m - 1] = 0.0;
            for j in 1..m - 1 {
                out[j] = (self.lap_plus[j] * (u[j + 1] - u[j])
                    - self.lap_minus[j] * (u[j] - u[j - 1]))
                    * inv_dx2;
            }
        }
    }

    /// Wave acceleration c²(t) Δu into `out`.
    fn wave_part(&self, t: f64, u: &[f64], out: &mut [f64]) {
        self.laplacian(u, out);
        let c = self.coeffs.speed(t);
        let c2 = c * c;
        for o in out.iter_mut() {
            *o *= c2;
        }
    }

    /// Kick one node over span `s` with trapezoidal damping,
    /// (v⁺ - v)/s + b (v⁺ + v)/2 = a, and the nonlinearity taken explicitly:
    /// a forward predictor at the old level followed by one midpoint
    /// re-evaluation, which removes the O(dt) bias of the old-level source
    /// while keeping the scheme's failure mode growth.
    #[inline]
    fn kick_node(&self, lap: f64, v: f64, s: f64, b: f64, w: f64) -> f64 {
        if !self.mp.nonlinearity_on {
            return kicked(v, lap, s, b);
        }
        let p = self.mp.p;
        let source = |x: f64| if x != 0.0 { w * powf(abs(x), p) } else { 0.0 };
        let pred = kicked(v, lap + source(v), s, b);
        let mid = 0.5 * (v + pred);
        kicked(v, lap + source(mid), s, b)
    }

    /// Kick the whole field in place over span `s` at level time t.
    fn kick_field(&self, t: f64, lap: &[f64], v: &mut [f64], s: f64) {
        let b = self.coeffs.damping(t);
        let w = self.coeffs.nonlin_weight(t);
        for j in 0..v.len() {
            v[j] = self.kick_node(lap[j], v[j], s, b, w);
        }
    }

    /// Advance one level: kick v across the half-level span, then drift u.
    /// `dt` must not exceed [`Solver::stable_dt`].
    pub fn step(&self, state: &mut FieldState, dt: f64) {
        let mut lap = vec![0.0; state.u.len()];
        self.wave_part(state.t, &state.u, &mut lap);
        let span = 0.5 * (state.dt_prev + dt);
        self.kick_field(state.t, &lap, &mut state.v, span);
        for (ui, &vi) in state.u.iter_mut().zip(state.v.iter()) {
            *ui += dt * vi;
        }
        state.t += dt;
        state.dt_prev = dt;
    }

    /// Worst |u| over the nodes strictly outside the support cone
    /// |x| ≤ φ_k(t) + R + 2dx. A measurement; `run` enforces it.
    pub fn support_violation(&self, state: &FieldState) -> Result<f64> {
        let cone = self.cone_radius(state.t)? + 2.0 * self.mesh.dx;
        let mut worst = 0.0;
        for (&x, &ui) in self.mesh.xs.iter().zip(state.u.iter()) {
            if abs(x) > cone {
                worst = f64::max(worst, abs(ui));
            }
        }
        Ok(worst)
    }

    /// Support cone radius at time t for the active coefficient set.
    fn cone_radius(&self, t: f64) -> Result<f64> {
        let r = match self.coeffs {
            CoefficientSet::Eds { .. } => special::phi_k(t, &self.st)?,
            // Unit speed: the cone grows linearly from the rescaled origin.
            CoefficientSet::Rescaled { .. } => t - self.coeffs.t0(),
        };
        Ok(r + self.mp.support_radius)
    }

    /// March until blow-up detection, the time horizon, or an invariant
    /// violation; functionals are accumulated at every step and recorded at
    /// every sample interval.
    pub fn run(&self, stop: &StoppingPolicy) -> Result<(SolveOutcome, FunctionalSeries)> {
        let mut state = self.init_state();
        let mut acc = RunAccumulator::new(self)?;

        let v0max = state.max_abs_ut();
        let threshold = stop.blowup_factor * (v0max + 1.0);
        let growth_marker = 10.0 * v0max;
        let max_steps: u64 = 20_000_000;

        let mut diagnostics: BTreeMap<String, f64> = BTreeMap::new();
        diagnostics.insert("initial_max_ut".into(), v0max);
        diagnostics.insert("blowup_threshold".into(), threshold);

        let mut max_ut_seen = v0max;
        let mut steps: u64 = 0;
        let mut next_sample = state.t;
        let mut growth_time: Option<f64> = None;

        let mut accel = vec![0.0; state.u.len()];
        let mut v_col = vec![0.0; state.u.len()];

        let outcome = loop {
            // Step size, clipped to land exactly on the next event.
            let dt_raw = self.stable_dt(&state);
            let at_sample = state.t >= next_sample - 1e-9 * stop.sample_interval;
            let upcoming = if at_sample {
                next_sample + stop.sample_interval
            } else {
                next_sample
            };
            let event_t = f64::min(upcoming, stop.t_max);
            let mut dt = dt_raw;
            let mut land_on: Option<f64> = None;
            if state.t + dt >= event_t {
                dt = f64::max(event_t - state.t, 0.0);
                land_on = Some(event_t);
            }

            // Kick. The same wave acceleration gives the collocated u_t at
            // t (half-span closing kick) and the staggered u_t at t + dt/2.
            self.wave_part(state.t, &state.u, &mut accel);
            let half_span = 0.5 * state.dt_prev;
            let full_span = 0.5 * (state.dt_prev + dt);
            let b = self.coeffs.damping(state.t);
            let w = self.coeffs.nonlin_weight(state.t);
            for j in 0..state.v.len() {
                v_col[j] = self.kick_node(accel[j], state.v[j], half_span, b, w);
                state.v[j] = self.kick_node(accel[j], state.v[j], full_span, b, w);
            }

            let finite = state.all_finite();
            let vmax = state.max_abs_ut();
            max_ut_seen = f64::max(max_ut_seen, vmax);
            if growth_time.is_none() && v0max > 0.0 && vmax >= growth_marker {
                growth_time = Some(state.t);
            }

            // Online trapezoid accumulation at every step.
            acc.accumulate(state.t, &state.u, &v_col)?;

            let blowup = !finite || (vmax >= threshold && dt_raw < stop.dt_min);
            if at_sample || blowup || state.t >= stop.t_max - 1e-12 {
                acc.record_sample(state.t, &state.u, &v_col)?;
                if at_sample {
                    next_sample += stop.sample_interval;
                }

                // Invariant checks ride on the sampling cadence.
                let max_u = state.max_abs_u();
                let violation = self.support_violation(&state)?;
                if violation > 1e-6 * f64::max(max_u, 1e-300) {
                    diagnostics.insert("support_violation".into(), violation);
                    break SolveOutcome {
                        status: RunStatus::Aborted,
                        t_blow: None,
                        max_ut: max_ut_seen,
                        step_count: steps,
                        abort_reason: Some("support_cone".into()),
                        diagnostics,
                    };
                }
                let cone = self.cone_radius(state.t)?;
                if cone > self.mesh.r_edge() - 5.0 * self.mesh.dx {
                    diagnostics.insert("cone_radius".into(), cone);
                    break SolveOutcome {
                        status: RunStatus::Aborted,
                        t_blow: None,
                        max_ut: max_ut_seen,
                        step_count: steps,
                        abort_reason: Some("boundary_proximity".into()),
                        diagnostics,
                    };
                }
            }

            if blowup {
                diagnostics.insert("final_dt".into(), dt_raw);
                if let Some(tg) = growth_time {
                    diagnostics.insert("t_growth10".into(), tg);
                }
                break SolveOutcome {
                    status: RunStatus::Blowup,
                    t_blow: Some(state.t),
                    max_ut: max_ut_seen,
                    step_count: steps,
                    abort_reason: None,
                    diagnostics,
                };
            }
            if state.t >= stop.t_max - 1e-12 {
                if let Some(tg) = growth_time {
                    diagnostics.insert("t_growth10".into(), tg);
                }
                break SolveOutcome {
                    status: RunStatus::Survived,
                    t_blow: None,
                    max_ut: max_ut_seen,
                    step_count: steps,
                    abort_reason: None,
                    diagnostics,
                };
            }
            if steps >= max_steps {
                break SolveOutcome {
                    status: RunStatus::Aborted,
                    t_blow: None,
                    max_ut: max_ut_seen,
                    step_count: steps,
                    abort_reason: Some("step_limit".into()),
                    diagnostics,
                };
            }

            // Drift; snap exactly onto the event time to keep sampling exact.
            for (ui, &vi) in state.u.iter_mut().zip(state.v.iter()) {
                *ui += dt * vi;
            }
            state.t = match land_on {
                Some(target) => target,
                None => state.t + dt,
            };
            state.dt_prev = dt;
            steps += 1;
        };

        Ok((outcome, acc.into_series()))
    }

    /// March without functional accumulation and capture u at the given
    /// (nondecreasing) times. Returns the snapshots taken (possibly fewer
    /// than requested if the run blows up first) and the time of the last
    /// completed snapshot.
    pub fn snapshots(&self, times: &[f64]) -> Result<(Vec<Vec<f64>>, f64)> {
        let mut state = self.init_state();
        let mut shots: Vec<Vec<f64>> = Vec::with_capacity(times.len());
        let mut last_t = state.t;
        let mut accel = vec![0.0; state.u.len()];
        for &target in times {
            if target < state.t - 1e-12 {
                return Err(Error::Config(format!(
                    "snapshot times must be nondecreasing from t0={}, got {target}",
                    self.coeffs.t0()
                )));
            }
            loop {
                if state.t >= target - 1e-12 {
                    shots.push(state.u.clone());
                    last_t = state.t;
                    break;
                }
                let mut dt = self.stable_dt(&state);
                let remaining = target - state.t;
                if remaining <= dt {
                    dt = remaining;
                }
                if !state.all_finite() || dt < 1e-14 {
                    return Ok((shots, last_t));
                }
                self.wave_part(state.t, &state.u, &mut accel);
                let span = 0.5 * (state.dt_prev + dt);
                self.kick_field(state.t, &accel, &mut state.v, span);
                for (ui, &vi) in state.u.iter_mut().zip(state.v.iter()) {
                    *ui += dt * vi;
                }
                state.t += dt;
                if (state.t - target).abs() < 1e-9 {
                    state.t = target;
                }
                state.dt_prev = dt;
            }
        }
        Ok((shots, last_t))
    }
}

/// Outcome of the rescaling-equivalence comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RescaleReport {
    /// max over sampled times of ‖u(·,t) - v(·,φ_k(t))‖∞ / max‖u‖∞.
    pub max_rel_discrepancy: f64,
    /// Last time both runs reached (equals the horizon unless one blew up).
    pub compared_up_to: f64,
}

/// Solve the equation in t and its φ_k-rescaled unit-speed form in
/// τ = φ_k(t), then compare u(·, t) against v(·, φ_k(t)) on a shared grid
/// at `samples` evenly spaced times in [1, horizon].
pub fn rescaled_run_compare(
    mp: &ModelParams,
    grid: &Grid,
    horizon: f64,
    samples: usize,
) -> Result<RescaleReport> {
    if !(horizon > 1.0) || samples < 2 {
        return Err(Error::Config(
            "rescaled comparison needs horizon > 1 and at least 2 samples".into(),
        ));
    }
    let st = mp.spacetime();
    let times: Vec<f64> = (0..samples)
        .map(|i| 1.0 + (horizon - 1.0) * i as f64 / (samples - 1) as f64)
        .collect();
    // τ_j = φ_k(t_j); the τ-run starts at τ0 = φ_k(1) = 1/(1-k).
    let taus: Vec<f64> = times
        .iter()
        .map(|&t| special::phi_k(t, &st))
        .collect::<Result<_>>()?;

    let direct = Solver::new(mp.clone(), *grid)?;
    let rescaled = Solver::with_coefficients(
        mp.clone(),
        *grid,
        CoefficientSet::Rescaled {
            k: mp.k,
            mu: mp.mu,
            p: mp.p,
        },
    )?;

    let (shots_t, last_t) = direct.snapshots(&times)?;
    let (shots_tau, _) = rescaled.snapshots(&taus)?;

    let n_cmp = usize::min(shots_t.len(), shots_tau.len());
    if n_cmp == 0 {
        return Err(Error::Search(
            "both runs ended before the first comparison time".into(),
        ));
    }
    let mut scale = 0.0;
    for shot in shots_t.iter().take(n_cmp) {
        for &x in shot {
            scale = f64::max(scale, abs(x));
        }
    }
    let mut worst = 0.0;
    for j in 0..n_cmp {
        for (a, b) in shots_t[j].iter().zip(shots_tau[j].iter()) {
            worst = f64::max(worst, abs(a - b));
        }
    }
    Ok(RescaleReport {
        max_rel_discrepancy: if scale > 0.0 { worst / scale } else { 0.0 },
        compared_up_to: f64::min(last_t, times[n_cmp - 1]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Profile;

    fn linear_params() -> ModelParams {
        ModelParams::new(1, 0.0, 0.0, 2.0, 1.0, 1.0)
            .unwrap()
            .with_profiles(Profile::DEFAULT_BUMP, Profile::Zero)
            .with_nonlinearity(false)
    }

    #[test]
    fn init_state_mass_and_zero_eps() {
        let mp = ModelParams::new(1, 0.0, 1.0, 1.8, 0.5, 1.0).unwrap();
        let grid = Grid::for_horizon(&mp, 5.0).unwrap();
        let solver = Solver::new(mp.clone(), grid).unwrap();
        let state = solver.init_state();
        // Discrete mass of u is exactly ε times the discrete mass of f.
        let mass_u: f64 = state.u.iter().sum();
        let mass_f: f64 = solver
            .mesh()
            .xs
            .iter()
            .map(|&x| mp.f_at(crate::math::abs(x)))
            .sum();
        assert!((mass_u - mp.eps * mass_f).abs() <= 1e-12 * mass_u.abs());

        let zero = ModelParams::new(1, 0.0, 1.0, 1.8, 0.0, 1.0).unwrap();
        let solver = Solver::new(zero, grid).unwrap();
        let state = solver.init_state();
        assert!(state.u.iter().all(|&x| x == 0.0));
        assert!(state.v.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn under_resolved_support_is_rejected() {
        let mp = ModelParams::new(1, 0.0, 1.0, 1.8, 0.5, 1.0).unwrap();
        let grid = Grid::new(10.0, 1.0 / 16.0, 0.4).unwrap();
        assert!(matches!(Solver::new(mp, grid), Err(Error::Config(_))));
    }

    #[test]
    fn stable_dt_scales_with_time() {
        let mp = ModelParams::new(1, 0.5, 0.0, 2.0, 0.1, 1.0)
            .unwrap()
            .with_nonlinearity(false);
        let grid = Grid::for_horizon(&mp, 20.0).unwrap();
        let solver = Solver::new(mp, grid).unwrap();
        let mut state = solver.init_state();
        let dt1 = solver.stable_dt(&state);
        state.t = 2.0;
        let dt2 = solver.stable_dt(&state);
        assert!(
            ((dt2 / dt1) - 2f64.sqrt()).abs() < 1e-12,
            "dt ratio {} should be sqrt(2)",
            dt2 / dt1
        );

        // k = 0: constant.
        let mp = ModelParams::new(1, 0.0, 0.0, 2.0, 0.1, 1.0).unwrap();
        let grid = Grid::for_horizon(&mp, 20.0).unwrap();
        let solver = Solver::new(mp, grid).unwrap();
        let mut state = solver.init_state();
        let dt1 = solver.stable_dt(&state);
        state.t = 7.0;
        assert_eq!(solver.stable_dt(&state), dt1);
    }

    #[test]
    fn nonlinear_cap_shrinks_dt() {
        let mp = ModelParams::new(1, 0.0, 0.0, 2.0, 0.1, 1.0).unwrap();
        let grid = Grid::for_horizon(&mp, 5.0).unwrap();
        let solver = Solver::new(mp, grid).unwrap();
        let mut state = solver.init_state();
        let dt_small_v = solver.stable_dt(&state);
        for v in state.v.iter_mut() {
            *v = 1e9;
        }
        let dt_large_v = solver.stable_dt(&state);
        assert!(dt_large_v < 1e-8 && dt_large_v < dt_small_v);
    }

    #[test]
    fn zero_state_stays_zero_with_nonlinearity() {
        let mp = ModelParams::new(1, 0.25, 1.0, 2.0, 0.0, 1.0).unwrap();
        let grid = Grid::for_horizon(&mp, 3.0).unwrap();
        let solver = Solver::new(mp, grid).unwrap();
        let mut state = solver.init_state();
        for _ in 0..50 {
            let dt = solver.stable_dt(&state);
            solver.step(&mut state, dt);
        }
        assert!(state.u.iter().all(|&x| x == 0.0));
        assert!(state.v.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn dalembert_bump_splits_in_two() {
        // Classical wave equation: μ = 0, k = 0, nonlinearity off. A bump
        // with zero velocity splits into two half-amplitude bumps.
        let mp = linear_params();
        let grid = Grid::for_horizon_with(&mp, 3.0, 1.0 / 64.0, 0.4).unwrap();
        let solver = Solver::new(mp.clone(), grid).unwrap();
        let (shots, _) = solver.snapshots(&[1.5]).unwrap();
        let shot = &shots[0];
        let s = 0.5;
        let mut worst: f64 = 0.0;
        for (&x, &num) in solver.mesh().xs.iter().zip(shot.iter()) {
            let exact = 0.5 * (mp.f_at((x - s).abs()) + mp.f_at((x + s).abs()));
            worst = worst.max((num - exact).abs());
        }
        assert!(worst < 1.5e-3, "d'Alembert error {worst}");
    }

    #[test]
    fn survived_on_zero_data_and_determinism() {
        let mp = ModelParams::new(1, 0.0, 1.0, 2.0, 0.0, 1.0).unwrap();
        let grid = Grid::for_horizon(&mp, 3.0).unwrap();
        let solver = Solver::new(mp.clone(), grid).unwrap();
        let stop = StoppingPolicy::new(3.0, 0.5).unwrap();
        let (out_a, series_a) = solver.run(&stop).unwrap();
        assert_eq!(out_a.status, RunStatus::Survived);
        assert_eq!(out_a.t_blow, None);

        // Bitwise identical repeat.
        let solver2 = Solver::new(mp, grid).unwrap();
        let (out_b, series_b) = solver2.run(&stop).unwrap();
        assert_eq!(out_a, out_b);
        assert_eq!(series_a.samples.len(), series_b.samples.len());
        for (a, b) in series_a.samples.iter().zip(series_b.samples.iter()) {
            assert_eq!(a.t.to_bits(), b.t.to_bits());
            assert_eq!(a.u_psi.to_bits(), b.u_psi.to_bits());
            assert_eq!(a.ut_psi.to_bits(), b.ut_psi.to_bits());
        }
    }

    #[test]
    fn rescaled_identity_at_k_zero() {
        let mp = ModelParams::new(1, 0.0, 1.0, 2.0, 0.05, 1.0).unwrap();
        let grid = Grid::for_horizon(&mp, 4.0).unwrap();
        let report = rescaled_run_compare(&mp, &grid, 3.0, 5).unwrap();
        // k = 0 makes the transform the identity; same arithmetic, zero gap.
        assert_eq!(report.max_rel_discrepancy, 0.0);
    }

    #[test]
    fn nonlinear_weight_is_unity_at_p_two() {
        let c = CoefficientSet::Rescaled {
            k: 0.5,
            mu: 1.0,
            p: 2.0,
        };
        for &t in &[2.0, 5.0, 11.0] {
            assert_eq!(c.nonlin_weight(t), 1.0);
        }
    }
}

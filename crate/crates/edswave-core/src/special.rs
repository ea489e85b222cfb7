//! Multiplier functions of the blow-up argument.
//!
//! The building blocks are the modified Bessel function of the second kind
//! evaluated through its integral representation
//!
//! ```text
//! K_ν(z) = ∫₀^∞ exp(-z cosh ζ) cosh(ν ζ) dζ,          z > 0,
//! ```
//!
//! the cone radius `φ_k(t) = t^{1-k}/(1-k)`, the time multiplier
//! `ρ(t) = t^{(1+μ)/2} K_ν(φ_k(t))` with `ν = (μ-1)/(2(1-k))`, the spatial
//! multiplier `φ(x)` (solution of Δφ = φ), and the product `ψ(x,t) = φ(x)ρ(t)`
//! solving the adjoint linear equation.
//!
//! ρ and ψ decay like `exp(-φ_k(t))`, which underflows doubles near
//! `φ_k ≈ 745`; every quantity therefore has a log-scale evaluation path and
//! the plain-value functions are thin wrappers around it.

use crate::math::{self, abs, asinh, cosh, exp, ln, ln_cosh, powf, sinh, sqrt};
use crate::quad;
use crate::{Error, Result};
use alloc::format;

/// Order ν of the modified Bessel function K_ν.
///
/// For the multiplier ρ the paper uses ν = (μ-1)/(2(1-k)); any finite real
/// order is accepted since K_ν = K_{-ν}.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BesselOrder {
    nu: f64,
}

impl BesselOrder {
    pub fn new(nu: f64) -> Result<Self> {
        if !nu.is_finite() {
            return Err(Error::Domain(format!("Bessel order must be finite, got {nu}")));
        }
        Ok(Self { nu })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }
}

/// The spacetime exponents: propagation speed `t^{-k}` and damping `μ/t`.
///
/// `k < 1` strictly; the paper works with k ∈ [0,1), negative k is accepted
/// as a configuration but nothing here is calibrated for it.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpacetimeParams {
    k: f64,
    mu: f64,
}

impl SpacetimeParams {
    pub fn new(k: f64, mu: f64) -> Result<Self> {
        if !k.is_finite() || k >= 1.0 {
            return Err(Error::Domain(format!("k must be finite and < 1, got {k}")));
        }
        if !mu.is_finite() || mu < 0.0 {
            return Err(Error::Domain(format!("mu must be finite and >= 0, got {mu}")));
        }
        Ok(Self { k, mu })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Order ν = (μ-1)/(2(1-k)) of the Bessel factor in ρ.
    pub fn bessel_order(&self) -> BesselOrder {
        BesselOrder {
            nu: (self.mu - 1.0) / (2.0 * (1.0 - self.k)),
        }
    }
}

/// Accuracy knobs for quadrature and the finite-difference test oracles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalControls {
    /// Target relative quadrature error.
    pub quad_rel_tol: f64,
    /// Integrand-evaluation budget per quadrature.
    pub quad_max_nodes: usize,
    /// Base step for derivative checks; used as `fd_step * max(1, t)`.
    pub fd_step: f64,
}

impl EvalControls {
    pub fn new(quad_rel_tol: f64, quad_max_nodes: usize, fd_step: f64) -> Result<Self> {
        if !(quad_rel_tol > 0.0 && quad_rel_tol < 1.0) {
            return Err(Error::Config(format!(
                "quad_rel_tol must lie in (0,1), got {quad_rel_tol}"
            )));
        }
        if quad_max_nodes == 0 {
            return Err(Error::Config("quad_max_nodes must be positive".into()));
        }
        if !(fd_step > 0.0) {
            return Err(Error::Config(format!("fd_step must be positive, got {fd_step}")));
        }
        Ok(Self {
            quad_rel_tol,
            quad_max_nodes,
            fd_step,
        })
    }
}

impl Default for EvalControls {
    fn default() -> Self {
        Self {
            quad_rel_tol: 1e-10,
            quad_max_nodes: 200_000,
            fd_step: 1e-5,
        }
    }
}

// ---------------------------------------------------------------------------
// Modified Bessel K_ν
// ---------------------------------------------------------------------------

/// ln of the scaled function e^z K_ν(z).
///
/// The substituted integrand exp(-z(cosh ζ - 1)) cosh(νζ) never underflows at
/// ζ = 0, and the whole integral is carried out relative to the peak of its
/// logarithm, so this path stays finite for any (ν, z) in range.
pub fn ln_bessel_k_scaled(order: BesselOrder, z: f64, ctl: &EvalControls) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::Domain(format!("bessel_k requires z > 0, got {z}")));
    }
    let nu = abs(order.nu);

    // ln integrand; cosh ζ - 1 = 2 sinh²(ζ/2) avoids cancellation.
    let ln_f = move |zeta: f64| -> f64 {
        let s = sinh(0.5 * zeta);
        -2.0 * z * s * s + ln_cosh(nu * zeta)
    };

    // The maximum lies in [0, asinh(ν/z)]; sample for a scale factor.
    let zeta_up = if nu > 0.0 { asinh(nu / z) } else { 0.0 };
    let mut peak = ln_f(0.0);
    let mut peak_at = 0.0;
    for i in 1..=12 {
        let zeta = zeta_up * (i as f64) / 12.0;
        let v = ln_f(zeta);
        if v > peak {
            peak = v;
            peak_at = zeta;
        }
    }

    // Truncation point: upper bound of the log-integrand drops `cut` below
    // the peak, making the discarded tail negligible at the requested tol.
    let cut = f64::max(46.0, -ln(ctl.quad_rel_tol) + 16.0);
    let bound = |zeta: f64| -> f64 {
        let s = sinh(0.5 * zeta);
        -2.0 * z * s * s + nu * zeta - (peak - cut)
    };
    let mut zeta_max = f64::max(0.0625, zeta_up);
    let mut guard = 0;
    while bound(zeta_max) > 0.0 {
        zeta_max *= 2.0;
        guard += 1;
        if guard > 200 {
            return Err(Error::Domain(format!(
                "bessel_k truncation search failed for nu={nu}, z={z}"
            )));
        }
    }
    // Tighten back down: bound(peak_at) ≥ cut > 0 and bound decays beyond
    // the peak, so bisection gives a snug interval and the panel quadrature
    // never hunts a narrow peak inside a mostly dead domain.
    {
        let mut lo = peak_at;
        for _ in 0..40 {
            let mid = 0.5 * (lo + zeta_max);
            if bound(mid) <= 0.0 {
                zeta_max = mid;
            } else {
                lo = mid;
            }
        }
    }

    let scaled = move |zeta: f64| exp(ln_f(zeta) - peak);
    let out = quad::integrate(&scaled, 0.0, zeta_max, ctl.quad_rel_tol, ctl.quad_max_nodes);
    let value = peak + ln(out.value);
    if !out.converged {
        return Err(Error::Accuracy {
            estimate: value,
            requested_rel_tol: ctl.quad_rel_tol,
            achieved_rel_err: out.abs_err / f64::max(out.value, f64::MIN_POSITIVE),
        });
    }
    Ok(value)
}

/// Scaled Bessel function e^z K_ν(z).
pub fn bessel_k_scaled(order: BesselOrder, z: f64, ctl: &EvalControls) -> Result<f64> {
    Ok(exp(ln_bessel_k_scaled(order, z, ctl)?))
}

/// K_ν(z) through the integral representation; strictly positive.
///
/// Underflows to zero for z ≳ 745 — use [`ln_bessel_k_scaled`] there.
pub fn bessel_k(order: BesselOrder, z: f64, ctl: &EvalControls) -> Result<f64> {
    Ok(exp(ln_bessel_k_scaled(order, z, ctl)? - z))
}

/// d/dz K_ν(z) = -K_{ν+1}(z) + (ν/z) K_ν(z); negative for all z > 0.
pub fn bessel_k_dz(order: BesselOrder, z: f64, ctl: &EvalControls) -> Result<f64> {
    let nu = order.nu;
    let k_nu = bessel_k(order, z, ctl)?;
    let k_nu1 = bessel_k(BesselOrder { nu: nu + 1.0 }, z, ctl)?;
    Ok(-k_nu1 + (nu / z) * k_nu)
}

/// Ratio K_{ν+1}(z) / K_ν(z), computed in log scale so it survives large z.
pub fn bessel_k_ratio_up(order: BesselOrder, z: f64, ctl: &EvalControls) -> Result<f64> {
    let top = ln_bessel_k_scaled(BesselOrder { nu: order.nu + 1.0 }, z, ctl)?;
    let bot = ln_bessel_k_scaled(order, z, ctl)?;
    Ok(exp(top - bot))
}

// ---------------------------------------------------------------------------
// Cone radius φ_k
// ---------------------------------------------------------------------------

/// φ_k(t) = t^{1-k} / (1-k); the forward light-cone radius from the origin
/// of time, strictly increasing in t.
pub fn phi_k(t: f64, p: &SpacetimeParams) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("phi_k requires t > 0, got {t}")));
    }
    Ok(powf(t, 1.0 - p.k) / (1.0 - p.k))
}

/// d/dt φ_k(t) = t^{-k}; the propagation speed.
pub fn phi_k_dt(t: f64, p: &SpacetimeParams) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("phi_k requires t > 0, got {t}")));
    }
    Ok(powf(t, -p.k))
}

// ---------------------------------------------------------------------------
// Time multiplier ρ
// ---------------------------------------------------------------------------

/// ln ρ(t) with ρ(t) = t^{(1+μ)/2} K_ν(φ_k(t)), ν = (μ-1)/(2(1-k)).
pub fn ln_rho(t: f64, p: &SpacetimeParams, ctl: &EvalControls) -> Result<f64> {
    let z = phi_k(t, p)?;
    let lnk = ln_bessel_k_scaled(p.bessel_order(), z, ctl)?;
    Ok(0.5 * (1.0 + p.mu) * ln(t) + lnk - z)
}

/// ρ(t); positive for all t ≥ 1, underflows for φ_k(t) ≳ 745.
pub fn rho(t: f64, p: &SpacetimeParams, ctl: &EvalControls) -> Result<f64> {
    Ok(exp(ln_rho(t, p, ctl)?))
}

/// ρ'(t)/ρ(t) = μ/t - t^{-k} K_{ν+1}(φ_k(t)) / K_ν(φ_k(t)).
///
/// `t^k · (ρ'/ρ) → -1` as t → ∞.
pub fn rho_log_derivative(t: f64, p: &SpacetimeParams, ctl: &EvalControls) -> Result<f64> {
    let z = phi_k(t, p)?;
    let ratio = bessel_k_ratio_up(p.bessel_order(), z, ctl)?;
    Ok(p.mu / t - powf(t, -p.k) * ratio)
}

// ---------------------------------------------------------------------------
// Spatial multiplier φ
// ---------------------------------------------------------------------------

/// Γ(j/2) for integer j ≥ 1 (exact half-integer recursion).
fn gamma_half(j: u32) -> f64 {
    debug_assert!(j >= 1);
    let mut value = if j % 2 == 0 { 1.0 } else { sqrt(core::f64::consts::PI) };
    let mut arg = if j % 2 == 0 { 2.0 } else { 1.0 };
    while arg < j as f64 - 0.5 {
        value *= arg / 2.0;
        arg += 2.0;
    }
    value
}

/// Surface area |S^{m}| = 2 π^{(m+1)/2} / Γ((m+1)/2) of the unit m-sphere.
pub fn unit_sphere_area(m: u32) -> f64 {
    2.0 * powf(core::f64::consts::PI, 0.5 * (m as f64 + 1.0)) / gamma_half(m + 1)
}

fn check_dim(n: u32) -> Result<()> {
    if n < 1 {
        return Err(Error::Domain("space dimension N must be >= 1".into()));
    }
    Ok(())
}

/// e^{-|x|} φ(x) for the radius r = |x|; always in (0, |S^{N-2}| π].
///
/// φ(x) = ∫_{S^{N-1}} e^{x·ω} dω for N ≥ 2 and e^x + e^{-x} for N = 1; it is
/// rotation invariant, so only |x| matters, and satisfies Δφ = φ.
pub fn phi_spatial_scaled(r: f64, n: u32, ctl: &EvalControls) -> Result<f64> {
    check_dim(n)?;
    let r = abs(r);
    if n == 1 {
        return Ok(1.0 + exp(-2.0 * r));
    }
    let m = n - 2;
    // exp(r cos θ - r) = exp(-2 r sin²(θ/2)); smooth and ≤ 1 on [0, π].
    let f = move |theta: f64| -> f64 {
        let s = math::sin(0.5 * theta);
        let w = exp(-2.0 * r * s * s);
        if m == 0 {
            w
        } else {
            w * powf(math::sin(theta), m as f64)
        }
    };
    let out = quad::integrate(&f, 0.0, core::f64::consts::PI, ctl.quad_rel_tol, ctl.quad_max_nodes);
    let value = unit_sphere_area(m) * out.value;
    if !out.converged {
        return Err(Error::Accuracy {
            estimate: value,
            requested_rel_tol: ctl.quad_rel_tol,
            achieved_rel_err: out.abs_err / f64::max(out.value, f64::MIN_POSITIVE),
        });
    }
    Ok(value)
}

/// ln φ(x) at radius |x|; finite for any radius.
pub fn ln_phi_spatial(r: f64, n: u32, ctl: &EvalControls) -> Result<f64> {
    Ok(abs(r) + ln(phi_spatial_scaled(r, n, ctl)?))
}

/// φ(x) at radius |x|; positive and even in x. Overflows for |x| ≳ 700.
pub fn phi_spatial(r: f64, n: u32, ctl: &EvalControls) -> Result<f64> {
    if n == 1 {
        check_dim(n)?;
        return Ok(2.0 * cosh(r));
    }
    Ok(exp(ln_phi_spatial(r, n, ctl)?))
}

/// e^{-|x|} dφ/dr at radius r = |x| ≥ 0; zero at r = 0, positive for r > 0.
pub fn phi_spatial_dr_scaled(r: f64, n: u32, ctl: &EvalControls) -> Result<f64> {
    check_dim(n)?;
    let r = abs(r);
    if n == 1 {
        // d/dx (e^x + e^{-x}) = e^x - e^{-x}, scaled by e^{-x} for x ≥ 0.
        return Ok(-math::exp_m1(-2.0 * r));
    }
    let m = n - 2;
    let f = move |theta: f64| -> f64 {
        let s = math::sin(0.5 * theta);
        let w = exp(-2.0 * r * s * s) * math::cos(theta);
        if m == 0 {
            w
        } else {
            w * powf(math::sin(theta), m as f64)
        }
    };
    let out = quad::integrate(&f, 0.0, core::f64::consts::PI, ctl.quad_rel_tol, ctl.quad_max_nodes);
    let value = unit_sphere_area(m) * out.value;
    if !out.converged {
        return Err(Error::Accuracy {
            estimate: value,
            requested_rel_tol: ctl.quad_rel_tol,
            achieved_rel_err: out.abs_err / f64::max(abs(out.value), f64::MIN_POSITIVE),
        });
    }
    Ok(value)
}

/// dφ/dr at radius r ≥ 0 (for N = 1 this is dφ/dx at x = r ≥ 0).
pub fn phi_spatial_dr(r: f64, n: u32, ctl: &EvalControls) -> Result<f64> {
    if n == 1 {
        check_dim(n)?;
        return Ok(2.0 * sinh(abs(r)));
    }
    Ok(exp(abs(r)) * phi_spatial_dr_scaled(r, n, ctl)?)
}

// ---------------------------------------------------------------------------
// ψ = φ ρ
// ---------------------------------------------------------------------------

/// ln ψ(x, t) = ln φ(|x|) + ln ρ(t).
pub fn ln_psi(r: f64, t: f64, p: &SpacetimeParams, n: u32, ctl: &EvalControls) -> Result<f64> {
    Ok(ln_phi_spatial(r, n, ctl)? + ln_rho(t, p, ctl)?)
}

/// ψ(x, t) = φ(x) ρ(t), the positive solution of the adjoint linear equation
/// ∂²_t ψ - t^{-2k} Δψ - ∂_t(μ ψ / t) = 0.
pub fn psi(r: f64, t: f64, p: &SpacetimeParams, n: u32, ctl: &EvalControls) -> Result<f64> {
    Ok(exp(ln_psi(r, t, p, n, ctl)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctl() -> EvalControls {
        EvalControls::default()
    }

    #[test]
    fn half_order_closed_form() {
        // K_{1/2}(z) = sqrt(pi/(2z)) e^{-z}.
        let order = BesselOrder::new(0.5).unwrap();
        for &z in &[0.5, 1.0, 2.0, 5.0, 20.0, 50.0] {
            let got = bessel_k(order, z, &ctl()).unwrap();
            let want = (core::f64::consts::PI / (2.0 * z)).sqrt() * (-z).exp();
            assert!(
                ((got - want) / want).abs() < 1e-10,
                "K_1/2({z}): got {got:e}, want {want:e}"
            );
        }
    }

    #[test]
    fn reflection_symmetry() {
        for &nu in &[0.25, 0.5, 1.0, 2.5, 3.0] {
            for &z in &[0.5, 1.0, 4.0, 20.0] {
                let a = bessel_k(BesselOrder::new(nu).unwrap(), z, &ctl()).unwrap();
                let b = bessel_k(BesselOrder::new(-nu).unwrap(), z, &ctl()).unwrap();
                assert!(((a - b) / a).abs() < 1e-12, "nu={nu}, z={z}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn monotone_decay_in_z() {
        let order = BesselOrder::new(0.7).unwrap();
        let mut prev = f64::INFINITY;
        for i in 1..40 {
            let z = 0.5 * i as f64;
            let v = bessel_k(order, z, &ctl()).unwrap();
            assert!(v > 0.0 && v < prev, "not strictly decreasing at z={z}");
            prev = v;
        }
    }

    #[test]
    fn large_argument_asymptotics() {
        // |K̂_ν(z) / sqrt(pi/2z) - 1| <= 2/z for |ν| <= 2, z >= 20.
        for &nu in &[0.0, 0.5, 1.0, 1.5, 2.0] {
            for &z in &[20.0, 40.0, 100.0, 400.0] {
                let khat = bessel_k_scaled(BesselOrder::new(nu).unwrap(), z, &ctl()).unwrap();
                let lead = (core::f64::consts::PI / (2.0 * z)).sqrt();
                assert!(
                    (khat / lead - 1.0).abs() <= 2.0 / z,
                    "nu={nu}, z={z}: ratio-1 = {}",
                    khat / lead - 1.0
                );
            }
        }
    }

    #[test]
    fn derivative_identity_is_negative() {
        for &nu in &[0.0, 0.5, 1.3] {
            for &z in &[0.5, 1.0, 3.0, 10.0] {
                let d = bessel_k_dz(BesselOrder::new(nu).unwrap(), z, &ctl()).unwrap();
                assert!(d < 0.0, "K' must be negative, got {d} at nu={nu}, z={z}");
            }
        }
    }

    #[test]
    fn domain_errors() {
        let order = BesselOrder::new(0.0).unwrap();
        assert!(matches!(bessel_k(order, 0.0, &ctl()), Err(Error::Domain(_))));
        assert!(matches!(bessel_k(order, -1.0, &ctl()), Err(Error::Domain(_))));
        assert!(BesselOrder::new(f64::NAN).is_err());
        assert!(SpacetimeParams::new(1.0, 0.0).is_err());
        assert!(SpacetimeParams::new(0.5, -0.1).is_err());
        let p = SpacetimeParams::new(0.5, 1.0).unwrap();
        assert!(matches!(phi_k(0.0, &p), Err(Error::Domain(_))));
    }

    #[test]
    fn accuracy_error_carries_estimate() {
        let tight = EvalControls::new(1e-12, 160, 1e-5).unwrap();
        match ln_bessel_k_scaled(BesselOrder::new(0.3).unwrap(), 1.0, &tight) {
            Err(Error::Accuracy { estimate, .. }) => {
                let full = ln_bessel_k_scaled(BesselOrder::new(0.3).unwrap(), 1.0, &ctl()).unwrap();
                assert!((estimate - full).abs() < 0.2, "estimate {estimate} far from {full}");
            }
            other => panic!("expected accuracy error, got {other:?}"),
        }
    }

    #[test]
    fn phi_k_values_and_monotonicity() {
        let p0 = SpacetimeParams::new(0.0, 0.0).unwrap();
        let p5 = SpacetimeParams::new(0.5, 0.0).unwrap();
        assert_eq!(phi_k(2.0, &p0).unwrap(), 2.0);
        assert!((phi_k(1.0, &p5).unwrap() - 2.0).abs() < 1e-15);
        assert!((phi_k(4.0, &p5).unwrap() - 4.0).abs() < 1e-15);
        let mut prev = 0.0;
        for i in 1..100 {
            let t = 1.0 + 0.3 * i as f64;
            let v = phi_k(t, &p5).unwrap();
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn phi_spatial_at_origin() {
        assert!((phi_spatial(0.0, 1, &ctl()).unwrap() - 2.0).abs() < 1e-14);
        // N = 3: area of S², integrand ≡ 1 at x = 0.
        let want = 4.0 * core::f64::consts::PI;
        let got = phi_spatial(0.0, 3, &ctl()).unwrap();
        assert!(((got - want) / want).abs() < 1e-12, "{got} vs {want}");
        assert!(matches!(phi_spatial(1.0, 0, &ctl()), Err(Error::Domain(_))));
    }

    #[test]
    fn phi_spatial_closed_forms() {
        // N = 3: φ(r) = 4π sinh(r)/r;  N = 2: φ(r) = 2π I₀(r) (spot value).
        for &r in &[0.3, 1.0, 2.7, 10.0] {
            let got = phi_spatial(r, 3, &ctl()).unwrap();
            let want = 4.0 * core::f64::consts::PI * r.sinh() / r;
            assert!(((got - want) / want).abs() < 1e-10, "N=3 r={r}: {got} vs {want}");
        }
        // I₀(1) = 1.2660658777520083...
        let got = phi_spatial(1.0, 2, &ctl()).unwrap();
        let want = 2.0 * core::f64::consts::PI * 1.266_065_877_752_008_3;
        assert!(((got - want) / want).abs() < 1e-10, "{got} vs {want}");
    }

    #[test]
    fn phi_spatial_even_and_positive() {
        for &n in &[1u32, 2, 3, 5] {
            for &r in &[0.0, 0.4, 1.7, 6.0] {
                let a = phi_spatial(r, n, &ctl()).unwrap();
                let b = phi_spatial(-r, n, &ctl()).unwrap();
                assert!(a > 0.0);
                assert_eq!(a, b, "evenness is exact by construction");
            }
        }
    }

    #[test]
    fn phi_dr_matches_finite_difference() {
        let h = 1e-6;
        for &n in &[1u32, 2, 3, 4] {
            for &r in &[0.2, 1.0, 3.5] {
                let d = phi_spatial_dr(r, n, &ctl()).unwrap();
                let fd = (phi_spatial(r + h, n, &ctl()).unwrap()
                    - phi_spatial(r - h, n, &ctl()).unwrap())
                    / (2.0 * h);
                assert!(
                    ((d - fd) / fd).abs() < 1e-7,
                    "N={n}, r={r}: analytic {d} vs fd {fd}"
                );
            }
        }
    }

    #[test]
    fn rho_positive_and_log_path_consistent() {
        let p = SpacetimeParams::new(0.25, 1.5).unwrap();
        for &t in &[1.0, 2.0, 10.0, 60.0] {
            let direct = rho(t, &p, &ctl()).unwrap();
            let logged = ln_rho(t, &p, &ctl()).unwrap();
            assert!(direct > 0.0);
            assert!(((direct.ln() - logged) / logged).abs() < 1e-12);
        }
        // Deep tail: ln path stays finite where the direct value underflows.
        let lr = ln_rho(1.0e6, &SpacetimeParams::new(0.0, 1.0).unwrap(), &ctl()).unwrap();
        assert!(lr < -900_000.0 && lr.is_finite());
    }

    #[test]
    fn rho_log_derivative_limit_and_t1_sign() {
        let ctl = ctl();
        // t^k ρ'/ρ within 0.1 of -1 once φ_k >= 20.
        for &(k, mu) in &[(0.0, 1.0), (0.25, 1.0), (0.5, 0.5), (0.0, 2.0), (0.75, 0.0)] {
            let p = SpacetimeParams::new(k, mu).unwrap();
            for &z in &[20.0, 50.0, 200.0] {
                let t = ((1.0 - k) * z).powf(1.0 / (1.0 - k));
                let v = rho_log_derivative(t, &p, &ctl).unwrap() * t.powf(k);
                assert!(
                    (v + 1.0).abs() < 0.1,
                    "k={k}, mu={mu}, phi_k={z}: t^k rho'/rho = {v}"
                );
            }
            // μ - ρ'(1)/ρ(1) > 0 (the data-constant sign condition).
            let d1 = rho_log_derivative(1.0, &p, &ctl).unwrap();
            assert!(mu - d1 > 0.0, "mu - rho'/rho(1) must be positive, got {}", mu - d1);
        }
    }

    #[test]
    fn psi_factorizes() {
        let p = SpacetimeParams::new(0.5, 1.0).unwrap();
        let ctl = ctl();
        // ψ(x,t)/ψ(0,t) is t-independent.
        let ratio_a = psi(1.3, 2.0, &p, 1, &ctl).unwrap() / psi(0.0, 2.0, &p, 1, &ctl).unwrap();
        let ratio_b = psi(1.3, 7.0, &p, 1, &ctl).unwrap() / psi(0.0, 7.0, &p, 1, &ctl).unwrap();
        assert!(((ratio_a - ratio_b) / ratio_a).abs() < 1e-12);
        // ψ(0,t) = 2 ρ(t) in 1D.
        let two_rho = 2.0 * rho(4.0, &p, &ctl).unwrap();
        let psi0 = psi(0.0, 4.0, &p, 1, &ctl).unwrap();
        assert!(((psi0 - two_rho) / two_rho).abs() < 1e-12);
    }

    #[test]
    fn unit_sphere_areas() {
        assert!((unit_sphere_area(0) - 2.0).abs() < 1e-15);
        assert!((unit_sphere_area(1) - 2.0 * core::f64::consts::PI).abs() < 1e-14);
        assert!((unit_sphere_area(2) - 4.0 * core::f64::consts::PI).abs() < 1e-14);
        // |S^3| = 2π².
        assert!((unit_sphere_area(3) - 2.0 * core::f64::consts::PI.powi(2)).abs() < 1e-13);
    }
}

//! Float math routed through std or libm depending on the build.

#![allow(dead_code)]

macro_rules! shim {
    ($(($name:ident, $std:ident, $libm:ident)),* $(,)?) => {
        $(
            #[cfg(feature = "std")]
            #[inline(always)]
            pub(crate) fn $name(x: f64) -> f64 {
                f64::$std(x)
            }
            #[cfg(not(feature = "std"))]
            #[inline(always)]
            pub(crate) fn $name(x: f64) -> f64 {
                libm::$libm(x)
            }
        )*
    };
}

shim!(
    (exp, exp, exp),
    (ln, ln, log),
    (ln_1p, ln_1p, log1p),
    (exp_m1, exp_m1, expm1),
    (sqrt, sqrt, sqrt),
    (cbrt, cbrt, cbrt),
    (sin, sin, sin),
    (cos, cos, cos),
    (cosh, cosh, cosh),
    (sinh, sinh, sinh),
    (abs, abs, fabs),
    (floor, floor, floor),
    (ceil, ceil, ceil),
    (round, round, round),
);

#[cfg(feature = "std")]
#[inline(always)]
pub(crate) fn powf(x: f64, y: f64) -> f64 {
    x.powf(y)
}
#[cfg(not(feature = "std"))]
#[inline(always)]
pub(crate) fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[cfg(feature = "std")]
#[inline(always)]
pub(crate) fn powi(x: f64, n: i32) -> f64 {
    x.powi(n)
}
#[cfg(not(feature = "std"))]
#[inline(always)]
pub(crate) fn powi(x: f64, n: i32) -> f64 {
    libm::pow(x, n as f64)
}

#[cfg(feature = "std")]
#[inline(always)]
pub(crate) fn hypot(x: f64, y: f64) -> f64 {
    x.hypot(y)
}
#[cfg(not(feature = "std"))]
#[inline(always)]
pub(crate) fn hypot(x: f64, y: f64) -> f64 {
    libm::hypot(x, y)
}

/// asinh(x) = ln(x + sqrt(x² + 1)), stable for the x ≥ 0 uses in this crate.
#[inline(always)]
pub(crate) fn asinh(x: f64) -> f64 {
    #[cfg(feature = "std")]
    {
        x.asinh()
    }
    #[cfg(not(feature = "std"))]
    {
        libm::asinh(x)
    }
}

/// ln(cosh x) without overflow: |x| + ln((1 + e^{-2|x|}) / 2).
#[inline(always)]
pub(crate) fn ln_cosh(x: f64) -> f64 {
    let a = abs(x);
    a + ln_1p(exp(-2.0 * a)) - core::f64::consts::LN_2
}

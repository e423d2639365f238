//! The Fresnel-type integral `F(x) = ∫₀¹ exp{ixt²} dt` and its large-`x` structure.
//!
//! For `x > 0` the contour from `t = 1` can be rotated onto the steepest-descent
//! path `t² = 1 + is/x`, which gives the exact split
//!
//! ```text
//! F(x) = ½√(π/x)·e^{iπ/4} − (i e^{ix} / 2x)·T(x),
//! T(x) = ∫₀^∞ e^{−s} (1 + is/x)^{−1/2} ds.
//! ```
//!
//! Expanding the square root under the integral reproduces the classical
//! divergent series `T(x) ~ Σ (−i)ⁿ Γ(n+½)/(Γ(½) xⁿ)`. `T` itself is smooth
//! and non-oscillatory, so a handful of Gauss panels evaluate it to rounding.

use core::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use super::gauss::gl20;
use super::quadrature::oscillatory_quadrature;
use super::QuadTolerance;
use crate::error::{domain, Result};

/// Below this `|x|` the Taylor series is used directly.
pub const SERIES_LIMIT: f64 = 2.0;
/// From this `x` on, [`fresnel_raw`] uses the steepest-descent integral.
pub const ASYMPTOTIC_SWITCH: f64 = 30.0;
/// From this `x` on, the optimally truncated series for `T` is below 1e-17.
const FAST_SERIES_LIMIT: f64 = 40.0;

const LAPLACE_PANELS: [f64; 8] = [0.0, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 48.0];

fn cis(phase: f64) -> Complex64 {
    Complex64::new(phase.cos(), phase.sin())
}

/// `½√(π/x)·e^{iπ/4}`, the contribution of the stationary point `t = 0`.
pub fn fresnel_leading(x: f64) -> Complex64 {
    cis(FRAC_PI_4) * (0.5 * (PI / x).sqrt())
}

/// `∫₀¹ exp{ixt²} dt`, accurate to about 1e-13 relative for any finite `x`.
///
/// Uses the Taylor series for `|x| < 2`, adaptive quadrature on the band
/// `2 ≤ |x| < 30` and the steepest-descent integral beyond. Negative `x` is
/// handled through `F(−x) = conj F(x)`.
pub fn fresnel_raw(x: f64) -> Result<Complex64> {
    if !x.is_finite() {
        return Err(domain("fresnel_raw: argument must be finite"));
    }
    let ax = x.abs();
    let v = if ax < SERIES_LIMIT {
        taylor(ax)
    } else if ax < ASYMPTOTIC_SWITCH {
        let tol = QuadTolerance {
            rel_tol: 1e-14,
            ..QuadTolerance::default()
        };
        oscillatory_quadrature(0.0, 1.0, 0.0, 1.0, 0.0, ax, tol)?
    } else {
        fresnel_leading(ax) - Complex64::i() * cis(ax) * laplace_tail(ax, false) / (2.0 * ax)
    };
    Ok(if x < 0.0 { v.conj() } else { v })
}

/// A truncated asymptotic series with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticValue {
    pub value: Complex64,
    /// Magnitude of the first omitted term.
    pub error_estimate: f64,
    /// Correction terms actually summed (may be fewer than requested).
    pub terms_used: usize,
}

/// Large-`x` series for [`fresnel_raw`] with `n_terms` correction terms:
///
/// ```text
/// ½√(π/x)e^{iπ/4} − (i/2)e^{ix} Σ_{n<n_terms} (−i)ⁿ Γ(n+½) / (Γ(½) x^{n+1})
/// ```
///
/// The series diverges; if `n_terms` runs past the smallest term it is cut
/// there instead.
pub fn fresnel_asymptotic(x: f64, n_terms: usize) -> Result<AsymptoticValue> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(domain("fresnel_asymptotic: series is derived for x > 0"));
    }
    let mut sum = Complex64::new(0.0, 0.0);
    // coefficient (−i)ⁿ Γ(n+½)/Γ(½) / x^{n+1}
    let mut term = Complex64::new(1.0 / x, 0.0);
    let mut used = 0;
    while used < n_terms {
        let next = term * Complex64::new(0.0, -(used as f64 + 0.5) / x);
        if next.norm() >= term.norm() {
            // `term` is the smallest one: optimal truncation stops before it
            break;
        }
        sum += term;
        used += 1;
        term = next;
    }
    let value = fresnel_leading(x) - Complex64::new(0.0, 0.5) * cis(x) * sum;
    Ok(AsymptoticValue {
        value,
        error_estimate: 0.5 * term.norm(),
        terms_used: used,
    })
}

/// `T(x) = ∫₀^∞ e^{−s}(1 + is/x)^{−1/2} ds` for `x > 0`.
///
/// `T → 1` as `x → ∞`; it is the factor multiplying each boundary term of
/// a Gaussian-phase integral.
pub fn fresnel_tail_factor(x: f64) -> Result<Complex64> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(domain("fresnel_tail_factor: requires x > 0"));
    }
    Ok(tail_factor(x))
}

pub(crate) fn tail_factor(x: f64) -> Complex64 {
    if x >= FAST_SERIES_LIMIT {
        series_tail(x, false)
    } else if x >= SERIES_LIMIT {
        laplace_tail(x, false)
    } else {
        tail_from_taylor(x)
    }
}

/// `T(x) − 1`, without cancellation for large `x`.
pub(crate) fn tail_remainder(x: f64) -> Complex64 {
    if x >= FAST_SERIES_LIMIT {
        series_tail(x, true)
    } else if x >= SERIES_LIMIT {
        laplace_tail(x, true)
    } else {
        tail_from_taylor(x) - 1.0
    }
}

fn tail_from_taylor(x: f64) -> Complex64 {
    if x == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    // invert F = lead − i e^{ix} T / (2x)
    (fresnel_leading(x) - taylor(x)) * Complex64::new(0.0, -2.0 * x) * cis(-x)
}

/// Σ (ix)ⁿ / (n!(2n+1)); converges for all x but cancels badly past |x| ≈ 2.
pub(crate) fn taylor(x: f64) -> Complex64 {
    let ix = Complex64::new(0.0, x);
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut n = 1u32;
    loop {
        term = term * ix / n as f64;
        let add = term / (2 * n + 1) as f64;
        sum += add;
        if add.norm() < 1e-18 * sum.norm() || n > 200 {
            return sum;
        }
        n += 1;
    }
}

/// Gauss panels on the Laplace integral; panel edges keep the branch point at
/// `s = ix` well outside each Bernstein ellipse for `x ≥ 2`.
fn laplace_tail(x: f64, minus_one: bool) -> Complex64 {
    let f = |s: f64| {
        let z = Complex64::new(0.0, s / x);
        let w = (Complex64::new(1.0, 0.0) + z).sqrt();
        let g = if minus_one {
            // 1/w − 1 = −z / (w (1 + w))
            -z / (w * (w + 1.0))
        } else {
            w.inv()
        };
        g * (-s).exp()
    };
    LAPLACE_PANELS
        .windows(2)
        .map(|p| gl20(p[0], p[1], f, Complex64::new(0.0, 0.0)))
        .fold(Complex64::new(0.0, 0.0), |a, b| a + b)
}

/// Optimally truncated Σ (−i)ⁿ Γ(n+½)/(Γ(½) xⁿ); for x ≥ 40 the smallest term
/// is below 1e-17.
fn series_tail(x: f64, minus_one: bool) -> Complex64 {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = if minus_one {
        Complex64::new(0.0, 0.0)
    } else {
        term
    };
    let mut n = 0.0;
    loop {
        let next = term * Complex64::new(0.0, -(n + 0.5) / x);
        if next.norm() >= term.norm() || next.norm() < 1e-18 {
            if next.norm() < term.norm() {
                sum += next;
            }
            return sum;
        }
        sum += next;
        term = next;
        n += 1.0;
    }
}

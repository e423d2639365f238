//! Free evolution of the unit rectangle `ψ₀ = 1` on `[0, 1]`.
//!
//! The amplitude is `Ψ(y,t) = √(α/iπ)·∫₀¹ exp{iα(x−y)²} dx` with
//! `α = m/(2ħt)`. Far from both edges it reduces to two boundary poles,
//!
//! ```text
//! Ψ ≈ √(i/(4πα))·[ e^{iα(y−1)²}/(y−1) − e^{iαy²}/y ],
//! ```
//!
//! so `|Ψ|² ~ 1/y²`: integrable, but with a divergent first moment.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{domain, Result};
use crate::numerics::{integrate_real, GaussianKernel};
use crate::polygon::FarFieldWindow;
use crate::PhysParams;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RectangleState {
    pub left: f64,
    pub right: f64,
    /// Elapsed time since the truncation.
    pub t: f64,
    pub params: PhysParams,
}

impl RectangleState {
    /// The unit rectangle on `[0, 1]`.
    pub fn new(t: f64, params: PhysParams) -> Result<Self> {
        Self::with_edges(0.0, 1.0, t, params)
    }

    pub fn with_edges(left: f64, right: f64, t: f64, params: PhysParams) -> Result<Self> {
        let s = Self {
            left,
            right,
            t,
            params,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if !(self.left.is_finite() && self.right.is_finite() && self.left < self.right) {
            return Err(domain("rectangle edges must be finite with left < right"));
        }
        if !(self.t > 0.0 && self.t.is_finite()) {
            return Err(domain("elapsed time t must be positive and finite"));
        }
        Ok(())
    }

    pub fn alpha(&self) -> f64 {
        self.params.m / (2.0 * self.params.hbar * self.t)
    }

    fn kernel(&self) -> Result<GaussianKernel> {
        self.validate()?;
        GaussianKernel::new(self.alpha())
    }

    /// Initial norm `∫|ψ₀|² = right − left`.
    pub fn width(&self) -> f64 {
        self.right - self.left
    }
}

/// Exact amplitude `Ψ(y, t)`.
///
/// `∫_L^R exp{iα(x−y)²}dx = H(R−y) − H(L−y)` with `H(u) = u·F(αu²)`; the
/// kernel evaluates the difference through the boundary form of `H`, which
/// avoids the cancellation of two nearly equal `H` values far from the support.
pub fn propagate_rectangle(state: &RectangleState, y: f64) -> Result<Complex64> {
    if !y.is_finite() {
        return Err(domain("observation point must be finite"));
    }
    let k = state.kernel()?;
    Ok(k.normalization() * k.segment(0.0, 1.0, state.left, state.right, y))
}

/// Two-pole far-field form with the default window for `state.t`.
pub fn rectangle_tail(state: &RectangleState, y: f64) -> Result<Complex64> {
    rectangle_tail_with(state, y, &FarFieldWindow::for_step(state.t, state.params)?)
}

/// Two-pole far-field form, gated by `window`.
pub fn rectangle_tail_with(state: &RectangleState, y: f64, window: &FarFieldWindow) -> Result<Complex64> {
    let k = state.kernel()?;
    window.check(&k, state.left, state.right, y)?;
    Ok(k.normalization() * (k.edge_leading(state.right - y) - k.edge_leading(state.left - y)))
}

/// Prefactor `C` of the oscillation-averaged tail `|Ψ|² ≈ C·(1/(y−L)² + 1/(y−R)²)`.
pub fn tail_envelope_coefficient(state: &RectangleState) -> f64 {
    1.0 / (4.0 * PI * state.alpha())
}

/// Result of [`rectangle_norm`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormReport {
    /// `∫|Ψ|²` over `[L − Y, R + Y]`.
    pub inner: f64,
    /// Quadrature error estimate of `inner`.
    pub inner_error: f64,
    /// Averaged-envelope integral over `|y|` beyond the window.
    pub remainder: f64,
    /// Half-width `Y` of the numerical window beyond the edges.
    pub reach: f64,
}

impl NormReport {
    pub fn total(&self) -> f64 {
        self.inner + self.remainder
    }
}

/// `∫|Ψ(y,t)|² dy`, numerically over a window reaching `reach` beyond each
/// edge plus the envelope remainder `C·∫(1/u² + 1/(u+w)²)` on each side.
///
/// The oscillating cross term dropped from the remainder integrates to
/// `O(C/(α·w·Y²))`; the default reach makes it negligible at 1e−9.
pub fn rectangle_norm(state: &RectangleState, reach: Option<f64>) -> Result<NormReport> {
    let k = state.kernel()?;
    let alpha = k.alpha();
    let w = state.width();
    let y_reach = match reach {
        Some(r) if r > 0.0 && r.is_finite() => r,
        Some(_) => return Err(domain("reach must be positive and finite")),
        None => (1e4 / (alpha * w)).max(50.0 * w).max(10.0 / alpha.sqrt()),
    };
    let lo = state.left - y_reach;
    let hi = state.right + y_reach;
    // one panel per half oscillation of the two-pole cross term, finer near the support
    let period = PI / (alpha * w);
    let near = (PI / alpha).sqrt();
    let step = period.min(near.max(w / 16.0)).min(w);
    let n = ((hi - lo) / step).ceil() as usize;
    if n > 20_000_000 {
        return Err(domain("norm window too wide for the requested time"));
    }
    let breaks: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
    let norm = k.normalization().norm_sqr();
    let density = |y: f64| norm * k.segment(0.0, 1.0, state.left, state.right, y).norm_sqr();
    let q = integrate_real(density, &breaks, 1e-12, 1e-13, 8 * n + 1024)?;
    let c = tail_envelope_coefficient(state);
    let side = c * (1.0 / y_reach + 1.0 / (y_reach + w));
    Ok(NormReport {
        inner: q.value,
        inner_error: q.error,
        remainder: 2.0 * side,
        reach: y_reach,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::numerics::{fresnel_raw, oscillatory_quadrature, QuadTolerance};

    fn unit(t: f64) -> RectangleState {
        RectangleState::new(t, PhysParams::default()).unwrap()
    }

    #[test]
    fn rejects_bad_time() {
        assert!(RectangleState::new(0.0, PhysParams::default()).is_err());
        assert!(RectangleState::new(-1.0, PhysParams::default()).is_err());
        assert!(RectangleState::with_edges(1.0, 0.0, 1.0, PhysParams::default()).is_err());
    }

    #[test]
    fn short_time_recovers_initial_state() {
        let s = unit(1e-8);
        assert!((propagate_rectangle(&s, 0.5).unwrap().norm() - 1.0).abs() < 1e-3);
        assert!(propagate_rectangle(&s, 1.5).unwrap().norm() < 1e-3);
        assert!(propagate_rectangle(&s, -0.4).unwrap().norm() < 1e-3);
    }

    #[test]
    fn mirror_symmetry_about_centre() {
        let s = unit(1.0);
        let a = propagate_rectangle(&s, 0.8).unwrap();
        let b = propagate_rectangle(&s, 0.2).unwrap();
        assert!((a.norm() - b.norm()).abs() < 1e-14);
    }

    #[test]
    fn matches_fresnel_substitution() {
        // Ψ = N [(1−y)F(α(1−y)²) + yF(αy²)] for y inside the support
        let s = unit(0.3);
        let a = s.alpha();
        let y: f64 = 0.37;
        let direct = GaussianKernel::new(a).unwrap().normalization()
            * (fresnel_raw(a * (1.0 - y).powi(2)).unwrap() * (1.0 - y) + fresnel_raw(a * y * y).unwrap() * y);
        let v = propagate_rectangle(&s, y).unwrap();
        assert!((v - direct).norm() < 1e-12 * v.norm());
    }

    #[test]
    fn matches_oracle_at_ten() {
        let s = unit(1.0);
        let tol = QuadTolerance::new(1e-12).unwrap();
        let q = oscillatory_quadrature(0.0, 1.0, 0.0, 1.0, 10.0, s.alpha(), tol).unwrap();
        let q = q * GaussianKernel::new(s.alpha()).unwrap().normalization();
        let v = propagate_rectangle(&s, 10.0).unwrap();
        assert!((v - q).norm() < 1e-10 * q.norm(), "{v} vs {q}");
    }

    #[test]
    fn tail_gate_rejects_near_field() {
        let s = unit(1.0);
        assert!(matches!(rectangle_tail(&s, 3.0), Err(Error::NearField { .. })));
        assert!(rectangle_tail(&s, 200.0).is_ok());
        assert!(rectangle_tail(&s, -200.0).is_ok());
    }

    #[test]
    fn tail_error_decays_as_inverse_square() {
        let s = unit(1.0);
        let err = |y: f64| {
            let e = propagate_rectangle(&s, y).unwrap();
            (rectangle_tail(&s, y).unwrap() - e).norm() / e.norm()
        };
        let (e200, e2000) = (err(200.0), err(2000.0));
        assert!(e200 <= 10.0 * e2000 * 100.0);
        let slope = (e2000 / e200).ln() / 10f64.ln();
        assert!((slope + 2.0).abs() < 0.1, "slope {slope}");
    }

    #[test]
    fn tail_envelope_is_bounded() {
        let s = unit(1.0);
        let bound = 2.0 * s.t / (PI * PI) * 4.0 * 2.0;
        for i in 0..2000 {
            let y = 100.0 + i as f64 * 0.731;
            let v = rectangle_tail(&s, y).unwrap().norm_sqr() * y * y;
            assert!(v <= bound);
        }
    }

    #[test]
    fn tail_reflects_under_mirror() {
        let s = unit(0.7);
        for y in [150.0, 431.5, 2e3] {
            let a = rectangle_tail(&s, y).unwrap();
            let b = rectangle_tail(&s, 1.0 - y).unwrap();
            assert!((a - b).norm() < 1e-14 * a.norm());
        }
    }

    #[test]
    fn norm_is_preserved() {
        for t in [0.1, 1.0, 10.0] {
            let r = rectangle_norm(&unit(t), None).unwrap();
            assert!((r.total() - 1.0).abs() < 1e-8, "t = {t}: {r:?}");
        }
    }
}

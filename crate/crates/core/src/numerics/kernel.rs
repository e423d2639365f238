//! Closed-form Gaussian-phase integrals of linear functions.
//!
//! With `H(u) = ∫₀ᵘ exp{iαv²} dv = κ·sgn(u) + E(u)`, `κ = ½√(π/α)e^{iπ/4}`,
//! every integral `∫_A^B (s x + c) exp{iα(x−y)²} dx` splits into per-endpoint
//! terms:
//!
//! ```text
//! [ v(x)·E(x−y) + s·ρ(x−y) ]_A^B + (s y + c)·κ·(sgn(B−y) − sgn(A−y)),
//! E(u) = −i e^{iαu²} T(αu²) / (2αu),    ρ(u) = i e^{iαu²} (T(αu²) − 1) / (2α),
//! ```
//!
//! where `v` is the line's value at the endpoint and `T` is
//! [`fresnel_tail_factor`](super::fresnel_tail_factor). `E` carries the value
//! jump at an edge and `ρ` the slope jump; summed over a continuous polygon
//! the `E` terms telescope to the two outer vertices.

use core::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use super::fresnel::{tail_factor, tail_remainder, taylor, SERIES_LIMIT};
use crate::error::{domain, Result};

/// Endpoint contributions at offset `u = x − y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeTerms {
    /// Value-jump weight `E(u)`.
    pub value: Complex64,
    /// Slope-jump weight `ρ(u)`.
    pub slope: Complex64,
    /// `sgn(u)`, zero at `u = 0`.
    pub sign: f64,
}

/// The free kernel `exp{iα(x−y)²}` at fixed phase scale `α = m/(2ħΔt)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianKernel {
    alpha: f64,
}

impl GaussianKernel {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(domain("phase scale alpha must be positive and finite"));
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Propagator prefactor `√(m/(2πiħΔt)) = √(α/(iπ))`.
    pub fn normalization(&self) -> Complex64 {
        Complex64::new(FRAC_PI_4.cos(), -FRAC_PI_4.sin()) * (self.alpha / PI).sqrt()
    }

    /// `κ = ∫₀^∞ exp{iαu²} du = ½√(π/α)·e^{iπ/4}`.
    pub fn half_line(&self) -> Complex64 {
        Complex64::new(FRAC_PI_4.cos(), FRAC_PI_4.sin()) * (0.5 * (PI / self.alpha).sqrt())
    }

    /// Fresnel parameter `αu²` of an offset.
    pub fn fresnel_parameter(&self, u: f64) -> f64 {
        self.alpha * u * u
    }

    pub fn edge(&self, u: f64) -> EdgeTerms {
        let a = self.alpha;
        if u == 0.0 {
            return EdgeTerms {
                value: Complex64::new(0.0, 0.0),
                slope: Complex64::new(0.0, -0.5 / a),
                sign: 0.0,
            };
        }
        let x = a * u * u;
        let sign = u.signum();
        let phase = Complex64::new(x.cos(), x.sin());
        if x >= SERIES_LIMIT {
            let t = tail_factor(x);
            let r = tail_remainder(x);
            EdgeTerms {
                value: Complex64::new(0.0, -1.0) * phase * t / (2.0 * a * u),
                slope: Complex64::new(0.0, 1.0) * phase * r / (2.0 * a),
                sign,
            }
        } else {
            let h = taylor(x) * u;
            let value = h - self.half_line() * sign;
            let t = Complex64::new(0.0, 2.0 * a * u) * value * phase.conj();
            EdgeTerms {
                value,
                slope: Complex64::new(0.0, 1.0) * phase * (t - 1.0) / (2.0 * a),
                sign,
            }
        }
    }

    /// Leading-order value-jump weight `−i e^{iαu²}/(2αu)` (the `T = 1` term).
    pub fn edge_leading(&self, u: f64) -> Complex64 {
        let x = self.alpha * u * u;
        Complex64::new(x.sin(), -x.cos()) / (2.0 * self.alpha * u)
    }

    /// `H(u) = ∫₀ᵘ exp{iαv²} dv`.
    pub fn antiderivative(&self, u: f64) -> Complex64 {
        if self.alpha * u * u < SERIES_LIMIT {
            return taylor(self.alpha * u * u) * u;
        }
        let e = self.edge(u);
        e.value + self.half_line() * e.sign
    }

    /// Exact `∫_lo^hi (slope·x + intercept)·exp{iα(x−y)²} dx`; the
    /// coefficients may be real or complex.
    pub fn segment(
        &self,
        slope: impl Into<Complex64>,
        intercept: impl Into<Complex64>,
        lo: f64,
        hi: f64,
        y: f64,
    ) -> Complex64 {
        let (slope, intercept) = (slope.into(), intercept.into());
        let (el, eh) = (self.edge(lo - y), self.edge(hi - y));
        let (vl, vh) = (slope * lo + intercept, slope * hi + intercept);
        (eh.value * vh - el.value * vl)
            + (eh.slope - el.slope) * slope
            + self.half_line() * ((slope * y + intercept) * (eh.sign - el.sign))
    }
}

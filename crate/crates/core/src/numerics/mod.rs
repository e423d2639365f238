//! Fresnel integrals, the Gaussian-phase kernel and the quadrature oracle.

pub mod fresnel;
mod gauss;
pub mod kernel;
pub mod quadrature;

pub use fresnel::{fresnel_asymptotic, fresnel_leading, fresnel_raw, fresnel_tail_factor, AsymptoticValue};
pub use kernel::{EdgeTerms, GaussianKernel};
pub use quadrature::{gaussian_phase_quadrature, integrate_real, oscillatory_quadrature, RealQuad};

pub(crate) use gauss::{GL20_NODES, GL20_WEIGHTS};

use crate::error::{domain, Result};

/// Accuracy controls for the adaptive oscillatory quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadTolerance {
    /// Target relative error of the integral.
    pub rel_tol: f64,
    /// Hard cap on the number of panels; exceeding it is an accuracy error.
    pub max_subdivisions: usize,
}

impl Default for QuadTolerance {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            max_subdivisions: 1 << 20,
        }
    }
}

impl QuadTolerance {
    pub fn new(rel_tol: f64) -> Result<Self> {
        let t = Self {
            rel_tol,
            ..Self::default()
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(domain("relative tolerance must lie in (0, 1)"));
        }
        if self.max_subdivisions == 0 {
            return Err(domain("max_subdivisions must be positive"));
        }
        Ok(())
    }
}

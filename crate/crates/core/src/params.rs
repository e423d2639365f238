#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{domain, Result};

/// Mass and reduced Planck constant. Dimensionless units default to 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysParams {
    pub m: f64,
    pub hbar: f64,
}

impl Default for PhysParams {
    fn default() -> Self {
        Self { m: 1.0, hbar: 1.0 }
    }
}

impl PhysParams {
    pub fn new(m: f64, hbar: f64) -> Result<Self> {
        let p = Self { m, hbar };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.m > 0.0 && self.m.is_finite()) {
            return Err(domain("mass must be positive and finite"));
        }
        if !(self.hbar > 0.0 && self.hbar.is_finite()) {
            return Err(domain("hbar must be positive and finite"));
        }
        Ok(())
    }

    /// Phase scale `α = m / (2ħ Δt)` of the free kernel `exp{iα(x−y)²}`.
    pub fn alpha(&self, dt: f64) -> Result<f64> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(domain("time step must be positive and finite"));
        }
        Ok(self.m / (2.0 * self.hbar * dt))
    }

    /// Length scale `√(ħ t / m)` of the Fresnel boundary layer.
    pub fn diffusion_length(&self, t: f64) -> f64 {
        (self.hbar * t / self.m).sqrt()
    }
}

//! Free evolution on a padded periodic grid by the exact Fourier multiplier
//! `e^{−iħk²Δt/(2m)}`.
//!
//! Fine for smooth, well-contained states. A sharply truncated state has a
//! `1/k²` momentum tail; the fast part of it crosses the padding within one
//! period and wraps around, which the outer-band monitor reports as
//! [`Error::Padding`].

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::{ComplexField, GridKind};
use crate::error::{domain, Error, Result};
use crate::PhysParams;

/// Largest probability tolerated in the outer quarter of the periodic box.
pub const PADDING_LIMIT: f64 = 1e-8;

/// Reusable plan for one grid and one time step.
pub struct SpectralPropagator {
    len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    multiplier: Vec<Complex64>,
    dx: f64,
    x0: f64,
}

impl SpectralPropagator {
    pub fn new(field: &ComplexField, dt: f64, params: PhysParams) -> Result<Self> {
        if field.kind() != GridKind::Periodic {
            return Err(domain("spectral propagation needs a periodic grid"));
        }
        params.validate()?;
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(domain("time step must be positive and finite"));
        }
        let len = field.len();
        let mut planner = FftPlanner::new();
        let dk = 2.0 * core::f64::consts::PI / (len as f64 * field.dx());
        let c = params.hbar * dt / (2.0 * params.m);
        let scale = 1.0 / len as f64;
        let multiplier = (0..len)
            .map(|j| {
                let k = if j < len.div_ceil(2) { j as f64 } else { j as f64 - len as f64 } * dk;
                Complex64::from_polar(scale, -c * k * k)
            })
            .collect();
        Ok(Self {
            len,
            forward: planner.plan_fft_forward(len),
            inverse: planner.plan_fft_inverse(len),
            multiplier,
            dx: field.dx(),
            x0: field.x(0),
        })
    }

    /// One period of free evolution, then the outer-band check.
    pub fn apply(&self, field: &ComplexField) -> Result<ComplexField> {
        if field.len() != self.len || field.dx() != self.dx || field.x(0) != self.x0 {
            return Err(domain("field does not match the propagator's grid"));
        }
        let mut buf = field.amps().to_vec();
        self.forward.process(&mut buf);
        for (b, m) in buf.iter_mut().zip(&self.multiplier) {
            *b *= m;
        }
        self.inverse.process(&mut buf);
        let out = ComplexField::periodic_from_amps(self.x0, self.dx, buf)?;
        let half = -self.x0;
        let mass = out.mass_where(|x| x.abs() > 0.75 * half);
        if mass > PADDING_LIMIT {
            return Err(Error::Padding {
                mass,
                limit: PADDING_LIMIT,
            });
        }
        Ok(out)
    }
}

/// Exact free evolution of a periodic-grid field over `dt`.
pub fn spectral_propagate(field: &ComplexField, dt: f64, params: PhysParams) -> Result<ComplexField> {
    SpectralPropagator::new(field, dt, params)?.apply(field)
}

//! One short-time kernel step with a bounded potential.
//!
//! For small `Δt` the propagator is the free kernel with the potential phase
//! applied to the integrand:
//!
//! ```text
//! Ψ(y,Δt) ≈ √(α/(iπ)) ∫ ψ(x)·e^{−iV(x)Δt/ħ}·e^{iα(x−y)²} dx.
//! ```
//!
//! The phase has unit modulus, so endpoint jumps of `ψ` survive unchanged and
//! the tail classes of the free problem carry over.

use alloc::vec::Vec;

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{domain, Error, Result};
use crate::numerics::{gaussian_phase_quadrature, GaussianKernel, QuadTolerance};
use crate::polygon::{propagate_polygon, Method, Polygon};
use crate::PhysParams;

/// Largest `Δt·sup|V|` (in units of ħ) accepted by the short-time kernel.
pub const VALIDITY_LIMIT: f64 = 0.1;

/// A bounded potential `V(x)` with its bound `sup|V|`.
#[derive(Clone, Copy)]
pub struct PotentialSpec<F> {
    v: F,
    bound: f64,
}

impl<F: Fn(f64) -> f64> PotentialSpec<F> {
    pub fn new(v: F, bound: f64) -> Result<Self> {
        if !(bound >= 0.0 && bound.is_finite()) {
            return Err(domain("potential bound must be finite and non-negative"));
        }
        Ok(Self { v, bound })
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    /// `V(x)`, checked against the declared bound.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let v = (self.v)(x);
        if !(v.abs() <= self.bound * (1.0 + 1e-12)) {
            return Err(domain(alloc::format!(
                "potential {v} at x = {x} exceeds declared bound {}",
                self.bound
            )));
        }
        Ok(v)
    }
}

impl<F> core::fmt::Debug for PotentialSpec<F> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("PotentialSpec").field("bound", &self.bound).finish_non_exhaustive()
    }
}

/// Named potentials; each is bounded by `|amplitude|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    /// `V₀·exp(−x²)`.
    Gaussian,
    /// `−V₀` on `|x| ≤ 1`, zero outside.
    Well,
    /// `V₀·min(x², 1)`.
    HarmonicClipped,
}

impl Builtin {
    pub fn potential(self, amplitude: f64) -> Result<PotentialSpec<impl Fn(f64) -> f64 + Copy>> {
        if !amplitude.is_finite() {
            return Err(domain("potential amplitude must be finite"));
        }
        PotentialSpec::new(
            move |x: f64| match self {
                Builtin::Gaussian => amplitude * (-x * x).exp(),
                Builtin::Well if x.abs() <= 1.0 => -amplitude,
                Builtin::Well => 0.0,
                Builtin::HarmonicClipped => amplitude * (x * x).min(1.0),
            },
            amplitude.abs(),
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Gaussian => "gaussian",
            Builtin::Well => "well",
            Builtin::HarmonicClipped => "harmonic-clipped",
        }
    }
}

/// Sign and scale of the potential phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhaseConvention {
    /// `e^{−iV(x)Δt/ħ}`, the standard short-time kernel.
    #[default]
    Standard,
    /// `e^{+iħΔt·V(x)}`, the form as literally printed in the source text.
    Literal,
}

impl PhaseConvention {
    fn phase(self, v: f64, dt: f64, hbar: f64) -> f64 {
        match self {
            PhaseConvention::Standard => -v * dt / hbar,
            PhaseConvention::Literal => hbar * dt * v,
        }
    }
}

/// How the integral over each segment is evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PotentialMethod {
    /// Adaptive oracle quadrature of `(a_j x + b_j)e^{iφ(x)}e^{iα(x−y)²}`.
    Quadrature(QuadTolerance),
    /// The phase-modulated state resampled on `refine` sub-segments per
    /// segment, then propagated in closed form. Cheap at any `y`.
    Resampled { refine: usize },
}

fn check_validity<F: Fn(f64) -> f64>(v: &PotentialSpec<F>, dt: f64, params: PhysParams) -> Result<()> {
    params.validate()?;
    params.alpha(dt)?;
    let product = dt * v.bound / params.hbar;
    if product > VALIDITY_LIMIT {
        return Err(Error::Validity {
            product,
            limit: VALIDITY_LIMIT,
        });
    }
    Ok(())
}

/// `Ψ(y, Δt)` for polygon initial data under `V` after one short step.
pub fn propagate_short_time_with_potential<F: Fn(f64) -> f64>(
    initial: &Polygon,
    v: &PotentialSpec<F>,
    dt: f64,
    y: f64,
    params: PhysParams,
    convention: PhaseConvention,
    method: PotentialMethod,
) -> Result<Complex64> {
    check_validity(v, dt, params)?;
    if !y.is_finite() {
        return Err(domain("observation point must be finite"));
    }
    match method {
        PotentialMethod::Quadrature(tol) => {
            let k = GaussianKernel::new(params.alpha(dt)?)?;
            // validate the bound on the vertices before integrating
            for x in initial.vertices() {
                v.eval(x)?;
            }
            let modulate = |x: f64| {
                let ph = convention.phase((v.v)(x), dt, params.hbar);
                Complex64::new(ph.cos(), ph.sin())
            };
            let mut total = Complex64::new(0.0, 0.0);
            for (j, &(s, c)) in initial.coeffs().iter().enumerate() {
                if s == Complex64::new(0.0, 0.0) && c == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let (x0, x1) = (initial.vertex(j), initial.vertex(j + 1));
                total += gaussian_phase_quadrature(x0, x1, y, k.alpha(), tol, |x| (s * x + c) * modulate(x))?;
            }
            Ok(k.normalization() * total)
        }
        PotentialMethod::Resampled { refine } => {
            let fine = modulated_polygon(initial, v, dt, params, convention, refine)?;
            propagate_polygon(&fine, y, dt, params, Method::Exact)
        }
    }
}

/// `ψ(x)e^{iφ(x)}` sampled on `refine·N` segments.
pub fn modulated_polygon<F: Fn(f64) -> f64>(
    initial: &Polygon,
    v: &PotentialSpec<F>,
    dt: f64,
    params: PhysParams,
    convention: PhaseConvention,
    refine: usize,
) -> Result<Polygon> {
    check_validity(v, dt, params)?;
    if refine == 0 {
        return Err(domain("refine must be at least 1"));
    }
    let n = initial.segments() * refine;
    let a = initial.a();
    let mut values = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let x = if i == n { 0.0 } else { -a + a * i as f64 / n as f64 };
        // endpoints take the one-sided values of the initial polygon
        let psi = if i == n { initial.values()[initial.segments()] } else { initial.value_at(x) };
        let ph = convention.phase(v.eval(x)?, dt, params.hbar);
        values.push(psi * Complex64::new(ph.cos(), ph.sin()));
    }
    Polygon::new(a, values)
}

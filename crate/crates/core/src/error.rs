use alloc::string::String;

use num_complex::Complex64;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// Observation point too close to the support for the asymptotic expansion.
    #[error("near-field point y = {y}: Fresnel parameter {fresnel:.3e} below {required:.3e}; use quadrature")]
    NearField { y: f64, fresnel: f64, required: f64 },

    /// Adaptive quadrature ran out of subdivisions.
    #[error("quadrature did not converge: estimate {estimate}, achieved relative error {achieved:.3e} after {subdivisions} panels")]
    Accuracy {
        estimate: Complex64,
        achieved: f64,
        subdivisions: usize,
    },

    /// A fit could not be formed (too few points, zero density, ...).
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    /// A fit was formed but is not good enough to support a conclusion.
    #[error("inconclusive fit: r2 = {r2:.6}")]
    Inconclusive { r2: f64 },

    /// Probability retained by a projection fell below the extinction floor.
    #[error("extinction: retained probability {retained:.3e} at step {step}")]
    Extinction { retained: f64, step: usize },

    /// Probability reached the edge of the periodic grid.
    #[error("padding too small: {mass:.3e} probability in the outer band exceeds {limit:.1e}")]
    Padding { mass: f64, limit: f64 },

    /// Time step too long for the short-time kernel with a potential.
    #[error("short-time validity: dt * sup|V| = {product:.3e} exceeds {limit}")]
    Validity { product: f64, limit: f64 },
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

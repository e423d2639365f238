//! Free one-dimensional Schrödinger propagation of truncated wave functions.
//!
//! The crate is `no_std` (with `alloc`) apart from the spectral grid engine,
//! which needs an FFT and is gated behind the default `std` feature.
//!
//! Layout:
//! - [`numerics`]: the Gaussian-phase kernel `∫ (a x + b) exp{iα(x−y)²} dx` in
//!   exact, asymptotic and adaptive-quadrature form.
//! - [`rectangle`]: the exactly solvable unit rectangle.
//! - [`polygon`]: piecewise-linear initial data, segment asymptotics and the
//!   telescoped boundary formula.
//! - [`moments`]: tail-exponent fits, truncated moments, interval speeds and
//!   momentum densities.
//! - [`potential`]: the short-time kernel with a bounded potential.
//! - [`zeno`]: repeated truncation protocols and survival statistics.
#![cfg_attr(not(feature = "std"), no_std)]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod error;
pub mod moments;
pub mod numerics;
pub mod polygon;
pub mod potential;
pub mod rectangle;
pub mod stats;
pub mod zeno;

mod params;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use params::PhysParams;

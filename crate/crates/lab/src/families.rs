//! Initial polygons: built-in shapes, seeded random families and sampled files.

use std::f64::consts::PI;

use qcl_core::polygon::{Polygon, Shape};
use qcl_core::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{EndsArg, PolygonSource, ShapeArg};
use crate::error::Result;
use crate::io::read_samples;

/// Normalized polygon with `n` segments and random vertex values.
///
/// Interior values have real and imaginary parts uniform in `[−1, 1]`.
/// With [`EndsArg::Free`] each end value has modulus in `[0.5, 1]` and a
/// uniform phase, so both edges carry a clear jump; with [`EndsArg::Zero`]
/// both ends are exactly zero.
pub fn random_polygon(rng: &mut impl Rng, a: f64, n: usize, ends: EndsArg) -> Result<Polygon> {
    let mut values: Vec<Complex64> = (0..=n)
        .map(|_| Complex64::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0)))
        .collect();
    for j in [0, n] {
        values[j] = match ends {
            EndsArg::Free => Complex64::from_polar(rng.random_range(0.5..=1.0), rng.random_range(0.0..2.0 * PI)),
            EndsArg::Zero => Complex64::new(0.0, 0.0),
        };
    }
    Ok(Polygon::new(a, values)?.normalized()?)
}

/// `count` polygons from one seeded stream; member `k` depends only on
/// `seed` and `k`.
pub fn random_family(seed: u64, count: usize, a: f64, n: usize, ends: EndsArg) -> Result<Vec<Polygon>> {
    (0..count)
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            random_polygon(&mut rng, a, n, ends)
        })
        .collect()
}

/// The polygon selected on the command line.
pub fn build(source: &PolygonSource) -> Result<Polygon> {
    if let Some(path) = &source.samples {
        let s = read_samples(path)?;
        return Ok(Polygon::from_samples(&s.xs, &s.values)?);
    }
    let (a, n) = (source.a, source.n_segments);
    Ok(match source.shape {
        ShapeArg::Constant => Polygon::builtin(Shape::Constant, a, n)?,
        ShapeArg::Ramp => Polygon::builtin(Shape::Ramp, a, n)?,
        ShapeArg::HalfSine => Polygon::builtin(Shape::HalfSine, a, n)?,
        ShapeArg::Random => random_family(source.seed, 1, a, n, source.ends)?.remove(0),
    })
}

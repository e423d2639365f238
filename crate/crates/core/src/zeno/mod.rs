//! Repeated truncation: propagate for a period `Δt`, project onto the
//! unilluminated interval `[−a, 0]`, renormalize, repeat until the horizon.
//!
//! Two projections are provided. The sharp one multiplies by the indicator of
//! the interval and leaves jumps at the endpoints; the tapered one multiplies
//! by a cosine half-ramp of width `w` and leaves a continuous state.
//!
//! The default engine propagates only the interval (see [`Engine::Interval`]):
//! after a projection the state vanishes outside `[−a, 0]`, so nothing is lost
//! by never representing the exterior. The padded spectral engine is kept as a
//! cross-check for states whose momentum tail fits the grid.
//!
//! First-step leaks are reported in parts: exterior probability after the free
//! step (both from `1 − interior` and from direct integration of the exterior
//! density), the probability shaved off by the taper inside the interval, and
//! the split of the exterior part at distance `δ` into far field and boundary
//! layer.

mod interval;
#[cfg(feature = "std")]
mod spectral;

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{domain, Error, Result};
use crate::polygon::default_delta;
use crate::stats::loglog_fit;
use crate::PhysParams;

use interval::{interpolate_cubic, simpson, IntervalGrid};
#[cfg(feature = "std")]
pub use spectral::{spectral_propagate, SpectralPropagator, PADDING_LIMIT};

/// Projections retaining less than this are treated as extinction.
pub const EXTINCTION_FLOOR: f64 = 1e-15;

/// Largest tolerated `|exterior_direct − (1 − interior)|` on the first step.
pub const ACCOUNTING_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    /// `n` nodes `x_i = x₀ + i·dx` on a periodic box; rectangle-rule norm.
    Periodic,
    /// `n + 1` nodes including both ends of a closed interval (`n` even);
    /// Simpson-rule norm, cubic interpolation.
    Closed,
}

/// A wave function sampled on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    x0: f64,
    dx: f64,
    /// Exact right end of a closed grid.
    hi: f64,
    amps: Vec<Complex64>,
    kind: GridKind,
}

impl ComplexField {
    /// `n` points on the periodic box `[−L, L)`.
    pub fn periodic(half_width: f64, n: usize, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) || n < 2 {
            return Err(domain("periodic grid needs L > 0 and at least two points"));
        }
        let dx = 2.0 * half_width / n as f64;
        let amps = (0..n).map(|i| f(-half_width + i as f64 * dx)).collect();
        Self::periodic_from_amps(-half_width, dx, amps)
    }

    pub fn periodic_from_amps(x0: f64, dx: f64, amps: Vec<Complex64>) -> Result<Self> {
        if !(dx > 0.0 && x0.is_finite() && dx.is_finite()) || amps.len() < 2 {
            return Err(domain("invalid periodic grid"));
        }
        let hi = x0 + dx * (amps.len() - 1) as f64;
        Ok(Self {
            x0,
            dx,
            hi,
            amps,
            kind: GridKind::Periodic,
        })
    }

    /// `n + 1` nodes on `[lo, hi]`, `n` even and at least 8.
    pub fn closed(lo: f64, hi: f64, n: usize, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        if !(lo < hi && lo.is_finite() && hi.is_finite()) {
            return Err(domain("closed grid needs finite lo < hi"));
        }
        let dx = (hi - lo) / n as f64;
        let amps = (0..=n).map(|i| f(if i == n { hi } else { lo + i as f64 * dx })).collect();
        Self::closed_from_amps(lo, hi, amps)
    }

    pub fn closed_from_amps(lo: f64, hi: f64, amps: Vec<Complex64>) -> Result<Self> {
        let n = amps.len().saturating_sub(1);
        if n < 8 || n % 2 != 0 {
            return Err(domain("closed grid needs an even number of cells, at least 8"));
        }
        if !(lo < hi) {
            return Err(domain("closed grid needs lo < hi"));
        }
        Ok(Self {
            x0: lo,
            dx: (hi - lo) / n as f64,
            hi,
            amps,
            kind: GridKind::Closed,
        })
    }

    /// The normalized half-sine `√(2/a)·sin(π(x+a)/a)` on `[−a, 0]`, with
    /// exact zeros at both ends.
    pub fn half_sine(a: f64, n: usize) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(domain("interval width a must be positive and finite"));
        }
        let c = (2.0 / a).sqrt();
        let mut f = Self::closed(-a, 0.0, n, |x| Complex64::new(c * (PI * (x + a) / a).sin(), 0.0))?;
        f.amps[0] = Complex64::new(0.0, 0.0);
        f.amps[n] = Complex64::new(0.0, 0.0);
        Ok(f)
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn x(&self, i: usize) -> f64 {
        if self.kind == GridKind::Closed && i + 1 == self.amps.len() {
            self.hi
        } else {
            self.x0 + i as f64 * self.dx
        }
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amps(self) -> Vec<Complex64> {
        self.amps
    }

    /// `∫|ψ|²` by the grid's rule.
    pub fn norm_sqr(&self) -> f64 {
        self.mass_weighted(|_| 1.0)
    }

    /// `∫|ψ|²` over the points where `pred` holds.
    pub fn mass_where(&self, pred: impl Fn(f64) -> bool) -> f64 {
        self.mass_weighted(|x| if pred(x) { 1.0 } else { 0.0 })
    }

    fn mass_weighted(&self, w: impl Fn(f64) -> f64) -> f64 {
        match self.kind {
            GridKind::Periodic => self.amps.iter().enumerate().map(|(i, a)| w(self.x(i)) * a.norm_sqr()).sum::<f64>() * self.dx,
            GridKind::Closed => simpson(self.amps.len() - 1, self.dx, |i| w(self.x(i)) * self.amps[i].norm_sqr()),
        }
    }

    /// Scale to unit norm; returns the norm before scaling.
    pub fn renormalize(&mut self) -> Result<f64> {
        let n = self.norm_sqr();
        if !(n > 0.0 && n.is_finite()) {
            return Err(domain("cannot renormalize a zero or non-finite field"));
        }
        let s = 1.0 / n.sqrt();
        for a in self.amps.iter_mut() {
            *a *= s;
        }
        Ok(n)
    }

    /// Value between nodes: cubic on closed grids, linear on periodic ones;
    /// zero off the grid.
    pub fn interpolate(&self, x: f64) -> Complex64 {
        match self.kind {
            GridKind::Closed => interpolate_cubic(&self.amps, self.x0, self.dx, x),
            GridKind::Periodic => {
                let t = (x - self.x0) / self.dx;
                if !(t >= 0.0 && t <= (self.amps.len() - 1) as f64) {
                    return Complex64::new(0.0, 0.0);
                }
                let i = (t.floor() as usize).min(self.amps.len() - 2);
                let s = t - i as f64;
                self.amps[i] * (1.0 - s) + self.amps[i + 1] * s
            }
        }
    }
}

/// Projection window for `[−a, 0]`: the indicator for `w = 0`, otherwise 1 on
/// `[−a + w, −w]` with cosine half-ramps `½(1 − cos(πd/w))` at distance `d`
/// inside either endpoint, and 0 outside.
pub fn window(x: f64, a: f64, w: f64) -> f64 {
    let d = (x + a).min(-x);
    let slack = 1e-12 * a;
    if d < -slack {
        0.0
    } else if w == 0.0 {
        1.0
    } else if d <= 0.0 {
        0.0
    } else if d < w {
        0.5 * (1.0 - (PI * d / w).cos())
    } else {
        1.0
    }
}

fn project(field: &ComplexField, a: f64, w: f64, step: usize) -> Result<(ComplexField, f64)> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(domain("interval width a must be positive and finite"));
    }
    let mut out = field.clone();
    for (i, v) in out.amps.iter_mut().enumerate() {
        *v *= window(field.x(i), a, w);
    }
    let retained = out.norm_sqr();
    if !(retained >= EXTINCTION_FLOOR) {
        return Err(Error::Extinction { retained, step });
    }
    let s = 1.0 / retained.sqrt();
    for v in out.amps.iter_mut() {
        *v *= s;
    }
    Ok((out, retained))
}

/// Zero the field outside `[−a, 0]` and renormalize. Returns the projected
/// field and the probability that was inside.
pub fn project_sharp(field: &ComplexField, a: f64) -> Result<(ComplexField, f64)> {
    project(field, a, 0.0, 0)
}

/// Multiply by the tapered [`window`] of width `w` and renormalize. Returns
/// the projected field and `∫|Wψ|²`.
pub fn project_tapered(field: &ComplexField, a: f64, w: f64) -> Result<(ComplexField, f64)> {
    if !(w >= 0.0 && w < 0.5 * a) {
        return Err(domain("taper width must satisfy 0 ≤ w < a/2"));
    }
    project(field, a, w, 0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mode {
    Sharp,
    /// Cosine half-ramp of the given width; width 0 coincides with `Sharp`.
    Tapered { width: f64 },
}

impl Mode {
    /// Tapered with the default width `a/8`.
    pub fn tapered_default(a: f64) -> Self {
        Mode::Tapered { width: a / 8.0 }
    }

    pub fn width(self) -> f64 {
        match self {
            Mode::Sharp => 0.0,
            Mode::Tapered { width } => width,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Sharp => "sharp",
            Mode::Tapered { .. } => "tapered",
        }
    }
}

/// Measure every `period` on `[−a, 0]` until `horizon`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementProtocol {
    pub a: f64,
    pub mode: Mode,
    pub period: f64,
    pub horizon: f64,
}

impl MeasurementProtocol {
    pub fn new(a: f64, mode: Mode, period: f64, horizon: f64) -> Result<Self> {
        let p = Self {
            a,
            mode,
            period,
            horizon,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0 && self.a.is_finite()) {
            return Err(domain("interval width a must be positive and finite"));
        }
        if !(self.period > 0.0 && self.period <= self.horizon * (1.0 + 1e-12) && self.horizon.is_finite()) {
            return Err(domain("need 0 < period ≤ horizon"));
        }
        let w = self.mode.width();
        if !(w >= 0.0 && w < 0.5 * self.a) {
            return Err(domain("taper width must satisfy 0 ≤ w < a/2"));
        }
        self.steps().map(|_| ())
    }

    /// `n = T/Δt`, which must be an integer.
    pub fn steps(&self) -> Result<usize> {
        let n = (self.horizon / self.period).round();
        if !(n >= 1.0) || (n * self.period - self.horizon).abs() > 1e-9 * self.horizon {
            return Err(domain("horizon must be an integer multiple of the period"));
        }
        Ok(n as usize)
    }

    pub fn with_period(&self, period: f64) -> Result<Self> {
        Self::new(self.a, self.mode, period, self.horizon)
    }
}

/// Periods `T/first, T/(2·first), …, T/last` for powers-of-two divisors.
pub fn halving_ladder(horizon: f64, first: usize, last: usize) -> Result<Vec<f64>> {
    if first == 0 || !first.is_power_of_two() || !last.is_power_of_two() || last < first {
        return Err(domain("ladder divisors must be powers of two with first ≤ last"));
    }
    let mut out = Vec::new();
    let mut d = first;
    while d <= last {
        out.push(horizon / d as f64);
        d *= 2;
    }
    Ok(out)
}

/// Interval-engine resolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalOptions {
    /// Cells per unit of `α·a²`; 10 keeps the kernel phase change per cell
    /// near 0.2 rad across the whole interval.
    pub cells_per_phase: f64,
    pub min_cells: usize,
    pub max_cells: usize,
    /// Exterior samples per cell when integrating the exterior density.
    pub oversample: usize,
}

impl Default for IntervalOptions {
    fn default() -> Self {
        Self {
            cells_per_phase: 10.0,
            min_cells: 1024,
            max_cells: 1 << 18,
            oversample: 4,
        }
    }
}

impl IntervalOptions {
    /// Even cell count for a step with kernel parameter `alpha`.
    pub fn cells(&self, alpha: f64, a: f64) -> Result<usize> {
        let want = (self.cells_per_phase * alpha * a * a).ceil().max(self.min_cells as f64);
        if !(want <= self.max_cells as f64) {
            return Err(domain(alloc::format!(
                "interval grid would need {want:.0} cells, above the cap {}",
                self.max_cells
            )));
        }
        let n = want as usize;
        Ok(n + n % 2)
    }
}

/// Padded periodic grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralOptions {
    /// Box half-width in units of `a`; at least 8.
    pub padding: f64,
    pub points: usize,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        Self {
            padding: 8.0,
            points: 1 << 16,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Engine {
    /// Exact kernel restricted to the interval, on a cubic node grid.
    Interval(IntervalOptions),
    /// Fourier multiplier on a padded periodic grid.
    #[cfg(feature = "std")]
    Spectral(SpectralOptions),
}

impl Default for Engine {
    fn default() -> Self {
        Engine::Interval(IntervalOptions::default())
    }
}

/// Components of the first-step loss.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeakBreakdown {
    /// `1 − q₁`.
    pub one_minus_q: f64,
    /// Probability outside `[−a, 0]` after the free step, as `1 − interior`.
    pub exterior: f64,
    /// Same quantity from direct integration of the exterior density.
    pub exterior_direct: f64,
    /// `|exterior_direct − exterior|`.
    pub accounting_gap: f64,
    /// Interior probability removed by the taper (0 for sharp projection).
    pub window_shave: f64,
    /// Exterior probability farther than `delta` from the interval.
    pub far_field: f64,
    /// Exterior probability within `delta` of an endpoint.
    pub boundary_layer: f64,
    pub delta: f64,
}

/// Survival record of one protocol.
#[derive(Debug, Clone, PartialEq)]
pub struct ZenoRun {
    pub protocol: MeasurementProtocol,
    /// `q_k`, probability retained by the `k`-th projection.
    pub survivals: Vec<f64>,
    /// `Π_{j≤k} q_j`.
    pub cumulative: Vec<f64>,
    /// Grid size used (cells of the interval, or points of the periodic box).
    pub grid: usize,
}

impl ZenoRun {
    pub fn steps(&self) -> usize {
        self.survivals.len()
    }

    /// Cumulative survival at the horizon.
    pub fn final_survival(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(1.0)
    }
}

/// Alternate free propagation over `period` with the protocol's projection.
pub fn run_protocol(
    protocol: &MeasurementProtocol,
    initial: &ComplexField,
    engine: &Engine,
    params: PhysParams,
) -> Result<ZenoRun> {
    protocol.validate()?;
    let steps = protocol.steps()?;
    let (survivals, _, grid) = simulate(protocol, initial, engine, params, steps, false)?;
    let mut cumulative = Vec::with_capacity(steps);
    let mut c = 1.0;
    for q in &survivals {
        c *= q;
        cumulative.push(c);
    }
    Ok(ZenoRun {
        protocol: *protocol,
        survivals,
        cumulative,
        grid,
    })
}

/// Leak components of the first period of `protocol`.
pub fn first_step(
    protocol: &MeasurementProtocol,
    initial: &ComplexField,
    engine: &Engine,
    params: PhysParams,
) -> Result<LeakBreakdown> {
    protocol.validate()?;
    let (_, leak, _) = simulate(protocol, initial, engine, params, 1, true)?;
    leak.ok_or_else(|| domain("first-step breakdown unavailable"))
}

fn check_initial(initial: &ComplexField, a: f64) -> Result<()> {
    let outside = initial
        .amps
        .iter()
        .enumerate()
        .any(|(i, v)| window(initial.x(i), a, 0.0) == 0.0 && *v != Complex64::new(0.0, 0.0));
    if outside {
        return Err(domain("initial state must vanish outside [−a, 0]"));
    }
    Ok(())
}

type Simulated = (Vec<f64>, Option<LeakBreakdown>, usize);

fn simulate(
    protocol: &MeasurementProtocol,
    initial: &ComplexField,
    engine: &Engine,
    params: PhysParams,
    steps: usize,
    breakdown: bool,
) -> Result<Simulated> {
    params.validate()?;
    check_initial(initial, protocol.a)?;
    match engine {
        Engine::Interval(opts) => simulate_interval(protocol, initial, opts, params, steps, breakdown),
        #[cfg(feature = "std")]
        Engine::Spectral(opts) => simulate_spectral(protocol, initial, opts, params, steps, breakdown),
    }
}

fn simulate_interval(
    protocol: &MeasurementProtocol,
    initial: &ComplexField,
    opts: &IntervalOptions,
    params: PhysParams,
    steps: usize,
    breakdown: bool,
) -> Result<Simulated> {
    let a = protocol.a;
    let alpha = params.alpha(protocol.period)?;
    let n = opts.cells(alpha, a)?;
    let grid = IntervalGrid::new(a, n, alpha)?;
    let mut p: Vec<Complex64> = (0..=n).map(|i| initial.interpolate(grid.x(i))).collect();
    let norm = grid.simpson(|i| p[i].norm_sqr());
    if !(norm > 0.0) {
        return Err(domain("initial state has zero norm on the interval"));
    }
    let s = 1.0 / norm.sqrt();
    p.iter_mut().for_each(|v| *v *= s);
    let w: Vec<f64> = (0..=n).map(|i| window(grid.x(i), a, protocol.mode.width())).collect();
    let transfer = grid.step_transfer();
    let mut survivals = Vec::with_capacity(steps);
    let mut leak = None;
    for k in 0..steps {
        let mut next = transfer.apply(&p);
        let interior = grid.simpson(|i| next[i].norm_sqr());
        for (v, wi) in next.iter_mut().zip(&w) {
            *v *= wi;
        }
        let retained = grid.simpson(|i| next[i].norm_sqr());
        if k == 0 && breakdown {
            leak = Some(interval_breakdown(&grid, &p, interior, retained, opts, protocol.period, params)?);
        }
        if !(retained >= EXTINCTION_FLOOR) {
            return Err(Error::Extinction { retained, step: k + 1 });
        }
        let s = 1.0 / retained.sqrt();
        next.iter_mut().for_each(|v| *v *= s);
        survivals.push(retained);
        p = next;
    }
    Ok((survivals, leak, n))
}

/// Exterior density integrated on an oversampled grid out to `Y`, plus the
/// averaged endpoint tail beyond.
fn interval_breakdown(
    grid: &IntervalGrid,
    p: &[Complex64],
    interior: f64,
    retained: f64,
    opts: &IntervalOptions,
    dt: f64,
    params: PhysParams,
) -> Result<LeakBreakdown> {
    let n = grid.n;
    let h = grid.h;
    let r = opts.oversample.max(1);
    let delta = default_delta(dt, params);
    // far enough that the next tail order is negligible against 1e−10
    let reach = (2.0 * delta).max((2e4 / grid.alpha).sqrt());
    let mut m = (reach / h).ceil() as usize;
    m += m % 2;
    let cells = m * r;
    let hf = h / r as f64;
    let mut left = vec![0.0; cells + 1];
    let mut right = vec![0.0; cells + 1];
    for q in 0..r {
        let f = q as f64 / r as f64;
        let t = grid.transfer(f, -(m as isize), (n + m) as isize);
        let out = t.apply(p);
        for (row, v) in out.iter().enumerate() {
            let i = row as isize + t.first_row();
            let fine = i * r as isize + q as isize;
            let d = v.norm_sqr();
            if fine <= 0 && (-fine) as usize <= cells {
                left[(-fine) as usize] = d;
            }
            let u = fine - (n * r) as isize;
            if u >= 0 && (u as usize) <= cells {
                right[u as usize] = d;
            }
        }
    }
    let y_max = cells as f64 * hf;
    let (sl, sr) = grid.end_slopes(p);
    let alpha = grid.alpha;
    // |ψ|²/(4παu²) + |ψ'|²/(16πα³u⁴), integrated from u
    let tail = |v: Complex64, s: Complex64, u: f64| {
        v.norm_sqr() / (4.0 * PI * alpha * u) + s.norm_sqr() / (48.0 * PI * alpha.powi(3) * u.powi(3))
    };
    let (pl, pr) = (p[0], p[n]);
    let remainder = tail(pl, sl, y_max) + tail(pr, sr, y_max + grid.a) + tail(pr, sr, y_max) + tail(pl, sl, y_max + grid.a);
    let density = |u: usize| left[u] + right[u];
    let near_total = simpson(cells, hf, density);
    let exterior_direct = near_total + remainder;
    let mut ud = (delta / hf).ceil() as usize;
    if (cells - ud.min(cells)) % 2 == 1 {
        ud += 1;
    }
    let far_field = if ud >= cells {
        remainder
    } else {
        simpson(cells - ud, hf, |u| density(u + ud)) + remainder
    };
    let exterior = 1.0 - interior;
    Ok(LeakBreakdown {
        one_minus_q: 1.0 - retained,
        exterior,
        exterior_direct,
        accounting_gap: (exterior_direct - exterior).abs(),
        window_shave: interior - retained,
        far_field,
        boundary_layer: exterior_direct - far_field,
        delta,
    })
}

#[cfg(feature = "std")]
fn simulate_spectral(
    protocol: &MeasurementProtocol,
    initial: &ComplexField,
    opts: &SpectralOptions,
    params: PhysParams,
    steps: usize,
    breakdown: bool,
) -> Result<Simulated> {
    let a = protocol.a;
    if !(opts.padding >= 8.0) {
        return Err(domain("spectral box half-width must be at least 8a"));
    }
    let mut field = ComplexField::periodic(opts.padding * a, opts.points, |x| {
        if window(x, a, 0.0) > 0.0 {
            initial.interpolate(x)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })?;
    field.renormalize()?;
    let prop = SpectralPropagator::new(&field, protocol.period, params)?;
    let delta = default_delta(protocol.period, params);
    let mut survivals = Vec::with_capacity(steps);
    let mut leak = None;
    for k in 0..steps {
        let free = prop.apply(&field)?;
        let (next, retained) = project(&free, a, protocol.mode.width(), k + 1)?;
        if k == 0 && breakdown {
            let inside = free.mass_where(|x| window(x, a, 0.0) > 0.0);
            let exterior_direct = free.mass_where(|x| window(x, a, 0.0) == 0.0);
            let far_field = free.mass_where(|x| x < -a - delta || x > delta);
            let exterior = 1.0 - inside;
            leak = Some(LeakBreakdown {
                one_minus_q: 1.0 - retained,
                exterior,
                exterior_direct,
                accounting_gap: (exterior_direct - exterior).abs(),
                window_shave: inside - retained,
                far_field,
                boundary_layer: exterior_direct - far_field,
                delta,
            });
        }
        survivals.push(retained);
        field = next;
    }
    Ok((survivals, leak, opts.points))
}

/// Power-law fit `leak ≈ c·Δtᵖ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFit {
    pub exponent: f64,
    pub exponent_se: f64,
    /// `ln c`.
    pub intercept: f64,
    pub r2: f64,
    pub points: Vec<(f64, f64)>,
}

/// Log-log fit of `(Δt, leak)` pairs; no quality gate.
pub fn fit_leak_exponent(points: &[(f64, f64)]) -> Result<ScalingFit> {
    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    let f = loglog_fit(&xs, &ys)?;
    Ok(ScalingFit {
        exponent: f.slope,
        exponent_se: f.slope_se,
        intercept: f.intercept,
        r2: f.r2,
        points: points.to_vec(),
    })
}

/// Check that a family of periods has at least five members spanning two decades.
pub fn check_family(periods: &[f64]) -> Result<()> {
    let lo = periods.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = periods.iter().copied().fold(0.0, f64::max);
    if periods.len() < 5 || !(hi >= 100.0 * lo) {
        return Err(domain("need at least five periods spanning two decades"));
    }
    Ok(())
}

/// First-step leak `1 − q₁` across `family`, fitted against the period.
/// Fits with `r2 < 0.99` are rejected as inconclusive.
pub fn leak_scaling(
    family: &[MeasurementProtocol],
    initial: &ComplexField,
    engine: &Engine,
    params: PhysParams,
) -> Result<ScalingFit> {
    let periods: Vec<f64> = family.iter().map(|p| p.period).collect();
    check_family(&periods)?;
    let mut points = Vec::with_capacity(family.len());
    for p in family {
        points.push((p.period, first_step(p, initial, engine, params)?.one_minus_q));
    }
    let fit = fit_leak_exponent(&points)?;
    if fit.r2 < 0.99 {
        return Err(Error::Inconclusive { r2: fit.r2 });
    }
    Ok(fit)
}

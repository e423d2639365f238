//! Tail exponents, truncated moments, interval speeds and momentum densities.
//!
//! Propagated densities oscillate with Fresnel zeros, so tails are fitted
//! through an envelope (the maximum over each octave of samples) and moments
//! are integrated with panels no wider than the fastest oscillation.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{domain, Error, Result};
use crate::numerics::integrate_real;
use crate::polygon::{propagate_polygon, Method, Polygon};
use crate::stats::{linear_fit, LinearFit};
use crate::PhysParams;

/// Envelope fit of `log density` against `log y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailFit {
    pub exponent: f64,
    pub intercept: f64,
    pub r2: f64,
    pub window: (f64, f64),
    /// Envelope points used in the regression.
    pub points: usize,
}

/// Fit the tail exponent of `density` over `window`.
///
/// `points_per_decade` geometric samples are grouped into octaves; the
/// largest sample of each octave (with its position) enters the regression.
pub fn tail_exponent_fit(
    density: impl Fn(f64) -> f64,
    window: (f64, f64),
    points_per_decade: usize,
) -> Result<TailFit> {
    let (lo, hi) = window;
    if !(lo > 0.0 && lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(domain("tail window must satisfy 0 < y_min < y_max"));
    }
    if points_per_decade < 2 {
        return Err(domain("need at least two points per decade"));
    }
    let decades = (hi / lo).log10();
    let n = ((decades * points_per_decade as f64).ceil() as usize).max(2);
    let octaves = (hi / lo).log2().floor().max(1.0) as usize;
    let mut best: Vec<Option<(f64, f64)>> = alloc::vec![None; octaves];
    for i in 0..=n {
        let y = lo * (hi / lo).powf(i as f64 / n as f64);
        let d = density(y);
        if !d.is_finite() {
            return Err(Error::DegenerateFit(alloc::format!("density not finite at y = {y}")));
        }
        let bin = (((y / lo).log2() / (hi / lo).log2() * octaves as f64) as usize).min(octaves - 1);
        if d > 0.0 && best[bin].is_none_or(|(_, m)| d > m) {
            best[bin] = Some((y, d));
        }
    }
    let pts: Vec<(f64, f64)> = best.into_iter().flatten().collect();
    if pts.len() < 3 {
        return Err(Error::DegenerateFit(
            "density indistinguishable from zero across the window".into(),
        ));
    }
    let lx: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let f = linear_fit(&lx, &ly)?;
    Ok(TailFit {
        exponent: f.slope,
        intercept: f.intercept,
        r2: f.r2,
        window,
        points: pts.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    DivergentLog,
    Convergent,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::DivergentLog => "divergent-log",
            Verdict::Convergent => "convergent",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// Best `M(b) ≈ M_∞ − e·b^{−q}` over `q ∈ [0.5, 8]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaturatingFit {
    pub limit: f64,
    pub scale: f64,
    pub scale_se: f64,
    pub q: f64,
    pub r2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentCurve {
    pub cutoffs: Vec<f64>,
    /// `M(b_k) = ∫_δ^{b_k} y·density dy`.
    pub partials: Vec<f64>,
    pub verdict: Verdict,
    /// `c` of the log model `c·ln b + d`.
    pub growth_coeff: f64,
    pub growth_se: f64,
    pub log_r2: f64,
    pub saturating: Option<SaturatingFit>,
}

impl MomentCurve {
    /// Exponent of `M_∞ − M(b)` (i.e. `−q`) from the saturating model.
    pub fn residual_exponent(&self) -> Option<f64> {
        self.saturating.map(|s| -s.q)
    }
}

/// Integration controls for [`moment_divergence`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentOptions {
    pub cutoffs_per_decade: usize,
    /// Largest panel width; set to the density's fastest oscillation period.
    pub max_step: f64,
    pub rel_tol: f64,
}

impl Default for MomentOptions {
    fn default() -> Self {
        Self {
            cutoffs_per_decade: 10,
            max_step: f64::INFINITY,
            rel_tol: 1e-9,
        }
    }
}

/// Oscillation period `π/(α·width)` in `y` of the cross terms between two
/// boundary poles `width` apart; a safe `max_step` for propagated densities.
pub fn oscillation_step(dt: f64, params: PhysParams, width: f64) -> Result<f64> {
    Ok(PI / (params.alpha(dt)? * width))
}

/// Required significance of the winning model's coefficient, in standard errors.
const SIGMA: f64 = 5.0;
/// R² a model needs to support a verdict.
const R2_VERDICT: f64 = 0.999;

/// Truncated first moments `M(b)` on geometric cutoffs spanning the last
/// `decades` decades below `b_max`, with a log-growth vs saturation verdict.
pub fn moment_divergence(
    density: impl Fn(f64) -> f64,
    delta: f64,
    b_max: f64,
    decades: usize,
    opts: MomentOptions,
) -> Result<MomentCurve> {
    if !(delta > 0.0 && b_max.is_finite() && b_max > delta) {
        return Err(domain("need 0 < delta < b_max"));
    }
    if decades < 3 || (b_max / delta).log10() < decades as f64 - 1e-9 {
        return Err(domain("cutoffs must span at least 3 decades above delta"));
    }
    if opts.cutoffs_per_decade < 2 || !(opts.max_step > 0.0) || !(opts.rel_tol > 0.0) {
        return Err(domain("invalid moment options"));
    }
    let n = decades * opts.cutoffs_per_decade;
    let b0 = b_max / 10f64.powi(decades as i32);
    let cutoffs: Vec<f64> = (0..=n)
        .map(|k| if k == n { b_max } else { b0 * 10f64.powf(k as f64 / opts.cutoffs_per_decade as f64) })
        .collect();
    let integrand = |y: f64| y * density(y);
    let mut partials = Vec::with_capacity(cutoffs.len());
    let mut acc = 0.0;
    let mut lo = delta;
    for &b in &cutoffs {
        if b > lo {
            acc += integrate_panels(&integrand, lo, b, opts)?;
        }
        partials.push(acc);
        lo = b;
    }
    let (log_fit, sat) = fit_models(&cutoffs, &partials)?;
    let verdict = decide(&log_fit, sat.as_ref());
    Ok(MomentCurve {
        cutoffs,
        partials,
        verdict,
        growth_coeff: log_fit.slope,
        growth_se: log_fit.slope_se,
        log_r2: log_fit.r2,
        saturating: sat,
    })
}

fn integrate_panels(f: &impl Fn(f64) -> f64, lo: f64, hi: f64, opts: MomentOptions) -> Result<f64> {
    // geometric panels (16 per decade), split further to max_step
    let geo = (((hi / lo).log10() * 16.0).ceil() as usize).max(1);
    let mut breaks = Vec::with_capacity(geo + 1);
    breaks.push(lo);
    for i in 1..=geo {
        let prev = *breaks.last().unwrap_or(&lo);
        let next = if i == geo { hi } else { lo * (hi / lo).powf(i as f64 / geo as f64) };
        let pieces = ((next - prev) / opts.max_step).ceil().max(1.0);
        if pieces > 5e7 {
            return Err(domain("max_step too small for the moment window"));
        }
        let pieces = pieces as usize;
        for k in 1..=pieces {
            breaks.push(if k == pieces { next } else { prev + (next - prev) * k as f64 / pieces as f64 });
        }
    }
    let r = integrate_real(f, &breaks, opts.rel_tol, 0.0, 8 * breaks.len() + 4096)?;
    Ok(r.value)
}

fn fit_models(cutoffs: &[f64], partials: &[f64]) -> Result<(LinearFit, Option<SaturatingFit>)> {
    let lb: Vec<f64> = cutoffs.iter().map(|b| b.ln()).collect();
    let log_fit = linear_fit(&lb, partials)?;
    let fit_q = |q: f64| {
        let xs: Vec<f64> = cutoffs.iter().map(|b| b.powf(-q)).collect();
        linear_fit(&xs, partials).ok().map(|f| SaturatingFit {
            limit: f.intercept,
            scale: -f.slope,
            scale_se: f.slope_se,
            q,
            r2: f.r2,
        })
    };
    let better = |best: Option<SaturatingFit>, cand: Option<SaturatingFit>| match (best, cand) {
        (Some(b), Some(c)) if c.r2 > b.r2 => Some(c),
        (None, c) => c,
        (b, _) => b,
    };
    // coarse grid then a local refinement around the best q
    let mut best = (0..=150).map(|i| fit_q(0.5 + 7.5 * i as f64 / 150.0)).fold(None, better);
    if let Some(b) = best {
        best = (-50..=50)
            .map(|i| b.q + 0.001 * i as f64)
            .filter(|q| (0.5..=8.0).contains(q))
            .map(fit_q)
            .fold(best, better);
    }
    Ok((log_fit, best))
}

fn decide(log_fit: &LinearFit, sat: Option<&SaturatingFit>) -> Verdict {
    let sat_r2 = sat.map_or(0.0, |s| s.r2);
    let log_ok = log_fit.r2 >= R2_VERDICT && log_fit.slope > 0.0 && log_fit.slope > SIGMA * log_fit.slope_se;
    if log_ok && log_fit.r2 >= sat_r2 {
        return Verdict::DivergentLog;
    }
    if let Some(s) = sat {
        if s.r2 >= R2_VERDICT && s.scale > 0.0 && s.scale > SIGMA * s.scale_se && s.r2 > log_fit.r2 {
            return Verdict::Convergent;
        }
    }
    Verdict::Inconclusive
}

/// `M(2b) − M(b)` for each `b`: bounded away from zero when the mean has no limit.
pub fn doubling_increments(
    density: impl Fn(f64) -> f64,
    cutoffs: &[f64],
    opts: MomentOptions,
) -> Result<Vec<f64>> {
    if cutoffs.iter().any(|&b| !(b > 0.0 && b.is_finite())) {
        return Err(domain("cutoffs must be positive"));
    }
    let f = |y: f64| y * density(y);
    cutoffs.iter().map(|&b| integrate_panels(&f, b, 2.0 * b, opts)).collect()
}

/// `(⟨x⟩_{[−left, b]}(Δt) − ⟨x⟩(0)) / Δt` with both means taken over the
/// normalized densities restricted to `[−left, b]`.
pub fn interval_average_speed(
    poly: &Polygon,
    left: f64,
    b: f64,
    dt: f64,
    params: PhysParams,
    opts: MomentOptions,
) -> Result<f64> {
    if !(left > 0.0 && b > -left && b.is_finite() && left.is_finite()) {
        return Err(domain("interval [−left, b] must be non-empty"));
    }
    params.alpha(dt)?;
    let x0 = initial_mean(poly, left, b)?;
    let density = |y: f64| {
        propagate_polygon(poly, y, dt, params, Method::Exact)
            .map(|v| v.norm_sqr())
            .unwrap_or(f64::NAN)
    };
    let step = opts.max_step.min(oscillation_step(dt, params, poly.a())?);
    let near = (params.hbar * dt / params.m).sqrt();
    let edges = restricted_breaks(-left, b, poly.a(), near, step)?;
    let mass = integrate_real(density, &edges, opts.rel_tol, 0.0, 8 * edges.len() + 4096)?;
    let first = integrate_real(|y| y * density(y), &edges, opts.rel_tol, 0.0, 8 * edges.len() + 4096)?;
    if !(mass.value > 0.0) || !first.value.is_finite() {
        return Err(domain("no probability on the interval"));
    }
    Ok((first.value / mass.value - x0) / dt)
}

fn initial_mean(poly: &Polygon, left: f64, b: f64) -> Result<f64> {
    let (lo, hi) = ((-left).max(-poly.a()), b.min(0.0));
    if lo >= hi {
        return Err(domain("interval misses the initial support"));
    }
    let d = |x: f64| poly.value_at(x).norm_sqr();
    let breaks: Vec<f64> = poly.vertices().filter(|&x| x > lo && x < hi).collect();
    let mut all = Vec::with_capacity(breaks.len() + 2);
    all.push(lo);
    all.extend(breaks);
    all.push(hi);
    let m = integrate_real(d, &all, 1e-13, 0.0, 1 << 16)?;
    let f = integrate_real(|x| x * d(x), &all, 1e-13, 0.0, 1 << 16)?;
    if !(m.value > 0.0) {
        return Err(domain("initial state has no probability on the interval"));
    }
    Ok(f.value / m.value)
}

/// Panels of width `near` across the support and its boundary layer, then
/// `step` outside.
fn restricted_breaks(lo: f64, hi: f64, a: f64, near: f64, step: f64) -> Result<Vec<f64>> {
    let layer_lo = (-a - 20.0 * near).max(lo);
    let layer_hi = (20.0 * near).min(hi);
    let fine = (near / 4.0).min(a / 64.0).min(step);
    let mut out = Vec::new();
    let mut push_range = |from: f64, to: f64, h: f64| -> Result<()> {
        if to <= from {
            return Ok(());
        }
        let n = ((to - from) / h).ceil().max(1.0);
        if n > 5e7 {
            return Err(domain("interval too wide for the oscillation step"));
        }
        let n = n as usize;
        for k in 0..n {
            out.push(from + (to - from) * k as f64 / n as f64);
        }
        Ok(())
    };
    if layer_lo > lo {
        push_range(lo, layer_lo, step)?;
    }
    push_range(layer_lo.max(lo), layer_hi.max(layer_lo.max(lo)), fine)?;
    push_range(layer_hi.max(lo), hi, step)?;
    out.push(hi);
    out.dedup_by(|a, b| *a <= *b);
    Ok(out)
}

/// `|Φ(p)|²` of a piecewise-linear initial state, in closed form per segment.
#[derive(Debug, Clone)]
pub struct MomentumDensity {
    poly: Polygon,
    hbar: f64,
}

/// Transform of the initial state: `Φ(p) = (2πħ)^{−1/2} ∫ψ(x)e^{−ipx/ħ}dx`.
pub fn momentum_density(initial: &Polygon, params: PhysParams) -> Result<MomentumDensity> {
    params.validate()?;
    Ok(MomentumDensity {
        poly: initial.clone(),
        hbar: params.hbar,
    })
}

impl MomentumDensity {
    pub fn amplitude(&self, p: f64) -> Complex64 {
        let k = p / self.hbar;
        let h = 0.5 * self.poly.dx();
        let sinc = h * sinc(k * h);
        // ∫_{−h}^{h} u e^{−iku} du = −2i·h²·g(kh), g(z) = (sin z − z cos z)/z²
        let odd = Complex64::new(0.0, -2.0 * h * h * odd_moment(k * h));
        let mut sum = Complex64::new(0.0, 0.0);
        for (j, &(s, c)) in self.poly.coeffs().iter().enumerate() {
            let xm = 0.5 * (self.poly.vertex(j) + self.poly.vertex(j + 1));
            let phase = Complex64::new((k * xm).cos(), -(k * xm).sin());
            sum += phase * ((s * xm + c) * (2.0 * sinc) + s * odd);
        }
        sum / (2.0 * PI * self.hbar).sqrt()
    }

    pub fn density(&self, p: f64) -> f64 {
        self.amplitude(p).norm_sqr()
    }

    /// `|Φ(p)|² + |Φ(−p)|²`, the density of `|p|`.
    pub fn abs_density(&self, p: f64) -> f64 {
        self.density(p) + self.density(-p)
    }

    /// Coefficient `C` of the averaged tail `|Φ(p)|² + |Φ(−p)|² ≈ C/p²`
    /// produced by the endpoint jumps.
    pub fn tail_coefficient(&self) -> f64 {
        let (l, r) = self.poly.endpoint_values();
        (l.norm_sqr() + r.norm_sqr()) * self.hbar / PI
    }

    /// `∫|Φ|²dp` over `[−p_max, p_max]` plus the envelope remainder `2·C/(2p_max)`.
    pub fn parseval(&self, p_max: f64) -> Result<f64> {
        if !(p_max > 0.0 && p_max.is_finite()) {
            return Err(domain("p_max must be positive"));
        }
        let period = 2.0 * PI * self.hbar / self.poly.a();
        let n = (2.0 * p_max / (0.5 * period)).ceil().max(16.0);
        if n > 5e7 {
            return Err(domain("p_max too large"));
        }
        let n = n as usize;
        let breaks: Vec<f64> = (0..=n).map(|i| -p_max + 2.0 * p_max * i as f64 / n as f64).collect();
        let q = integrate_real(|p| self.density(p), &breaks, 1e-12, 0.0, 8 * n + 4096)?;
        Ok(q.value + self.tail_coefficient() / p_max)
    }
}

fn sinc(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        1.0 - z * z / 6.0
    } else {
        z.sin() / z
    }
}

/// `(sin z − z cos z)/z²`, odd, ≈ z/3 near 0.
fn odd_moment(z: f64) -> f64 {
    if z.abs() < 1e-2 {
        let z2 = z * z;
        z * (1.0 / 3.0 - z2 / 30.0 + z2 * z2 / 840.0)
    } else {
        (z.sin() - z * z.cos()) / (z * z)
    }
}

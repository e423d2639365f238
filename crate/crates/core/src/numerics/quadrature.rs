//! Adaptive quadrature.
//!
//! [`oscillatory_quadrature`] is the reference route for every Gaussian-phase
//! integral in the crate: it never uses an asymptotic expansion. The interval
//! is cut into panels across which the phase `α(x−y)²` changes by at most
//! [`PHASE_BUDGET`], each panel is integrated with a 20-point Gauss rule, and
//! panels whose 10/20-point disagreement is too large are bisected.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::FRAC_PI_4;

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use super::gauss::{gl_pair, PanelRule};
use super::QuadTolerance;
use crate::error::{domain, Error, Result};

/// Largest phase change allowed across one panel before it is integrated.
pub const PHASE_BUDGET: f64 = FRAC_PI_4;

const ROUNDING_FLOOR: f64 = 50.0 * f64::EPSILON;

/// `∫_A^B (coeff_a·x + coeff_b) exp{iα(x−y)²} dx` by adaptive quadrature.
pub fn oscillatory_quadrature(
    coeff_a: f64,
    coeff_b: f64,
    lo: f64,
    hi: f64,
    y: f64,
    alpha: f64,
    tol: QuadTolerance,
) -> Result<Complex64> {
    if !(coeff_a.is_finite() && coeff_b.is_finite()) {
        return Err(domain("coefficients must be finite"));
    }
    if coeff_a == 0.0 && coeff_b == 0.0 {
        check_interval(lo, hi, y, alpha)?;
        tol.validate()?;
        return Ok(Complex64::new(0.0, 0.0));
    }
    gaussian_phase_quadrature(lo, hi, y, alpha, tol, |x| {
        Complex64::new(coeff_a * x + coeff_b, 0.0)
    })
}

/// `∫_A^B g(x) exp{iα(x−y)²} dx` for a smooth amplitude `g`.
///
/// `g` must vary slowly on the scale of one phase panel; otherwise the
/// adaptive refinement has to resolve it and may hit the subdivision cap.
pub fn gaussian_phase_quadrature<G>(
    lo: f64,
    hi: f64,
    y: f64,
    alpha: f64,
    tol: QuadTolerance,
    amplitude: G,
) -> Result<Complex64>
where
    G: Fn(f64) -> Complex64,
{
    check_interval(lo, hi, y, alpha)?;
    tol.validate()?;

    let max_phase = |a: f64, b: f64| {
        let u = (a - y).abs().max((b - y).abs());
        alpha * u * u
    };
    let integrand = |x: f64| {
        let u = x - y;
        let ph = alpha * u * u;
        amplitude(x) * Complex64::new(ph.cos(), ph.sin())
    };

    // First pass: stream over the phase panels. Only panels that fail the
    // local test are kept for refinement.
    let mut total = Kahan::default();
    let mut err_sum = 0.0;
    let mut floor_sum = 0.0;
    let mut panels = 0usize;
    let mut flagged: Vec<Panel> = Vec::new();
    for_each_phase_panel(lo, hi, y, alpha, |a, b| {
        let r = gl_pair(a, b, integrand, Complex64::new(0.0, 0.0), |v| v.norm());
        let p = Panel::from_rule(a, b, max_phase(a, b), &r);
        total.add(p.value);
        err_sum += p.err;
        floor_sum += p.floor;
        panels += 1;
        if p.err > p.floor {
            flagged.push(p);
        }
    });

    let target = |total: Complex64| tol.rel_tol * total.norm();
    let mut estimate = total.sum();
    if err_sum <= target(estimate) || err_sum <= floor_sum {
        return Ok(estimate);
    }

    // Refinement: bisect the worst flagged panel until the global error
    // budget is met or the cap is reached.
    let mut heap: BinaryHeap<Panel> = flagged.into();
    while err_sum > target(estimate) && err_sum > floor_sum {
        if panels >= tol.max_subdivisions {
            return Err(Error::Accuracy {
                estimate,
                achieved: err_sum / estimate.norm(),
                subdivisions: panels,
            });
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.lo + worst.hi);
        if !(mid > worst.lo && mid < worst.hi) {
            // panel cannot be split further in floating point
            break;
        }
        total.add(-worst.value);
        err_sum -= worst.err;
        floor_sum -= worst.floor;
        for (a, b) in [(worst.lo, mid), (mid, worst.hi)] {
            let r = gl_pair(a, b, integrand, Complex64::new(0.0, 0.0), |v| v.norm());
            let p = Panel::from_rule(a, b, max_phase(a, b), &r);
            total.add(p.value);
            err_sum += p.err;
            floor_sum += p.floor;
            if p.err > p.floor {
                heap.push(p);
            }
        }
        panels += 1;
        estimate = total.sum();
    }

    if err_sum <= target(estimate) || err_sum <= floor_sum {
        Ok(estimate)
    } else {
        Err(Error::Accuracy {
            estimate,
            achieved: err_sum / estimate.norm(),
            subdivisions: panels,
        })
    }
}

fn check_interval(lo: f64, hi: f64, y: f64, alpha: f64) -> Result<()> {
    if !(lo.is_finite() && hi.is_finite() && y.is_finite()) {
        return Err(domain("integration limits and observation point must be finite"));
    }
    if lo >= hi {
        return Err(domain("integration limits must satisfy A < B"));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(domain("phase scale alpha must be positive and finite"));
    }
    Ok(())
}

/// Visit `[lo, hi]` in consecutive panels on which `α(x−y)²` changes by at
/// most [`PHASE_BUDGET`]. Breakpoints sit at `x = y ± √(kπ/(4α))`.
fn for_each_phase_panel(lo: f64, hi: f64, y: f64, alpha: f64, mut visit: impl FnMut(f64, f64)) {
    let mut sweep = |u0: f64, u1: f64| {
        // monotone part: u0 and u1 share a sign (or one is zero)
        let (p0, p1) = (alpha * u0 * u0, alpha * u1 * u1);
        let (plo, phi) = if p0 < p1 { (p0, p1) } else { (p1, p0) };
        let k0 = (plo / PHASE_BUDGET).floor() as u64 + 1;
        let k1 = (phi / PHASE_BUDGET).ceil() as u64;
        let sign = if u0 + u1 >= 0.0 { 1.0 } else { -1.0 };
        let breakpoint = |k: u64| sign * (k as f64 * PHASE_BUDGET / alpha).sqrt();
        let mut prev = u0;
        if p0 < p1 {
            for k in k0..k1 {
                let b = breakpoint(k);
                visit(prev + y, b + y);
                prev = b;
            }
        } else {
            for k in (k0..k1).rev() {
                let b = breakpoint(k);
                visit(prev + y, b + y);
                prev = b;
            }
        }
        visit(prev + y, u1 + y);
    };
    let (u0, u1) = (lo - y, hi - y);
    if u0 < 0.0 && u1 > 0.0 {
        sweep(u0, 0.0);
        sweep(0.0, u1);
    } else {
        sweep(u0, u1);
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    value: Complex64,
    err: f64,
    floor: f64,
}

impl Panel {
    /// The floor also scales with the largest phase on the panel: evaluating
    /// `exp{iα(x−y)²}` loses about `ε·α(x−y)²` in absolute terms.
    fn from_rule(lo: f64, hi: f64, max_phase: f64, r: &PanelRule<Complex64>) -> Self {
        Self {
            lo,
            hi,
            value: r.fine,
            err: (r.fine - r.coarse).norm(),
            floor: ROUNDING_FLOOR * (1.0 + max_phase) * r.abs,
        }
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err.total_cmp(&other.err) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Compensated complex summation; panel sums can cancel by many orders.
#[derive(Default)]
struct Kahan {
    sum: Complex64,
    comp: Complex64,
}

impl Kahan {
    fn add(&mut self, v: Complex64) {
        let y = v - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }
    fn sum(&self) -> Complex64 {
        self.sum
    }
}

/// Outcome of [`integrate_real`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealQuad {
    pub value: f64,
    pub error: f64,
    pub panels: usize,
}

#[derive(Debug, Clone, Copy)]
struct RealPanel {
    lo: f64,
    hi: f64,
    value: f64,
    err: f64,
    floor: f64,
}
impl PartialEq for RealPanel {
    fn eq(&self, other: &Self) -> bool {
        self.err.total_cmp(&other.err) == Ordering::Equal
    }
}
impl Eq for RealPanel {}
impl PartialOrd for RealPanel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for RealPanel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Globally adaptive 10/20-point Gauss–Legendre integration of a real
/// function over consecutive panels `breaks[i]..breaks[i+1]`.
///
/// Stops when the summed error estimate is below `max(abs_tol, rel_tol·|I|)`.
/// Returns [`Error::Accuracy`] if `max_panels` is reached first.
pub fn integrate_real<F>(
    f: F,
    breaks: &[f64],
    rel_tol: f64,
    abs_tol: f64,
    max_panels: usize,
) -> Result<RealQuad>
where
    F: Fn(f64) -> f64,
{
    if breaks.len() < 2 {
        return Err(domain("need at least two breakpoints"));
    }
    if breaks.windows(2).any(|w| !(w[0] < w[1])) || breaks.iter().any(|b| !b.is_finite()) {
        return Err(domain("breakpoints must be finite and strictly increasing"));
    }
    let eval = |lo: f64, hi: f64| {
        let r = gl_pair(lo, hi, &f, 0.0, |v: &f64| v.abs());
        RealPanel {
            lo,
            hi,
            value: r.fine,
            err: (r.fine - r.coarse).abs(),
            floor: ROUNDING_FLOOR * r.abs,
        }
    };
    let mut heap = BinaryHeap::with_capacity(breaks.len());
    let mut total = 0.0;
    let mut comp = 0.0;
    let mut err_sum = 0.0;
    let mut floor_sum = 0.0;
    let add = |total: &mut f64, comp: &mut f64, v: f64| {
        let y = v - *comp;
        let t = *total + y;
        *comp = (t - *total) - y;
        *total = t;
    };
    for w in breaks.windows(2) {
        let p = eval(w[0], w[1]);
        add(&mut total, &mut comp, p.value);
        err_sum += p.err;
        floor_sum += p.floor;
        heap.push(p);
    }
    let mut panels = heap.len();
    loop {
        let target = abs_tol.max(rel_tol * total.abs()).max(floor_sum);
        if err_sum <= target {
            return Ok(RealQuad {
                value: total,
                error: err_sum,
                panels,
            });
        }
        if panels >= max_panels {
            return Err(Error::Accuracy {
                estimate: Complex64::new(total, 0.0),
                achieved: err_sum / total.abs(),
                subdivisions: panels,
            });
        }
        let Some(worst) = heap.pop() else {
            unreachable!("heap holds every panel")
        };
        let mid = 0.5 * (worst.lo + worst.hi);
        if !(mid > worst.lo && mid < worst.hi) {
            return Ok(RealQuad {
                value: total,
                error: err_sum,
                panels,
            });
        }
        add(&mut total, &mut comp, -worst.value);
        err_sum -= worst.err;
        floor_sum -= worst.floor;
        for (a, b) in [(worst.lo, mid), (mid, worst.hi)] {
            let p = eval(a, b);
            add(&mut total, &mut comp, p.value);
            err_sum += p.err;
            floor_sum += p.floor;
            heap.push(p);
        }
        panels += 1;
        err_sum = err_sum.max(0.0);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol(rel: f64) -> QuadTolerance {
        QuadTolerance {
            rel_tol: rel,
            ..QuadTolerance::default()
        }
    }

    #[test]
    fn zero_integrand_is_zero() {
        let v = oscillatory_quadrature(0.0, 0.0, -1.0, 0.0, 3.0, 10.0, tol(1e-10)).unwrap();
        assert_eq!(v, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(oscillatory_quadrature(1.0, 0.0, 1.0, 0.0, 0.0, 1.0, tol(1e-10)).is_err());
        assert!(oscillatory_quadrature(1.0, 0.0, 0.0, 1.0, 0.0, 0.0, tol(1e-10)).is_err());
        assert!(oscillatory_quadrature(1.0, 0.0, 0.0, 1.0, 0.0, 1.0, tol(0.0)).is_err());
    }

    #[test]
    fn linear_phase_matches_closed_form() {
        // ∫_0^1 x e^{iαx²} dx = (e^{iα} − 1)/(2iα)
        let alpha = 37.5;
        let v = oscillatory_quadrature(1.0, 0.0, 0.0, 1.0, 0.0, alpha, tol(1e-13)).unwrap();
        let exact = (Complex64::new(alpha.cos(), alpha.sin()) - 1.0) / Complex64::new(0.0, 2.0 * alpha);
        assert!((v - exact).norm() < 1e-13 * exact.norm());
    }

    #[test]
    fn panels_respect_phase_budget() {
        let (y, alpha) = (0.3, 250.0);
        let mut count = 0;
        let mut last = -1.0;
        for_each_phase_panel(-1.0, 2.0, y, alpha, |a, b| {
            assert!(a < b);
            assert!((a - last).abs() < 1e-12 || count == 0);
            let ph = |x: f64| alpha * (x - y) * (x - y);
            let spread = if (a - y) * (b - y) < 0.0 {
                ph(a).max(ph(b))
            } else {
                (ph(b) - ph(a)).abs()
            };
            assert!(spread <= PHASE_BUDGET * (1.0 + 1e-9), "spread {spread}");
            last = b;
            count += 1;
        });
        assert!((last - 2.0).abs() < 1e-15);
        // total phase swept ≈ α(1.3² + 1.7²)
        let expected = (alpha * (1.3f64.powi(2) + 1.7f64.powi(2)) / PHASE_BUDGET).ceil() as usize;
        assert!(count >= expected && count <= expected + 2);
    }

    #[test]
    fn real_integration_of_smooth_function() {
        let q = integrate_real(|x| x.sin(), &[0.0, 1.0, core::f64::consts::PI], 1e-13, 0.0, 1000).unwrap();
        assert!((q.value - 2.0).abs() < 1e-13);
    }

    #[test]
    fn real_integration_refines_peaks() {
        // narrow Lorentzian: ∫_{-1}^{1} ε/(x²+ε²) dx = 2 atan(1/ε)
        let eps = 1e-4;
        let q = integrate_real(|x| eps / (x * x + eps * eps), &[-1.0, 1.0], 1e-10, 0.0, 10_000).unwrap();
        let exact = 2.0 * (1.0 / eps).atan();
        assert!((q.value - exact).abs() < 1e-9 * exact);
    }

    #[test]
    fn subdivision_cap_reports_best_estimate() {
        let t = QuadTolerance {
            rel_tol: 1e-14,
            max_subdivisions: 1,
        };
        // wildly varying amplitude on a single phase panel
        let r = gaussian_phase_quadrature(0.0, 1.0, 0.0, 1e-6, t, |x| {
            Complex64::new((200.0 * x).sin(), 0.0)
        });
        match r {
            Err(Error::Accuracy { achieved, .. }) => assert!(achieved > 1e-14),
            other => panic!("expected accuracy error, got {other:?}"),
        }
    }
}

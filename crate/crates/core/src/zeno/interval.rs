//! Free propagation of a field supported on a closed interval.
//!
//! After every projection the wave function vanishes outside `[−a, 0]`, so one
//! period of free evolution is exactly
//!
//! ```text
//! Ψ(y) = √(α/(iπ)) ∫_{−a}^{0} ψ(x)·e^{iα(x−y)²} dx,
//! ```
//!
//! and no padded grid is needed. The field is carried as node values on a
//! uniform grid and interpolated by piecewise cubics (four-node stencils,
//! one-sided in the first and last cell). Each cell integral is a 20-point
//! Gauss–Legendre sum of the interpolant against the exact kernel phase.
//!
//! The weights depend only on the offset between output row and cell, apart
//! from the few columns touched by the one-sided stencils, so the map is a
//! Toeplitz convolution plus a rank-8 correction. With `std` the convolution
//! runs through an FFT; without it, by direct summation.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{domain, Result};
use crate::numerics::{GL20_NODES, GL20_WEIGHTS};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Local node positions (in cells, relative to the cell's left node).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Stencil {
    First,
    Interior,
    Last,
}

impl Stencil {
    fn nodes(self) -> [f64; 4] {
        match self {
            Stencil::First => [0.0, 1.0, 2.0, 3.0],
            Stencil::Interior => [-1.0, 0.0, 1.0, 2.0],
            Stencil::Last => [-2.0, -1.0, 0.0, 1.0],
        }
    }

    /// Index offset of the first stencil node relative to the cell index.
    fn start(self) -> isize {
        self.nodes()[0] as isize
    }
}

fn stencil_of(j: usize, n: usize) -> Stencil {
    if j == 0 {
        Stencil::First
    } else if j == n - 1 {
        Stencil::Last
    } else {
        Stencil::Interior
    }
}

/// Lagrange basis values of a stencil at the 20 quadrature nodes on `[0, 1]`,
/// pre-multiplied by the quadrature weights.
struct CellRule {
    s: [f64; 20],
    basis: [[[f64; 4]; 20]; 3],
}

impl CellRule {
    fn new() -> Self {
        let mut s = [0.0; 20];
        let mut w = [0.0; 20];
        for (k, (x, wt)) in GL20_NODES.iter().zip(GL20_WEIGHTS.iter()).enumerate() {
            s[2 * k] = 0.5 * (1.0 - x);
            s[2 * k + 1] = 0.5 * (1.0 + x);
            w[2 * k] = 0.5 * wt;
            w[2 * k + 1] = 0.5 * wt;
        }
        let mut basis = [[[0.0; 4]; 20]; 3];
        for (b, st) in [Stencil::First, Stencil::Interior, Stencil::Last].iter().enumerate() {
            let t = st.nodes();
            for g in 0..20 {
                for m in 0..4 {
                    let mut l = 1.0;
                    for k in 0..4 {
                        if k != m {
                            l *= (s[g] - t[k]) / (t[m] - t[k]);
                        }
                    }
                    basis[b][g][m] = l * w[g];
                }
            }
        }
        Self { s, basis }
    }

    /// `∫₀¹ L_m(s)·e^{iβ(s−d)²} ds` for the four basis functions.
    fn weights(&self, st: Stencil, beta: f64, d: f64) -> [Complex64; 4] {
        let b = &self.basis[st as usize];
        let mut out = [ZERO; 4];
        for (&s, bg) in self.s.iter().zip(b) {
            let u = s - d;
            let ph = beta * u * u;
            let e = Complex64::new(ph.cos(), ph.sin());
            for m in 0..4 {
                out[m] += e * bg[m];
            }
        }
        out
    }
}

/// `out[r] = Σ_k kernel[r + n − k]·p[k]` for `r` in `0..rows`, `k` in `0..=n`.
struct Convolver {
    n: usize,
    rows: usize,
    #[cfg(feature = "std")]
    fft: FftConv,
    #[cfg(not(feature = "std"))]
    kernel: Vec<Complex64>,
}

#[cfg(feature = "std")]
struct FftConv {
    size: usize,
    forward: std::sync::Arc<dyn rustfft::Fft<f64>>,
    inverse: std::sync::Arc<dyn rustfft::Fft<f64>>,
    kernel_hat: Vec<Complex64>,
}

impl Convolver {
    fn new(kernel: Vec<Complex64>, n: usize, rows: usize) -> Self {
        debug_assert_eq!(kernel.len(), rows + n);
        #[cfg(feature = "std")]
        {
            let size = (kernel.len() + n + 1).next_power_of_two();
            let mut planner = rustfft::FftPlanner::new();
            let forward = planner.plan_fft_forward(size);
            let inverse = planner.plan_fft_inverse(size);
            let mut kernel_hat = kernel;
            kernel_hat.resize(size, ZERO);
            forward.process(&mut kernel_hat);
            let scale = 1.0 / size as f64;
            for v in kernel_hat.iter_mut() {
                *v *= scale;
            }
            Self {
                n,
                rows,
                fft: FftConv {
                    size,
                    forward,
                    inverse,
                    kernel_hat,
                },
            }
        }
        #[cfg(not(feature = "std"))]
        {
            Self { n, rows, kernel }
        }
    }

    fn apply(&self, p: &[Complex64]) -> Vec<Complex64> {
        #[cfg(feature = "std")]
        {
            let f = &self.fft;
            let mut buf = vec![ZERO; f.size];
            buf[..p.len()].copy_from_slice(p);
            f.forward.process(&mut buf);
            for (b, k) in buf.iter_mut().zip(&f.kernel_hat) {
                *b *= k;
            }
            f.inverse.process(&mut buf);
            buf[self.n..self.n + self.rows].to_vec()
        }
        #[cfg(not(feature = "std"))]
        {
            (0..self.rows)
                .map(|r| {
                    let mut acc = ZERO;
                    for (k, v) in p.iter().enumerate() {
                        acc += self.kernel[r + self.n - k] * v;
                    }
                    acc
                })
                .collect()
        }
    }
}

/// The linear map from node values on `[−a, 0]` to `Ψ` at the points
/// `y_i = −a + (i + offset)·h` for `i` in `first..=last`.
pub(crate) struct Transfer {
    first: isize,
    conv: Convolver,
    corrections: Vec<(usize, Vec<Complex64>)>,
}

impl Transfer {
    fn new(grid: &IntervalGrid, offset: f64, first: isize, last: isize) -> Self {
        let n = grid.n;
        let rows = (last - first + 1) as usize;
        let rule = &grid.rule;
        let beta = grid.alpha * grid.h * grid.h;
        let scale = grid.norm * grid.h;
        // interior-cell weights for every row-minus-cell offset that occurs
        let lo = first - n as isize - 1;
        let hi = last + 2;
        let interior: Vec<[Complex64; 4]> = (lo..=hi)
            .map(|e| rule.weights(Stencil::Interior, beta, e as f64 + offset))
            .collect();
        let w_int = |e: isize, m: usize| interior[(e - lo) as usize][m];
        // Toeplitz part: every node treated as if all four interior cells
        // around it were present. kernel[t] ↔ row − node = t + first − n.
        let kernel: Vec<Complex64> = (0..rows + n)
            .map(|t| {
                let d = t as isize + first - n as isize;
                (0..4).map(|m| w_int(d - 1 + m as isize, m)).sum::<Complex64>() * scale
            })
            .collect();
        let mut edge: Vec<usize> = [0, 1, 2, 3, n - 3, n - 2, n - 1, n].to_vec();
        edge.dedup();
        let boundary = |st: Stencil, j: usize| -> Vec<[Complex64; 4]> {
            (0..rows)
                .map(|r| rule.weights(st, beta, (r as isize + first - j as isize) as f64 + offset))
                .collect()
        };
        let first_cell = boundary(Stencil::First, 0);
        let last_cell = boundary(Stencil::Last, n - 1);
        let mut corrections = Vec::with_capacity(edge.len());
        for &k in &edge {
            let mut col = vec![ZERO; rows];
            for j in k.saturating_sub(3)..(k + 3).min(n) {
                let st = stencil_of(j, n);
                let m = k as isize - (j as isize + st.start());
                if !(0..4).contains(&m) {
                    continue;
                }
                let m = m as usize;
                for (r, c) in col.iter_mut().enumerate() {
                    let w = match st {
                        Stencil::First => first_cell[r][m],
                        Stencil::Last => last_cell[r][m],
                        Stencil::Interior => w_int(r as isize + first - j as isize, m),
                    };
                    *c += w * scale;
                }
            }
            for (r, c) in col.iter_mut().enumerate() {
                *c -= kernel[r + n - k];
            }
            corrections.push((k, col));
        }
        Self {
            first,
            conv: Convolver::new(kernel, n, rows),
            corrections,
        }
    }

    pub(crate) fn apply(&self, p: &[Complex64]) -> Vec<Complex64> {
        let mut out = self.conv.apply(p);
        for (k, col) in &self.corrections {
            let v = p[*k];
            for (o, c) in out.iter_mut().zip(col) {
                *o += c * v;
            }
        }
        out
    }

    pub(crate) fn first_row(&self) -> isize {
        self.first
    }
}

/// Uniform node grid on `[−a, 0]` with the kernel for one time step.
pub(crate) struct IntervalGrid {
    pub a: f64,
    pub n: usize,
    pub h: f64,
    pub alpha: f64,
    norm: Complex64,
    rule: CellRule,
}

impl IntervalGrid {
    pub(crate) fn new(a: f64, n: usize, alpha: f64) -> Result<Self> {
        if n < 8 || n % 2 != 0 {
            return Err(domain("interval grid needs an even number of cells, at least 8"));
        }
        if !(a > 0.0 && a.is_finite() && alpha > 0.0 && alpha.is_finite()) {
            return Err(domain("interval width and kernel parameter must be positive"));
        }
        // √(α/(iπ)) = √(α/π)·e^{−iπ/4}
        let norm = Complex64::from_polar((alpha / core::f64::consts::PI).sqrt(), -core::f64::consts::FRAC_PI_4);
        Ok(Self {
            a,
            n,
            h: a / n as f64,
            alpha,
            norm,
            rule: CellRule::new(),
        })
    }

    pub(crate) fn x(&self, i: usize) -> f64 {
        if i == self.n {
            0.0
        } else {
            -self.a + i as f64 * self.h
        }
    }

    /// Map from node values to node values.
    pub(crate) fn step_transfer(&self) -> Transfer {
        Transfer::new(self, 0.0, 0, self.n as isize)
    }

    /// Map to the points `−a + (i + offset)h`, `i` in `first..=last`.
    pub(crate) fn transfer(&self, offset: f64, first: isize, last: isize) -> Transfer {
        Transfer::new(self, offset, first, last)
    }

    /// Composite Simpson rule over the nodes.
    pub(crate) fn simpson(&self, f: impl Fn(usize) -> f64) -> f64 {
        simpson(self.n, self.h, f)
    }

    /// One-sided fourth-order derivative estimates at the two end nodes.
    pub(crate) fn end_slopes(&self, p: &[Complex64]) -> (Complex64, Complex64) {
        let n = self.n;
        let c = 1.0 / (6.0 * self.h);
        let left = (p[0] * -11.0 + p[1] * 18.0 - p[2] * 9.0 + p[3] * 2.0) * c;
        let right = (p[n] * 11.0 - p[n - 1] * 18.0 + p[n - 2] * 9.0 - p[n - 3] * 2.0) * c;
        (left, right)
    }
}

/// Composite Simpson rule on `n` (even) cells of width `h`.
pub(crate) fn simpson(n: usize, h: f64, f: impl Fn(usize) -> f64) -> f64 {
    debug_assert!(n % 2 == 0);
    let mut acc = f(0) + f(n);
    for i in 1..n {
        acc += f(i) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

/// Cubic interpolation of node values on a closed uniform grid, using the
/// same stencils as the propagator.
pub(crate) fn interpolate_cubic(amps: &[Complex64], x0: f64, h: f64, x: f64) -> Complex64 {
    let n = amps.len() - 1;
    let t = (x - x0) / h;
    if !(t >= -1e-12 && t <= n as f64 + 1e-12) {
        return ZERO;
    }
    let j = (t.floor().max(0.0) as usize).min(n - 1);
    let st = stencil_of(j, n);
    let nodes = st.nodes();
    let s = t - j as f64;
    let mut acc = ZERO;
    for m in 0..4 {
        let mut l = 1.0;
        for k in 0..4 {
            if k != m {
                l *= (s - nodes[k]) / (nodes[m] - nodes[k]);
            }
        }
        acc += amps[(j as isize + nodes[m] as isize) as usize] * l;
    }
    acc
}

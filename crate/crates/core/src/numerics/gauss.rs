//! Fixed Gauss–Legendre rules on `[-1, 1]`, positive half only (rules are symmetric).

#![allow(clippy::excessive_precision)]

pub(crate) const GL10_NODES: [f64; 5] = [
    0.14887433898163121088,
    0.43339539412924719080,
    0.67940956829902440623,
    0.86506336668898451073,
    0.97390652851717172008,
];
pub(crate) const GL10_WEIGHTS: [f64; 5] = [
    0.29552422471475287017,
    0.26926671930999635509,
    0.21908636251598204400,
    0.14945134915058059315,
    0.066671344308688137594,
];

pub(crate) const GL20_NODES: [f64; 10] = [
    0.076526521133497333755,
    0.22778585114164507808,
    0.37370608871541956067,
    0.51086700195082709800,
    0.63605368072651502545,
    0.74633190646015079261,
    0.83911697182221882339,
    0.91223442825132590587,
    0.96397192727791379127,
    0.99312859918509492479,
];
pub(crate) const GL20_WEIGHTS: [f64; 10] = [
    0.15275338713072585070,
    0.14917298647260374679,
    0.14209610931838205133,
    0.13168863844917662690,
    0.11819453196151841731,
    0.10193011981724043504,
    0.083276741576704748725,
    0.062672048334109063570,
    0.040601429800386941331,
    0.017614007139152118312,
];

/// Result of a paired 10/20-point rule on one panel.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PanelRule<T> {
    pub fine: T,
    pub coarse: T,
    /// `∫|f|` estimated with the fine rule; sets the rounding floor.
    pub abs: f64,
}

/// Apply the 20-point rule and reuse nothing for the 10-point rule (nodes are not nested).
pub(crate) fn gl_pair<T, F>(lo: f64, hi: f64, mut f: F, zero: T, norm: impl Fn(&T) -> f64) -> PanelRule<T>
where
    T: Copy + core::ops::Add<Output = T> + core::ops::Mul<f64, Output = T>,
    F: FnMut(f64) -> T,
{
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    let mut fine = zero;
    let mut abs = 0.0;
    for (x, w) in GL20_NODES.iter().zip(GL20_WEIGHTS.iter()) {
        let a = f(c - h * x);
        let b = f(c + h * x);
        abs += w * (norm(&a) + norm(&b));
        fine = fine + (a + b) * *w;
    }
    let mut coarse = zero;
    for (x, w) in GL10_NODES.iter().zip(GL10_WEIGHTS.iter()) {
        coarse = coarse + (f(c - h * x) + f(c + h * x)) * *w;
    }
    PanelRule {
        fine: fine * h,
        coarse: coarse * h,
        abs: abs * h.abs(),
    }
}

/// 20-point rule only.
pub(crate) fn gl20<T, F>(lo: f64, hi: f64, mut f: F, zero: T) -> T
where
    T: Copy + core::ops::Add<Output = T> + core::ops::Mul<f64, Output = T>,
    F: FnMut(f64) -> T,
{
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    let mut acc = zero;
    for (x, w) in GL20_NODES.iter().zip(GL20_WEIGHTS.iter()) {
        acc = acc + (f(c - h * x) + f(c + h * x)) * *w;
    }
    acc * h
}

//! Serializable views of the core fit results.

use qcl_core::moments::{MomentCurve, TailFit};
use qcl_core::zeno::{LeakBreakdown, ScalingFit};
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct TailSummary {
    pub exponent: f64,
    pub intercept: f64,
    pub r2: f64,
    pub window: [f64; 2],
    pub points: usize,
    pub verdict: &'static str,
}

impl TailSummary {
    pub fn new(fit: &TailFit, verdict: &'static str) -> Self {
        Self {
            exponent: fit.exponent,
            intercept: fit.intercept,
            r2: fit.r2,
            window: [fit.window.0, fit.window.1],
            points: fit.points,
            verdict,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SaturatingSummary {
    pub limit: f64,
    pub scale: f64,
    pub scale_se: f64,
    pub q: f64,
    pub r2: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MomentSummary {
    pub verdict: &'static str,
    pub growth_coeff: f64,
    pub growth_se: f64,
    pub log_r2: f64,
    pub saturating: Option<SaturatingSummary>,
    pub residual_exponent: Option<f64>,
    pub cutoffs: Vec<f64>,
    pub partials: Vec<f64>,
}

impl MomentSummary {
    pub fn new(c: &MomentCurve) -> Self {
        Self {
            verdict: c.verdict.as_str(),
            growth_coeff: c.growth_coeff,
            growth_se: c.growth_se,
            log_r2: c.log_r2,
            saturating: c.saturating.map(|s| SaturatingSummary {
                limit: s.limit,
                scale: s.scale,
                scale_se: s.scale_se,
                q: s.q,
                r2: s.r2,
            }),
            residual_exponent: c.residual_exponent(),
            cutoffs: c.cutoffs.clone(),
            partials: c.partials.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingSummary {
    pub exponent: f64,
    pub exponent_se: f64,
    pub intercept: f64,
    pub r2: f64,
    pub points: Vec<[f64; 2]>,
}

impl ScalingSummary {
    pub fn new(f: &ScalingFit) -> Self {
        Self {
            exponent: f.exponent,
            exponent_se: f.exponent_se,
            intercept: f.intercept,
            r2: f.r2,
            points: f.points.iter().map(|&(a, b)| [a, b]).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LeakSummary {
    pub dt: f64,
    pub one_minus_q: f64,
    pub exterior: f64,
    pub exterior_direct: f64,
    pub accounting_gap: f64,
    pub window_shave: f64,
    pub far_field: f64,
    pub boundary_layer: f64,
    pub delta: f64,
}

impl LeakSummary {
    pub fn new(dt: f64, l: &LeakBreakdown) -> Self {
        Self {
            dt,
            one_minus_q: l.one_minus_q,
            exterior: l.exterior,
            exterior_direct: l.exterior_direct,
            accounting_gap: l.accounting_gap,
            window_shave: l.window_shave,
            far_field: l.far_field,
            boundary_layer: l.boundary_layer,
            delta: l.delta,
        }
    }
}

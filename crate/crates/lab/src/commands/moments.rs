use qcl_core::moments::{
    doubling_increments, interval_average_speed, moment_divergence, momentum_density, oscillation_step, MomentOptions,
    Verdict,
};
use qcl_core::polygon::{default_delta, propagate_polygon, Method};
use rayon::prelude::*;
use serde::Serialize;

use super::finish;
use crate::config::{positive, tolerance, MomentsArgs};
use crate::error::Result;
use crate::families;
use crate::io::{Cell, OutDir};
use crate::report::{Check, Outcome};
use crate::summary::MomentSummary;

/// Residual exponent of the position moment expected for continuous states.
const RESIDUAL_TARGET: f64 = -4.0;
const RESIDUAL_TOL: f64 = 0.3;

#[derive(Serialize)]
struct Speed {
    b: f64,
    speed: f64,
}

#[derive(Serialize)]
struct Results {
    continuous_at_ends: bool,
    delta: f64,
    position: MomentSummary,
    momentum: MomentSummary,
    doubling_increments: Vec<[f64; 2]>,
    interval_speeds: Vec<Speed>,
    parseval: f64,
}

pub fn run(args: &MomentsArgs) -> Result<Outcome> {
    args.common.validate()?;
    tolerance(args.tol)?;
    args.source.validate()?;
    positive("dt", args.dt)?;
    positive("b_max", args.b_max)?;
    positive("p_delta", args.p_delta)?;
    let params = args.common.params()?;
    let delta = match args.delta {
        Some(d) => {
            positive("delta", d)?;
            d
        }
        None => default_delta(args.dt, params),
    };
    let poly = families::build(&args.source)?;
    let out = OutDir::create(&args.common.out)?;
    let rel_tol = args.tol;

    let density = |y: f64| propagate_polygon(&poly, y, args.dt, params, Method::Exact).map_or(f64::NAN, |v| v.norm_sqr());
    let x_opts = MomentOptions {
        max_step: oscillation_step(args.dt, params, poly.a())?,
        rel_tol,
        ..MomentOptions::default()
    };
    let mom = momentum_density(&poly, params)?;
    let p_opts = MomentOptions {
        // half the period 2πħ/a of the endpoint interference in |Φ|²
        max_step: std::f64::consts::PI * params.hbar / poly.a(),
        rel_tol,
        ..MomentOptions::default()
    };
    let (position, momentum) = rayon::join(
        || moment_divergence(density, delta, args.b_max, args.decades, x_opts),
        || moment_divergence(|p| mom.abs_density(p), args.p_delta, args.b_max, args.decades, p_opts),
    );
    let (position, momentum) = (position?, momentum?);

    let probe: Vec<f64> = (0..args.decades).map(|k| args.b_max / 10f64.powi(k as i32 + 1)).rev().collect();
    let increments = doubling_increments(density, &probe, x_opts)?;
    // the restricted mean needs the density across the whole interval; keep it
    // to the lower cutoffs
    let speeds = probe
        .par_iter()
        .filter(|&&b| b <= args.b_max / 100.0)
        .map(|&b| {
            Ok(Speed {
                b,
                speed: interval_average_speed(&poly, poly.a(), b, args.dt, params, x_opts)?,
            })
        })
        .collect::<qcl_core::Result<Vec<_>>>()?;
    let parseval = mom.parseval(args.b_max)?;

    let mut rows = Vec::new();
    for (kind, c) in [("position", &position), ("momentum", &momentum)] {
        for (&b, &m) in c.cutoffs.iter().zip(&c.partials) {
            rows.push(vec![Cell::Text(kind), b.into(), m.into()]);
        }
    }
    let artifacts = vec![out.write_csv("moments.csv", &["kind", "b", "partial_moment"], &rows)?];

    let continuous = poly.is_continuous_at_ends();
    let expected = if continuous { Verdict::Convergent } else { Verdict::DivergentLog };
    let mut checks = vec![
        Check::new("position verdict", expected.as_str(), position.verdict.as_str(), position.verdict == expected),
        Check::new("momentum verdict", expected.as_str(), momentum.verdict.as_str(), momentum.verdict == expected),
    ];
    if continuous {
        let r = position.residual_exponent();
        checks.push(Check::new(
            "position residual exponent",
            format!("{RESIDUAL_TARGET} ± {RESIDUAL_TOL}"),
            r,
            r.is_some_and(|r| (r - RESIDUAL_TARGET).abs() <= RESIDUAL_TOL),
        ));
    }
    let mut summary = vec![
        format!("position first moment: {}", position.verdict.as_str()),
        format!("momentum first moment: {}", momentum.verdict.as_str()),
    ];
    if let Some(r) = position.residual_exponent() {
        summary.push(format!("position residual exponent {r:.3}"));
    }
    let results = Results {
        continuous_at_ends: continuous,
        delta,
        position: MomentSummary::new(&position),
        momentum: MomentSummary::new(&momentum),
        doubling_increments: probe.iter().zip(&increments).map(|(&b, &d)| [b, d]).collect(),
        interval_speeds: speeds,
        parseval,
    };
    finish(&out, "moments", args, results, checks, artifacts, summary)
}

use qcl_core::moments::{moment_divergence, oscillation_step, tail_exponent_fit, MomentOptions, Verdict};
use qcl_core::rectangle::{propagate_rectangle, rectangle_norm, RectangleState};
use serde::Serialize;

use super::{finish, logspace, require_ppd, sample};
use crate::config::{positive, tolerance, RectangleArgs};
use crate::error::Result;
use crate::io::{Cell, OutDir};
use crate::report::{tail_class, Check, Outcome};
use crate::summary::{MomentSummary, TailSummary};

#[derive(Serialize)]
struct Results {
    tail: TailSummary,
    moment: MomentSummary,
    norm: f64,
    norm_drift: f64,
}

pub fn run(args: &RectangleArgs) -> Result<Outcome> {
    args.common.validate()?;
    tolerance(args.tol)?;
    positive("t", args.t)?;
    positive("delta", args.delta)?;
    require_ppd(args.points_per_decade)?;
    let params = args.common.params()?;
    let state = RectangleState::new(args.t, params)?;
    let out = OutDir::create(&args.common.out)?;

    let ys = logspace(args.window.lo, args.window.hi, args.points_per_decade);
    let psi = sample(&ys, |y| propagate_rectangle(&state, y))?;
    let rows: Vec<Vec<Cell>> = ys
        .iter()
        .zip(&psi)
        .map(|(&y, v)| vec![y.into(), v.re.into(), v.im.into(), v.norm_sqr().into()])
        .collect();
    let mut artifacts = vec![out.write_csv("density.csv", &["y", "re", "im", "density"], &rows)?];

    let density = |y: f64| propagate_rectangle(&state, y).map_or(f64::NAN, |v| v.norm_sqr());
    let fit = tail_exponent_fit(density, args.window.pair(), args.points_per_decade)?;
    let opts = MomentOptions {
        max_step: oscillation_step(args.t, params, 1.0)?,
        rel_tol: args.tol,
        ..MomentOptions::default()
    };
    let curve = moment_divergence(density, args.delta, args.window.hi, args.decades, opts)?;
    let moment_rows: Vec<Vec<Cell>> =
        curve.cutoffs.iter().zip(&curve.partials).map(|(&b, &m)| vec![b.into(), m.into()]).collect();
    artifacts.push(out.write_csv("moments.csv", &["b", "partial_moment"], &moment_rows)?);
    let norm = rectangle_norm(&state, None)?.total();

    let class = tail_class(fit.exponent, 0.05, 0.3);
    let checks = vec![
        Check::new("tail exponent", "-2 ± 0.05", fit.exponent, (fit.exponent + 2.0).abs() <= 0.05),
        Check::new("tail fit r2", ">= 0.999", fit.r2, fit.r2 >= 0.999),
        Check::new(
            "moment verdict",
            Verdict::DivergentLog.as_str(),
            curve.verdict.as_str(),
            curve.verdict == Verdict::DivergentLog,
        ),
        Check::new("norm drift", "<= 1e-8", (norm - 1.0).abs(), (norm - 1.0).abs() <= 1e-8),
    ];
    let summary = vec![
        format!("tail exponent {:.4} (r2 {:.6}, class {class})", fit.exponent, fit.r2),
        format!("first moment: {}", curve.verdict.as_str()),
        format!("norm {norm:.12}"),
    ];
    let results = Results {
        tail: TailSummary::new(&fit, class),
        moment: MomentSummary::new(&curve),
        norm,
        norm_drift: (norm - 1.0).abs(),
    };
    finish(&out, "rectangle", args, results, checks, artifacts, summary)
}

use qcl_core::moments::tail_exponent_fit;
use qcl_core::numerics::QuadTolerance;
use qcl_core::polygon::{far_field_density, propagate_polygon, telescoping_residual, FarFieldWindow, Method, Polygon};
use qcl_core::{Complex64, PhysParams};
use serde::Serialize;

use super::{finish, logspace, require_ppd, sample};
use crate::config::{positive, tolerance, PolygonArgs};
use crate::error::Result;
use crate::families;
use crate::io::{Cell, OutDir};
use crate::report::{tail_class, Check, Outcome};
use crate::summary::TailSummary;

/// Multiples of the far-field threshold at which the oracle comparison runs.
const COMPARISON_MULTIPLES: [f64; 5] = [1.0, 2.0, 5.0, 10.0, 20.0];

struct Row {
    asym: Complex64,
    quad: Complex64,
    exact: Complex64,
    tele: f64,
}

impl Row {
    fn rel_diff(&self) -> f64 {
        let q = self.quad.norm();
        let d = (self.asym - self.quad).norm();
        if q == 0.0 && d == 0.0 {
            0.0
        } else {
            d / q
        }
    }
}

#[derive(Serialize)]
struct Results {
    continuous_at_ends: bool,
    expected_class: &'static str,
    tail: TailSummary,
    telescoping_residual: f64,
    max_asymptotic_vs_quadrature: f64,
    far_field_delta: f64,
}

/// Far-field comparison points on both sides of `[−a, 0]`.
pub fn comparison_points(poly: &Polygon, dt: f64, params: PhysParams) -> Result<Vec<f64>> {
    let ff = FarFieldWindow::for_step(dt, params)?;
    // slightly beyond the gate so rounding never lands on it
    let start = ff.delta * (1.0 + 1e-9);
    let mut ys = Vec::new();
    for m in COMPARISON_MULTIPLES {
        ys.push(-poly.a() - m * start);
        ys.push(m * start);
    }
    ys.sort_by(f64::total_cmp);
    Ok(ys)
}

pub fn run(args: &PolygonArgs) -> Result<Outcome> {
    args.common.validate()?;
    tolerance(args.tol)?;
    args.source.validate()?;
    positive("dt", args.dt)?;
    require_ppd(args.points_per_decade)?;
    let params = args.common.params()?;
    let poly = families::build(&args.source)?;
    let tol = QuadTolerance::new(args.tol)?;
    let out = OutDir::create(&args.common.out)?;
    let delta = FarFieldWindow::for_step(args.dt, params)?.delta;

    let ys = comparison_points(&poly, args.dt, params)?;
    let rows = sample(&ys, |y| {
        let asym = propagate_polygon(&poly, y, args.dt, params, Method::Asymptotic)?;
        let quad = propagate_polygon(&poly, y, args.dt, params, Method::Quadrature(tol))?;
        let exact = propagate_polygon(&poly, y, args.dt, params, Method::Exact)?;
        let tele = telescoping_residual(&poly, y, args.dt, params)?;
        Ok(Row { asym, quad, exact, tele })
    })?;
    let max_rel = rows.iter().map(Row::rel_diff).fold(0.0, f64::max);
    let max_tele = rows.iter().map(|r| r.tele).fold(0.0, f64::max);
    let table: Vec<Vec<Cell>> = ys
        .iter()
        .zip(&rows)
        .map(|(&y, r)| {
            vec![
                y.into(),
                r.asym.re.into(),
                r.asym.im.into(),
                r.quad.re.into(),
                r.quad.im.into(),
                r.exact.re.into(),
                r.exact.im.into(),
                r.rel_diff().into(),
                r.tele.into(),
            ]
        })
        .collect();
    let mut artifacts = vec![out.write_csv(
        "comparison.csv",
        &["y", "asymptotic_re", "asymptotic_im", "quadrature_re", "quadrature_im", "exact_re", "exact_im", "rel_diff", "telescoping_residual"],
        &table,
    )?];

    let grid = logspace(args.window.lo, args.window.hi, args.points_per_decade);
    let dens = sample(&grid, |y| far_field_density(&poly, y, args.dt, params))?;
    let rows: Vec<Vec<Cell>> = grid.iter().zip(&dens).map(|(&y, &d)| vec![y.into(), d.into()]).collect();
    artifacts.push(out.write_csv("density.csv", &["y", "density"], &rows)?);

    let density = |y: f64| far_field_density(&poly, y, args.dt, params).unwrap_or(f64::NAN);
    let fit = tail_exponent_fit(density, args.window.pair(), args.points_per_decade)?;
    let continuous = poly.is_continuous_at_ends();
    let (expected, target, tol_e) = if continuous { ("-6", -6.0, 0.3) } else { ("-2", -2.0, 0.05) };
    let class = tail_class(fit.exponent, 0.05, 0.3);

    let checks = vec![
        Check::new("telescoping residual", "<= 1e-12", max_tele, max_tele <= 1e-12),
        Check::new(
            "tail exponent",
            format!("{target} ± {tol_e}"),
            fit.exponent,
            (fit.exponent - target).abs() <= tol_e,
        ),
    ];
    let summary = vec![
        format!(
            "endpoints {}: tail exponent {:.4} (r2 {:.6}, class {class}, expected {expected})",
            if continuous { "vanish" } else { "jump" },
            fit.exponent,
            fit.r2
        ),
        format!("telescoping residual {max_tele:.3e}"),
        format!("asymptotic vs quadrature, max relative difference {max_rel:.3e}"),
    ];
    let results = Results {
        continuous_at_ends: continuous,
        expected_class: expected,
        tail: TailSummary::new(&fit, class),
        telescoping_residual: max_tele,
        max_asymptotic_vs_quadrature: max_rel,
        far_field_delta: delta,
    };
    finish(&out, "polygon", args, results, checks, artifacts, summary)
}

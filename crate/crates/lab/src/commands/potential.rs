use qcl_core::moments::tail_exponent_fit;
use qcl_core::polygon::{propagate_polygon, Method, Polygon};
use qcl_core::potential::{propagate_short_time_with_potential, Builtin, PhaseConvention, PotentialMethod, VALIDITY_LIMIT};
use qcl_core::PhysParams;
use serde::Serialize;

use super::{finish, logspace, require_ppd, sample};
use crate::config::{positive, PotentialArg, PotentialArgs};
use crate::error::{LabError, Result};
use crate::families;
use crate::io::{Cell, OutDir};
use crate::report::{tail_class, Check, Outcome};
use crate::summary::TailSummary;

/// Tolerances of the tail classes with a potential present.
pub const TOL_DISCONTINUOUS: f64 = 0.1;
pub const TOL_CONTINUOUS: f64 = 0.4;

#[derive(Serialize)]
struct Results {
    continuous_at_ends: bool,
    expected_class: &'static str,
    dt_times_bound: f64,
    free: TailSummary,
    standard: TailSummary,
    literal: TailSummary,
}

pub fn builtin(arg: PotentialArg) -> Builtin {
    match arg {
        PotentialArg::Gaussian => Builtin::Gaussian,
        PotentialArg::Well => Builtin::Well,
        PotentialArg::HarmonicClipped => Builtin::HarmonicClipped,
    }
}

/// Density at `y` after one step of `dt`: free (`None`) or under the
/// potential with the given phase convention.
pub fn density(
    poly: &Polygon,
    v: Builtin,
    amplitude: f64,
    refine: usize,
    dt: f64,
    params: PhysParams,
    convention: Option<PhaseConvention>,
) -> impl Fn(f64) -> qcl_core::Result<f64> + Sync + '_ {
    move |y| {
        let psi = match convention {
            None => propagate_polygon(poly, y, dt, params, Method::Exact)?,
            Some(c) => {
                let spec = v.potential(amplitude)?;
                propagate_short_time_with_potential(poly, &spec, dt, y, params, c, PotentialMethod::Resampled { refine })?
            }
        };
        Ok(psi.norm_sqr())
    }
}

pub fn run(args: &PotentialArgs) -> Result<Outcome> {
    args.common.validate()?;
    args.source.validate()?;
    positive("dt", args.dt)?;
    require_ppd(args.points_per_decade)?;
    if !args.amplitude.is_finite() {
        return Err(LabError::usage("--amplitude must be finite"));
    }
    if args.refine == 0 {
        return Err(LabError::usage("--refine must be at least 1"));
    }
    let params = args.common.params()?;
    let poly = families::build(&args.source)?;
    let v = builtin(args.potential);
    let product = args.dt * args.amplitude.abs() / params.hbar;
    if product > VALIDITY_LIMIT {
        return Err(qcl_core::Error::Validity {
            product,
            limit: VALIDITY_LIMIT,
        }
        .into());
    }
    let out = OutDir::create(&args.common.out)?;

    let variants = [None, Some(PhaseConvention::Standard), Some(PhaseConvention::Literal)];
    let grid = logspace(args.window.lo, args.window.hi, args.points_per_decade);
    let mut columns = Vec::new();
    let mut fits = Vec::new();
    for c in variants {
        let f = density(&poly, v, args.amplitude, args.refine, args.dt, params, c);
        columns.push(sample(&grid, &f)?);
        fits.push(tail_exponent_fit(|y| f(y).unwrap_or(f64::NAN), args.window.pair(), args.points_per_decade)?);
    }
    let rows: Vec<Vec<Cell>> = grid
        .iter()
        .enumerate()
        .map(|(i, &y)| vec![y.into(), columns[0][i].into(), columns[1][i].into(), columns[2][i].into()])
        .collect();
    let artifacts = vec![out.write_csv("density.csv", &["y", "free", "standard", "literal"], &rows)?];

    let continuous = poly.is_continuous_at_ends();
    let expected = if continuous { "-6" } else { "-2" };
    let class = |e: f64| tail_class(e, TOL_DISCONTINUOUS, TOL_CONTINUOUS);
    let names = ["free", "standard", "literal"];
    let mut checks = Vec::new();
    let mut summary = Vec::new();
    for (name, fit) in names.iter().zip(&fits) {
        summary.push(format!("{name}: tail exponent {:.4} (r2 {:.6}, class {})", fit.exponent, fit.r2, class(fit.exponent)));
    }
    for (name, fit) in names.iter().zip(&fits).skip(1) {
        checks.push(Check::new(
            format!("{name} tail class"),
            expected,
            class(fit.exponent),
            class(fit.exponent) == expected,
        ));
    }
    let results = Results {
        continuous_at_ends: continuous,
        expected_class: expected,
        dt_times_bound: product,
        free: TailSummary::new(&fits[0], class(fits[0].exponent)),
        standard: TailSummary::new(&fits[1], class(fits[1].exponent)),
        literal: TailSummary::new(&fits[2], class(fits[2].exponent)),
    };
    finish(&out, "potential", args, results, checks, artifacts, summary)
}

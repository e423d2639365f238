use qcl_core::numerics::{fresnel_asymptotic, fresnel_raw};
use qcl_core::stats::loglog_fit;
use serde::Serialize;

use super::finish;
use crate::config::{positive, FresnelArgs};
use crate::error::{LabError, Result};
use crate::io::{Cell, OutDir};
use crate::report::{Check, Outcome};

/// Correction-term counts tabulated.
pub const TERMS: [usize; 4] = [0, 1, 2, 3];
/// Abscissae of the slope regressions.
pub const SLOPE_POINTS: [f64; 3] = [1e2, 1e3, 1e4];

#[derive(Serialize)]
struct Slopes {
    n_terms: usize,
    relative: f64,
    absolute: f64,
}

#[derive(Serialize)]
struct Results {
    value_at_zero: [f64; 2],
    slopes: Vec<Slopes>,
    conjugate_symmetric: bool,
}

/// `|series − raw|` and the same relative to `|raw|`.
pub fn errors(x: f64, n_terms: usize) -> qcl_core::Result<(f64, f64)> {
    let raw = fresnel_raw(x)?;
    let d = (fresnel_asymptotic(x, n_terms)?.value - raw).norm();
    Ok((d, d / raw.norm()))
}

/// Fitted log-log slopes (relative, absolute) of the error over [`SLOPE_POINTS`].
pub fn slopes(n_terms: usize) -> qcl_core::Result<(f64, f64)> {
    let mut rel = Vec::new();
    let mut abs = Vec::new();
    for x in SLOPE_POINTS {
        let (a, r) = errors(x, n_terms)?;
        abs.push(a);
        rel.push(r);
    }
    Ok((loglog_fit(&SLOPE_POINTS, &rel)?.slope, loglog_fit(&SLOPE_POINTS, &abs)?.slope))
}

pub fn run(args: &FresnelArgs) -> Result<Outcome> {
    args.common.validate()?;
    positive("x_max", args.x_max)?;
    let decades = args.x_max.log10();
    if !(decades >= 4.0 && decades.fract() == 0.0 && decades <= 12.0) {
        return Err(LabError::usage("--x-max must be a power of ten between 1e4 and 1e12"));
    }
    if args.points_per_decade == 0 {
        return Err(LabError::usage("--points-per-decade must be at least 1"));
    }
    let out = OutDir::create(&args.common.out)?;

    let mut xs = vec![0.0];
    for d in 0..decades as i32 {
        for s in 0..args.points_per_decade {
            xs.push(10f64.powi(d) * 10f64.powf(s as f64 / args.points_per_decade as f64));
        }
    }
    xs.push(args.x_max);

    let mut rows = Vec::new();
    let mut all_conj = true;
    let zero = fresnel_raw(0.0)?;
    for &x in &xs {
        let raw = fresnel_raw(x)?;
        let conj_ok = fresnel_raw(-x)? == raw.conj();
        all_conj &= conj_ok;
        let mut row = vec![x.into(), raw.re.into(), raw.im.into()];
        for n in TERMS {
            row.push(if x > 0.0 { errors(x, n)?.1.into() } else { Cell::Empty });
        }
        row.push(Cell::Bool(conj_ok));
        rows.push(row);
    }
    let artifacts = vec![out.write_csv(
        "fresnel.csv",
        &["x", "raw_re", "raw_im", "rel_err_n0", "rel_err_n1", "rel_err_n2", "rel_err_n3", "conjugate_ok"],
        &rows,
    )?];

    let mut slope_list = Vec::new();
    let mut summary = Vec::new();
    for n in TERMS {
        let (relative, absolute) = slopes(n)?;
        summary.push(format!("n_terms {n}: error slope {relative:.3} relative, {absolute:.3} absolute"));
        slope_list.push(Slopes {
            n_terms: n,
            relative,
            absolute,
        });
    }
    let s2 = slope_list[2].relative;
    let checks = vec![
        Check::new("value at x = 0", "1", vec![zero.re, zero.im], zero == qcl_core::Complex64::new(1.0, 0.0)),
        Check::new("n_terms = 2 relative error slope", "<= -2.8", s2, s2 <= -2.8),
        Check::new("conjugate symmetry", "all rows", all_conj, all_conj),
    ];
    let results = Results {
        value_at_zero: [zero.re, zero.im],
        slopes: slope_list,
        conjugate_symmetric: all_conj,
    };
    finish(&out, "fresnel-check", args, results, checks, artifacts, summary)
}

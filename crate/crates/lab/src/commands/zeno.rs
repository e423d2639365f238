use qcl_core::zeno::{
    first_step, fit_leak_exponent, halving_ladder, run_protocol, ComplexField, Engine, IntervalOptions,
    MeasurementProtocol, Mode, SpectralOptions, ZenoRun, ACCOUNTING_TOLERANCE,
};
use rayon::prelude::*;
use serde::Serialize;

use super::finish;
use crate::config::{positive, EngineArg, ModeArg, ZenoArgs};
use crate::error::{LabError, Result};
use crate::io::{Artifact, Cell, OutDir};
use crate::report::{Check, Outcome};
use crate::summary::{LeakSummary, ScalingSummary};

/// Nodes of the half-sine start; the engines resample it onto their own grids.
const START_NODES: usize = 4096;
/// "Flat" tolerance of the sharp-mode verdict across the two finest rungs.
const FLAT: f64 = 1e-4;

#[derive(Serialize)]
struct RunSummary {
    mode: &'static str,
    dt: f64,
    steps: usize,
    grid: usize,
    final_survival: f64,
}

#[derive(Serialize)]
struct ModeSummary {
    mode: &'static str,
    taper_width: f64,
    ladder: Vec<[f64; 2]>,
    verdict: Option<&'static str>,
    scaling: Option<ScalingSummary>,
    leaks: Vec<LeakSummary>,
}

#[derive(Serialize)]
struct Results {
    engine: &'static str,
    runs: Vec<RunSummary>,
    modes: Vec<ModeSummary>,
    exponent_gap: Option<f64>,
}

pub(crate) fn modes(args: &ZenoArgs) -> Vec<Mode> {
    let tapered = match args.taper_width {
        Some(w) => Mode::Tapered { width: w },
        None => Mode::tapered_default(args.a),
    };
    match args.mode {
        Some(ModeArg::Sharp) => vec![Mode::Sharp],
        Some(ModeArg::Tapered) => vec![tapered],
        None => vec![Mode::Sharp, tapered],
    }
}

fn engine(arg: EngineArg) -> Engine {
    match arg {
        EngineArg::Interval => Engine::Interval(IntervalOptions::default()),
        EngineArg::Spectral => Engine::Spectral(SpectralOptions::default()),
    }
}

fn divisors(args: &ZenoArgs) -> Result<(usize, usize)> {
    let as_pow2 = |v: f64| {
        let n = v as usize;
        if n as f64 == v && n.is_power_of_two() {
            Ok(n)
        } else {
            Err(LabError::usage(format!("--ladder divisors must be powers of two, got {v}")))
        }
    };
    Ok((as_pow2(args.ladder.lo)?, as_pow2(args.ladder.hi)?))
}

/// `n` log-spaced periods across the scaling window.
fn scaling_periods(args: &ZenoArgs) -> Vec<f64> {
    let (lo, hi) = args.scaling_window.pair();
    let n = args.scaling_points;
    (0..n).map(|k| lo * (hi / lo).powf(k as f64 / (n - 1) as f64)).collect()
}

/// Tapered survival strictly increasing along the (refining) ladder.
pub fn strictly_increasing(finals: &[f64]) -> bool {
    finals.windows(2).all(|w| w[1] > w[0])
}

/// Sharp survival not creeping up toward 1: the last rung does not exceed
/// the one before by more than [`FLAT`].
pub fn not_increasing(finals: &[f64]) -> bool {
    match finals {
        [.., a, b] => b - a <= FLAT,
        _ => true,
    }
}

pub fn run(args: &ZenoArgs) -> Result<Outcome> {
    args.common.validate()?;
    positive("a", args.a)?;
    positive("horizon", args.horizon)?;
    if let Some(w) = args.taper_width {
        if !(w >= 0.0 && w < 0.5 * args.a) {
            return Err(LabError::usage("--taper-width must satisfy 0 ≤ w < a/2"));
        }
    }
    let params = args.common.params()?;
    let engine = engine(args.engine);
    let start = ComplexField::half_sine(args.a, START_NODES)?;
    let modes = modes(args);
    let out = OutDir::create(&args.common.out)?;

    let periods = match args.dt {
        Some(dt) => {
            positive("dt", dt)?;
            vec![dt]
        }
        None => {
            let (first, last) = divisors(args)?;
            halving_ladder(args.horizon, first, last)?
        }
    };
    let jobs: Vec<(Mode, f64)> = modes.iter().flat_map(|&m| periods.iter().map(move |&p| (m, p))).collect();
    let runs: Vec<ZenoRun> = jobs
        .par_iter()
        .map(|&(mode, period)| {
            let protocol = MeasurementProtocol::new(args.a, mode, period, args.horizon)?;
            run_protocol(&protocol, &start, &engine, params)
        })
        .collect::<qcl_core::Result<_>>()?;
    let mut artifacts = vec![write_survival(&out, &runs)?];

    let mut checks = Vec::new();
    let mut summary = Vec::new();
    let mut mode_summaries = Vec::new();
    let ladder_run = args.dt.is_none();
    for &mode in &modes {
        let mine: Vec<&ZenoRun> = runs.iter().filter(|r| r.protocol.mode == mode).collect();
        let ladder: Vec<[f64; 2]> = mine.iter().map(|r| [r.protocol.period, r.final_survival()]).collect();
        let finals: Vec<f64> = ladder.iter().map(|p| p[1]).collect();
        let verdict = ladder_run.then(|| match mode {
            Mode::Tapered { .. } if strictly_increasing(&finals) => "zeno",
            Mode::Sharp if not_increasing(&finals) => "no-zeno",
            Mode::Sharp => "zeno",
            Mode::Tapered { .. } => "no-zeno",
        });
        if let Some(v) = verdict {
            summary.push(format!("{}: {v} (final survival {})", mode.as_str(), fmt_list(&finals)));
            checks.push(match mode {
                Mode::Sharp => Check::new(
                    "sharp survival not increasing",
                    format!("last rung − previous ≤ {FLAT}"),
                    last_step(&finals),
                    not_increasing(&finals),
                ),
                Mode::Tapered { .. } => Check::new(
                    "tapered survival strictly increasing",
                    "every refinement raises survival",
                    finals.clone(),
                    strictly_increasing(&finals),
                ),
            });
        } else {
            for r in &mine {
                summary.push(format!(
                    "{}: dt {} → {} steps, final survival {}",
                    mode.as_str(),
                    r.protocol.period,
                    r.steps(),
                    r.final_survival()
                ));
            }
        }
        mode_summaries.push(ModeSummary {
            mode: mode.as_str(),
            taper_width: mode.width(),
            ladder,
            verdict,
            scaling: None,
            leaks: Vec::new(),
        });
    }

    let mut gap = None;
    if ladder_run {
        if args.scaling_points < 5 {
            return Err(LabError::usage("--scaling-points must be at least 5"));
        }
        let family = scaling_periods(args);
        let jobs: Vec<(Mode, f64)> = modes.iter().flat_map(|&m| family.iter().map(move |&p| (m, p))).collect();
        let leaks = jobs
            .par_iter()
            .map(|&(mode, period)| {
                let protocol = MeasurementProtocol::new(args.a, mode, period, period)?;
                Ok(LeakSummary::new(period, &first_step(&protocol, &start, &engine, params)?))
            })
            .collect::<qcl_core::Result<Vec<_>>>()?;
        artifacts.push(write_leaks(&out, &jobs, &leaks)?);
        let worst = leaks.iter().map(|l| l.accounting_gap).fold(0.0, f64::max);
        checks.push(Check::new(
            "leak accounting",
            format!("<= {ACCOUNTING_TOLERANCE:e}"),
            worst,
            worst <= ACCOUNTING_TOLERANCE,
        ));
        for (ms, chunk) in mode_summaries.iter_mut().zip(leaks.chunks(family.len())) {
            let pts: Vec<(f64, f64)> = chunk.iter().map(|l| (l.dt, l.one_minus_q)).collect();
            let fit = fit_leak_exponent(&pts)?;
            summary.push(format!("{}: first-step leak ∝ Δt^{:.3} (r2 {:.4})", ms.mode, fit.exponent, fit.r2));
            ms.scaling = Some(ScalingSummary::new(&fit));
            ms.leaks = chunk.to_vec();
        }
        if let [sharp, tapered] = &mode_summaries[..] {
            if let (Some(s), Some(t)) = (&sharp.scaling, &tapered.scaling) {
                let g = t.exponent - s.exponent;
                gap = Some(g);
                let ok = g >= 1.0 && s.r2 >= 0.99 && t.r2 >= 0.99;
                summary.push(format!("exponent gap (tapered − sharp) {g:.3}"));
                checks.push(Check::new(
                    "leak exponent gap",
                    ">= 1 with both r2 >= 0.99",
                    vec![g, s.r2, t.r2],
                    ok,
                ));
            }
        }
    }

    let results = Results {
        engine: match args.engine {
            EngineArg::Interval => "interval",
            EngineArg::Spectral => "spectral",
        },
        runs: runs
            .iter()
            .map(|r| RunSummary {
                mode: r.protocol.mode.as_str(),
                dt: r.protocol.period,
                steps: r.steps(),
                grid: r.grid,
                final_survival: r.final_survival(),
            })
            .collect(),
        modes: mode_summaries,
        exponent_gap: gap,
    };
    finish(&out, "zeno", args, results, checks, artifacts, summary)
}

fn last_step(finals: &[f64]) -> f64 {
    match finals {
        [.., a, b] => b - a,
        _ => 0.0,
    }
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(", ")
}

fn write_survival(out: &OutDir, runs: &[ZenoRun]) -> Result<Artifact> {
    let mut rows = Vec::new();
    for r in runs {
        let dt = r.protocol.period;
        for (k, (&q, &c)) in r.survivals.iter().zip(&r.cumulative).enumerate() {
            rows.push(vec![
                Cell::Text(r.protocol.mode.as_str()),
                dt.into(),
                (k + 1).into(),
                ((k + 1) as f64 * dt).into(),
                q.into(),
                c.into(),
            ]);
        }
    }
    out.write_csv("survival.csv", &["mode", "dt", "step", "t", "q", "cumulative"], &rows)
}

fn write_leaks(out: &OutDir, jobs: &[(Mode, f64)], leaks: &[LeakSummary]) -> Result<Artifact> {
    let rows: Vec<Vec<Cell>> = jobs
        .iter()
        .zip(leaks)
        .map(|(&(mode, _), l)| {
            vec![
                Cell::Text(mode.as_str()),
                l.dt.into(),
                l.one_minus_q.into(),
                l.exterior.into(),
                l.exterior_direct.into(),
                l.accounting_gap.into(),
                l.window_shave.into(),
                l.far_field.into(),
                l.boundary_layer.into(),
            ]
        })
        .collect();
    out.write_csv(
        "leak.csv",
        &["mode", "dt", "one_minus_q", "exterior", "exterior_direct", "accounting_gap", "window_shave", "far_field", "boundary_layer"],
        &rows,
    )
}

//! One module per subcommand. Each validates its arguments, computes, writes
//! its CSV artifacts and finally a `<command>.json` report listing their hashes.

use rayon::prelude::*;
use serde::Serialize;

use crate::config::Command;
use crate::error::{LabError, Result};
use crate::io::{Artifact, OutDir};
use crate::report::{status, Check, Outcome, Report};

pub mod fresnel;
pub mod moments;
pub mod polygon;
pub mod potential;
pub mod rectangle;
pub mod zeno;

pub fn run(command: &Command) -> Result<Outcome> {
    match command {
        Command::Rectangle(a) => rectangle::run(a),
        Command::Polygon(a) => polygon::run(a),
        Command::Zeno(a) => zeno::run(a),
        Command::Potential(a) => potential::run(a),
        Command::FresnelCheck(a) => fresnel::run(a),
        Command::Moments(a) => moments::run(a),
    }
}

/// `lo·(hi/lo)^{k/n}` for `k = 0..=n`, `n = ⌈decades·points_per_decade⌉`.
pub fn logspace(lo: f64, hi: f64, points_per_decade: usize) -> Vec<f64> {
    let n = (((hi / lo).log10() * points_per_decade as f64).ceil() as usize).max(1);
    (0..=n)
        .map(|k| if k == n { hi } else { lo * (hi / lo).powf(k as f64 / n as f64) })
        .collect()
}

/// Evaluate `f` at every point in parallel, keeping order; the first error wins.
pub fn sample<T: Send>(points: &[f64], f: impl Fn(f64) -> qcl_core::Result<T> + Sync) -> Result<Vec<T>> {
    Ok(points.par_iter().map(|&y| f(y)).collect::<qcl_core::Result<Vec<T>>>()?)
}

pub(crate) fn require_ppd(ppd: usize) -> Result<()> {
    if ppd < 2 {
        return Err(LabError::usage("--points-per-decade must be at least 2"));
    }
    Ok(())
}

/// Write the report and assemble the outcome.
pub(crate) fn finish<C: Serialize, R: Serialize>(
    out: &OutDir,
    command: &'static str,
    config: &C,
    results: R,
    checks: Vec<Check>,
    mut artifacts: Vec<Artifact>,
    summary: Vec<String>,
) -> Result<Outcome> {
    let report = Report {
        tool: "qcl",
        version: env!("CARGO_PKG_VERSION"),
        command,
        config,
        results,
        checks: &checks,
        status: status(&checks),
        artifacts: &artifacts,
    };
    artifacts.push(out.write_json(&format!("{command}.json"), &report)?);
    Ok(Outcome {
        command,
        checks,
        summary,
        artifacts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn logspace_hits_both_ends() {
        let v = logspace(1e2, 1e4, 4);
        assert_eq!(v.len(), 9);
        assert_eq!(v[0], 1e2);
        assert_eq!(v[8], 1e4);
        assert!(v.windows(2).all(|w| w[1] > w[0]));
    }
}

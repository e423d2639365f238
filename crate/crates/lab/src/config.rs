//! Command-line configuration.
//!
//! Every subcommand struct is also the config echo written into its JSON
//! report, so field names here are part of the report format.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qcl_core::PhysParams;
use serde::{Serialize, Serializer};

use crate::error::{LabError, Result};

#[derive(Debug, Parser)]
#[command(name = "qcl", version, about = "Free propagation of truncated wave functions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exactly solvable rectangle: density tail and first-moment divergence.
    Rectangle(RectangleArgs),
    /// Piecewise-linear initial data: boundary formula, oracle comparison, tail class.
    Polygon(PolygonArgs),
    /// Repeated sharp vs tapered truncation on a Δt ladder.
    Zeno(ZenoArgs),
    /// Short-time step with a bounded potential: tail class invariance.
    Potential(PotentialArgs),
    /// Error table of the large-x Fresnel series.
    FresnelCheck(FresnelArgs),
    /// Position and momentum first moments of a polygon state.
    Moments(MomentsArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Rectangle(_) => "rectangle",
            Command::Polygon(_) => "polygon",
            Command::Zeno(_) => "zeno",
            Command::Potential(_) => "potential",
            Command::FresnelCheck(_) => "fresnel-check",
            Command::Moments(_) => "moments",
        }
    }
}

/// Options shared by every subcommand.
#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Artifact directory (created if missing).
    #[arg(long, default_value = "qcl-out")]
    #[serde(skip)]
    pub out: PathBuf,
    /// Particle mass.
    #[arg(long, default_value_t = 1.0)]
    pub mass: f64,
    #[arg(long, default_value_t = 1.0)]
    pub hbar: f64,
}

impl Common {
    pub fn params(&self) -> Result<PhysParams> {
        Ok(PhysParams::new(self.mass, self.hbar)?)
    }

    pub fn validate(&self) -> Result<()> {
        positive("mass", self.mass)?;
        positive("hbar", self.hbar)
    }
}

/// `lo:hi` with `0 < lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
}

impl Window {
    pub fn pair(self) -> (f64, f64) {
        (self.lo, self.hi)
    }
}

impl FromStr for Window {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (lo, hi) = s.split_once(':').ok_or("expected lo:hi")?;
        let lo: f64 = lo.trim().parse().map_err(|e| format!("lower bound: {e}"))?;
        let hi: f64 = hi.trim().parse().map_err(|e| format!("upper bound: {e}"))?;
        if !(lo > 0.0 && hi.is_finite() && lo < hi) {
            return Err("need 0 < lo < hi".into());
        }
        Ok(Self { lo, hi })
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.lo, self.hi)
    }
}

impl Serialize for Window {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.lo, self.hi].serialize(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShapeArg {
    Constant,
    Ramp,
    HalfSine,
    /// Seeded random vertex values.
    Random,
}

/// Endpoint treatment of `--shape random`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EndsArg {
    /// Nonzero values at both ends (discontinuous at the support edges).
    Free,
    /// Both end values zero (continuous).
    Zero,
}

/// Initial polygon selection shared by the polygon-based subcommands.
#[derive(Debug, Clone, Args, Serialize)]
pub struct PolygonSource {
    /// Support width: the state lives on [−a, 0].
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    #[arg(long = "n-segments", default_value_t = 128)]
    pub n_segments: usize,
    #[arg(long, value_enum, default_value_t = ShapeArg::Constant)]
    pub shape: ShapeArg,
    #[arg(long, value_enum, default_value_t = EndsArg::Free)]
    pub ends: EndsArg,
    /// Seed of `--shape random`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV of uniform samples on [−a, 0] with header `x,re,im`; overrides the shape.
    #[arg(long)]
    pub samples: Option<PathBuf>,
}

impl PolygonSource {
    pub fn validate(&self) -> Result<()> {
        positive("a", self.a)?;
        if self.n_segments == 0 {
            return Err(LabError::usage("--n-segments must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RectangleArgs {
    /// Propagation time.
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    /// Tail-fit window in y; its upper end is also the largest moment cutoff.
    #[arg(long, default_value = "1e2:1e4")]
    pub window: Window,
    #[arg(long, default_value_t = 200)]
    pub points_per_decade: usize,
    /// Inner cutoff of the moment integral.
    #[arg(long, default_value_t = 1.0)]
    pub delta: f64,
    #[arg(long, default_value_t = 3)]
    pub decades: usize,
    /// Relative tolerance of the adaptive quadratures.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PolygonArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: PolygonSource,
    /// Time step of the single propagation.
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    #[arg(long, default_value = "1e2:1e4")]
    pub window: Window,
    #[arg(long, default_value_t = 200)]
    pub points_per_decade: usize,
    /// Relative tolerance of the adaptive quadratures.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    Sharp,
    Tapered,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EngineArg {
    /// Exact kernel restricted to the interval.
    Interval,
    /// Fourier multiplier on a padded periodic box.
    Spectral,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ZenoArgs {
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    /// Total protocol time T.
    #[arg(long, default_value_t = 0.5)]
    pub horizon: f64,
    /// Run a single period instead of the ladder; T/Δt must be an integer.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Restrict to one projection mode (default: both).
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Taper width w of the tapered mode (default a/8; 0 is the sharp window).
    #[arg(long)]
    pub taper_width: Option<f64>,
    /// Ladder divisors: periods T/first … T/last (powers of two).
    #[arg(long, default_value = "8:256")]
    pub ladder: Window,
    /// Range of periods for the first-step leak fit.
    #[arg(long, default_value = "2e-4:2e-2")]
    pub scaling_window: Window,
    #[arg(long, default_value_t = 5)]
    pub scaling_points: usize,
    #[arg(long, value_enum, default_value_t = EngineArg::Interval)]
    pub engine: EngineArg,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PotentialArg {
    Gaussian,
    Well,
    HarmonicClipped,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PotentialArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: PolygonSource,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    #[arg(long, default_value = "1e2:1e4")]
    pub window: Window,
    #[arg(long, value_enum, default_value_t = PotentialArg::Gaussian)]
    pub potential: PotentialArg,
    /// Potential amplitude V₀; Δt·|V₀|/ħ must not exceed 0.1.
    #[arg(long, default_value_t = 50.0)]
    pub amplitude: f64,
    /// Sub-segments per segment when resampling the phase-modulated state.
    #[arg(long, default_value_t = 8)]
    pub refine: usize,
    #[arg(long, default_value_t = 200)]
    pub points_per_decade: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FresnelArgs {
    /// Largest x of the table (a power of ten).
    #[arg(long, default_value_t = 1e4)]
    pub x_max: f64,
    #[arg(long, default_value_t = 4)]
    pub points_per_decade: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MomentsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: PolygonSource,
    #[arg(long, default_value_t = 0.1)]
    pub dt: f64,
    /// Inner cutoff of the position moment (default max(1, 10√(ħΔt/m))).
    #[arg(long)]
    pub delta: Option<f64>,
    /// Largest cutoff, for both position and momentum.
    #[arg(long, default_value_t = 1e4)]
    pub b_max: f64,
    #[arg(long, default_value_t = 3)]
    pub decades: usize,
    /// Inner cutoff of the momentum moment.
    #[arg(long, default_value_t = 10.0)]
    pub p_delta: f64,
    /// Relative tolerance of the adaptive quadratures.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

pub(crate) fn tolerance(tol: f64) -> Result<()> {
    if tol > 0.0 && tol < 1.0 {
        Ok(())
    } else {
        Err(LabError::usage(format!("--tol must lie in (0, 1), got {tol}")))
    }
}

pub(crate) fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(LabError::usage(format!("--{} must be positive and finite, got {v}", name.replace('_', "-"))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_parses() {
        assert_eq!("1e2:1e4".parse::<Window>().unwrap(), Window { lo: 100.0, hi: 1e4 });
        assert!("1e4:1e2".parse::<Window>().is_err());
        assert!("0:1".parse::<Window>().is_err());
        assert!("12".parse::<Window>().is_err());
    }

    #[test]
    fn cli_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}

//! Command-line flags and their parsing into library types.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hahn_paths::bulk::LimitRegime;
use hahn_paths::combinatorics::DEFAULT_ENUMERATION_CAP;
use hahn_paths::kernel::Point;
use hahn_paths::{ModelParams, NumericBackend};
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};

/// Environment variable overriding the enumeration cap.
pub const CAP_ENV: &str = "HAHN_PATHS_CAP";

#[derive(Parser, Debug)]
#[command(name = "hahn-paths", version, about = "Exact and asymptotic tools for non-intersecting paths in a hexagon")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Brute-force enumeration: family count, slice marginals, query probabilities.
    Enumerate(EnumerateArgs),
    /// Kernel values on a grid and correlation determinants.
    Kernel(KernelArgs),
    /// Exact random sampling of path families.
    Sample(SampleArgs),
    /// Bulk-limit parameters, sine-kernel tables and convergence probes.
    Limit(LimitArgs),
    /// SVG picture of a sampled trajectory.
    Render(RenderArgs),
}

#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    /// Path model as `N,S,T`.
    #[arg(long, value_name = "N,S,T", conflicts_with = "hexagon")]
    pub model: Option<String>,
    /// Hexagon sides `a,b,c`, read as `N = a, S = b, T = b + c`.
    #[arg(long, value_name = "a,b,c")]
    pub hexagon: Option<String>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Float,
}

impl Mode {
    pub fn backend(self) -> NumericBackend {
        match self {
            Mode::Exact => NumericBackend::Exact,
            Mode::Float => NumericBackend::float(),
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Style {
    Paths,
    Surface,
    Rhombi,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Output file, written atomically; stdout when absent.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Args, Debug)]
pub struct EnumerateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: Mode,
    /// Space-time points `x:t,x:t,...`.
    #[arg(long, allow_hyphen_values = true)]
    pub query: Option<String>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct KernelArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: Mode,
    /// Space-time points `x:t,...`; the kernel is restricted to them and
    /// their correlation is reported.
    #[arg(long, allow_hyphen_values = true)]
    pub query: Option<String>,
    /// Static kernel on the support of this time slice.
    #[arg(long, conflicts_with = "query")]
    pub time: Option<i64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: Mode,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub samples: usize,
    /// Trajectory file.
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
    /// Summary file; stdout when absent.
    #[arg(long, value_name = "PATH")]
    pub summary: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Args, Debug)]
pub struct LimitArgs {
    /// Macroscopic point `N,S,T,t,x`.
    #[arg(long)]
    pub regime: String,
    /// Scales for the convergence probe, e.g. `20,40,80`.
    #[arg(long)]
    pub rhos: Option<String>,
    /// Offsets `dx:dt,...`; defaults to `|dx| <= 3, |dt| <= 2`.
    #[arg(long, allow_hyphen_values = true)]
    pub offsets: Option<String>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct RenderArgs {
    /// Optional check against the model recorded in the trajectory file.
    #[command(flatten)]
    pub model: ModelArgs,
    /// Trajectory file written by `sample`.
    #[arg(long, value_name = "PATH")]
    pub trajectory: PathBuf,
    /// Which trajectory of the file to draw.
    #[arg(long, default_value_t = 0)]
    pub index: usize,
    #[arg(long, value_enum, default_value = "rhombi")]
    pub style: Style,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Where a model came from, for echoing in reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelSource {
    Model,
    Hexagon,
}

#[derive(Debug, Clone, Copy)]
pub struct ResolvedModel {
    pub params: ModelParams,
    pub source: ModelSource,
}

impl ResolvedModel {
    pub fn to_json(self) -> Value {
        let m = self.params;
        json!({
            "paths": m.paths,
            "rise": m.rise,
            "horizon": m.horizon,
            "hexagon": [m.paths, m.rise, m.horizon - m.rise],
            "given_as": match self.source {
                ModelSource::Model => "model",
                ModelSource::Hexagon => "hexagon",
            },
        })
    }
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> CliResult<Vec<T>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| CliError::input(format!("malformed {what} entry {p:?} in {s:?}")))
        })
        .collect()
}

fn parse_triple(s: &str, what: &str) -> CliResult<[usize; 3]> {
    let v: Vec<usize> = parse_list(s, what)?;
    v.try_into()
        .map_err(|_| CliError::input(format!("{what} needs three comma-separated integers, got {s:?}")))
}

impl ModelArgs {
    pub fn resolve(&self) -> CliResult<Option<ResolvedModel>> {
        let resolved = match (&self.model, &self.hexagon) {
            (Some(s), None) => {
                let [n, s, t] = parse_triple(s, "--model")?;
                ResolvedModel {
                    params: ModelParams::new(n, s, t)?,
                    source: ModelSource::Model,
                }
            }
            (None, Some(h)) => {
                let [a, b, c] = parse_triple(h, "--hexagon")?;
                ResolvedModel {
                    params: ModelParams::from_hexagon(a, b, c)?,
                    source: ModelSource::Hexagon,
                }
            }
            (None, None) => return Ok(None),
            (Some(_), Some(_)) => return Err(CliError::input("give only one of --model and --hexagon")),
        };
        Ok(Some(resolved))
    }

    pub fn require(&self) -> CliResult<ResolvedModel> {
        self.resolve()?
            .ok_or_else(|| CliError::input("one of --model N,S,T or --hexagon a,b,c is required"))
    }
}

/// Pairs `a:b,a:b,...`.
pub fn parse_pairs(s: &str, what: &str) -> CliResult<Vec<(i64, i64)>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|p| {
            let bad = || CliError::input(format!("malformed {what} entry {p:?}; expected a:b"));
            let (a, b) = p.trim().split_once(':').ok_or_else(bad)?;
            Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
        })
        .collect()
}

pub fn parse_query(s: &str) -> CliResult<Vec<Point>> {
    parse_pairs(s, "--query")
}

pub fn parse_regime(s: &str) -> CliResult<LimitRegime> {
    let v: Vec<f64> = parse_list(s, "--regime")?;
    let [n, s_, t_big, t, x]: [f64; 5] = v
        .try_into()
        .map_err(|_| CliError::input(format!("--regime needs five numbers N,S,T,t,x, got {s:?}")))?;
    Ok(LimitRegime::new(n, s_, t_big, t, x)?)
}

pub fn parse_rhos(s: &str) -> CliResult<Vec<f64>> {
    let v: Vec<f64> = parse_list(s, "--rhos")?;
    if v.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(CliError::input(format!("scales must be positive, got {s:?}")));
    }
    Ok(v)
}

pub fn default_offsets() -> Vec<(i64, i64)> {
    (-2..=2).flat_map(|dt| (-3..=3).map(move |dx| (dx, dt))).collect()
}

/// Enumeration cap from the environment, or the library default.
pub fn enumeration_cap() -> CliResult<u64> {
    match std::env::var(CAP_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::input(format!("{CAP_ENV} must be a non-negative integer, got {v:?}"))),
        Err(std::env::VarError::NotPresent) => Ok(DEFAULT_ENUMERATION_CAP),
        Err(e) => Err(CliError::input(format!("{CAP_ENV}: {e}"))),
    }
}

/// Rejects formats a command cannot produce.
pub fn check_format(format: Option<Format>, allowed: &[Format], command: &str) -> CliResult<Format> {
    let f = format.unwrap_or(allowed[0]);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        Err(CliError::input(format!("{command} cannot write {f:?} output")))
    }
}
